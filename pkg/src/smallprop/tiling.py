"""Overlapping tile grids: planning, image cropping, and coordinate remapping.

Grids place tile origins every stride pixels starting at 0; the final row and
column are clamped so the last tile ends exactly at the image border, which
guarantees full coverage without padding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .masks import BinaryMask, embed_mask
from .raster import RasterImage


@dataclass(eq=True)
class TileGridSpec:
    tile_w: int
    tile_h: int
    stride_x: int
    stride_y: int

    def __post_init__(self) -> None:
        if self.tile_w < 1 or self.tile_h < 1:
            raise ValueError("tile dimensions must be positive")
        if self.stride_x < 1 or self.stride_y < 1:
            raise ValueError("strides must be positive")
        # strides above the tile size would leave uncovered gaps between tiles
        if self.stride_x > self.tile_w or self.stride_y > self.tile_h:
            raise ValueError("strides must not exceed the tile size")


@dataclass(eq=True)
class Tile:
    index: int
    x0: int
    y0: int
    w: int
    h: int


def _origins(extent: int, tile: int, stride: int) -> list[int]:
    last = extent - tile
    out = list(range(0, last + 1, stride))
    if out[-1] != last:
        out.append(last)
    return out


def plan_grid(img_w: int, img_h: int, spec: TileGridSpec) -> list[Tile]:
    """Row-major list of tiles covering every pixel of the image."""
    if spec.tile_w > img_w or spec.tile_h > img_h:
        raise ValueError(
            f"tile {spec.tile_w}x{spec.tile_h} larger than image {img_w}x{img_h}"
        )
    xs = _origins(img_w, spec.tile_w, spec.stride_x)
    ys = _origins(img_h, spec.tile_h, spec.stride_y)
    tiles = []
    index = 0
    for y in ys:
        for x in xs:
            tiles.append(Tile(index, x, y, spec.tile_w, spec.tile_h))
            index += 1
    return tiles


def crop(image: RasterImage, tile: Tile) -> RasterImage:
    """Exact pixel copy of the tile region."""
    if tile.x0 < 0 or tile.y0 < 0 or tile.x0 + tile.w > image.width or tile.y0 + tile.h > image.height:
        raise ValueError("tile outside the image")
    region = image.pixels[tile.y0 : tile.y0 + tile.h, tile.x0 : tile.x0 + tile.w]
    return RasterImage(region.copy(), image.depth)


def remap_mask(tile: Tile, local: BinaryMask, img_w: int, img_h: int) -> BinaryMask:
    """Translate a tile-local mask onto the full image canvas."""
    if local.width != tile.w or local.height != tile.h:
        raise ValueError(
            f"local mask is {local.width}x{local.height}, tile is {tile.w}x{tile.h}"
        )
    return embed_mask(local, tile.x0, tile.y0, img_w, img_h)


def verify_coverage(img_w: int, img_h: int, tiles: list[Tile]) -> bool:
    """True iff every image pixel lies inside at least one tile."""
    covered = np.zeros((img_h, img_w), dtype=bool)
    for t in tiles:
        x0 = max(t.x0, 0)
        y0 = max(t.y0, 0)
        x1 = min(t.x0 + t.w, img_w)
        y1 = min(t.y0 + t.h, img_h)
        if x0 < x1 and y0 < y1:
            covered[y0:y1, x0:x1] = True
    return bool(covered.all())
