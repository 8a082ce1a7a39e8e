"""End-to-end proposal generation: per-tile detection, remapping, NMS, top-K.

Tiles are independent work units; the merge, suppression, ranking, and
truncation steps are a deterministic sequential reduction, so output never
depends on tile completion order. Whole-image mode is the degenerate one-tile
grid, which makes the two paths bit-compatible by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence, Union

from .annotations import GroundTruthObject
from .detector import DetectorProfile, Proposal, simulate
from .exchange import ProposalRecord
from .masks import BBox, crop_mask, mask_iou
from .synth import Scene
from .tiling import Tile, TileGridSpec, plan_grid, remap_mask

ProposalSource = Union[DetectorProfile, Sequence[ProposalRecord]]


@dataclass
class PipelineConfig:
    detector: ProposalSource
    grid: TileGridSpec | None = None  # None = whole-image mode
    nms_iou: float = 0.7
    top_k: int = 100

    def __post_init__(self) -> None:
        if not 0.0 < self.nms_iou <= 1.0:
            raise ValueError("nms_iou must lie in (0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be at least 1")


def nms(proposals: Sequence[Proposal], iou_threshold: float) -> list[Proposal]:
    """Greedy suppression: keep a proposal iff IoU < threshold with all kept.

    Candidates are visited by objectness descending, ties broken by mask area
    descending, then insertion order; output retains that order.
    """
    order = sorted(
        range(len(proposals)),
        key=lambda i: (-proposals[i].objectness, -proposals[i].mask.area, i),
    )
    kept: list[Proposal] = []
    for i in order:
        cand = proposals[i]
        if all(mask_iou(cand.mask, k.mask) < iou_threshold for k in kept):
            kept.append(cand)
    return kept


def _tile_gt(objects: Sequence[GroundTruthObject], tile: Tile) -> list[GroundTruthObject]:
    """Ground truth visible inside a tile, in tile-local coordinates."""
    tile_box = BBox(tile.x0, tile.y0, tile.w, tile.h)
    out = []
    for obj in objects:
        if not obj.mask.bbox.intersects(tile_box):
            continue
        local = crop_mask(obj.mask, tile.x0, tile.y0, tile.w, tile.h)
        if local.area == 0:
            continue
        out.append(GroundTruthObject.from_mask(obj.instance_id, local))
    return out


def _simulated_proposals(
    scene: Scene, tiles: list[Tile], profile: DetectorProfile
) -> list[Proposal]:
    out = []
    for tile in tiles:
        local_gt = _tile_gt(scene.objects, tile)
        for p in simulate(profile, tile.w, tile.h, local_gt, origin=(tile.x0, tile.y0)):
            out.append(Proposal(remap_mask(tile, p.mask, scene.width, scene.height), p.objectness))
    return out


def _record_proposals(
    scene: Scene, tiles: list[Tile], records: Sequence[ProposalRecord]
) -> list[Proposal]:
    out = []
    for rec in records:
        if rec.tile_index is None:
            if rec.width != scene.width or rec.height != scene.height:
                raise ValueError(
                    f"whole-image record is {rec.width}x{rec.height}, "
                    f"image is {scene.width}x{scene.height}"
                )
            mask = rec.mask()
        else:
            if not 0 <= rec.tile_index < len(tiles):
                raise ValueError(
                    f"unknown tile_index {rec.tile_index}; grid has {len(tiles)} tiles"
                )
            tile = tiles[rec.tile_index]
            if rec.width != tile.w or rec.height != tile.h:
                raise ValueError(
                    f"tile record is {rec.width}x{rec.height}, tile is {tile.w}x{tile.h}"
                )
            mask = remap_mask(tile, rec.mask(), scene.width, scene.height)
        if mask.area == 0:
            raise ValueError("proposal record with an empty mask")
        out.append(Proposal(mask, rec.objectness))
    return out


def run_tiled(scene: Scene, config: PipelineConfig) -> list[Proposal]:
    """Tile the scene, collect per-tile proposals, merge, suppress, truncate."""
    if config.grid is None:
        raise ValueError("tiled run requires a grid spec")
    tiles = plan_grid(scene.width, scene.height, config.grid)
    if isinstance(config.detector, DetectorProfile):
        raw = _simulated_proposals(scene, tiles, config.detector)
    else:
        raw = _record_proposals(scene, tiles, config.detector)
    kept = nms(raw, config.nms_iou)
    return kept[: config.top_k]


def run_whole(scene: Scene, config: PipelineConfig) -> list[Proposal]:
    """Single-region run: the degenerate one-tile grid over the full image."""
    whole = TileGridSpec(scene.width, scene.height, scene.width, scene.height)
    return run_tiled(scene, replace(config, grid=whole))
