"""Per-object ground truth extracted from instance-labeled rasters.

Size categories partition object areas: XS below 22.5^2 pixels, M strictly
above 32^2 pixels, S the closed band in between.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .masks import BinaryMask, mask_from_intervals
from .raster import RasterImage

XS_MAX_AREA = 22.5**2  # exclusive upper bound for XS
S_MAX_AREA = 32**2  # inclusive upper bound for S


class SizeCategory(Enum):
    XS = "XS"
    S = "S"
    M = "M"


def size_category(area: int) -> SizeCategory:
    """Map a positive pixel area to its size category."""
    if area < 1:
        raise ValueError(f"degenerate annotation with area {area}")
    if area < XS_MAX_AREA:
        return SizeCategory.XS
    if area <= S_MAX_AREA:
        return SizeCategory.S
    return SizeCategory.M


@dataclass(eq=False)
class InstanceMap:
    """Grid of instance ids, 0 = background; ids need not be contiguous."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        lab = np.asarray(self.labels)
        if lab.ndim != 2 or lab.size == 0:
            raise ValueError("labels must be a non-empty 2-d grid")
        if lab.dtype != np.uint16:
            if np.issubdtype(lab.dtype, np.integer) and lab.min() >= 0 and lab.max() <= 0xFFFF:
                lab = lab.astype(np.uint16)
            else:
                raise ValueError("labels must be 16-bit unsigned instance ids")
        self.labels = np.ascontiguousarray(lab)

    @property
    def width(self) -> int:
        return int(self.labels.shape[1])

    @property
    def height(self) -> int:
        return int(self.labels.shape[0])


@dataclass
class GroundTruthObject:
    instance_id: int
    mask: BinaryMask
    area: int
    category: SizeCategory

    @classmethod
    def from_mask(cls, instance_id: int, mask: BinaryMask) -> "GroundTruthObject":
        area = mask.area
        return cls(instance_id, mask, area, size_category(area))


def extract_instances(imap: InstanceMap) -> list[GroundTruthObject]:
    """One object per distinct nonzero id, sorted by id ascending."""
    flat = imap.labels.ravel()
    positions = np.flatnonzero(flat)
    if positions.size == 0:
        return []
    ids = flat[positions]
    order = np.argsort(ids, kind="stable")
    ids = ids[order]
    positions = positions[order]
    breaks = np.flatnonzero(np.diff(ids.astype(np.int64))) + 1
    out = []
    for group in np.split(positions, breaks):
        mask = _mask_from_positions(imap.width, imap.height, group)
        out.append(GroundTruthObject.from_mask(int(flat[group[0]]), mask))
    return out


def _mask_from_positions(width: int, height: int, positions: np.ndarray) -> BinaryMask:
    """Mask from sorted flat pixel positions; consecutive positions form runs."""
    gaps = np.flatnonzero(np.diff(positions) > 1)
    starts = positions[np.concatenate(([0], gaps + 1))]
    stops = positions[np.concatenate((gaps, [positions.size - 1]))] + 1
    return mask_from_intervals(width, height, zip(starts.tolist(), stops.tolist()))


def instance_map_from_raster(image: RasterImage) -> InstanceMap:
    """Interpret a 16-bit gray raster as instance ids."""
    if image.channels != 1 or image.depth != 16:
        raise ValueError("instance maps are 16-bit gray rasters")
    return InstanceMap(image.pixels)


def instance_map_to_raster(imap: InstanceMap) -> RasterImage:
    return RasterImage(imap.labels, 16)
