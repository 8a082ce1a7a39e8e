"""Average Recall evaluation: matching, AR at proposal budgets, reports.

Matching is greedy one-to-one by IoU descending. Recall is pooled over all
ground truth in the dataset (not averaged per image), evaluated at the ten
IoU thresholds 0.50, 0.55, ..., 0.95; AR is the mean of the ten recalls.
Size-stratified AR restricts the ground-truth set to one category while the
proposal set stays unrestricted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .annotations import GroundTruthObject, SizeCategory
from .detector import Proposal
from .masks import mask_iou, rle_decode
from .raster import RasterImage

IOU_THRESHOLDS = tuple(t / 100 for t in range(50, 100, 5))
BUDGETS = (10, 100)

# fill/contour palette for matched objects; pure red is reserved for misses
_PALETTE = (
    (255, 230, 0),
    (0, 200, 255),
    (255, 0, 255),
    (0, 255, 128),
    (255, 140, 0),
    (150, 60, 255),
    (0, 255, 255),
    (255, 255, 255),
)
_MISS_COLOR = (255, 0, 0)


@dataclass(eq=True)
class Assignment:
    """One-to-one pairs (gt instance_id, proposal index, iou)."""

    pairs: tuple[tuple[int, int, float], ...]

    def iou_by_gt(self) -> dict[int, float]:
        return {gid: iou for gid, _, iou in self.pairs}

    def proposal_by_gt(self) -> dict[int, int]:
        return {gid: pi for gid, pi, _ in self.pairs}


@dataclass
class ARReport:
    system: str
    ar_at_10: float | None
    ar_at_100: float | None
    ar_xs_at_100: float | None
    ar_s_at_100: float | None
    ar_m_at_100: float | None
    gt_counts: dict[str, int]


def _iou_pairs(
    gt: Sequence[GroundTruthObject], proposals: Sequence[Proposal]
) -> list[tuple[float, int, int]]:
    """All positive-IoU pairs sorted by IoU desc, then gt id, then index."""
    pairs = []
    for g in gt:
        for pi, p in enumerate(proposals):
            iou = mask_iou(g.mask, p.mask)
            if iou > 0.0:
                pairs.append((iou, g.instance_id, pi))
    pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
    return pairs


def _greedy(pairs) -> list[tuple[int, int, float]]:
    taken_gt: set[int] = set()
    taken_prop: set[int] = set()
    out = []
    for iou, gid, pi in pairs:
        if gid in taken_gt or pi in taken_prop:
            continue
        taken_gt.add(gid)
        taken_prop.add(pi)
        out.append((gid, pi, iou))
    return out


def match(gt: Sequence[GroundTruthObject], proposals: Sequence[Proposal]) -> Assignment:
    """Greedily assign proposals to ground truth; zero-IoU pairs never match.

    Proposals are expected to be truncated to the evaluation budget already.
    """
    return Assignment(tuple(_greedy(_iou_pairs(gt, proposals))))


def average_recall(gt: Sequence[GroundTruthObject], assignment: Assignment) -> float:
    """Mean recall over the ten IoU thresholds for a single image."""
    if not gt:
        raise ValueError("average recall is undefined for empty ground truth")
    ious = assignment.iou_by_gt()
    recalls = [
        sum(1 for g in gt if ious.get(g.instance_id, 0.0) >= t) / len(gt)
        for t in IOU_THRESHOLDS
    ]
    return sum(recalls) / len(IOU_THRESHOLDS)


def _pooled_ar(per_image, budget: int, category: SizeCategory | None) -> tuple[float | None, int]:
    """Dataset-pooled AR for one budget and optional category restriction."""
    total_gt = 0
    matched_ious: list[float] = []
    for gt, pairs in per_image:
        if category is None:
            sel = gt
        else:
            sel = [g for g in gt if g.category == category]
        total_gt += len(sel)
        if not sel:
            continue
        allowed = {g.instance_id for g in sel}
        sub = [p for p in pairs if p[2] < budget and p[1] in allowed]
        matched_ious.extend(iou for _, _, iou in _greedy(sub))
    if total_gt == 0:
        return None, 0
    recalls = [
        sum(1 for v in matched_ious if v >= t) / total_gt for t in IOU_THRESHOLDS
    ]
    return sum(recalls) / len(IOU_THRESHOLDS), total_gt


def evaluate_dataset(per_image, system: str = "run") -> ARReport:
    """Dataset-level AR report over (gt, ranked proposals) pairs per image.

    Proposals are sorted by objectness descending (stable) and truncated to
    each budget before matching; category cells with zero ground truth are
    reported as absent rather than zero.
    """
    prepared = []
    for gt, proposals in per_image:
        ranked = sorted(
            proposals, key=lambda p: -p.objectness
        )[: max(BUDGETS)]
        prepared.append((list(gt), _iou_pairs(gt, ranked)))
    ar10, _ = _pooled_ar(prepared, 10, None)
    ar100, _ = _pooled_ar(prepared, 100, None)
    by_cat = {}
    counts = {}
    for cat in SizeCategory:
        ar, n = _pooled_ar(prepared, 100, cat)
        by_cat[cat] = ar
        counts[cat.value] = n
    return ARReport(
        system=system,
        ar_at_10=ar10,
        ar_at_100=ar100,
        ar_xs_at_100=by_cat[SizeCategory.XS],
        ar_s_at_100=by_cat[SizeCategory.S],
        ar_m_at_100=by_cat[SizeCategory.M],
        gt_counts=counts,
    )


_COLUMNS = ("AR@10", "AR@100", "AR^XS@100", "AR^S@100", "AR^M@100")
_FIELDS = ("ar_at_10", "ar_at_100", "ar_xs_at_100", "ar_s_at_100", "ar_m_at_100")


def _cell(value: float | None) -> str:
    return "-" if value is None else f"{value:.3f}"


def report_text(reports: Sequence[ARReport]) -> str:
    """Aligned plain-text table, one row per system."""
    name_w = max([len("System")] + [len(r.system) for r in reports])
    header = "System".ljust(name_w) + "".join(f"{c:>12}" for c in _COLUMNS)
    lines = [header]
    for r in reports:
        cells = "".join(f"{_cell(getattr(r, f)):>12}" for f in _FIELDS)
        lines.append(r.system.ljust(name_w) + cells)
    return "\n".join(lines) + "\n"


def report_json(reports: Sequence[ARReport]) -> str:
    """Canonical JSON document with fixed key order."""
    docs = []
    for r in reports:
        doc = {"system": r.system}
        for f in _FIELDS:
            doc[f] = getattr(r, f)
        doc["gt_counts"] = {k: r.gt_counts.get(k, 0) for k in ("XS", "S", "M")}
        docs.append(doc)
    payload = {
        "columns": list(_COLUMNS),
        "iou_thresholds": list(IOU_THRESHOLDS),
        "budgets": list(BUDGETS),
        "reports": docs,
    }
    return json.dumps(payload, indent=2) + "\n"


def report_csv(reports: Sequence[ARReport]) -> str:
    lines = ["system,ar_at_10,ar_at_100,ar_xs_at_100,ar_s_at_100,ar_m_at_100,gt_xs,gt_s,gt_m"]
    for r in reports:
        cells = [r.system]
        for f in _FIELDS:
            v = getattr(r, f)
            cells.append("" if v is None else f"{v:.6f}")
        cells += [str(r.gt_counts.get(k, 0)) for k in ("XS", "S", "M")]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _contour(grid: np.ndarray) -> np.ndarray:
    """Foreground pixels with at least one 4-neighbor outside the mask."""
    interior = grid.copy()
    interior[1:, :] &= grid[:-1, :]
    interior[:-1, :] &= grid[1:, :]
    interior[:, 1:] &= grid[:, :-1]
    interior[:, :-1] &= grid[:, 1:]
    interior[0, :] = False
    interior[-1, :] = False
    interior[:, 0] = False
    interior[:, -1] = False
    return grid & ~interior


def render_overlay(
    image: RasterImage,
    gt: Sequence[GroundTruthObject],
    proposals: Sequence[Proposal],
    assignment: Assignment | None = None,
) -> RasterImage:
    """Draw matched proposals filled with a colored contour, misses in red.

    Each ground-truth object shows only its assigned (best-IoU) proposal;
    unmatched objects are drawn as an unfilled red contour of their mask.
    """
    if image.channels != 3:
        raise ValueError("overlay rendering needs an RGB image")
    if assignment is None:
        assignment = match(gt, proposals)
    by_gt = assignment.proposal_by_gt()
    canvas = image.pixels.astype(np.int16)
    for obj in gt:
        if obj.instance_id in by_gt:
            color = np.array(_PALETTE[obj.instance_id % len(_PALETTE)], dtype=np.int16)
            grid = rle_decode(proposals[by_gt[obj.instance_id]].mask)
            canvas[grid] = (canvas[grid] + color) // 2
            canvas[_contour(grid)] = color
        else:
            grid = rle_decode(obj.mask)
            canvas[_contour(grid)] = np.array(_MISS_COLOR, dtype=np.int16)
    return RasterImage(canvas.astype(np.uint8), 8)
