import itertools

import numpy as np
import pytest

from smallprop.annotations import GroundTruthObject, SizeCategory
from smallprop.detector import Proposal, preset
from smallprop.evaluation import (
    Assignment,
    IOU_THRESHOLDS,
    average_recall,
    evaluate_dataset,
    match,
    render_overlay,
    report_csv,
    report_json,
    report_text,
)
from smallprop.masks import mask_iou, rle_decode
from smallprop.pipeline import PipelineConfig, run_whole
from smallprop.raster import RasterImage
from smallprop.synth import SceneSpec, generate_scene
from oracles import make_random_instance, oracle_report, rect_mask


def interval_mask(width, start, stop):
    """Single-row mask covering [start, stop); handy for exact IoUs."""
    return rect_mask(width, 1, start, 0, stop - start, 1)


def gt_from(mask, gid=1):
    return GroundTruthObject.from_mask(gid, mask)


def test_match_perfect_single_pair():
    m = rect_mask(16, 16, 2, 2, 5, 5)
    a = match([gt_from(m)], [Proposal(m, 0.9)])
    assert a.pairs == ((1, 0, 1.0),)


def test_match_without_proposals():
    m = rect_mask(16, 16, 2, 2, 5, 5)
    assert match([gt_from(m)], []).pairs == ()


def test_match_zero_iou_never_assigned():
    a = rect_mask(16, 16, 0, 0, 4, 4)
    b = rect_mask(16, 16, 10, 10, 4, 4)
    assert match([gt_from(a)], [Proposal(b, 0.9)]).pairs == ()


def test_match_greedy_two_by_two():
    width = 200
    gt_a = gt_from(interval_mask(width, 0, 100), gid=1)
    gt_b = gt_from(interval_mask(width, 20, 68), gid=2)
    p1 = Proposal(interval_mask(width, 10, 90), 0.9)
    p2 = Proposal(interval_mask(width, 16, 112), 0.8)
    ious = {
        (1, 0): mask_iou(gt_a.mask, p1.mask),
        (1, 1): mask_iou(gt_a.mask, p2.mask),
        (2, 0): mask_iou(gt_b.mask, p1.mask),
        (2, 1): mask_iou(gt_b.mask, p2.mask),
    }
    assert ious[(1, 0)] == 0.8 and ious[(2, 0)] == 0.6 and ious[(2, 1)] == 0.5
    assert ious[(1, 0)] > ious[(1, 1)] > ious[(2, 0)] > ious[(2, 1)]
    got = match([gt_a, gt_b], [p1, p2])
    assert got.pairs == ((1, 0, 0.8), (2, 1, 0.5))
    # exhaustive check: greedy differs from the optimal assignment only in
    # total IoU, never in cardinality
    best_total = max(
        ious[(1, pa)] + ious[(2, pb)]
        for pa, pb in itertools.permutations((0, 1))
    )
    greedy_total = sum(iou for _, _, iou in got.pairs)
    assert len(got.pairs) == 2
    assert best_total >= greedy_total


def test_match_tie_breaks_deterministic():
    m = rect_mask(16, 16, 2, 2, 5, 5)
    # two identical proposals: lower index wins; two gt: lower id wins
    got = match([gt_from(m, 4), gt_from(m, 2)], [Proposal(m, 0.5), Proposal(m, 0.5)])
    assert got.pairs == ((2, 0, 1.0), (4, 1, 1.0))


def test_average_recall_examples():
    gt = [gt_from(interval_mask(200, 0, 100))]
    assert average_recall(gt, Assignment(((1, 0, 1.0),))) == 1.0
    assert average_recall(gt, Assignment(((1, 0, 0.6),))) == 0.3
    assert average_recall(gt, Assignment(((1, 0, 0.49),))) == 0.0
    assert average_recall(gt, Assignment(())) == 0.0


def test_average_recall_rejects_empty_gt():
    with pytest.raises(ValueError):
        average_recall([], Assignment(()))


def test_recall_curve_non_increasing():
    gt = [gt_from(interval_mask(200, 0, 100), gid=g) for g in (1, 2, 3)]
    ious = {1: 0.55, 2: 0.8, 3: 0.95}
    curve = [
        sum(1 for g in gt if ious[g.instance_id] >= t) / len(gt) for t in IOU_THRESHOLDS
    ]
    assert all(a >= b for a, b in zip(curve, curve[1:]))


def make_three_category_image(width=120):
    # areas 100 (XS), 600 (S), 1200 (M) as 1-row-stacked rectangles
    gt = [
        gt_from(rect_mask(width, 60, 0, 0, 10, 10), 1),
        gt_from(rect_mask(width, 60, 20, 0, 30, 20), 2),
        gt_from(rect_mask(width, 60, 60, 0, 40, 30), 3),
    ]
    assert [g.category for g in gt] == [SizeCategory.XS, SizeCategory.S, SizeCategory.M]
    return gt


def test_evaluate_perfect_proposals():
    gt = make_three_category_image()
    props = [Proposal(g.mask, 1.0) for g in gt]
    report = evaluate_dataset([(gt, props)], system="perfect")
    assert report.ar_at_10 == 1.0
    assert report.ar_at_100 == 1.0
    assert report.ar_xs_at_100 == 1.0
    assert report.ar_s_at_100 == 1.0
    assert report.ar_m_at_100 == 1.0
    assert report.gt_counts == {"XS": 1, "S": 1, "M": 1}


def test_evaluate_mixed_categories():
    xs = gt_from(rect_mask(120, 60, 0, 0, 10, 10), 1)
    m = gt_from(rect_mask(120, 60, 40, 0, 40, 30), 2)
    props = [Proposal(m.mask, 0.9)]
    report = evaluate_dataset([([xs, m], props)])
    assert report.ar_at_100 == 0.5
    assert report.ar_xs_at_100 == 0.0
    assert report.ar_m_at_100 == 1.0
    assert report.ar_s_at_100 is None
    assert report.gt_counts == {"XS": 1, "S": 0, "M": 1}


def test_evaluate_no_ground_truth_at_all():
    props = [Proposal(rect_mask(32, 32, 0, 0, 4, 4), 0.5)]
    report = evaluate_dataset([([], props)])
    assert report.ar_at_10 is None and report.ar_at_100 is None


def test_fastmask_sim_gives_all_zero_report():
    scenes = [generate_scene(SceneSpec(width=1280, height=720, n_apples=20, n_leaves=30, seed=s)) for s in (1, 2)]
    cfg = PipelineConfig(detector=preset("fastmask"))
    per_image = [(sc.objects, run_whole(sc, cfg)) for sc in scenes]
    report = evaluate_dataset(per_image, system="fastmask")
    for cell in (report.ar_at_10, report.ar_at_100, report.ar_xs_at_100, report.ar_s_at_100, report.ar_m_at_100):
        assert cell == 0.0


def test_budget_monotonicity_random():
    rng = np.random.default_rng(7)
    for _ in range(30):
        per_pkg, _ = make_random_instance(rng)
        report = evaluate_dataset(per_pkg)
        if report.ar_at_10 is not None:
            assert report.ar_at_10 <= report.ar_at_100


def test_matches_bruteforce_oracle():
    rng = np.random.default_rng(11)
    for _ in range(40):
        per_pkg, per_oracle = make_random_instance(rng)
        got = evaluate_dataset(per_pkg)
        ref = oracle_report(per_oracle)
        assert got.ar_at_10 == ref["ar_at_10"]
        assert got.ar_at_100 == ref["ar_at_100"]
        assert got.ar_xs_at_100 == ref["ar_xs_at_100"]
        assert got.ar_s_at_100 == ref["ar_s_at_100"]
        assert got.ar_m_at_100 == ref["ar_m_at_100"]
        assert got.gt_counts == ref["gt_counts"]


def test_raising_assigned_iou_never_lowers_ar():
    gt = [gt_from(interval_mask(200, 0, 100), gid=g) for g in (1, 2)]
    low = average_recall(gt, Assignment(((1, 0, 0.55), (2, 1, 0.7))))
    high = average_recall(gt, Assignment(((1, 0, 0.8), (2, 1, 0.7))))
    assert high >= low


def test_category_restriction_partitions_matches():
    # disjoint gt of each category, proposals disjoint too: per-category
    # matched counts sum to the unrestricted matched count
    gt = make_three_category_image()
    props = [Proposal(g.mask, 0.5 + 0.1 * i) for i, g in enumerate(gt)]
    full = match(gt, props)
    per_cat = 0
    for cat in SizeCategory:
        sub = [g for g in gt if g.category is cat]
        per_cat += len(match(sub, props).pairs)
    assert per_cat == len(full.pairs)


def test_report_formats():
    gt = make_three_category_image()
    props = [Proposal(g.mask, 1.0) for g in gt]
    report = evaluate_dataset([(gt, props)], system="sys1")
    text = report_text([report])
    header = text.splitlines()[0]
    assert header.split() == ["System", "AR@10", "AR@100", "AR^XS@100", "AR^S@100", "AR^M@100"]
    assert "1.000" in text
    csv = report_csv([report])
    assert csv.splitlines()[0].startswith("system,ar_at_10,ar_at_100")
    import json

    doc = json.loads(report_json([report]))
    assert doc["reports"][0]["system"] == "sys1"
    assert doc["reports"][0]["ar_at_100"] == 1.0
    assert doc["budgets"] == [10, 100]


def test_absent_cells_render_as_dash_and_null():
    xs = gt_from(rect_mask(64, 64, 0, 0, 5, 5), 1)
    report = evaluate_dataset([([xs], [])], system="empty")
    assert "-" in report_text([report])
    import json

    doc = json.loads(report_json([report]))
    assert doc["reports"][0]["ar_s_at_100"] is None


def _overlay_scene():
    scene = generate_scene(SceneSpec(width=160, height=120, n_apples=6, n_leaves=0, seed=13))
    assert scene.objects
    return scene


def test_overlay_marks_misses_red():
    scene = _overlay_scene()
    out = render_overlay(scene.image, scene.objects, [])
    changed = np.any(out.pixels != scene.image.pixels, axis=2)
    red = np.all(out.pixels == (255, 0, 0), axis=2)
    assert changed.any()
    assert np.array_equal(changed, red)  # misses only add red contours


def test_overlay_perfect_has_no_red_and_fills_centroid():
    scene = _overlay_scene()
    props = [Proposal(o.mask, 1.0) for o in scene.objects]
    out = render_overlay(scene.image, scene.objects, props)
    red = np.all(out.pixels == (255, 0, 0), axis=2)
    assert not red.any()
    for obj in scene.objects:
        grid = rle_decode(obj.mask)
        ys, xs = np.nonzero(grid)
        cy, cx = int(np.mean(ys)), int(np.mean(xs))
        if grid[cy, cx]:  # centroid inside the mask for these blobs
            assert tuple(out.pixels[cy, cx]) != tuple(scene.image.pixels[cy, cx])


def test_overlay_requires_rgb():
    gray = RasterImage(np.zeros((8, 8), np.uint8))
    with pytest.raises(ValueError):
        render_overlay(gray, [], [])
