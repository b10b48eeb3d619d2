import math

import numpy as np
import pytest

from perimetry.detector import (
    CONVEX_BASELINE_INTERIOR,
    ConvexityReport,
    DemoConfig,
    DetectorConfig,
    HypothesisReport,
    check_hypotheses,
    convexity_verdict,
)
from perimetry.geometry import Difference, Disk, Rect, Union, rasterize, rotate_shape
from perimetry.grids import BinaryGrid, GridSpec


@pytest.fixture(scope="module")
def cfg():
    # two-eps schedule sized for the N=256, L=2 fixtures
    return DetectorConfig(
        epsilons=(0.03125, 0.015625), n_angles=64, delta=0.2, delta_ladder=(0.2, 0.4)
    )


@pytest.fixture(scope="module")
def spec():
    return GridSpec(256, 2.0)


@pytest.fixture(scope="module")
def disk(spec):
    return rasterize(Disk((0.0, 0.0), 0.3), spec)


@pytest.fixture(scope="module")
def holed(spec):
    return rasterize(Difference(Disk((0.0, 0.0), 0.3), Rect((0.0, 0.0), (0.08, 0.08))), spec)


@pytest.fixture(scope="module")
def two_disks(spec):
    return rasterize(Union(Disk((-0.35, 0.0), 0.15), Disk((0.35, 0.0), 0.15)), spec)


def test_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(epsilons=(0.05,))  # single eps
    with pytest.raises(ValueError):
        DetectorConfig(epsilons=(0.02, 0.05))  # increasing
    with pytest.raises(ValueError):
        DetectorConfig(epsilons=(0.05, 0.025), n_angles=32)
    with pytest.raises(ValueError):
        DetectorConfig(epsilons=(0.05, 0.025), delta_ladder=(0.4, 0.2))
    with pytest.raises(ValueError):
        DetectorConfig(epsilons=(0.05, 0.025), eta_factor=2.0)
    with pytest.raises(ValueError):
        # no two epsilons fit under the interior margin
        DetectorConfig(epsilons=(0.2, 0.1), delta=0.2)


def test_config_for_grid():
    spec = GridSpec(512, 2.5)
    cfg = DetectorConfig.for_grid(spec)
    assert cfg.delta == pytest.approx(0.25)
    assert cfg.delta_ladder == (0.125, 0.25, 0.5)
    assert cfg.epsilons[0] == pytest.approx(2.5 / 32)
    assert all(e >= 2 * spec.h * (1 - 1e-9) for e in cfg.epsilons)
    assert len(cfg.nu_epsilons()) >= 2
    assert cfg.baseline_interior == CONVEX_BASELINE_INTERIOR


def test_under_resolved_schedule_rejected(disk, cfg):
    coarse = GridSpec(64, 2.0)
    grid = rasterize(Disk((0.0, 0.0), 0.3), coarse)
    with pytest.raises(ValueError):
        convexity_verdict(grid, cfg)  # 0.015625 < 2h = 0.0625


def test_ladder_needs_two_epsilons_per_delta(disk):
    cfg = DetectorConfig(
        epsilons=(0.03125, 0.015625), n_angles=64, delta=0.2, delta_ladder=(0.1, 0.2)
    )
    with pytest.raises(ValueError):
        check_hypotheses(disk, cfg)  # delta=0.1 admits one eps only


def test_hypotheses_hold_for_disk(disk, cfg):
    rep = check_hypotheses(disk, cfg)
    assert rep.holds
    assert rep.all_single
    assert rep.empty_support_count == 0
    assert all(r <= cfg.lipschitz_ratio_max for r in rep.lipschitz_ratios)
    assert rep.log_concave_fraction == 1.0
    doc = rep.to_json()
    assert doc["holds"] is True
    assert len(doc["c_delta_table"]) == len(cfg.delta_ladder)


def test_hypotheses_fail_for_two_disks(two_disks, cfg):
    rep = check_hypotheses(two_disks, cfg)
    assert not rep.all_single
    assert not rep.holds


def test_hypotheses_fail_for_holed_disk(holed, cfg):
    rep = check_hypotheses(holed, cfg)
    assert rep.all_single  # supports stay single intervals
    assert not all(rep.lipschitz_bounded)  # but the Lipschitz trend blows up
    assert not rep.holds


def test_disk_verdict_convex(disk, cfg):
    rep = convexity_verdict(disk, cfg)
    assert rep.verdict == "CONVEX"
    assert rep.branch == 3
    assert rep.witness is None
    assert rep.hull_defect <= cfg.hull_tolerance
    assert not rep.level_triggered and not rep.trend_triggered


def test_rotated_square_verdict_convex(spec, cfg):
    grid = rasterize(rotate_shape(Rect((0.0, 0.0), (0.3, 0.3)), 0.3), spec)
    rep = convexity_verdict(grid, cfg)
    assert rep.verdict == "CONVEX"
    assert rep.witness is None


def test_holed_disk_verdict_and_witness(holed, cfg):
    rep = convexity_verdict(holed, cfg)
    assert rep.verdict == "NON_CONVEX"
    assert rep.branch == 2
    assert rep.level_triggered
    w = rep.witness
    assert w is not None and w.kind == "localized_energy"
    # witness sits near the removed square, well inside the disk
    assert math.hypot(w.x, w.y) <= 0.2
    assert len(w.trace) >= 1
    assert all(v > 0 for _, v in w.trace)
    # the localization ball is admissible for every traced eps and fits the grid
    spec = holed.spec
    for eps, _ in w.trace:
        assert w.r0 >= 10 * eps
    assert abs(w.x) + w.r0 <= spec.length / 2
    assert abs(w.y) + w.r0 <= spec.length / 2


def test_two_disks_verdict_and_gap_witness(two_disks, cfg):
    rep = convexity_verdict(two_disks, cfg)
    assert rep.verdict == "NON_CONVEX"
    assert rep.branch == 1
    w = rep.witness
    assert w is not None and w.kind == "support_gap"
    assert w.theta is not None and w.gap is not None
    lo, hi = w.gap
    assert lo < hi
    # witness lies in the strip between the disks
    assert abs(w.x) <= 0.2 and abs(w.y) <= 0.2


def test_interior_trace_reported(disk, cfg):
    rep = convexity_verdict(disk, cfg)
    assert len(rep.interior_trace) == len(cfg.nu_epsilons())
    assert all(t >= i for (_, t), (_, i) in zip(rep.total_trace, rep.interior_trace))


def test_empty_grid_is_convex(spec, cfg):
    rep = convexity_verdict(BinaryGrid(spec, np.zeros((256, 256))), cfg)
    assert rep.verdict == "CONVEX"
    assert rep.hull_defect == 0.0


def test_report_json_roundtrippable(holed, cfg):
    import json

    rep = convexity_verdict(holed, cfg)
    doc = json.loads(json.dumps(rep.to_json()))
    assert doc["verdict"] == "NON_CONVEX"
    assert doc["witness"]["kind"] == "localized_energy"
    assert doc["config"]["epsilons"] == list(cfg.epsilons)


def test_report_consistency_enforced(cfg, disk):
    hyp = check_hypotheses(disk, cfg)
    with pytest.raises(ValueError):
        ConvexityReport("NON_CONVEX", 1, hyp, 0.0, None, (), (),
                        cfg.baseline_interior, False, False, cfg)
    with pytest.raises(ValueError):
        ConvexityReport("CONVEX", 3, hyp, 99.0, None, (), (),
                        cfg.baseline_interior, False, False, cfg)


def test_verdict_rotation_invariant(spec, cfg):
    shape = Union(Disk((-0.35, 0.0), 0.15), Disk((0.35, 0.0), 0.15))
    a = convexity_verdict(rasterize(shape, spec), cfg)
    b = convexity_verdict(rasterize(rotate_shape(shape, math.pi / 7), spec), cfg)
    assert a.verdict == b.verdict == "NON_CONVEX"


def test_demo_config_validation():
    DemoConfig()  # defaults are valid
    with pytest.raises(ValueError):
        DemoConfig(bump_radius=0.0)
    with pytest.raises(ValueError):
        DemoConfig(bump_radius=0.3)
    with pytest.raises(ValueError):
        DemoConfig(bump_amplitude=0.5)
    with pytest.raises(ValueError):
        DemoConfig(envelope_factor=1.0)


def test_demo_rejects_negative_bump():
    from perimetry.detector import counterexample_demo

    with pytest.raises(ValueError):
        counterexample_demo(-0.1)
