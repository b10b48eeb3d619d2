"""Convexity detection from marginal behavior, plus the bump counterexample.

The verdict pipeline never consults the convex hull: branch 1 looks for gaps
in marginal supports, branch 2 for non-decaying interior derivative-energy
mass.  The hull-defect number is computed for every report as ground truth
for fixtures, after the verdict is already decided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibration import CONVEX_BASELINE_INTERIOR
from .geometry import (Disk, SmoothBump, _in_convex_polygon, convex_hull, crofton_perimeter,
                       density_one_filter, hull_polygon, rasterize, sample_bump,
                       symmetric_difference_area)
from .grids import BinaryGrid, GridSpec, Profile1D, ScalarField
from .mollify import epsilon_schedule, mollify1d, mollify2d
from .radon import (MarginalFamily, marginal_diagnostics, marginal_family,
                    midpoint_violation, nu_measure, support_analysis)
from .sobolev import localized_energy


@dataclass(frozen=True)
class DetectorConfig:
    """Knobs of the convexity detector.

    ``epsilons`` is the mollification schedule; band analysis only uses the
    part of it compatible with the interior margin (4 eps < delta).  The
    level and trend thresholds are calibrated margins with provenance in the
    calibration module, not theory constants.
    """

    epsilons: tuple
    n_angles: int = 180
    delta: float = 0.2
    eta_factor: float = 4.0
    delta_ladder: tuple = (0.1, 0.2, 0.4)
    lipschitz_ratio_max: float = 2.0
    level_factor: float = 10.0
    trend_min: float = 1.2
    baseline_interior: float = CONVEX_BASELINE_INTERIOR
    hull_tolerance: float = 4.0
    density_radius_cells: int = 2
    density_threshold: float = 0.7
    witness_margin: float = 0.04
    max_candidates: int = 32

    def __post_init__(self):
        problems = []
        if self.n_angles < 64:
            problems.append(f"n_angles must be >= 64, got {self.n_angles}")
        eps = tuple(float(e) for e in self.epsilons)
        if len(eps) < 2:
            problems.append("schedule needs at least 2 epsilons")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            problems.append("schedule must be strictly decreasing")
        if not all(e > 0 for e in eps):
            problems.append("epsilons must be positive")
        ladder = tuple(float(d) for d in self.delta_ladder)
        if any(b <= a for a, b in zip(ladder, ladder[1:])) or not ladder:
            problems.append("delta ladder must be nonempty and strictly increasing")
        if not (self.delta > 0 and self.eta_factor >= 4.0):
            problems.append("need delta > 0 and eta_factor >= 4")
        if len(self.nu_epsilons()) < 2:
            problems.append(
                f"schedule has fewer than 2 epsilons with {self.eta_factor} eps < delta="
                f"{self.delta}; band analysis needs a trend window")
        if problems:
            raise ValueError("; ".join(problems))
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "delta_ladder", ladder)

    @classmethod
    def for_grid(cls, spec: GridSpec, **overrides) -> "DetectorConfig":
        length = spec.length
        defaults = dict(
            epsilons=tuple(epsilon_schedule(spec)),
            delta=length / 10.0,
            delta_ladder=(length / 20.0, length / 10.0, length / 5.0),
            witness_margin=max(4.0 * spec.h, 0.02 * length),
        )
        defaults.update(overrides)
        return cls(**defaults)

    def nu_epsilons(self) -> tuple:
        """Schedule part whose endpoint band eta fits under the interior margin."""
        return tuple(e for e in self.epsilons if self.eta_factor * e < self.delta)

    def to_json(self) -> dict:
        return {
            "epsilons": list(self.epsilons),
            "n_angles": self.n_angles,
            "delta": self.delta,
            "eta_factor": self.eta_factor,
            "delta_ladder": list(self.delta_ladder),
            "lipschitz_ratio_max": self.lipschitz_ratio_max,
            "level_factor": self.level_factor,
            "trend_min": self.trend_min,
            "baseline_interior": self.baseline_interior,
            "hull_tolerance": self.hull_tolerance,
            "density_radius_cells": self.density_radius_cells,
            "density_threshold": self.density_threshold,
            "witness_margin": self.witness_margin,
            "max_candidates": self.max_candidates,
        }


def _check_schedule(config: DetectorConfig, spec: GridSpec) -> None:
    bad = [e for e in config.epsilons if e < 2.0 * spec.h * (1.0 - 1e-12)]
    if bad:
        raise ValueError(f"schedule epsilons {bad} under-resolve the grid (2h = {2 * spec.h:.6g})")


@dataclass(eq=False)
class HypothesisReport:
    """Marginal-side regularity hypotheses of the convexity theorem.

    ``holds`` requires every non-empty marginal support to be a single
    interval and the uniform Lipschitz estimate to stay within
    ``lipschitz_ratio_max`` over the last scheduled epsilons for every delta
    in the ladder.  The log-concavity fraction is reported as corroborating
    evidence, not part of the pass condition.
    """

    support_single: np.ndarray
    empty_support_count: int
    delta_ladder: tuple
    ladder_epsilons: tuple      # per delta: the schedule part with 4 eps < delta
    c_delta_table: tuple        # per delta: C_delta over its epsilons
    lipschitz_ratios: tuple     # per delta: max/min over the last window
    lipschitz_bounded: tuple
    log_concave_fraction: float
    concave_fraction: float

    @property
    def all_single(self) -> bool:
        return bool(self.support_single.all())

    @property
    def holds(self) -> bool:
        return self.all_single and all(self.lipschitz_bounded)

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "all_single_interval": self.all_single,
            "single_interval_fraction": float(np.mean(self.support_single)),
            "empty_support_count": self.empty_support_count,
            "delta_ladder": list(self.delta_ladder),
            "ladder_epsilons": [list(e) for e in self.ladder_epsilons],
            "c_delta_table": [[float(v) for v in row] for row in self.c_delta_table],
            "lipschitz_ratios": [float(r) for r in self.lipschitz_ratios],
            "lipschitz_bounded": list(self.lipschitz_bounded),
            "log_concave_fraction": self.log_concave_fraction,
            "concave_fraction": self.concave_fraction,
        }


def check_hypotheses(grid: BinaryGrid, config: DetectorConfig,
                     family: MarginalFamily | None = None) -> HypothesisReport:
    """Evaluate the theorem's marginal hypotheses on a rasterized set."""
    _check_schedule(config, grid.spec)
    if family is None:
        family = marginal_family(grid, config.n_angles)
    supports = support_analysis(family)
    single = np.array([s.single or s.empty for s in supports])
    empties = sum(1 for s in supports if s.empty)
    ladder_eps, tables, ratios, bounded = [], [], [], []
    log_fraction = concave_fraction = float("nan")
    for i, delta in enumerate(config.delta_ladder):
        eps = tuple(e for e in config.epsilons if 4.0 * e < delta)
        if len(eps) < 2:
            raise ValueError(
                f"ladder delta={delta:.6g} admits {len(eps)} scheduled epsilons; need >= 2")
        diag = marginal_diagnostics(family, delta, eps)
        ladder_eps.append(eps)
        tables.append(tuple(float(v) for v in diag.c_delta))
        r = diag.c_delta_ratio()
        ratios.append(r)
        bounded.append(bool(r <= config.lipschitz_ratio_max))
        if i == 0:
            log_fraction = diag.log_concave_fraction
            concave_fraction = diag.concave_fraction
    return HypothesisReport(single, empties, config.delta_ladder, tuple(ladder_eps),
                            tuple(tables), tuple(ratios), tuple(bounded),
                            log_fraction, concave_fraction)


@dataclass(frozen=True)
class Witness:
    """Non-convexity witness: a plane point with its localized-energy trace."""

    x: float
    y: float
    kind: str              # "support_gap" | "localized_energy"
    r0: float
    trace: tuple           # ((eps, localized energy), ...)
    theta: float | None = None
    gap: tuple | None = None

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "kind": self.kind,
            "r0": self.r0,
            "trace": [[e, v] for e, v in self.trace],
            "theta": self.theta,
            "gap": list(self.gap) if self.gap else None,
        }


@dataclass(eq=False)
class ConvexityReport:
    verdict: str           # "CONVEX" | "NON_CONVEX" | "INCONCLUSIVE"
    branch: int            # decision rule that fired (1 gaps, 2 energy, 3 hull)
    hypotheses: HypothesisReport
    hull_defect: float     # |E delta hull(E1)| / (h * perimeter); ground truth only
    witness: Witness | None
    interior_trace: tuple  # ((eps, nu interior mass), ...)
    total_trace: tuple     # ((eps, nu total mass), ...)
    baseline_interior: float
    level_triggered: bool
    trend_triggered: bool
    config: DetectorConfig

    def __post_init__(self):
        if self.verdict == "NON_CONVEX" and self.witness is None:
            raise ValueError("NON_CONVEX verdict requires a witness")
        if self.verdict == "CONVEX" and self.hull_defect > self.config.hull_tolerance:
            raise ValueError("CONVEX verdict with hull defect above tolerance")

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "branch": self.branch,
            "hypotheses": self.hypotheses.to_json(),
            "hull_defect": self.hull_defect,
            "witness": self.witness.to_json() if self.witness else None,
            "interior_trace": [[e, v] for e, v in self.interior_trace],
            "total_trace": [[e, v] for e, v in self.total_trace],
            "baseline_interior": self.baseline_interior,
            "level_triggered": self.level_triggered,
            "trend_triggered": self.trend_triggered,
            "config": self.config.to_json(),
        }


def _witness_trace(grid: BinaryGrid, point: tuple, r0: float, epsilons) -> tuple:
    """Localized energies at a point for every schedule eps the ball admits."""
    spec = grid.spec
    x, y = point
    gx, gy = spec.origin
    if (x - r0 < gx or y - r0 < gy or x + r0 > gx + spec.length or y + r0 > gy + spec.length):
        return ()
    out = []
    for eps in epsilons:
        if 10.0 * eps <= r0:
            field = mollify2d(grid, eps)
            out.append((eps, localized_energy(field, (x, y), r0, eps).value))
    return tuple(out)


def _gap_witness(grid: BinaryGrid, supports, config: DetectorConfig) -> Witness:
    """Midpoint of the widest support gap, mapped back to the plane.

    The free coordinate along the gap line is fixed at the projection of the
    set's centroid onto the perpendicular direction.
    """
    best = None
    for sup in supports:
        if sup.empty or sup.single:
            continue
        for lo, hi in sup.gaps:
            if best is None or hi - lo > best[2] - best[1]:
                best = (sup.theta, lo, hi)
    theta, lo, hi = best
    t_mid = 0.5 * (lo + hi)
    e = np.array([np.cos(theta), np.sin(theta)])
    perp = np.array([-e[1], e[0]])
    centroid = grid.occupied_centers().mean(axis=0)
    point = t_mid * e + float(centroid @ perp) * perp
    r0 = max(0.05 * grid.spec.length, 16.0 * min(config.epsilons))
    trace = _witness_trace(grid, (float(point[0]), float(point[1])), r0, config.epsilons)
    return Witness(float(point[0]), float(point[1]), "support_gap", r0, trace,
                   theta=float(theta), gap=(float(lo), float(hi)))


def _boundary_cells(grid: BinaryGrid) -> np.ndarray:
    """Mask of occupied cells with an unoccupied 4-neighbor (grid edge counts)."""
    c = grid.cells != 0
    inner = np.zeros_like(c)
    inner[1:-1, 1:-1] = (c[1:-1, 1:-1] & c[:-2, 1:-1] & c[2:, 1:-1]
                         & c[1:-1, :-2] & c[1:-1, 2:])
    return c & ~inner


def _energy_witness(grid: BinaryGrid, config: DetectorConfig) -> Witness | None:
    """Best localized-energy point among filtered-boundary cells inside the hull.

    Candidates live on the boundary of the density-filtered set (a stand-in
    for the reduced boundary) at least ``witness_margin`` inside the hull of
    that set; returns None when no such cell exists, in which case branch 2
    cannot certify non-convexity.
    """
    spec = grid.spec
    filtered = density_one_filter(grid, config.density_radius_cells, config.density_threshold)
    if filtered.is_empty():
        return None
    verts = hull_polygon(filtered)
    boundary = _boundary_cells(filtered)
    iy, ix = np.nonzero(boundary)
    xs = spec.x_centers()[ix]
    ys = spec.y_centers()[iy]
    deep = _in_convex_polygon(xs, ys, verts, pad=config.witness_margin)
    xs, ys = xs[deep], ys[deep]
    if xs.size == 0:
        return None
    eps_min = min(config.epsilons)
    r0 = max(0.05 * spec.length, 16.0 * eps_min)
    gx, gy = spec.origin
    fits = ((xs - r0 >= gx) & (ys - r0 >= gy)
            & (xs + r0 <= gx + spec.length) & (ys + r0 <= gy + spec.length))
    xs, ys = xs[fits], ys[fits]
    if xs.size == 0:
        return None
    stride = max(1, int(np.ceil(xs.size / config.max_candidates)))
    xs, ys = xs[::stride], ys[::stride]
    field = mollify2d(grid, eps_min)
    values = [localized_energy(field, (float(x), float(y)), r0, eps_min).value
              for x, y in zip(xs, ys)]
    k = int(np.argmax(values))
    point = (float(xs[k]), float(ys[k]))
    trace = _witness_trace(grid, point, r0, config.epsilons)
    return Witness(point[0], point[1], "localized_energy", r0, trace)


def _empty_report(config: DetectorConfig) -> ConvexityReport:
    hyp = HypothesisReport(np.ones(0, dtype=bool), 0, config.delta_ladder,
                           tuple(() for _ in config.delta_ladder),
                           tuple(() for _ in config.delta_ladder),
                           tuple(1.0 for _ in config.delta_ladder),
                           tuple(True for _ in config.delta_ladder), 1.0, 1.0)
    return ConvexityReport("CONVEX", 3, hyp, 0.0, None, (), (),
                           config.baseline_interior, False, False, config)


def convexity_verdict(grid: BinaryGrid, config: DetectorConfig | None = None) -> ConvexityReport:
    """Three-branch convexity decision from marginal behavior alone.

    1. any marginal support splits into several intervals -> NON_CONVEX;
    2. interior derivative-energy mass fails to decay (growing trend of
       interior times |log eps|, or level >= level_factor times the convex
       baseline at the smallest eps) and a witness point exists -> NON_CONVEX;
    3. otherwise CONVEX when the hull defect is within tolerance, else
       INCONCLUSIVE.
    The hull defect never feeds branches 1 and 2.
    """
    if config is None:
        config = DetectorConfig.for_grid(grid.spec)
    _check_schedule(config, grid.spec)
    if grid.is_empty():
        return _empty_report(config)

    family = marginal_family(grid, config.n_angles)
    hypotheses = check_hypotheses(grid, config, family=family)
    supports = support_analysis(family)

    nu_eps = config.nu_epsilons()
    interior_trace, total_trace = [], []
    for eps in nu_eps:
        nu = nu_measure(grid, eps, config.n_angles, eta=config.eta_factor * eps,
                        delta=config.delta, family=family)
        interior_trace.append((eps, nu.interior))
        total_trace.append((eps, nu.total))
    interior_trace, total_trace = tuple(interior_trace), tuple(total_trace)

    level = interior_trace[-1][1] >= config.level_factor * config.baseline_interior
    window = interior_trace[-min(3, len(interior_trace)):]
    raw = [v * abs(np.log(e)) for e, v in window]
    trend = (all(b > a for a, b in zip(raw, raw[1:]))
             and raw[0] > 0 and raw[-1] / raw[0] >= config.trend_min)

    verdict, branch, witness = None, 3, None
    if not hypotheses.all_single:
        verdict, branch = "NON_CONVEX", 1
        witness = _gap_witness(grid, supports, config)
    elif level or trend:
        witness = _energy_witness(grid, config)
        if witness is not None:
            verdict, branch = "NON_CONVEX", 2
        # else: energy signal without a locatable witness; fall through to the
        # hull comparison, which may still report INCONCLUSIVE

    filtered = density_one_filter(grid, config.density_radius_cells, config.density_threshold)
    perimeter = crofton_perimeter(grid, config.n_angles).value
    defect = symmetric_difference_area(grid, convex_hull(filtered)) / (grid.spec.h * perimeter)

    if verdict is None:
        verdict = "CONVEX" if defect <= config.hull_tolerance else "INCONCLUSIVE"
    return ConvexityReport(verdict, branch, hypotheses, float(defect), witness,
                           interior_trace, total_trace, config.baseline_interior,
                           bool(level), bool(trend), config)


# --- the bump counterexample ---------------------------------------------------


@dataclass(frozen=True)
class DemoConfig:
    """Configuration of the perturbed-disk demonstration."""

    n: int = 1024
    length: float = 2.75
    disk_radius: float = 1.0
    bump_radius: float = 0.1
    bump_amplitude: float = 1.0
    n_angles: int = 180
    strides: tuple = (1, 2, 4, 8, 16, 32, 64)
    envelope_factor: float = 1.5
    log_floor_fraction: float = 0.25
    bisect_iterations: int = 12
    bump_cap: float = 1.0
    resolution_probe: float = 1e-4
    segment_slack: float = 1e-6
    segment_factor: float = 10.0

    def __post_init__(self):
        if not (0 < self.bump_radius <= 0.2):
            raise ValueError(f"bump radius must lie in (0, 0.2], got {self.bump_radius}")
        if self.bump_amplitude != 1.0:
            raise ValueError("the demonstration uses amplitude 1")
        if self.envelope_factor <= 1.0:
            raise ValueError("envelope factor must exceed 1")

    def to_json(self) -> dict:
        return {"N": self.n, "L": self.length, "disk_radius": self.disk_radius,
                "bump_radius": self.bump_radius, "n_angles": self.n_angles,
                "strides": list(self.strides), "envelope_factor": self.envelope_factor,
                "bisect_iterations": self.bisect_iterations, "bump_cap": self.bump_cap}


@dataclass(eq=False)
class CounterexampleReport:
    """Outcome of the perturbed-disk demonstration.

    success means: the marginals of the perturbed field all pass the
    log-concavity test at the requested bump size, while the field itself
    visibly fails midpoint log-concavity along a grid segment (for a zero
    bump, success instead requires that no such segment exists).
    """

    epsilon_bump: float
    resolution_adequate: bool
    marginals_pass: bool
    max_admissible_bump: float | None
    segment: dict | None
    envelopes: tuple
    worst_violations: tuple
    config: DemoConfig

    @property
    def segment_found(self) -> bool:
        return self.segment is not None

    @property
    def success(self) -> bool:
        if not (self.resolution_adequate and self.marginals_pass):
            return False
        return self.segment_found if self.epsilon_bump > 0 else not self.segment_found

    def to_json(self) -> dict:
        return {
            "epsilon_bump": self.epsilon_bump,
            "resolution_adequate": self.resolution_adequate,
            "marginals_pass": self.marginals_pass,
            "max_admissible_bump": self.max_admissible_bump,
            "violating_segment": self.segment,
            "segment_found": self.segment_found,
            "success": self.success,
            "envelopes": [[s, v] for s, v in self.envelopes],
            "worst_violations": [[s, v] for s, v in self.worst_violations],
            "config": self.config.to_json(),
        }


def _demo_field(cells: np.ndarray, psi: np.ndarray, bump: float,
                spec: GridSpec) -> ScalarField:
    return ScalarField(spec, cells - bump * psi, provenance="synthetic")


def _marginal_violations(disk_family: MarginalFamily, psi_family: MarginalFamily,
                         bump: float, config: DemoConfig, eps: float) -> dict:
    """Worst log-concavity defect per stride over all mollified marginals.

    Marginals are linear in the field, so the perturbed sinogram is combined
    from the two precomputed ones instead of re-binning per bump size.  The
    log test runs where the marginal exceeds a fraction of its peak; the
    tested claim is log-concavity near the origin of the profile, and the
    edge region is dominated by rasterization noise at the support jump.
    """
    worst = {s: float("-inf") for s in config.strides}
    for d_prof, p_prof in zip(disk_family.profiles, psi_family.profiles):
        prof = Profile1D(d_prof.dt, d_prof.t0, d_prof.values - bump * p_prof.values)
        v = mollify1d(prof, eps).values
        floor = config.log_floor_fraction * float(v.max())
        for s in config.strides:
            worst[s] = max(worst[s], midpoint_violation(v, stride=s, floor=floor))
    return worst


def counterexample_demo(epsilon_bump: float, config: DemoConfig | None = None) -> CounterexampleReport:
    """Perturb a rasterized disk by a smooth bump and test both claims.

    (a) the marginals of the perturbed field stay log-concave (within a noise
    envelope self-calibrated on the unperturbed disk) for small bump sizes,
    and the largest admissible size is bracketed by bisection; (b) the field
    itself fails midpoint log-concavity along a segment through the bump.
    """
    if config is None:
        config = DemoConfig()
    if epsilon_bump < 0:
        raise ValueError(f"bump size must be nonnegative, got {epsilon_bump}")
    spec = GridSpec(config.n, config.length)
    disk = rasterize(Disk((0.0, 0.0), config.disk_radius), spec)
    cells = disk.cells.astype(np.float64)
    psi = sample_bump(SmoothBump((0.0, 0.0), config.bump_radius, config.bump_amplitude), spec)
    eps_test = 2.0 * spec.h
    disk_family = marginal_family(ScalarField(spec, cells, "indicator"), config.n_angles)
    psi_family = marginal_family(ScalarField(spec, psi, "synthetic"), config.n_angles)
    base_slack = 1e-6 + 2.0 * spec.h  # stride-1 discrete log test slack at tau_supp = dt = h

    reference = _marginal_violations(disk_family, psi_family, 0.0, config, eps_test)
    envelopes = {s: max(base_slack, config.envelope_factor * reference[s])
                 for s in config.strides}

    def passes(bump: float) -> tuple[bool, dict]:
        worst = _marginal_violations(disk_family, psi_family, bump, config, eps_test)
        return all(worst[s] <= envelopes[s] for s in config.strides), worst

    given_pass, given_worst = (passes(epsilon_bump) if epsilon_bump > 0
                               else (True, dict(reference)))
    resolution_adequate = given_pass or passes(config.resolution_probe)[0]

    max_admissible = None
    if resolution_adequate:
        lo = epsilon_bump if given_pass else 0.0
        hi = max(2.0 * max(lo, config.resolution_probe), 0.2)
        while hi < config.bump_cap and passes(hi)[0]:
            lo, hi = hi, min(2.0 * hi, config.bump_cap)
        if hi >= config.bump_cap and passes(config.bump_cap)[0]:
            max_admissible = config.bump_cap
        else:
            for _ in range(config.bisect_iterations):
                mid = 0.5 * (lo + hi)
                if passes(mid)[0]:
                    lo = mid
                else:
                    hi = mid
            max_admissible = lo

    segment = _violating_segment(cells, psi, epsilon_bump, spec, config)

    return CounterexampleReport(
        float(epsilon_bump), bool(resolution_adequate), bool(given_pass), max_admissible,
        segment, tuple(sorted(envelopes.items())), tuple(sorted(given_worst.items())),
        config)


def _violating_segment(cells: np.ndarray, psi: np.ndarray, bump: float,
                       spec: GridSpec, config: DemoConfig) -> dict | None:
    """Search grid lines through the bump for a midpoint log-concavity failure.

    The field is mollified at the resolution floor so logs are taken of
    smooth positive values; the search stays well inside the disk, away from
    rasterization chatter at its boundary.
    """
    field = mollify2d(_demo_field(cells, psi, bump, spec), 2.0 * spec.h)
    n = spec.n
    xc, yc = spec.x_centers(), spec.y_centers()
    mid = int(np.argmin(np.abs(yc)))  # lattice line nearest the bump center
    half = 0.5 * config.disk_radius
    best = None
    for direction, values, coords, offset in (
            ("row", field.values[mid, :], xc, float(yc[mid])),
            ("column", field.values[:, int(np.argmin(np.abs(xc)))], yc,
             float(xc[int(np.argmin(np.abs(xc)))])),
    ):
        keep = np.abs(coords) <= half
        v = values[keep]
        t = coords[keep]
        max_stride = (v.size - 1) // 2
        for s in (1, 2, 4, 8, 16, 32, 64):
            if s > max_stride:
                break
            left, midv, right = v[: -2 * s], v[s:-s], v[2 * s:]
            ok = (left > 0) & (midv > 0) & (right > 0)
            if not ok.any():
                continue
            defect = 0.5 * (np.log(left) + np.log(right)) - np.log(midv)
            defect[~ok] = float("-inf")
            j = int(np.argmax(defect))
            d = float(defect[j])
            if best is None or d > best["defect"]:
                best = {
                    "direction": direction,
                    "offset": offset,
                    "t_center": float(t[j + s]),
                    "stride": s,
                    "span": 2.0 * s * spec.h,
                    "defect": d,
                    "slack": config.segment_slack,
                    "ratio_to_slack": d / config.segment_slack,
                }
    if best is None or best["defect"] < config.segment_factor * config.segment_slack:
        return None
    return best
