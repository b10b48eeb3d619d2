import math

import numpy as np
import pytest

from perimetry.geometry import Difference, Disk, Rect, Union, rasterize, rotate_shape
from perimetry.grids import BinaryGrid, GridSpec, ScalarField
from perimetry.mollify import mollify1d
from perimetry.radon import (
    T_EXTENT_FACTOR,
    default_tau_lattice,
    fourier_slice_check,
    global_identity_check,
    load_family,
    marginal_derivative,
    marginal_diagnostics,
    marginal_family,
    marginal_lattice,
    midpoint_violation,
    nu_measure,
    radon_marginal,
    save_family,
    spectral_derivative,
    support_analysis,
    support_interval,
)


def test_lattice_parity_and_axis_alignment(spec512):
    m, t0 = marginal_lattice(spec512, 0.0)
    assert m >= T_EXTENT_FACTOR * spec512.n
    assert (m - spec512.n) % 2 == 0
    # theta = 0 bins land exactly on the x centers
    t = t0 + np.arange(m) * spec512.h
    for x in spec512.x_centers()[::97]:
        assert np.min(np.abs(t - x)) < 1e-12


def test_marginal_mass_equals_area(disk512):
    for theta in (0.0, math.pi / 4, 1.1, math.pi / 2):
        prof = radon_marginal(disk512, theta)
        assert prof.mass == pytest.approx(disk512.area, rel=1e-12)


def test_axis_marginal_is_exact_column_sum(disk512):
    prof = radon_marginal(disk512, 0.0)
    colsum = disk512.cells.sum(axis=0) * disk512.spec.h
    # embed the column sums at their x positions on the t lattice
    t = prof.t()
    x = disk512.spec.x_centers()
    j0 = int(np.argmin(np.abs(t - x[0])))
    np.testing.assert_allclose(prof.values[j0 : j0 + x.size], colsum, atol=1e-12)
    outside = np.concatenate([prof.values[:j0], prof.values[j0 + x.size :]])
    assert np.all(outside == 0.0)


def test_marginal_rotation_invariance_of_disk():
    # sup-norm wobble across angles stays below two cell widths for a
    # well-resolved centered disk
    spec = GridSpec(512, 2.0)
    grid = rasterize(Disk((0.0, 0.0), 0.25), spec)
    fam = marginal_family(grid, 60)
    base = fam.profiles[0].values
    worst = max(float(np.max(np.abs(p.values - base))) for p in fam.profiles)
    assert worst <= 2.0 * spec.h


def test_marginal_reflection_symmetry(holed512):
    # reflecting the set through the grid center reverses each marginal
    reflected = BinaryGrid(holed512.spec, holed512.cells[::-1, ::-1])
    for theta in (0.3, 1.2):
        a = radon_marginal(holed512, theta)
        b = radon_marginal(reflected, theta)
        np.testing.assert_allclose(a.values, b.values[::-1], atol=1e-12)


def test_marginal_of_field_matches_grid(disk512):
    from perimetry.grids import field_from_grid

    a = radon_marginal(disk512, 0.7)
    b = radon_marginal(field_from_grid(disk512), 0.7)
    np.testing.assert_allclose(a.values, b.values, atol=1e-14)


def test_marginal_family_layout(disk256):
    fam = marginal_family(disk256, 30)
    assert fam.n_angles == 30
    np.testing.assert_allclose(fam.thetas, np.arange(30) * math.pi / 30)
    assert fam.dtheta == pytest.approx(math.pi / 30)
    assert fam.source_epsilon is None
    assert len(fam.profiles) == 30


def test_family_source_epsilon_from_provenance(disk_field512):
    fam = marginal_family(disk_field512, 8)
    assert fam.source_epsilon == pytest.approx(0.02)


def test_family_roundtrip(tmp_path, disk256):
    fam = marginal_family(disk256, 12)
    path = save_family(fam, tmp_path / "fam")
    back = load_family(path)
    assert back.n_angles == fam.n_angles
    np.testing.assert_allclose(back.thetas, fam.thetas)
    assert back.source_area == fam.source_area
    assert back.source_epsilon == fam.source_epsilon
    assert back.spec == fam.spec
    for p, q in zip(fam.profiles, back.profiles):
        assert p.dt == q.dt and p.t0 == q.t0
        np.testing.assert_array_equal(p.values, q.values)


def test_spectral_derivative_of_gaussian():
    dt = 0.01
    t = -2.0 + np.arange(400) * dt
    from perimetry.grids import Profile1D

    p = Profile1D(dt, -2.0, np.exp(-(t**2) / (2 * 0.15**2)))
    d = spectral_derivative(p)
    expected = -t / 0.15**2 * p.values
    assert np.max(np.abs(d.values - expected)) <= 1e-6 * np.max(np.abs(expected))


def test_derivatives_of_constant_vanish():
    from perimetry.grids import Profile1D

    p = Profile1D(0.1, 0.0, np.full(64, 2.5))
    assert np.max(np.abs(spectral_derivative(p).values)) <= 1e-12
    assert np.max(np.abs(marginal_derivative(p).values)) <= 1e-12


def test_gradient_derivative_on_trapezoid():
    # ramps of slope +-2 with a flat top; interior slopes recovered exactly
    from perimetry.grids import Profile1D

    dt = 0.01
    t = np.arange(300) * dt
    values = np.clip(2.0 * np.minimum(t, t[-1] - t), 0.0, 1.0)
    d = marginal_derivative(Profile1D(dt, 0.0, values)).values
    ramp_up = (t > 0.05) & (t < 0.45)
    flat = (t > 0.55) & (t < 2.4)
    assert np.allclose(d[ramp_up], 2.0, atol=0.04)
    assert np.allclose(d[flat], 0.0, atol=1e-12)


def test_derivative_odd_for_even_profile(disk512):
    prof = radon_marginal(disk512, 0.0)
    smooth = mollify1d(prof, 0.02)
    d = spectral_derivative(smooth).values
    # profile is even about t = 0, so the derivative is odd
    assert np.max(np.abs(d + d[::-1])) <= 1e-6 * np.max(np.abs(d))


def test_slice_identity_exact_on_axes(disk_field512):
    chk = fourier_slice_check(disk_field512, thetas=(0.0, math.pi / 2))
    assert chk.max_error <= 1e-10
    assert chk.n_tested > 0


def test_slice_identity_over_angles(disk_field512):
    chk = fourier_slice_check(disk_field512, thetas=np.arange(16) * math.pi / 16)
    assert chk.max_error <= 2e-2
    assert chk.rms_error <= chk.max_error


def test_slice_check_rejects_out_of_band(disk_field512):
    spec = disk_field512.spec
    with pytest.raises(ValueError):
        fourier_slice_check(disk_field512, taus=np.array([1.5 * math.pi / spec.h]))


def test_default_tau_lattice(spec512):
    taus = default_tau_lattice(spec512)
    assert taus.max() <= 0.25 * math.pi / spec512.h
    assert taus.min() == -taus.max()
    step = np.diff(taus)
    np.testing.assert_allclose(step, 2 * math.pi / spec512.length, rtol=1e-12)


def test_global_identity_on_disk(disk_field512):
    chk = global_identity_check(disk_field512, n_angles=60)
    assert not chk.degenerate
    assert 0.97 <= chk.ratio <= 1.03


def test_global_identity_gaussian_analytic(spec512):
    # for exp(-|x|^2 / 2 s^2) both sides equal pi^(5/2) s
    s = 0.12
    x, y = spec512.cell_centers()
    fld = ScalarField(spec512, np.exp(-(x**2 + y**2) / (2 * s**2)))
    chk = global_identity_check(fld, n_angles=60)
    expected = math.pi**2.5 * s
    assert chk.marginal_side == pytest.approx(expected, rel=2e-3)
    assert chk.spectral_side == pytest.approx(expected, rel=2e-3)
    assert chk.ratio == pytest.approx(1.0, abs=5e-3)


def test_global_identity_degenerate_field(spec256):
    fld = ScalarField(spec256, np.zeros((256, 256)))
    chk = global_identity_check(fld, n_angles=16)
    assert chk.degenerate
    assert chk.ratio == 1.0


def test_support_interval_of_disk(disk512):
    prof = radon_marginal(disk512, 0.0)
    sup = support_interval(prof, 0.0, disk512.spec.h)
    assert sup.single and not sup.empty
    assert sup.a == pytest.approx(-0.3, abs=2 * disk512.spec.h)
    assert sup.b == pytest.approx(0.3, abs=2 * disk512.spec.h)


def test_support_interval_detects_gap():
    spec = GridSpec(256, 2.0)
    grid = rasterize(Union(Disk((-0.35, 0.0), 0.15), Disk((0.35, 0.0), 0.15)), spec)
    prof = radon_marginal(grid, 0.0)
    sup = support_interval(prof, 0.0, spec.h)
    assert not sup.single
    assert len(sup.gaps) == 1
    lo, hi = sup.gaps[0]
    assert lo == pytest.approx(-0.2, abs=2 * spec.h)
    assert hi == pytest.approx(0.2, abs=2 * spec.h)


def test_support_interval_empty():
    from perimetry.grids import Profile1D

    sup = support_interval(Profile1D(0.1, 0.0, np.zeros(8)), 0.3, 0.05)
    assert sup.empty


def test_support_analysis_disk_widths(disk512):
    fam = marginal_family(disk512, 24)
    sups = support_analysis(fam)
    for sup in sups:
        assert sup.single
        assert (sup.b - sup.a) == pytest.approx(0.6, abs=4 * disk512.spec.h)


def test_nu_measure_partition(disk256):
    meas = nu_measure(disk256, 0.03125, n_angles=30)
    assert meas.total == pytest.approx(
        meas.endpoint + meas.interior + meas.transition, rel=1e-12
    )
    assert meas.eta == pytest.approx(4 * 0.03125)
    assert meas.delta == pytest.approx(0.2)
    assert meas.nu.shape[0] == 30
    assert meas.per_angle_interior.sum() == pytest.approx(meas.interior, rel=1e-12)
    assert meas.excluded == 0
    doc = meas.to_json()
    assert set(doc) >= {"epsilon", "total", "endpoint", "interior", "transition"}


def test_nu_measure_validations(disk256):
    with pytest.raises(ValueError):
        nu_measure(disk256, 0.03125, n_angles=30, eta=0.1, delta=0.05)  # delta <= eta
    with pytest.raises(ValueError):
        nu_measure(disk256, 0.03125, n_angles=30, eta=0.06)  # eta < 4 eps


def test_nu_measure_empty_grid(spec256):
    empty = BinaryGrid(spec256, np.zeros((256, 256)))
    meas = nu_measure(empty, 0.03125, n_angles=16)
    assert meas.excluded == 16
    assert meas.total == 0.0


def test_nu_endpoint_mass_dominates_for_disk(disk256):
    meas = nu_measure(disk256, 0.03125, n_angles=30)
    assert meas.endpoint >= 5.0 * meas.interior
    assert meas.interior > 0.0


def test_nu_interior_mass_grows_with_holes(disk256):
    holed = rasterize(
        Difference(Disk((0.0, 0.0), 0.3), Rect((0.0, 0.0), (0.08, 0.08))),
        disk256.spec,
    )
    md = nu_measure(disk256, 0.03125, n_angles=30)
    mh = nu_measure(holed, 0.03125, n_angles=30)
    assert mh.interior >= 3.0 * md.interior


def test_midpoint_violation_cases():
    t = np.linspace(-1, 1, 101)
    gauss = np.exp(-(t**2) / 0.08)
    assert midpoint_violation(gauss) < 0.0  # log-concave: defect negative
    dipped = gauss.copy()
    dipped[50] *= 0.5  # carve a notch at the peak
    assert midpoint_violation(dipped) > 0.0
    assert midpoint_violation(np.full(16, 1e-9), floor=1.0) == float("-inf")
    with pytest.raises(ValueError):
        midpoint_violation(gauss, stride=0)
    with pytest.raises(ValueError):
        midpoint_violation(gauss, stride=51)


def test_midpoint_violation_grows_with_stride():
    # smooth bimodal profile: log-convexity of the valley produces a defect
    # of order (stride * dt)^2, so wide strides amplify it
    t = np.linspace(-1.0, 1.0, 201)
    values = np.exp(-((t - 0.5) ** 2) / 0.02) + np.exp(-((t + 0.5) ** 2) / 0.02)
    near = midpoint_violation(values, stride=1)
    far = midpoint_violation(values, stride=50)
    assert near > 0.0
    assert far >= 100.0 * near


def test_diagnostics_disk_lipschitz_matches_chord_slope(disk512):
    # |w'| on the delta-interior of a disk peaks at t = r - delta where the
    # chord-length derivative is 2 (r - delta) / sqrt(delta (2r - delta))
    fam = marginal_family(disk512, 60)
    diag = marginal_diagnostics(fam, 0.1, (0.015625, 0.0078125))
    analytic = 2 * (0.3 - 0.1) / math.sqrt(0.1 * (2 * 0.3 - 0.1))
    assert diag.c_delta[-1] == pytest.approx(analytic, rel=0.1)
    assert diag.c_delta_ratio() <= 1.5
    assert diag.concave_fraction == 1.0
    assert diag.log_concave_fraction == 1.0


def test_diagnostics_holed_blowup(holed512):
    fam = marginal_family(holed512, 60)
    diag = marginal_diagnostics(fam, 0.15, (0.03125, 0.015625, 0.0078125))
    # interior derivative grows like 1 / eps: at least 4x across two halvings
    assert diag.c_delta_ratio() >= 4.0


def test_diagnostics_square_diagonal_profiles_concave():
    spec = GridSpec(512, 2.0)
    grid = rasterize(rotate_shape(Rect((0.0, 0.0), (0.3, 0.3)), math.pi / 4), spec)
    fam = marginal_family(grid, 60)
    diag = marginal_diagnostics(fam, 0.1, (0.015625,))
    assert diag.concave_fraction == 1.0
    assert diag.log_concave_fraction == 1.0


def test_diagnostics_two_disks_violate_log_concavity(spec256):
    grid = rasterize(Union(Disk((-0.35, 0.0), 0.15), Disk((0.35, 0.0), 0.15)), spec256)
    fam = marginal_family(grid, 60)
    diag = marginal_diagnostics(fam, 0.1, (0.015625,))
    assert diag.log_concave_fraction < 1.0
    sups = support_analysis(fam)
    kept = [s.single for s in sups if not s.empty]
    assert np.mean(kept) < 0.5


def test_diagnostics_delta_guard(disk256):
    fam = marginal_family(disk256, 16)
    with pytest.raises(ValueError):
        marginal_diagnostics(fam, 0.1, (0.03125,))  # delta <= 4 max(eps)
