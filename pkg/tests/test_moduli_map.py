import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from affine_moduli import core, invariants, moduli_map, sampling
from affine_moduli.errors import ContractError
from affine_moduli.moduli_map import RegionLabel as L


def test_sigma_cusp_exact():
    assert moduli_map.sigma_sq("-", Fraction(1, 2)) == (-2, 1)
    p = moduli_map.sigma("-", moduli_map.CUSP_T)
    assert p == pytest.approx((-2.0, 1.0), abs=1e-14)


def test_sigma_cusp_symbolic():
    sympy = pytest.importorskip("sympy")
    p = moduli_map.sigma("-", 1 / sympy.sqrt(2))
    assert sympy.simplify(p.x + 2) == 0 and sympy.simplify(p.y - 1) == 0


@pytest.mark.parametrize("sign, t, xy", [("+", 1.0, (7.0, 10.0)), ("+", 0.5, (7.0, 3.25)), ("-", 1.0, (-3.0, 2.0))])
def test_sigma_values(sign, t, xy):
    assert moduli_map.sigma(sign, t) == pytest.approx(xy, abs=1e-14)


def test_sigma_rejects_zero():
    with pytest.raises(ContractError):
        moduli_map.sigma("+", 0)
    with pytest.raises(ContractError):
        moduli_map.sigma("x", 1.0)


def test_cusp_derivative():
    t = moduli_map.CUSP_T
    d = moduli_map.sigma_derivative("-", t)
    assert abs(d.x) < 1e-12 and abs(d.y) < 1e-12
    h = 1e-6
    p, m = moduli_map.sigma("-", t + h), moduli_map.sigma("-", t - h)
    assert abs((p.x - m.x) / (2 * h)) < 1e-6 and abs((p.y - m.y) / (2 * h)) < 1e-6


@given(st.floats(0.05, 20.0), st.sampled_from(["+", "-"]))
def test_derivative_matches_central_difference(t, sign):
    h = 1e-5 * t
    p, m = moduli_map.sigma(sign, t + h), moduli_map.sigma(sign, t - h)
    d = moduli_map.sigma_derivative(sign, t)
    scale = max(1.0, abs(d.x), abs(d.y))
    assert abs((p.x - m.x) / (2 * h) - d.x) < 1e-4 * scale
    assert abs((p.y - m.y) / (2 * h) - d.y) < 1e-4 * scale


def test_emit_curve_endpoints_and_count():
    rows = moduli_map.emit_curve("+", (1.0, 2.0), 100)
    assert rows.shape == (100, 3)
    assert tuple(rows[0, 1:]) == tuple(moduli_map.sigma("+", 1.0))
    assert tuple(rows[-1, 1:]) == tuple(moduli_map.sigma("+", 2.0))
    assert rows[0, 2] == 10.0 and np.all(rows[:, 2] >= 10.0)
    assert np.all(np.diff(rows[:, 0]) > 0)


def test_emit_curve_injects_cusp():
    rows = moduli_map.emit_curve("-", (0.5, 0.9), 3, inject=(moduli_map.CUSP_T,))
    assert rows.shape == (4, 3)
    hit = rows[rows[:, 0] == moduli_map.CUSP_T]
    assert hit.shape == (1, 3) and hit[0, 1] == -2.0 and hit[0, 2] == 1.0
    log_rows = moduli_map.emit_curve("-", moduli_map.T_WINDOW, 50, "log", inject=(moduli_map.CUSP_T,))
    assert np.any((log_rows[:, 1] == -2.0) & (log_rows[:, 2] == 1.0))


def test_emit_curve_errors():
    for bad in [((1.0, 2.0), 1), ((2.0, 1.0), 5), ((-1.0, 1.0), 5)]:
        with pytest.raises(ContractError):
            moduli_map.emit_curve("+", *bad)


def test_named_points():
    assert moduli_map.classify_point((-2.0, 1.0)) is L.Cusp
    assert moduli_map.classify_point((0.0, 1e6)) is L.D11
    assert moduli_map.classify_point((7.0, 10.0)) is L.BoundarySigmaPlus
    assert moduli_map.classify_point((-3.0, 2.0)) is L.BoundarySigmaMinus
    assert moduli_map.classify_point((20.0, 10.0)) is L.D02
    assert moduli_map.classify_point((-10.0, 5.0)) is L.D20
    assert moduli_map.classify_point((0.0, 0.0)) is L.D11
    assert moduli_map.classify_point((math.nan, 0.0)) is L.Outside
    assert moduli_map.classify_point((0.0, 1e13)) is L.Outside


def test_left_of_cusp_at_cusp_height():
    # both branches of sigma_- leave the cusp upwards, so the horizontal line
    # through it meets the blue region only at the cusp itself
    for delta in (1e-3, 0.1, 0.5):
        assert moduli_map.classify_point((-2.0 - delta, 1.0)) is L.D11
        assert oracles.region(-2.0 - delta, 1.0) == "D11"
    assert moduli_map.classify_point((-2.5, 1.25)) is L.D20


def test_regions_match_analytic_oracle():
    rng = np.random.default_rng(17)
    xs = rng.uniform(-30, 30, 5000)
    ys = rng.uniform(-5, 40, 5000)
    labels = moduli_map.classify_points(xs, ys)
    checked = 0
    for x, y, lab in zip(xs, ys, labels):
        if min(moduli_map.curve_distance("+", x, y), moduli_map.curve_distance("-", x, y)) < 1e-6:
            continue
        assert lab.value == oracles.region(x, y), (x, y)
        checked += 1
    assert checked > 4900


@given(st.floats(0.01, 50.0), st.sampled_from(["+", "-"]))
def test_points_on_curves_get_boundary_labels(t, sign):
    p = moduli_map.sigma(sign, t)
    lab = moduli_map.classify_point(p, tol=1e-8)
    want = L.BoundarySigmaPlus if sign == "+" else L.BoundarySigmaMinus
    assert lab in (want, L.Cusp)


def test_curve_distance_against_dense_sampling():
    t = np.geomspace(1e-2, 1e2, 200001)
    for sign in ("+", "-"):
        s = 1 if sign == "+" else -1
        u = t * t
        cx, cy = s * 4 * u + s / u + 2, 4 * u * u + s * 4 * u + 2
        for px, py in [(0.0, 3.0), (10.0, 20.0), (-5.0, 1.5), (3.0, -1.0)]:
            dense = np.min(np.hypot(cx - px, cy - py))
            exact = float(moduli_map.curve_distance(sign, px, py)[0])
            assert exact <= dense + 1e-12 and dense - exact < 1e-3


@pytest.mark.parametrize("sig, allowed", [
    ((2, 0), {L.D20, L.BoundarySigmaMinus, L.Cusp}),
    ((1, 1), {L.D11, L.BoundarySigmaMinus, L.BoundarySigmaPlus, L.Cusp}),
    ((0, 2), {L.D02, L.BoundarySigmaPlus}),
])
def test_region_signature_consistency(sig, allowed):
    rng = np.random.default_rng(100 + sig[0])
    for _ in range(500):
        g = sampling.random_christoffel(rng, torsion_free=True, signature=sig)
        assert moduli_map.classify_point(invariants.theta(g)) in allowed


def test_theta_gamma0_is_cusp():
    assert moduli_map.classify_point(invariants.theta(core.gamma0())) is L.Cusp


def test_refinement_stability():
    rng = np.random.default_rng(23)
    xs, ys = rng.uniform(-20, 20, 1000), rng.uniform(-5, 20, 1000)
    coarse = moduli_map.classify_points(xs, ys)
    fine = moduli_map.classify_points(xs, ys, n_samples=10 * moduli_map.DEFAULT_SAMPLES)
    assert np.array_equal(coarse, fine)


def test_region_grid_window():
    xs, ys, labels = moduli_map.region_grid((-10, 10, 0, 10), 101)
    assert labels.shape == (101, 101)
    present = set(labels.ravel())
    assert {L.D20, L.D11, L.D02} <= present
    assert labels[np.searchsorted(ys, 1.0), np.searchsorted(xs, -2.0)] is L.Cusp


def test_region_grid_resolution_doubling():
    _, _, coarse = moduli_map.region_grid((-10, 10, 0, 10), 51)
    _, _, fine = moduli_map.region_grid((-10, 10, 0, 10), 101)
    assert np.array_equal(coarse, fine[::2, ::2])


def test_region_grid_rejects_bad_bounds():
    with pytest.raises(ContractError):
        moduli_map.region_grid((1, 0, 0, 1), 5)
