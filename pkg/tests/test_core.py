import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from affine_moduli import core
from affine_moduli.errors import ContractError
from affine_moduli.fixed_points import fixed_family
from strategies import christoffels, group_elements, int_christoffels


def test_gamma0_entries():
    g = core.gamma0()
    assert np.count_nonzero(g) == 4
    expected = oracles.from_slots(G11_1=-1, G12_2=1, G21_2=1, G22_1=1)
    assert np.array_equal(g, expected)


def test_gamma0_is_torsion_free():
    assert np.array_equal(core.torsion(core.gamma0()), np.zeros((2, 2, 2)))
    assert core.is_torsion_free(core.gamma0())


def test_torsion_single_slot():
    t = core.torsion(oracles.from_slots(G12_1=1))
    assert t[0, 1, 0] == 1 and t[1, 0, 0] == -1
    assert np.count_nonzero(t) == 2


@given(christoffels)
def test_torsion_antisymmetric(g):
    t = core.torsion(g)
    assert np.array_equal(t, -t.transpose(1, 0, 2))


def test_flat_has_no_curvature():
    assert not np.any(core.curvature(np.zeros((2, 2, 2))))


def test_gamma0_curvature_matches_loop_oracle():
    g = core.gamma0()
    assert np.array_equal(core.curvature(g), oracles.curvature(g))


def test_gamma0_ricci():
    assert np.array_equal(core.ricci(core.gamma0()), np.diag([-2.0, -2.0]))
    assert np.array_equal(core.ricci_symmetric(core.gamma0()), np.diag([-2.0, -2.0]))


def test_scaled_gamma0_ricci_symmetric():
    rs = core.ricci_symmetric(core.gamma0() / math.sqrt(2))
    assert np.allclose(rs, np.diag([-1.0, -1.0]), rtol=0, atol=1e-12)
    assert core.signature(rs).pair == (2, 0)


def test_fixed_family_ricci_value():
    # direct evaluation of the T-fixed member with (a, b, c, d) = (1, -1, -1, 0)
    rho = core.ricci(fixed_family(1, -1, -1, 0))
    assert np.array_equal(rho, np.array([[1, 0], [0, -1]], dtype=object))
    assert np.array_equal(rho, oracles.ricci(fixed_family(1, -1, -1, 0)))


@given(int_christoffels)
def test_ricci_matches_loop_oracle_exactly(g):
    assert np.array_equal(core.ricci(g), oracles.ricci(g))
    assert np.array_equal(core.rho3(g), oracles.rho3(g))


@given(christoffels)
def test_curvature_antisymmetry(g):
    r = core.curvature(g)
    assert np.array_equal(r, -r.transpose(1, 0, 2, 3))


@given(int_christoffels)
def test_ricci_is_trace_of_curvature(g):
    assert np.array_equal(core.ricci(g), np.einsum("ijki->jk", core.curvature(g)))


@given(int_christoffels, st.integers(-9, 9))
def test_ricci_quadratic_homogeneity(g, s):
    assert np.array_equal(core.ricci(s * g), s * s * core.ricci(g))


def test_ricci_homogeneity_rational():
    g = np.vectorize(Fraction, otypes=[object])(np.arange(8).reshape(2, 2, 2) - 3)
    s = Fraction(3, 7)
    assert np.array_equal(core.ricci(s * g), s * s * core.ricci(g))


@given(christoffels)
def test_ricci_symmetric_exact(g):
    rs = core.ricci_symmetric(g)
    assert rs[0, 1] == rs[1, 0]
    r = core.ricci(g)
    assert np.allclose(rs, (r + r.T) / 2, rtol=0, atol=1e-15)


def test_ricci_symmetric_even_with_torsion():
    sympy = pytest.importorskip("sympy")
    g = np.array(sympy.symbols("g0:8")).reshape(2, 2, 2)
    r = core.ricci(g)
    assert sympy.expand(r[0, 1] - r[1, 0]) == 0
    assert sympy.expand(r[0, 1] - oracles.ricci(g)[0, 1]) == 0


@pytest.mark.parametrize(
    "form, pair",
    [
        (np.diag([-1.0, -1.0]), (2, 0)),
        (np.diag([1.0, -1.0]), (1, 1)),
        (np.array([[0.0, 1.0], [1.0, 0.0]]), (1, 1)),
        (np.diag([3.0, 0.5]), (0, 2)),
    ],
)
def test_signature_examples(form, pair):
    s = core.signature(form)
    assert s.pair == pair and not s.degenerate
    assert s.pair == oracles.signature(form)


def test_signature_degenerate():
    assert core.signature(np.zeros((2, 2))) == core.Signature(0, 0, True)
    assert core.signature(np.diag([0.0, -4.0])) == core.Signature(1, 0, True)
    assert core.signature(np.array([[1.0, 1.0], [1.0, 1.0]])) == core.Signature(0, 1, True)


def test_signature_tolerance_is_scale_invariant():
    b = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-10]])
    for s in (1e-6, 1.0, 1e6):
        assert core.signature(s * b).degenerate
        assert core.signature(s * b, tol=1e-12).pair == (0, 2)


def test_signature_rejects_asymmetric():
    with pytest.raises(ContractError):
        core.signature(np.array([[0.0, 1.0], [-1.0, 0.0]]))


@given(christoffels, group_elements(positive=False))
def test_sylvester_inertia(g, a):
    b = core.ricci_symmetric(g)
    s0 = core.signature(b)
    if s0.degenerate or abs(np.linalg.det(b)) < 1e-3 * core.max_abs(b) ** 2:
        return
    assert core.signature(a.T @ b @ a).pair == s0.pair


@given(christoffels)
def test_closed_form_eigenvalues(g):
    b = core.ricci_symmetric(g)
    lo, hi = core.sym2_eigenvalues(b)
    ev = np.linalg.eigvalsh(b)
    scale = max(core.max_abs(b), 1.0)
    assert abs(lo - ev[0]) <= 1e-12 * scale and abs(hi - ev[1]) <= 1e-12 * scale


def test_as_christoffel_contract():
    with pytest.raises(ContractError):
        core.as_christoffel(np.zeros((2, 2)))
    bad = np.zeros((2, 2, 2))
    bad[0, 0, 0] = np.nan
    with pytest.raises(ContractError):
        core.ricci(bad)
    assert core.as_christoffel(np.zeros((2, 2, 2), dtype=int)).dtype == float
