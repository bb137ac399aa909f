"""Property suites run by ``affine-moduli verify``.

Each property draws from its own generator seeded with ``(seed, crc32(name))``
so properties are independent of each other and of execution order. Library
functions are looked up through their modules at call time, so a patched
implementation is what gets checked.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import action, core, fixed_points, invariants, moduli_map, orbifold, sampling

SUITES = ("core", "action", "invariants", "map", "fixed", "orbifold")


@dataclass
class PropertyResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""
    sample: object = None


class Falsified(Exception):
    def __init__(self, detail, sample=None):
        super().__init__(detail)
        self.detail = detail
        self.sample = sample


@dataclass
class _Property:
    name: str
    suite: str
    fn: Callable
    sampled: bool = True


_REGISTRY: list[_Property] = []


def _prop(suite, name, sampled=True):
    def deco(fn):
        _REGISTRY.append(_Property(f"{suite}.{name}", suite, fn, sampled))
        return fn

    return deco


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return core.max_abs(a - b) / max(core.max_abs(a), core.max_abs(b), 1e-300)


def _require(cond, detail, sample=None):
    if not cond:
        raise Falsified(detail, sample)


def _listify(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


def _int_gamma(rng, lo=-5, hi=5):
    return rng.integers(lo, hi + 1, size=(2, 2, 2)).astype(object)


# --- core ---------------------------------------------------------------------


@_prop("core", "curvature-antisymmetry")
def _(rng, n):
    for _ in range(n):
        g = rng.uniform(-2, 2, (2, 2, 2))
        r = core.curvature(g)
        _require(np.array_equal(r, -r.transpose(1, 0, 2, 3)), "R_ijk^l != -R_jik^l", g)
    return n


@_prop("core", "ricci-curvature-trace")
def _(rng, n):
    for _ in range(n):
        g = _int_gamma(rng)
        r = core.ricci(g)
        tr = np.einsum("ijki->jk", core.curvature(g))
        _require(np.array_equal(r, tr), "ricci differs from the trace of curvature", g)
    return n


@_prop("core", "ricci-quadratic-homogeneity")
def _(rng, n):
    for _ in range(n):
        g = _int_gamma(rng)
        s = int(rng.integers(-7, 8))
        _require(np.array_equal(core.ricci(s * g), s * s * core.ricci(g)), f"ricci(sG) != s^2 ricci(G), s={s}", g)
    return n


@_prop("core", "ricci-symmetric-exact")
def _(rng, n):
    for _ in range(n):
        g = rng.uniform(-2, 2, (2, 2, 2))
        rs = core.ricci_symmetric(g)
        _require(rs[0, 1] == rs[1, 0], "rho_s not exactly symmetric", g)
    return n


@_prop("core", "signature-congruence-invariance")
def _(rng, n):
    for _ in range(n):
        b = rng.uniform(-2, 2, (2, 2))
        b = b + b.T
        s0 = core.signature(b)
        if s0.degenerate or abs(np.linalg.det(b)) < 1e-3 * core.max_abs(b) ** 2:
            continue
        a = sampling.random_group_element(rng, "GL")
        s1 = core.signature(a.T @ b @ a)
        _require(s0.pair == s1.pair, f"signature changed {s0} -> {s1}", b)
    return n


@_prop("core", "gamma0-normalized-ricci", sampled=False)
def _(rng, n):
    rs = core.ricci_symmetric(core.gamma0() / math.sqrt(2))
    _require(core.max_abs(rs - np.diag([-1.0, -1.0])) <= 1e-12, f"rho_s = {rs.tolist()}")
    _require(core.signature(rs).pair == (2, 0), "signature of gamma0 is not (2,0)")
    return 1


# --- action -------------------------------------------------------------------


@_prop("action", "identity")
def _(rng, n):
    for _ in range(n):
        g = rng.uniform(-2, 2, (2, 2, 2))
        _require(_rel(action.act(np.eye(2), g), g) == 0, "act(id, G) != G", g)
    return n


@_prop("action", "composition")
def _(rng, n):
    for _ in range(n):
        g = rng.uniform(-2, 2, (2, 2, 2))
        a, b = sampling.random_group_element(rng, "GL"), sampling.random_group_element(rng, "GL")
        err = _rel(action.act(a, action.act(b, g)), action.act(a @ b, g))
        _require(err < 1e-12, f"composition residual {err:.3g}", g)
    return n


@_prop("action", "weight-law")
def _(rng, n):
    for _ in range(n):
        g = rng.uniform(-2, 2, (2, 2, 2))
        a = float(rng.uniform(0.2, 5.0)) * (1 if rng.random() < 0.5 else -1)
        err = _rel(action.act(np.diag([a, 1 / a]), g), a ** action.WEIGHTS * g)
        _require(err < 1e-12, f"weight law residual {err:.3g} at a={a}", g)
    return n


@_prop("action", "ricci-naturality")
def _(rng, n):
    for _ in range(n):
        g = rng.uniform(-2, 2, (2, 2, 2))
        a = sampling.random_group_element(rng, "GL")
        h = action.act(a, g)
        # ricci is a sum of products of symbols, so max|h|^2 is the scale of its rounding error
        err = core.max_abs(core.ricci(h) - action.congruence(a, core.ricci(g))) / core.max_abs(h) ** 2
        _require(err < 1e-12, f"naturality residual {err:.3g}", g)
    return n


@_prop("action", "torsion-and-signature-preserved")
def _(rng, n):
    for _ in range(n):
        g = sampling.random_christoffel(rng, torsion_free=bool(rng.random() < 0.5))
        a = sampling.random_group_element(rng, "GL")
        h = action.act(a, g)
        _require(core.is_torsion_free(g, 1e-12) == core.is_torsion_free(h, 1e-12), "torsion-freeness changed", g)
        s0 = core.signature(core.ricci_symmetric(g))
        s1 = core.signature(core.ricci_symmetric(h))
        _require(s0.pair == s1.pair, f"signature changed {s0} -> {s1}", g)
    return n


@_prop("action", "normalize-ricci")
def _(rng, n):
    for _ in range(n):
        g = sampling.random_christoffel(rng, torsion_free=bool(rng.random() < 0.5))
        h = action.normalize_ricci(g)
        std = action.standard_form(core.signature(core.ricci_symmetric(g)))
        err = core.max_abs(core.ricci_symmetric(action.act(h, g)) - std)
        _require(np.linalg.det(h) > 0 and err < 1e-10, f"normalization residual {err:.3g}", g)
    return n


@_prop("action", "orbit-roundtrip")
def _(rng, n):
    for _ in range(n):
        g = sampling.random_christoffel(rng, torsion_free=bool(rng.random() < 0.5))
        a = sampling.random_group_element(rng, "GL+")
        res = action.orbit_equivalent(g, action.act(a, g))
        _require(res.equivalent and res.residual <= 1e-8, f"round trip failed: {res.status}", g)
    return n


@_prop("action", "orbit-symmetry")
def _(rng, n):
    for _ in range(n):
        g = sampling.random_christoffel(rng)
        a = sampling.random_group_element(rng, "GL+")
        h = action.act(a, g)
        fwd = action.orbit_equivalent(g, h)
        back = action.orbit_equivalent(h, g)
        ok = fwd.equivalent and back.equivalent and _rel(fwd.witness @ back.witness, np.eye(2)) < 1e-8
        _require(ok, "witnesses are not mutually inverse", g)
    return n


@_prop("action", "isotropy-exceptional-orbit")
def _(rng, n):
    for _ in range(n):
        g = sampling.random_c0_point(rng)
        iso = action.isotropy_nontrivial(g)
        _require(iso.nontrivial, "no isotropy on a point of C0", g)
        _require(action.in_exceptional_orbit(g), "C0 point not recognized", g)
        th = invariants.theta(g)
        _require(abs(th[0] + 2) < 1e-8 and abs(th[1] - 1) < 1e-8, f"theta {th} is not the cusp", g)
    return n


@_prop("action", "isotropy-generic")
def _(rng, n):
    for sig in ((2, 0), (1, 1), (0, 2)):
        for _ in range(n):
            g = sampling.random_christoffel(rng, torsion_free=bool(rng.random() < 0.5), signature=sig)
            _require(not action.isotropy_nontrivial(g).nontrivial, f"unexpected isotropy, signature {sig}", g)
    return 3 * n


# --- invariants ---------------------------------------------------------------


def _drift(a, b):
    return abs(a - b) / max(abs(a), 1.0)


@_prop("invariants", "theta-gl-invariance")
def _(rng, n):
    for _ in range(n):
        g = sampling.random_christoffel(rng, torsion_free=True)
        a = sampling.random_group_element(rng, "GL")
        t0, t1 = invariants.theta(g), invariants.theta(action.act(a, g))
        d = max(_drift(t0[0], t1[0]), _drift(t0[1], t1[1]))
        _require(d < 1e-8, f"theta drift {d:.3g}", g)
    return n


@_prop("invariants", "chi-glplus-invariance")
def _(rng, n):
    for _ in range(n):
        g = sampling.random_christoffel(rng, torsion_free=True)
        a = sampling.random_group_element(rng, "GL+")
        d = _drift(invariants.chi(g), invariants.chi(action.act(a, g)))
        _require(d < 1e-8, f"chi drift {d:.3g}", g)
    return n


@_prop("invariants", "scale-invariance")
def _(rng, n):
    for _ in range(n):
        g = sampling.random_christoffel(rng, torsion_free=True)
        s = float(rng.uniform(0.1, 10.0)) * (1 if rng.random() < 0.5 else -1)
        x0, x1 = invariants.xi(g).as_tuple(), invariants.xi(s * g).as_tuple()
        d = max(_drift(a, b) for a, b in zip(x0, x1))
        _require(d < 1e-10, f"scale drift {d:.3g} at s={s}", g)
    return n


def naive_invariants(g):
    """Full index loops, independent of the einsum path."""
    g = np.asarray(g, dtype=float)
    R = range(2)
    rho = [[sum(g[i, n, i] * g[j, k, n] - g[j, n, i] * g[i, k, n] for i in R for n in R) for k in R] for j in R]
    r3 = [[sum(g[i, k, l] * g[j, l, k] for k in R for l in R) for j in R] for i in R]
    det = rho[0][0] * rho[1][1] - rho[0][1] * rho[1][0]
    inv = [[rho[1][1] / det, -rho[0][1] / det], [-rho[1][0] / det, rho[0][0] / det]]
    psi = sum(inv[i][j] * r3[i][j] for i in R for j in R)
    big = (r3[0][0] * r3[1][1] - r3[0][1] * r3[1][0]) / det
    omega = [[0.0, 0.0], [0.0, 0.0]]
    for a in R:
        for lo in R:
            omega[a][lo] = sum(
                g[a, b, b] * g[i, j, k] * r3[k][lo] * inv[i][j] for b in R for i in R for j in R for k in R
            )
    c = omega[0][1] - omega[1][0]
    return psi, big, c * math.sqrt(abs(det)) / det


@_prop("invariants", "two-path-contractions")
def _(rng, n):
    for _ in range(n):
        g = sampling.random_christoffel(rng, torsion_free=True)
        fast = invariants.xi(g).as_tuple()
        slow = naive_invariants(g)
        d = max(_drift(a, b) for a, b in zip(fast, slow))
        _require(d < 1e-12, f"optimized and naive paths differ by {d:.3g}", g)
    return n


@_prop("invariants", "injectivity-evidence")
def _(rng, n):
    for sig in ((2, 0), (1, 1), (0, 2)):
        for _ in range(n):
            g1 = sampling.random_christoffel(rng, torsion_free=True, signature=sig)
            g2 = sampling.random_christoffel(rng, torsion_free=True, signature=sig)
            res = action.orbit_equivalent(g1, g2, group="GL", use_invariants=False)
            if res.equivalent:
                continue
            _require(res.status == "no-witness", f"decider status {res.status}", g1)
            t1, t2 = invariants.theta(g1), invariants.theta(g2)
            gap = max(abs(a - b) / max(abs(a), abs(b), 1.0) for a, b in zip(t1, t2))
            _require(gap > 1e-6, f"inequivalent pair with theta gap {gap:.3g}", [g1, g2])
    return 3 * n


@_prop("invariants", "chi-orientation-report")
def _(rng, n):
    # measured, not asserted: how chi behaves under an orientation-reversing frame
    flips = 0
    for _ in range(n):
        g = sampling.random_christoffel(rng, torsion_free=True)
        c0 = invariants.chi(g)
        c1 = invariants.chi(action.act(fixed_points.reflection_T(), g))
        flips += abs(c0 + c1) <= 1e-8 * max(abs(c0), 1.0)
    raise _Report(f"chi changed sign in {flips}/{n} samples", n)


class _Report(Exception):
    def __init__(self, detail, checked):
        super().__init__(detail)
        self.detail = detail
        self.checked = checked


# --- map ----------------------------------------------------------------------


@_prop("map", "cusp", sampled=False)
def _(rng, n):
    p = moduli_map.sigma_sq("-", Fraction(1, 2))
    _require(p == (-2, 1), f"sigma_-(1/sqrt 2) = {p}")
    _require(moduli_map.classify_point((-2.0, 1.0)) is moduli_map.RegionLabel.Cusp, "cusp not labelled")
    lab = moduli_map.classify_point(invariants.theta(core.gamma0()))
    _require(lab is moduli_map.RegionLabel.Cusp, f"theta(gamma0) labelled {lab}")
    return 1


@_prop("map", "cusp-derivative", sampled=False)
def _(rng, n):
    t = moduli_map.CUSP_T
    d = moduli_map.sigma_derivative("-", t)
    _require(abs(d.x) < 1e-12 and abs(d.y) < 1e-12, f"closed-form derivative {d}")
    h = 1e-6
    p, m = moduli_map.sigma("-", t + h), moduli_map.sigma("-", t - h)
    fd = ((p.x - m.x) / (2 * h), (p.y - m.y) / (2 * h))
    _require(max(abs(v) for v in fd) < 1e-6, f"finite-difference derivative {fd}")
    return 1


_ALLOWED_LABELS = {
    (2, 0): {"D20", "BoundarySigmaMinus", "Cusp"},
    (1, 1): {"D11", "BoundarySigmaMinus", "BoundarySigmaPlus", "Cusp"},
    (0, 2): {"D02", "BoundarySigmaPlus"},
}


@_prop("map", "region-signature-consistency")
def _(rng, n):
    for sig, allowed in _ALLOWED_LABELS.items():
        for _ in range(n):
            g = sampling.random_christoffel(rng, torsion_free=True, signature=sig)
            lab = moduli_map.classify_point(invariants.theta(g))
            _require(lab.value in allowed, f"signature {sig} landed in {lab}", g)
    return 3 * n


@_prop("map", "classification-stability")
def _(rng, n):
    xs = rng.uniform(-20, 20, n)
    ys = rng.uniform(-5, 20, n)
    coarse = moduli_map.classify_points(xs, ys, n_samples=moduli_map.DEFAULT_SAMPLES)
    fine = moduli_map.classify_points(xs, ys, n_samples=10 * moduli_map.DEFAULT_SAMPLES)
    bad = np.nonzero(coarse != fine)[0]
    _require(bad.size == 0, f"{bad.size} labels changed under refinement", [xs[bad[:1]], ys[bad[:1]]])
    return n


# --- fixed --------------------------------------------------------------------


@_prop("fixed", "reflection-fixes-family")
def _(rng, n):
    T = fixed_points.reflection_T()
    for _ in range(n):
        p = tuple(int(v) for v in rng.integers(-9, 10, 4))
        g = fixed_points.fixed_family(*p)
        _require(np.array_equal(action.act(T.astype(object), g), g), "T Gamma(a,b,c,d) != Gamma(a,b,c,d)", p)
    return n


@_prop("fixed", "ricci-closed-form")
def _(rng, n):
    for _ in range(n):
        p = tuple(int(v) for v in rng.integers(-50, 51, 4))
        got = core.ricci(fixed_points.fixed_family(*p))
        _require(np.array_equal(got, fixed_points.fixed_family_ricci(*p)), f"ricci {got.tolist()}", p)
    return n


@_prop("fixed", "structure-group-closure")
def _(rng, n):
    for _ in range(n):
        p = rng.uniform(-2, 2, 4)
        d = rng.uniform(0.2, 3.0, 2) * (1 if rng.random() < 0.5 else -1)
        g = np.diag(d)
        _require(fixed_points.g0_member(g), "diagonal GL+ element rejected", d)
        out = action.act(g, fixed_points.fixed_family(*p))
        _require(fixed_points.fixed_params(out, 1e-14) is not None, "left the fixed family", p)
    return n


@_prop("fixed", "boundary-component-counts", sampled=False)
def _(rng, n):
    total = 0
    for sig, want in (((0, 2), 1), ((1, 1), 2), ((2, 0), 1)):
        count, pats = fixed_points.boundary_components(sig)
        total += len(pats)
        _require(count == want, f"{sig}: {count} components, expected {want}")
    _require(total == 8, f"orthant enumeration covered {total} of 8 patterns")
    return 1


@_prop("fixed", "twisted-action-intertwining")
def _(rng, n):
    T = fixed_points.reflection_T()
    for _ in range(n):
        g = rng.uniform(-2, 2, (2, 2, 2))
        a = sampling.random_group_element(rng, "GL+")
        lhs = action.act(T, action.act(a, g))
        rhs = fixed_points.twisted_act(a, action.act(T, g))
        _require(_rel(lhs, rhs) < 1e-12, "T does not intertwine the twisted action", g)
    return n


# --- orbifold -----------------------------------------------------------------


def _rand_c(rng, size=None):
    return rng.uniform(-2, 2, size) + 1j * rng.uniform(-2, 2, size)


@_prop("orbifold", "complexify-roundtrip")
def _(rng, n):
    for _ in range(n):
        g = rng.uniform(-2, 2, (2, 2, 2))
        err = core.max_abs(orbifold.realify(orbifold.complexify(g)) - g)
        _require(err < 1e-14, f"round-trip error {err:.3g}", g)
    return n


@_prop("orbifold", "t-lambda-isotropy", sampled=False)
def _(rng, n):
    T = orbifold.T_LAMBDA
    _require(core.max_abs(np.linalg.matrix_power(T, 3) - np.eye(2)) < 1e-14, "T_lambda^3 != id")
    err = core.max_abs(action.act(T, core.gamma0()) - core.gamma0())
    _require(err < 1e-14, f"T_lambda moves gamma0 by {err:.3g}")
    return 1


@_prop("orbifold", "t-lambda-weight-table")
def _(rng, n):
    lam = orbifold.LAMBDA
    w = np.array([lam, 1, lam.conjugate(), lam])
    for _ in range(n):
        a = _rand_c(rng, 4)
        got = orbifold.complexify(action.act(orbifold.T_LAMBDA, orbifold.realify(a)))
        _require(np.max(np.abs(got - w * a)) < 1e-12, "weight table violated", a)
    return n


@_prop("orbifold", "slice-equivariance")
def _(rng, n):
    for _ in range(n):
        a1, a2 = _rand_c(rng), _rand_c(rng)
        z3 = orbifold.z3_equivariance_check(a1, a2)
        cj = orbifold.conjugation_equivariance_check(a1, a2)
        s3 = max(orbifold.s3_equivariance_residuals(a1, a2).values())
        _require(max(z3, cj, s3) < 1e-12, f"residuals z3={z3:.3g} conj={cj:.3g} s3={s3:.3g}", (a1, a2))
    return n


@_prop("orbifold", "s3-group-structure", sampled=False)
def _(rng, n):
    mats = [e.matrix for e in orbifold.s3_elements()]

    def index(m):
        hits = [i for i, x in enumerate(mats) if np.allclose(x, m, atol=1e-12)]
        return hits[0] if len(hits) == 1 else None

    _require(all(index(m) is not None for m in mats), "elements are not distinct")
    for a in mats:
        for b in mats:
            _require(index(a @ b) is not None, "not closed under composition")
    _require(any(not np.allclose(a @ b, b @ a) for a in mats for b in mats), "group is abelian")
    return 1


@_prop("orbifold", "tangent-finite-difference", sampled=False)
def _(rng, n):
    for b1, b2 in ((1j, 0), (0, 1), (0, 1j), (0.3 + 0.2j, -0.1 + 0.5j)):
        closed = orbifold.orbit_tangent(b1, b2)
        e1 = np.max(np.abs(orbifold.orbit_tangent_fd(b1, b2, 1e-3) - closed))
        e2 = np.max(np.abs(orbifold.orbit_tangent_fd(b1, b2, 1e-4) - closed))
        order = math.log10(e1 / e2)
        _require(order >= 1.9, f"order {order:.3f} for beta=({b1}, {b2})")
    return 1


@_prop("orbifold", "transversality-rank", sampled=False)
def _(rng, n):
    r = orbifold.transversality_rank(1e-8)
    _require(r == 8, f"rank {r}")
    return 1


@_prop("orbifold", "slice-base-in-exceptional-orbit", sampled=False)
def _(rng, n):
    _require(action.in_exceptional_orbit(orbifold.SLICE_BASE), "slice base not in C0")
    _require(action.orbit_equivalent(core.gamma0(), orbifold.SLICE_BASE).equivalent, "slice base not equivalent to gamma0")
    return 1


# --- runner -------------------------------------------------------------------


def properties(suite: str = "all") -> list[_Property]:
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    return [p for p in _REGISTRY if suite in ("all", p.suite)]


def run_property(prop: _Property, samples: int, seed: int) -> PropertyResult:
    rng = np.random.default_rng([seed, zlib.crc32(prop.name.encode())])
    try:
        checked = prop.fn(rng, samples)
    except Falsified as exc:
        return PropertyResult(prop.name, False, 0, exc.detail, _listify(exc.sample))
    except _Report as rep:
        return PropertyResult(prop.name, True, rep.checked, rep.detail)
    except Exception as exc:  # a crash falsifies the property too
        return PropertyResult(prop.name, False, 0, f"{type(exc).__name__}: {exc}")
    return PropertyResult(prop.name, True, checked)


def run_suites(suite: str = "all", samples: int = 100, seed: int = 0) -> list[PropertyResult]:
    results = [run_property(p, samples, seed) for p in properties(suite)]
    return sorted(results, key=lambda r: (SUITES.index(r.name.split(".")[0]), r.name))
