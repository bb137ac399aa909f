"""Change-of-basis action of GL(2, R) on constant Christoffel symbols.

Convention: a matrix ``g`` acts through the new frame ``e'_i = g[i, a] e_a``,

    (g Gamma)_ij^k = g[i, a] g[j, b] Gamma_ab^c ginv[c, k],

so ``act(g1, act(g2, G)) == act(g1 @ g2, G)`` and ``g = diag(a, 1/a)``
scales slot ``(i, j, k)`` by ``a ** weight_exponent(i, j, k)``. A (0,2)
tensor such as the Ricci form transforms as ``rho -> g @ rho @ g.T``.

The orbit decider normalizes both symmetric Ricci forms to a standard form
and then searches the residual isometry group (rotations for definite
forms, hyperbolic boosts ``diag(a, 1/a)`` for split forms). Candidates come
from slot ratios, which are exact; a grid is only a fallback, and a
negative answer that relied on it is reported as inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares

from . import core
from .core import as_christoffel, max_abs
from .errors import ContractError, DegenerateRicciError

__all__ = [
    "act",
    "congruence",
    "weight_exponent",
    "WEIGHTS",
    "orientation",
    "check_group_element",
    "rotation",
    "boost",
    "standard_form",
    "normalize_ricci",
    "to_complex_frame",
    "from_complex_frame",
    "IsotropyResult",
    "isotropy_nontrivial",
    "in_exceptional_orbit",
    "OrbitResult",
    "orbit_equivalent",
    "REFLECTION_T",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-8

REFLECTION_T = np.diag([-1.0, 1.0])

# complex frame f_1 = e_1 + i e_2, f_2 = e_1 - i e_2 (rows in the e-basis)
COMPLEX_FRAME = np.array([[1.0, 1.0j], [1.0, -1.0j]])
COMPLEX_FRAME_INV = np.array([[0.5, 0.5], [-0.5j, 0.5j]])


def weight_exponent(i: int, j: int, k: int) -> int:
    """``delta_1i - delta_2i + delta_1j - delta_2j - delta_1k + delta_2k``.

    Indices are 1-based, as in the printed formula.
    """
    for idx in (i, j, k):
        if idx not in (1, 2):
            raise ContractError(f"index must be 1 or 2, got {idx}")

    def s(x):
        return 1 if x == 1 else -1

    return s(i) + s(j) - s(k)


WEIGHTS = np.array(
    [[[weight_exponent(i, j, k) for k in (1, 2)] for j in (1, 2)] for i in (1, 2)]
)


def orientation(g) -> int:
    """Sign of ``det g``: +1 for GL+, -1 for the other component."""
    d = float(np.linalg.det(np.asarray(g, dtype=float)))
    return 1 if d > 0 else -1


def check_group_element(g, rtol: float = 1e-14) -> np.ndarray:
    """Return ``g`` as a 2x2 array, raising if it is singular."""
    m = np.asarray(g)
    if m.shape != (2, 2):
        raise ContractError(f"group element must be 2x2, got shape {m.shape}")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) <= rtol * max(max_abs(m), 1e-300) ** 2:
        raise ContractError("group element is singular")
    return m


def _inverse(m):
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    out = np.empty_like(m)
    out[0, 0] = m[1, 1] / det
    out[1, 1] = m[0, 0] / det
    out[0, 1] = -m[0, 1] / det
    out[1, 0] = -m[1, 0] / det
    return out


def act(g, gamma) -> np.ndarray:
    """The structure ``g Gamma`` expressed in the frame ``e'_i = g[i, a] e_a``."""
    m = check_group_element(g)
    G = as_christoffel(gamma)
    if m.dtype == object or G.dtype == object:
        m = np.asarray(m, dtype=object)
        G = np.asarray(G, dtype=object)
    return np.einsum("ia,jb,abc,ck->ijk", m, m, G, _inverse(m))


def congruence(g, form) -> np.ndarray:
    """Transform a (0,2) tensor: ``g @ form @ g.T``."""
    m = np.asarray(g)
    return m @ np.asarray(form) @ m.T


def rotation(theta: float) -> np.ndarray:
    """Rotation frame change; equals ``T_{e^{i theta}, 0}`` in the complex frame."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def boost(a: float) -> np.ndarray:
    return np.diag([a, 1.0 / a])


def to_complex_frame(gamma) -> np.ndarray:
    """Christoffel symbols relative to ``f_1 = e_1 + i e_2, f_2 = e_1 - i e_2``."""
    G = as_christoffel(gamma)
    F = COMPLEX_FRAME
    return np.einsum("ia,jb,abc,ck->ijk", F, F, G, COMPLEX_FRAME_INV)


def from_complex_frame(gamma_c) -> np.ndarray:
    """Inverse of :func:`to_complex_frame`; the result is real for real structures."""
    Gc = np.asarray(gamma_c, dtype=complex)
    Fi = COMPLEX_FRAME_INV
    return np.einsum("ia,jb,abc,ck->ijk", Fi, Fi, Gc, COMPLEX_FRAME)


# --- normalization of the symmetric Ricci tensor ---------------------------

_STANDARD = {
    (2, 0): np.diag([-1.0, -1.0]),
    (0, 2): np.diag([1.0, 1.0]),
    (1, 1): np.array([[0.0, 1.0], [1.0, 0.0]]),
}


def standard_form(sig) -> np.ndarray:
    """Standard representative: ``-I``, ``I`` or the split form ``[[0,1],[1,0]]``."""
    key = tuple(sig)[:2]
    if key not in _STANDARD:
        raise ContractError(f"no standard form for signature {sig}")
    return _STANDARD[key].copy()


def _nondegenerate_rs(gamma, tol=core.DEFAULT_DEGENERACY_TOL):
    rs = core.ricci_symmetric(gamma)
    sig = core.signature(rs, tol)
    if sig.degenerate:
        raise DegenerateRicciError("symmetric Ricci tensor is degenerate")
    return rs, sig


def _gram_schmidt(form):
    """Rows ``v1, v2`` with ``v_i form v_j^T`` diagonal with entries +-1."""
    rs = np.asarray(form, dtype=float)

    def ip(u, v):
        return float(u @ rs @ v)

    cands = [np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 1.0]), np.array([1.0, -1.0])]
    first = max(cands, key=lambda v: abs(ip(v, v)) / float(v @ v))
    n1 = ip(first, first)
    v1 = first / math.sqrt(abs(n1))
    s1 = math.copysign(1.0, n1)
    # the coordinate vector least aligned with v1 completes the basis
    other = min(cands[:2], key=lambda v: abs(v @ v1))
    w = other - ip(other, v1) * s1 * v1
    n2 = ip(w, w)
    v2 = w / math.sqrt(abs(n2))
    s2 = math.copysign(1.0, n2)
    return v1, s1, v2, s2


def normalize_ricci(gamma, target=None) -> np.ndarray:
    """Find ``h`` in GL+ with ``ricci_symmetric(act(h, gamma)) == target``.

    ``target`` defaults to the standard form of the signature of the
    symmetric Ricci tensor. Passing a target of a different signature, or a
    non-standard target, raises :class:`ContractError`.
    """
    rs, sig = _nondegenerate_rs(gamma)
    std = standard_form(sig)
    if target is not None:
        t = np.asarray(target, dtype=float)
        if t.shape != (2, 2) or not np.array_equal(t, std):
            raise ContractError(
                f"target {t.tolist()} is not the standard form for signature {sig}"
            )
    v1, s1, v2, s2 = _gram_schmidt(rs)
    if sig.pair == (1, 1):
        pos, neg = (v1, v2) if s1 > 0 else (v2, v1)
        root = math.sqrt(0.5)
        h = np.array([(pos + neg) * root, (pos - neg) * root])
        if np.linalg.det(h) < 0:
            h = h[::-1].copy()
    else:
        h = np.array([v1, v2])
        if np.linalg.det(h) < 0:
            h[1] = -h[1]
    return h


# --- residual isometry search ----------------------------------------------


def _rel_residual(a, b) -> float:
    scale = max(max_abs(b), max_abs(a), 1e-300)
    return max_abs(np.asarray(a) - np.asarray(b)) / scale


def _slot_candidates(src, dst, weights, slot_tol, definite):
    """Candidate isometry parameters from slot ratios ``dst/src = x**eps``.

    Returns (candidates, exhaustive). For definite forms the candidates are
    angles; for split forms they are real boost factors ``a`` (any sign).
    ``exhaustive`` is False when no slot was large enough to use.
    """
    scale = max(max_abs(src), max_abs(dst))
    out = []
    used = False
    for idx in np.ndindex(2, 2, 2):
        s, d = src[idx], dst[idx]
        if abs(s) <= slot_tol * scale:
            continue
        used = True
        if abs(d) <= slot_tol * scale:
            # a nonzero slot cannot be mapped to zero by a diagonal isometry
            return [], True
        eps = int(weights[idx])
        ratio = d / s
        if definite:
            phase = math.atan2(ratio.imag, ratio.real)
            n = abs(eps)
            sgn = 1 if eps > 0 else -1
            for m in range(n):
                out.append(sgn * (phase + 2 * math.pi * m) / n)
        else:
            r = float(np.real(ratio))
            root = math.copysign(abs(r) ** (1.0 / abs(eps)), r)
            out.append(root if eps > 0 else 1.0 / root)
    return out, used


def _dedupe(values, definite):
    keep = []
    for v in values:
        if definite:
            v = math.remainder(v, 2 * math.pi)
            if not any(abs(math.remainder(v - w, 2 * math.pi)) < 1e-9 for w in keep):
                keep.append(v)
        elif not any(abs(v - w) <= 1e-9 * max(abs(w), 1.0) for w in keep):
            keep.append(v)
    return keep


def _isometry(param, definite):
    return rotation(param) if definite else boost(param)


def _residual_isometries(n1, n2, sig, slot_tol):
    """Candidate isometries ``r`` of the standard form with ``act(r, n1) ~ n2``.

    Returns (list of matrices, exhaustive flag).
    """
    definite = sig.pair != (1, 1)
    if definite:
        c1, c2 = to_complex_frame(n1), to_complex_frame(n2)
    else:
        c1, c2 = n1, n2
    params, used = _slot_candidates(c1, c2, WEIGHTS, slot_tol, definite)
    if not used:
        if definite:
            params = list(np.linspace(-math.pi, math.pi, 10_000, endpoint=False))
        else:
            mags = np.geomspace(1e-3, 1e3, 5_000)
            params = list(mags) + list(-mags)
        return [_isometry(p, definite) for p in params], False
    params = _dedupe(params, definite)
    if definite:
        params.sort(key=lambda t: (t % (2 * math.pi)))
    return [_isometry(p, definite) for p in params], True


def _polish(g0, gamma1, gamma2):
    """Least-squares refinement of a near-witness; the result is re-verified."""
    scale = max(max_abs(gamma2), 1e-300)

    def resid(x):
        return ((act(x.reshape(2, 2), gamma1) - gamma2) / scale).ravel()

    sol = least_squares(resid, np.asarray(g0, dtype=float).ravel(), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return sol.x.reshape(2, 2)


@dataclass(frozen=True)
class OrbitResult:
    """Outcome of :func:`orbit_equivalent`.

    ``status`` is one of ``"verified"``, ``"signature-mismatch"``,
    ``"torsion-mismatch"``, ``"invariant-separation"``, ``"no-witness"``
    (exhaustive candidate search failed) or ``"inconclusive"`` (only the
    grid fallback ran).
    """

    equivalent: bool
    status: str
    witness: np.ndarray | None = None
    residual: float | None = None

    @property
    def inconclusive(self) -> bool:
        return self.status == "inconclusive"


def _search(gamma1, gamma2, sig, tol, slot_tol):
    """Look for g in GL+ with act(g, gamma1) = gamma2; both share signature ``sig``."""
    h1 = normalize_ricci(gamma1)
    h2 = normalize_ricci(gamma2)
    n1, n2 = act(h1, gamma1), act(h2, gamma2)
    cands, exhaustive = _residual_isometries(n1, n2, sig, slot_tol)
    h2inv = np.linalg.inv(h2)
    best = (math.inf, None)
    for r in cands:
        w = h2inv @ r @ h1
        res = _rel_residual(act(w, gamma1), gamma2)
        if res <= tol:
            return w, res, exhaustive
        if res < best[0]:
            best = (res, w)
    if best[1] is not None and best[0] < 1e-3:
        w = _polish(best[1], gamma1, gamma2)
        if np.linalg.det(w) > 0:
            res = _rel_residual(act(w, gamma1), gamma2)
            if res <= tol:
                return w, res, exhaustive
    return None, best[0], exhaustive


def orbit_equivalent(
    gamma1,
    gamma2,
    group: str = "GL+",
    tol: float = DEFAULT_TOL,
    use_invariants: bool = True,
) -> OrbitResult:
    """Decide whether ``gamma2 = act(g, gamma1)`` for some ``g`` in ``group``.

    ``group`` is ``"GL+"`` or ``"GL"``. A positive answer always carries a
    witness whose relative residual ``max|act(g, G1) - G2| / max|G2|`` is
    at most ``tol``. With ``use_invariants`` torsion-free pairs whose
    (psi3, Psi3) differ are rejected without a search.
    """
    group = _canonical_group(group)
    g1 = as_christoffel(gamma1).astype(float)
    g2 = as_christoffel(gamma2).astype(float)
    _, sig1 = _nondegenerate_rs(g1)
    _, sig2 = _nondegenerate_rs(g2)
    if sig1.pair != sig2.pair:
        return OrbitResult(False, "signature-mismatch")
    tf1 = core.is_torsion_free(g1, 1e-9)
    tf2 = core.is_torsion_free(g2, 1e-9)
    if tf1 != tf2:
        return OrbitResult(False, "torsion-mismatch")
    if use_invariants and tf1 and _theta_separated(g1, g2):
        return OrbitResult(False, "invariant-separation")

    slot_tol = max(tol, 1e-10)
    targets = [(g2, np.eye(2))]
    if group == "GL":
        targets.append((act(REFLECTION_T, g2), REFLECTION_T))
    all_exhaustive = True
    best = math.inf
    for target, post in targets:
        w, res, exhaustive = _search(g1, target, sig1, tol, slot_tol)
        all_exhaustive &= exhaustive
        if w is not None:
            witness = post @ w
            return OrbitResult(True, "verified", witness, _rel_residual(act(witness, g1), g2))
        best = min(best, res)
    if not all_exhaustive:
        return OrbitResult(False, "inconclusive", None, best)
    return OrbitResult(False, "no-witness", None, best)


def _canonical_group(group: str) -> str:
    key = group.replace(" ", "").upper()
    if key in ("GL+", "GLPLUS", "GL⁺"):
        return "GL+"
    if key == "GL":
        return "GL"
    raise ContractError(f"unknown group {group!r}; expected 'GL+' or 'GL'")


def _theta_separated(g1, g2, sep=1e-6) -> bool:
    from .invariants import theta

    try:
        t1, t2 = theta(g1), theta(g2)
    except ContractError:
        return False
    return any(abs(a - b) > sep * (1 + abs(a) + abs(b)) for a, b in zip(t1, t2))


# --- isotropy ----------------------------------------------------------------


class IsotropyResult(NamedTuple):
    nontrivial: bool
    witness: np.ndarray | None


def isotropy_nontrivial(gamma, tol: float = DEFAULT_TOL) -> IsotropyResult:
    """Search for ``g != id`` in GL+ with ``act(g, gamma) == gamma``.

    After normalizing the symmetric Ricci tensor, any isotropy lies in the
    isometry group of the standard form, where each nonzero slot forces
    ``x ** eps == 1``. The witness (if any) is returned in the original
    frame; for definite forms the smallest positive rotation angle wins.
    """
    G = as_christoffel(gamma).astype(float)
    _, sig = _nondegenerate_rs(G)
    h = normalize_ricci(G)
    n = act(h, G)
    cands, _ = _residual_isometries(n, n, sig, max(tol, 1e-10))
    hinv = np.linalg.inv(h)
    for r in cands:
        if np.allclose(r, np.eye(2), atol=1e-9):
            continue
        w = hinv @ r @ h
        if _rel_residual(act(w, G), G) <= tol:
            return IsotropyResult(True, w)
    return IsotropyResult(False, None)


def in_exceptional_orbit(gamma, tol: float = DEFAULT_TOL) -> bool:
    """Membership in the orbit of :func:`core.gamma0`.

    Torsion-free, signature (2, 0), and nontrivial isotropy. Degenerate
    input returns False.
    """
    G = as_christoffel(gamma).astype(float)
    if not core.is_torsion_free(G, tol):
        return False
    sig = core.signature(core.ricci_symmetric(G))
    if sig.degenerate or sig.pair != (2, 0):
        return False
    return isotropy_nontrivial(G, tol).nontrivial
