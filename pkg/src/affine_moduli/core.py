"""Tensor algebra for constant Christoffel symbols on a surface.

A Type-A structure is stored as a ``(2, 2, 2)`` array ``gamma`` with
``gamma[i, j, k]`` the coefficient of ``d_k`` in ``nabla_{d_i} d_j``.
Indices are 0-based here; documentation and the JSON interface use the
1-based names (``G12_1`` is ``gamma[0, 1, 0]``).

Every function accepts float, complex, or ``object`` arrays (e.g. of
``fractions.Fraction``), so identities can be checked exactly.

Signature convention: ``(p, q)`` counts NEGATIVE eigenvalues first.
``diag(-1, -1)`` has signature ``(2, 0)``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import ContractError

__all__ = [
    "as_christoffel",
    "torsion",
    "is_torsion_free",
    "curvature",
    "ricci",
    "ricci_symmetric",
    "rho3",
    "Signature",
    "signature",
    "sym2_eigenvalues",
    "gamma0",
    "max_abs",
]

DEFAULT_DEGENERACY_TOL = 1e-9


def as_christoffel(gamma) -> np.ndarray:
    """Coerce ``gamma`` to a ``(2, 2, 2)`` array, checking shape and finiteness."""
    arr = np.asarray(gamma)
    if arr.dtype.kind in "iub":
        arr = arr.astype(float)
    if arr.shape != (2, 2, 2):
        raise ContractError(f"Christoffel array must have shape (2, 2, 2), got {arr.shape}")
    if arr.dtype.kind in "fc" and not np.all(np.isfinite(arr)):
        raise ContractError("Christoffel symbols must be finite")
    return arr


def max_abs(arr) -> float:
    """Max-abs entry norm, the scale used by every relative tolerance."""
    arr = np.asarray(arr)
    if arr.size == 0:
        return 0.0
    return float(max(abs(x) for x in arr.ravel()))


def torsion(gamma) -> np.ndarray:
    """``T_ij^k = Gamma_ij^k - Gamma_ji^k``."""
    g = as_christoffel(gamma)
    return g - g.transpose(1, 0, 2)


def is_torsion_free(gamma, tol: float = 0.0) -> bool:
    """True if the torsion vanishes up to ``tol`` relative to ``max|Gamma|``."""
    g = as_christoffel(gamma)
    t = max_abs(torsion(g))
    return t <= tol * max_abs(g)


def curvature(gamma) -> np.ndarray:
    """Curvature ``R_ijk^l = Gamma_in^l Gamma_jk^n - Gamma_jn^l Gamma_ik^n``.

    The derivative terms of the general formula drop out because the
    symbols are constant.
    """
    g = as_christoffel(gamma)
    first = np.einsum("inl,jkn->ijkl", g, g)
    return first - first.transpose(1, 0, 2, 3)


def ricci(gamma) -> np.ndarray:
    """Ricci tensor ``rho_jk = Gamma_in^i Gamma_jk^n - Gamma_jn^i Gamma_ik^n``.

    For constant symbols on a surface this is symmetric identically, torsion
    or not; the antisymmetric part cancels term by term.
    """
    g = as_christoffel(gamma)
    return np.einsum("ini,jkn->jk", g, g) - np.einsum("jni,ikn->jk", g, g)


def ricci_symmetric(gamma) -> np.ndarray:
    """Symmetrized Ricci tensor ``(rho + rho^T) / 2``; exactly symmetric.

    Differs from :func:`ricci` only by rounding in the off-diagonal entry.
    """
    r = ricci(gamma)
    off = (r[0, 1] + r[1, 0]) / 2
    out = r.copy()
    out[0, 1] = off
    out[1, 0] = off
    return out


def rho3(gamma) -> np.ndarray:
    """Quadratic form ``rho3_ij = Gamma_ik^l Gamma_jl^k``."""
    g = as_christoffel(gamma)
    return np.einsum("ikl,jlk->ij", g, g)


class Signature(NamedTuple):
    """Inertia of a symmetric 2x2 form: ``p`` negatives, ``q`` positives."""

    p: int
    q: int
    degenerate: bool

    @property
    def pair(self) -> tuple[int, int]:
        return (self.p, self.q)

    def __str__(self) -> str:
        return "degenerate" if self.degenerate else f"({self.p},{self.q})"


def _check_symmetric(b, sym_tol: float) -> np.ndarray:
    m = np.asarray(b)
    if m.shape != (2, 2):
        raise ContractError(f"bilinear form must be 2x2, got shape {m.shape}")
    if abs(m[0, 1] - m[1, 0]) > sym_tol * max(max_abs(m), 1e-300):
        raise ContractError("signature() requires a symmetric bilinear form")
    return m


def sym2_eigenvalues(b) -> tuple[float, float]:
    """Closed-form eigenvalues of a symmetric 2x2 matrix, ascending."""
    m = np.asarray(b, dtype=float)
    half_tr = (m[0, 0] + m[1, 1]) / 2
    half_diff = (m[0, 0] - m[1, 1]) / 2
    off = (m[0, 1] + m[1, 0]) / 2
    rad = math.hypot(half_diff, off)
    return (half_tr - rad, half_tr + rad)


def signature(b, tol: float = DEFAULT_DEGENERACY_TOL, sym_tol: float = 1e-12) -> Signature:
    """Signature ``(#negative, #positive)`` of a symmetric 2x2 form.

    ``b`` is degenerate when ``|det b| <= tol * max|b|**2``; the test is
    scale invariant. Non-symmetric input raises :class:`ContractError`.
    """
    m = _check_symmetric(b, sym_tol)
    scale = max_abs(m)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    tr = m[0, 0] + m[1, 1]
    if scale == 0:
        return Signature(0, 0, True)
    if abs(det) <= tol * scale**2:
        # rank one: the surviving eigenvalue is the trace
        if abs(tr) <= tol * scale:
            return Signature(0, 0, True)
        return Signature(1, 0, True) if tr < 0 else Signature(0, 1, True)
    if det < 0:
        return Signature(1, 1, False)
    return Signature(2, 0, False) if tr < 0 else Signature(0, 2, False)


def gamma0(dtype=float) -> np.ndarray:
    """The exceptional structure whose orbit carries the Z3 isotropy.

    ``G11_1 = -1``, ``G12_2 = G21_2 = G22_1 = 1``, all other symbols 0.
    """
    g = np.zeros((2, 2, 2), dtype=dtype)
    g[0, 0, 0] = -1
    g[0, 1, 1] = 1
    g[1, 0, 1] = 1
    g[1, 1, 0] = 1
    return g
