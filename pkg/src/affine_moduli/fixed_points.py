"""Structures fixed by the orientation-reversing reflection T = diag(-1, 1).

``act(T, G) == G`` forces the pattern ``Gamma(a, b, c, d)`` with
``G11_2 = a``, ``G12_1 = b``, ``G21_1 = c``, ``G22_2 = d`` and all other
symbols zero. Its Ricci tensor is ``diag(a (d - c), b (d - c))``.
"""

from __future__ import annotations

from itertools import product
from typing import NamedTuple

import numpy as np

from . import core
from .action import REFLECTION_T, act, check_group_element
from .errors import ContractError

__all__ = [
    "FixedPointParams",
    "reflection_T",
    "fixed_family",
    "fixed_family_ricci",
    "fixed_params",
    "g0_member",
    "twisted_act",
    "SignPattern",
    "boundary_components",
]


class FixedPointParams(NamedTuple):
    a: float
    b: float
    c: float
    d: float


def reflection_T() -> np.ndarray:
    """``T e1 = -e1``, ``T e2 = e2``."""
    return REFLECTION_T.copy()


def fixed_family(a, b=None, c=None, d=None, dtype=None) -> np.ndarray:
    """The T-fixed structure ``Gamma(a, b, c, d)``.

    Accepts four scalars or a single :class:`FixedPointParams`. ``dtype``
    defaults to ``object`` for exact scalars (ints, Fractions) and float
    otherwise.
    """
    if b is None:
        a, b, c, d = a
    vals = (a, b, c, d)
    if dtype is None:
        dtype = float if all(isinstance(v, float) for v in vals) else object
    g = np.zeros((2, 2, 2), dtype=dtype)
    if dtype is object:
        g[...] = 0
    g[0, 0, 1] = a
    g[0, 1, 0] = b
    g[1, 0, 0] = c
    g[1, 1, 1] = d
    return g


def fixed_family_ricci(a, b, c, d) -> np.ndarray:
    """Closed form of ``ricci(fixed_family(a, b, c, d))``."""
    g = np.zeros((2, 2), dtype=object)
    g[...] = 0
    g[0, 0] = a * (d - c)
    g[1, 1] = b * (d - c)
    return g


def fixed_params(gamma, tol: float = 0.0) -> FixedPointParams | None:
    """Recover ``(a, b, c, d)`` if ``gamma`` has the T-fixed pattern, else None."""
    g = core.as_christoffel(gamma)
    scale = core.max_abs(g)
    for idx in ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)):
        if abs(g[idx]) > tol * scale:
            return None
    return FixedPointParams(g[0, 0, 1], g[0, 1, 0], g[1, 0, 0], g[1, 1, 1])


def g0_member(g) -> bool:
    """True for elements of the structure group ``{g in GL+ : T g = g T}``.

    These are exactly the diagonal matrices with positive determinant.
    """
    m = np.asarray(g, dtype=float)
    if m.shape != (2, 2):
        raise ContractError(f"group element must be 2x2, got shape {m.shape}")
    return bool(m[0, 1] == 0 and m[1, 0] == 0 and m[0, 0] * m[1, 1] > 0)


def twisted_act(g, gamma) -> np.ndarray:
    """The twisted action ``g * Gamma = (T g T^-1) Gamma``."""
    m = check_group_element(g)
    T = REFLECTION_T
    return act(T @ m @ T, gamma)


class SignPattern(NamedTuple):
    """One open orthant of ``(sign a, sign b, sign(d - b))`` on the torsion-free slice."""

    a: int
    b: int
    d_minus_b: int

    def describe(self) -> str:
        def s(x):
            return ">0" if x > 0 else "<0"

        rel = "d>b" if self.d_minus_b > 0 else "d<b"
        return f"{{a{s(self.a)}, b{s(self.b)}, {rel}}}"


_ALLOWED = {(2, 0), (1, 1), (0, 2)}


def _orthant_signature(pattern: SignPattern) -> core.Signature:
    # representative point of the orthant, evaluated through the general Ricci path
    a, b, delta = pattern
    rep = fixed_family(a, b, b, b + delta)
    return core.signature(core.ricci(rep).astype(float))


def boundary_components(sig) -> tuple[int, list[SignPattern]]:
    """Boundary components of the unoriented torsion-free moduli space.

    Enumerates the 8 open orthants of ``(a, b, d - b)`` on the slice
    ``c = b``, keeps those whose Ricci tensor has signature ``sig``, and
    halves the count because the two arc components of the structure group
    identify patterns in pairs. For ``(2, 0)`` the singular orbit is ignored.
    """
    key = tuple(sig)[:2]
    if key not in _ALLOWED:
        raise ContractError(f"signature must be one of {sorted(_ALLOWED)}, got {sig}")
    patterns = []
    for signs in product((1, -1), repeat=3):
        pat = SignPattern(*signs)
        s = _orthant_signature(pat)
        if not s.degenerate and s.pair == key:
            patterns.append(pat)
    # -id lies in the second arc component and maps each orthant to its negative
    for pat in patterns:
        if SignPattern(-pat.a, -pat.b, -pat.d_minus_b) not in patterns:
            raise AssertionError(f"pattern {pat.describe()} has no partner under -id")
    return len(patterns) // 2, patterns
