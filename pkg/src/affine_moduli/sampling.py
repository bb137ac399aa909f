"""Seeded random structures and group elements.

Algorithm (so runs replay exactly): ``numpy.random.default_rng(seed)``
(PCG64). A general structure draws 8 values ``uniform(-2, 2)`` in C order
``G11_1, G11_2, G12_1, G12_2, G21_1, G21_2, G22_1, G22_2``. A torsion-free
structure draws 6 values ``(G11_1, G11_2, G12_1, G12_2, G22_1, G22_2)`` and
copies ``G21_k = G12_k``. Draws whose symmetric Ricci tensor satisfies
``|det| <= 1e-6 * max|rho_s|**2`` are rejected and redrawn, as are draws of
the wrong signature when one is requested. Group elements draw 4 entries
``uniform(-2, 2)`` (row major) and are rejected when ``|det| < 0.05``; for
GL+ a negative determinant is fixed by negating the first row.
"""

from __future__ import annotations

import numpy as np

from . import core

__all__ = [
    "DEGENERACY_REJECT",
    "random_christoffel",
    "random_group_element",
    "random_c0_point",
]

DEGENERACY_REJECT = 1e-6
_MIN_DET = 0.05


def _draw(rng, torsion_free):
    if torsion_free:
        v = rng.uniform(-2.0, 2.0, 6)
        g = np.empty((2, 2, 2))
        g[0, 0] = v[0:2]
        g[0, 1] = v[2:4]
        g[1, 0] = v[2:4]
        g[1, 1] = v[4:6]
        return g
    return rng.uniform(-2.0, 2.0, 8).reshape(2, 2, 2)


def random_christoffel(rng, torsion_free: bool = False, signature=None, max_tries: int = 100_000) -> np.ndarray:
    """Draw a structure with nondegenerate symmetric Ricci tensor."""
    want = None if signature is None else tuple(signature)[:2]
    for _ in range(max_tries):
        g = _draw(rng, torsion_free)
        rs = core.ricci_symmetric(g)
        det = rs[0, 0] * rs[1, 1] - rs[0, 1] * rs[1, 0]
        if abs(det) <= DEGENERACY_REJECT * core.max_abs(rs) ** 2:
            continue
        if want is not None and core.signature(rs).pair != want:
            continue
        return g
    raise RuntimeError(f"no admissible sample after {max_tries} draws")


def random_group_element(rng, group: str = "GL+") -> np.ndarray:
    """Draw from GL+ (``group="GL+"``) or all of GL (``group="GL"``)."""
    while True:
        g = rng.uniform(-2.0, 2.0, 4).reshape(2, 2)
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        if abs(det) < _MIN_DET:
            continue
        if group == "GL+" and det < 0:
            g[0] = -g[0]
        return g


def random_c0_point(rng) -> np.ndarray:
    """A random point of the exceptional orbit."""
    from .action import act

    return act(random_group_element(rng, "GL"), core.gamma0())
