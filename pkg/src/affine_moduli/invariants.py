"""Scalar invariants psi3, Psi3 and chi of torsion-free Type-A structures.

With ``rho`` the Ricci tensor, ``rho^{ij}`` its matrix inverse and
``rho3_ij = Gamma_ik^l Gamma_jl^k``:

* ``psi3 = rho^{ij} rho3_ij``
* ``Psi3 = det(rho3) / det(rho)``
* ``chi``  pairs the 2-form ``Gamma_ab^b Gamma_ij^k rho3_kl rho^{ij} dx^a ^ dx^l``
  with the volume form ``sqrt|det rho| dx^1 ^ dx^2`` using the inner product
  induced by ``rho`` (``<dx^1^dx^2, dx^1^dx^2> = 1/det rho``), with
  ``dx^1 ^ dx^2`` positively oriented.

psi3 and Psi3 are GL(2,R)-invariant; chi is GL+-invariant.

Float input is contracted in ``np.longdouble`` (extended precision where the
platform has it): ``det(rho3)`` and the chi coefficient cancel heavily after a
badly conditioned frame change, and the extra bits keep the result at the
accuracy the float64 input allows.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np

from . import core
from .core import as_christoffel, max_abs
from .errors import DegenerateRicciError, TorsionError

__all__ = [
    "InvariantVector",
    "rho3",
    "psi3",
    "Psi3",
    "chi",
    "theta",
    "xi",
    "NoGuaranteeWarning",
]

rho3 = core.rho3

RANK_TOL = 1e-9
TORSION_TOL = 1e-9


class NoGuaranteeWarning(UserWarning):
    """Invariants were evaluated on a structure outside their theorem's hypotheses."""


class InvariantVector(NamedTuple):
    psi3: float
    Psi3: float
    chi: float
    guaranteed: bool = True

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.psi3, self.Psi3, self.chi)


def _prepare(gamma, allow_torsion: bool):
    g = as_christoffel(gamma)
    if g.dtype.kind == "f":
        g = g.astype(np.longdouble)
    if not core.is_torsion_free(g, TORSION_TOL):
        if not allow_torsion:
            raise TorsionError("invariants are defined for torsion-free structures")
        warnings.warn("structure has torsion; invariants carry no guarantee", NoGuaranteeWarning, stacklevel=3)
    r = core.ricci(g)
    det = r[0, 0] * r[1, 1] - r[0, 1] * r[1, 0]
    if abs(det) <= RANK_TOL * max_abs(r) ** 2 or max_abs(r) == 0:
        raise DegenerateRicciError("invariants require rank(rho) = 2")
    inv = np.array([[r[1, 1], -r[0, 1]], [-r[1, 0], r[0, 0]]], dtype=g.dtype) / det
    return g, r, det, inv


def psi3(gamma, allow_torsion: bool = False) -> float:
    """Trace of ``rho3`` against the inverse Ricci tensor."""
    g, _, _, inv = _prepare(gamma, allow_torsion)
    return float(np.sum(inv * core.rho3(g)))


def Psi3(gamma, allow_torsion: bool = False) -> float:
    g, r, det, _ = _prepare(gamma, allow_torsion)
    r3 = core.rho3(g)
    return float((r3[0, 0] * r3[1, 1] - r3[0, 1] * r3[1, 0]) / det)


def _chi_from(g, r, det, inv) -> float:
    r3 = core.rho3(g)
    trace_vec = np.einsum("abb->a", g)
    w = np.einsum("ijk,kl,ij->l", g, r3, inv)
    coeff = trace_vec[0] * w[1] - trace_vec[1] * w[0]
    if g.dtype == object:
        return float(coeff / det) * math.sqrt(abs(float(det)))
    return float(coeff * np.sqrt(abs(det)) / det)


def chi(gamma, allow_torsion: bool = False) -> float:
    """Oriented invariant; changes sign under orientation-reversing frames."""
    return _chi_from(*_prepare(gamma, allow_torsion))


def theta(gamma, allow_torsion: bool = False) -> tuple[float, float]:
    """The unoriented pair ``(psi3, Psi3)``."""
    g, r, det, inv = _prepare(gamma, allow_torsion)
    r3 = core.rho3(g)
    return (
        float(np.sum(inv * r3)),
        float((r3[0, 0] * r3[1, 1] - r3[0, 1] * r3[1, 0]) / det),
    )


def xi(gamma, allow_torsion: bool = False) -> InvariantVector:
    """The oriented triple ``(psi3, Psi3, chi)``."""
    g = as_christoffel(gamma)
    guaranteed = core.is_torsion_free(g, TORSION_TOL)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoGuaranteeWarning)
        parts = _prepare(g, allow_torsion)
    if not guaranteed:
        warnings.warn("structure has torsion; invariants carry no guarantee", NoGuaranteeWarning, stacklevel=2)
    g, r, det, inv = parts
    r3 = core.rho3(g)
    return InvariantVector(
        float(np.sum(inv * r3)),
        float((r3[0, 0] * r3[1, 1] - r3[0, 1] * r3[1, 0]) / det),
        _chi_from(g, r, det, inv),
        guaranteed,
    )
