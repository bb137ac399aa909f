"""Moduli of homogeneous (Type A) affine connections on surfaces."""

from .action import act, isotropy_nontrivial, in_exceptional_orbit, normalize_ricci, orbit_equivalent
from .core import curvature, gamma0, ricci, ricci_symmetric, rho3, signature, torsion
from .errors import AffineModuliError, ContractError, DegenerateRicciError, TorsionError
from .fixed_points import boundary_components, fixed_family
from .invariants import Psi3, chi, psi3, theta, xi
from .moduli_map import RegionLabel, classify_point, emit_curve, sigma

__version__ = "0.1.0"

__all__ = [
    "act",
    "isotropy_nontrivial",
    "in_exceptional_orbit",
    "normalize_ricci",
    "orbit_equivalent",
    "curvature",
    "gamma0",
    "ricci",
    "ricci_symmetric",
    "rho3",
    "signature",
    "torsion",
    "AffineModuliError",
    "ContractError",
    "DegenerateRicciError",
    "TorsionError",
    "boundary_components",
    "fixed_family",
    "Psi3",
    "chi",
    "psi3",
    "theta",
    "xi",
    "RegionLabel",
    "classify_point",
    "emit_curve",
    "sigma",
]
