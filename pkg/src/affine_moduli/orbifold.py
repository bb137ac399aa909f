"""Complex chart near the exceptional orbit and its Z3 / S3 symmetry.

In the frame ``f_1 = e_1 + i e_2``, ``f_2 = e_1 - i e_2`` a real structure is
determined by four complex symbols

    alpha = (G~11_1, G~11_2, G~12_1, G~12_2),

the remaining ones being conjugates (``G~22_2 = conj(G~11_1)``,
``G~22_1 = conj(G~11_2)``, ``G~21_2 = conj(G~12_1)``, ``G~21_1 = conj(G~12_2)``).
The identification R^8 = C^4 is stored as an explicit 8x8 real matrix.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable, NamedTuple

import numpy as np

from . import core
from .action import COMPLEX_FRAME, COMPLEX_FRAME_INV, act, from_complex_frame, to_complex_frame
from .errors import ContractError

__all__ = [
    "LAMBDA",
    "COMPLEXIFY_MATRIX",
    "REALIFY_MATRIX",
    "complexify",
    "realify",
    "full_complex",
    "complex_group_element",
    "T_LAMBDA",
    "CONJUGATION",
    "orbit_tangent",
    "orbit_tangent_fd",
    "slice_W",
    "slice_Z",
    "SLICE_BASE",
    "z3_equivariance_check",
    "conjugation_equivariance_check",
    "S3Element",
    "s3_elements",
    "s3_equivariance_residuals",
    "transversality_matrix",
    "transversality_rank",
    "orbifold_group_data",
]

LAMBDA = cmath.exp(2j * math.pi / 3)

_ALPHA_SLOTS = ((0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1))
_CONJ_SLOTS = ((1, 1, 1), (1, 1, 0), (1, 0, 1), (1, 0, 0))


def full_complex(alpha) -> np.ndarray:
    """All eight complex-frame symbols from the four coordinates ``alpha``."""
    a = np.asarray(alpha, dtype=complex)
    if a.shape != (4,):
        raise ContractError(f"alpha must have 4 complex entries, got shape {a.shape}")
    out = np.zeros((2, 2, 2), dtype=complex)
    for val, s, c in zip(a, _ALPHA_SLOTS, _CONJ_SLOTS):
        out[s] = val
        out[c] = np.conj(val)
    return out


def _complexify_direct(gamma) -> np.ndarray:
    gc = to_complex_frame(gamma)
    return np.array([gc[s] for s in _ALPHA_SLOTS])


def _build_matrices():
    fwd = np.zeros((8, 8))
    for n in range(8):
        e = np.zeros(8)
        e[n] = 1.0
        a = _complexify_direct(e.reshape(2, 2, 2))
        fwd[0::2, n] = a.real
        fwd[1::2, n] = a.imag
    back = np.zeros((8, 8))
    for n in range(8):
        a = np.zeros(4, dtype=complex)
        a[n // 2] = 1.0 if n % 2 == 0 else 1.0j
        back[:, n] = from_complex_frame(full_complex(a)).real.ravel()
    return fwd, back


# columns of COMPLEXIFY_MATRIX: the 8 real symbols in C order (G11_1, G11_2, G12_1, ...);
# rows: (Re a1, Im a1, Re a2, Im a2, ...). Entries are multiples of 1/2, so both are exact.
COMPLEXIFY_MATRIX, REALIFY_MATRIX = _build_matrices()


def complexify(gamma) -> np.ndarray:
    """Complex coordinates ``alpha`` of a real structure."""
    g = core.as_christoffel(gamma).astype(float)
    v = COMPLEXIFY_MATRIX @ g.ravel()
    return v[0::2] + 1j * v[1::2]


def realify(alpha) -> np.ndarray:
    """Real structure with complex coordinates ``alpha``."""
    a = np.asarray(alpha, dtype=complex)
    if a.shape != (4,):
        raise ContractError(f"alpha must have 4 complex entries, got shape {a.shape}")
    v = np.empty(8)
    v[0::2] = a.real
    v[1::2] = a.imag
    return (REALIFY_MATRIX @ v).reshape(2, 2, 2)


def complex_group_element(beta1: complex, beta2: complex) -> np.ndarray:
    """Real matrix of ``T f_1 = b1 f_1 + b2 f_2``, ``T f_2 = conj(b2) f_1 + conj(b1) f_2``.

    Defined on GL+ only: requires ``|b1|**2 - |b2|**2 > 0``.
    """
    b1, b2 = complex(beta1), complex(beta2)
    if abs(b1) ** 2 - abs(b2) ** 2 <= 0:
        raise ContractError("T_{b1,b2} is in GL+ only when |b1|^2 - |b2|^2 > 0")
    gf = np.array([[b1, b2], [b2.conjugate(), b1.conjugate()]])
    g = COMPLEX_FRAME_INV @ gf @ COMPLEX_FRAME
    return g.real.copy()


T_LAMBDA = complex_group_element(LAMBDA, 0)

# complex conjugation swaps f_1 and f_2: e_1 -> e_1, e_2 -> -e_2
CONJUGATION = np.diag([1.0, -1.0])


def orbit_tangent(beta1: complex, beta2: complex, kappa: float = 1.0) -> np.ndarray:
    """Velocity of ``t -> T_{1 + t b1, t b2} Gamma~(0, kappa, 0, 0)`` at ``t = 0``.

    Linearizing the frame change gives, in ``alpha`` coordinates,

        (-kappa conj(b2), kappa (2 b1 - conj(b1)), kappa b2, kappa conj(b2)).

    For a pure rotation (``b1`` imaginary) the second slot is ``3 kappa b1``.
    """
    b1, b2 = complex(beta1), complex(beta2)
    k = float(kappa)
    return np.array([-k * b2.conjugate(), k * (2 * b1 - b1.conjugate()), k * b2, k * b2.conjugate()])


def orbit_tangent_fd(beta1: complex, beta2: complex, h: float, base=None) -> np.ndarray:
    """Central difference of ``t -> complexify(act(T_{1 + t b1, t b2}, base))``."""
    base = SLICE_BASE if base is None else base
    plus = complexify(act(complex_group_element(1 + h * beta1, h * beta2), base))
    minus = complexify(act(complex_group_element(1 - h * beta1, -h * beta2), base))
    return (plus - minus) / (2 * h)


def slice_W(alpha1: complex, alpha2: complex) -> np.ndarray:
    """Transversal slice: ``alpha = (0, 1, conj(alpha2), alpha1)``."""
    a1, a2 = complex(alpha1), complex(alpha2)
    return realify([0, 1, a2.conjugate(), a1])


def slice_Z(alpha: complex) -> np.ndarray:
    """Torsion-free slice, ``slice_W(alpha, alpha)``."""
    return slice_W(alpha, alpha)


# Gamma~(0, 1, 0, 0): a multiple of gamma0 (the 1/sqrt(2) normalization is dropped)
SLICE_BASE = slice_W(0, 0)


def z3_equivariance_check(alpha1: complex, alpha2: complex) -> float:
    """``max|T_lambda s_W(a1, a2) - s_W(lambda a1, lambda a2)|``."""
    lhs = act(T_LAMBDA, slice_W(alpha1, alpha2))
    rhs = slice_W(LAMBDA * alpha1, LAMBDA * alpha2)
    return core.max_abs(lhs - rhs)


def conjugation_equivariance_check(alpha1: complex, alpha2: complex) -> float:
    lhs = act(CONJUGATION, slice_W(alpha1, alpha2))
    rhs = slice_W(complex(alpha1).conjugate(), complex(alpha2).conjugate())
    return core.max_abs(lhs - rhs)


class S3Element(NamedTuple):
    name: str
    matrix: np.ndarray
    on_coords: Callable[[complex], complex]


def s3_elements() -> list[S3Element]:
    """The six frame changes generated by ``T_lambda`` and conjugation.

    Each is paired with its action on slice coordinates,
    ``z -> lambda**k z`` or ``z -> lambda**k conj(z)``.
    """
    out = []
    for conj in (False, True):
        for k in range(3):
            rot = np.linalg.matrix_power(T_LAMBDA, k)
            mat = rot @ CONJUGATION if conj else rot
            lam_k = LAMBDA**k

            def on(z, lam_k=lam_k, conj=conj):
                z = complex(z)
                return lam_k * (z.conjugate() if conj else z)

            name = f"lambda^{k}" + (" conj" if conj else "")
            out.append(S3Element(name, mat, on))
    return out


def s3_equivariance_residuals(alpha1: complex, alpha2: complex) -> dict[str, float]:
    """Slice-equivariance residual for every element of S3."""
    s = slice_W(alpha1, alpha2)
    return {
        el.name: core.max_abs(act(el.matrix, s) - slice_W(el.on_coords(alpha1), el.on_coords(alpha2)))
        for el in s3_elements()
    }


def _as_real8(alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=complex)
    return np.concatenate([a.real, a.imag])


def transversality_matrix() -> np.ndarray:
    """8x8 matrix of orbit tangents and slice directions at the slice base.

    Columns: tangents for ``b1 = 1, i`` and ``b2 = 1, i``, then the slice
    directions ``d/d Re a1``, ``d/d Im a1``, ``d/d Re a2``, ``d/d Im a2``.
    """
    cols = [orbit_tangent(b1, b2) for b1, b2 in ((1, 0), (1j, 0), (0, 1), (0, 1j))]
    base = complexify(SLICE_BASE)
    for a1, a2 in ((1, 0), (1j, 0), (0, 1), (0, 1j)):
        # the slice is affine in (a1, a2), so the difference is its derivative
        cols.append(complexify(slice_W(a1, a2)) - base)
    return np.column_stack([_as_real8(c) for c in cols])


def transversality_rank(threshold: float = 1e-8) -> int:
    return int(np.linalg.matrix_rank(transversality_matrix(), tol=threshold))


def orbifold_group_data() -> dict:
    """Local group data at the exceptional orbit.

    The oriented chart is C modulo Z3 (cone angle 2 pi / 3); adding
    conjugation gives S3 for the unoriented chart.
    """
    els = s3_elements()
    return {
        "oriented_group": "Z3",
        "oriented_order": 3,
        "unoriented_group": "S3",
        "unoriented_order": len(els),
        "corner_angle": 2 * math.pi / 3,
    }
