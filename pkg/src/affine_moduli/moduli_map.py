"""The (psi3, Psi3)-plane: boundary curves sigma_+- and region labels.

``sigma_+-(t) = (+-4 t^2 +- 1/t^2 + 2, 4 t^4 +- 4 t^2 + 2)``. Both depend on
``u = t^2`` only; ``sigma_-`` has a cusp at ``(-2, 1)`` (``u = 1/2``).

The curves split the plane into three open regions: the wedge to the left
of ``sigma_-`` (D20), the region to the right of ``sigma_+`` (D02) and the
region between them (D11). Membership is decided by horizontal-ray crossing
parity against sampled polylines, each closed far outside the sampled
window; crossings are refined by bisection on the parameter. Boundary labels
use the exact distance to the curve.
"""

from __future__ import annotations

import enum
import functools
import math
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ContractError

__all__ = [
    "PlanePoint",
    "RegionLabel",
    "CUSP",
    "CUSP_T",
    "sigma",
    "sigma_sq",
    "sigma_derivative",
    "emit_curve",
    "curve_distance",
    "classify_point",
    "classify_points",
    "region_grid",
    "DEFAULT_SAMPLES",
    "T_WINDOW",
]


class PlanePoint(NamedTuple):
    x: float
    y: float


class RegionLabel(str, enum.Enum):
    D20 = "D20"
    D11 = "D11"
    D02 = "D02"
    BoundarySigmaPlus = "BoundarySigmaPlus"
    BoundarySigmaMinus = "BoundarySigmaMinus"
    Cusp = "Cusp"
    Outside = "Outside"

    def __str__(self) -> str:
        return self.value


CUSP = PlanePoint(-2.0, 1.0)
CUSP_T = math.sqrt(0.5)

T_WINDOW = (1e-3, 1e3)
DEFAULT_SAMPLES = 4001
# beyond this the truncated polylines no longer bound the regions reliably
_X_LIMIT = 9.9e5
_Y_LIMIT = 3.9e12
_FAR = 1e30


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ContractError(f"sign must be '+' or '-', got {sign!r}")


def sigma_sq(sign, u):
    """``sigma`` in terms of ``u = t**2``; exact for rational ``u``."""
    s = _sign(sign)
    if u == 0:
        raise ContractError("sigma is undefined at t = 0")
    return PlanePoint(s * 4 * u + s / u + 2, 4 * u * u + s * 4 * u + 2)


def sigma(sign, t):
    """Point ``sigma_+-(t)``; works with floats, Fractions and sympy numbers."""
    if t == 0:
        raise ContractError("sigma is undefined at t = 0")
    return sigma_sq(sign, t * t)


def sigma_derivative(sign, t) -> PlanePoint:
    """``d sigma / dt`` in closed form."""
    s = _sign(sign)
    if t == 0:
        raise ContractError("sigma is undefined at t = 0")
    return PlanePoint(s * (8 * t - 2 / t**3), 16 * t**3 + s * 8 * t)


def _square(t: float) -> float:
    # the cusp parameter is carried exactly so the cusp row is (-2, 1) on the nose
    return 0.5 if t == CUSP_T else t * t


def _sigma_arrays(s: int, t: np.ndarray):
    u = np.where(t == CUSP_T, 0.5, t * t)
    return s * 4 * u + s / u + 2, 4 * u * u + s * 4 * u + 2


def emit_curve(sign, t_range: Sequence[float], n: int, spacing: str = "linear", inject: Sequence[float] = ()):
    """Sample ``sigma`` on ``n`` parameters spanning ``t_range`` (endpoints included).

    ``inject`` adds extra parameters (e.g. :data:`CUSP_T`). Returns an
    ``(m, 3)`` array of rows ``(t, x, y)`` sorted by ``t``.
    """
    s = _sign(sign)
    lo, hi = (float(v) for v in t_range)
    if n < 2:
        raise ContractError("emit_curve needs n >= 2")
    if not lo < hi:
        raise ContractError(f"invalid t range {t_range!r}")
    if lo <= 0 <= hi:
        raise ContractError("t range must exclude 0")
    if spacing == "linear":
        t = np.linspace(lo, hi, n)
    elif spacing == "log":
        if lo < 0:
            raise ContractError("log spacing needs a positive range")
        t = np.geomspace(lo, hi, n)
    else:
        raise ContractError(f"unknown spacing {spacing!r}")
    t[0], t[-1] = lo, hi
    extra = [v for v in inject if lo <= v <= hi]
    t = np.unique(np.concatenate([t, np.asarray(extra, dtype=float)]))
    x, y = _sigma_arrays(s, t)
    return np.column_stack([t, x, y])


@functools.lru_cache(maxsize=16)
def _polygon(s: int, n: int):
    """Closed polygon: sampled curve plus a closure far outside the window.

    Returns (vertices, params) where params[i] is the curve parameter of
    vertex i, or NaN for closure vertices.
    """
    t = np.geomspace(*T_WINDOW, n)
    t = np.unique(np.append(t, CUSP_T))
    x, y = _sigma_arrays(s, t)
    far = s * _FAR
    xs = np.concatenate([x, [far, far]])
    ys = np.concatenate([y, [y[-1], y[0]]])
    params = np.concatenate([t, [np.nan, np.nan]])
    return np.column_stack([xs, ys]), params


def _y_of_t(s: int, t: float) -> float:
    u = _square(t)
    return 4 * u * u + s * 4 * u + 2


def _x_of_t(s: int, t: float) -> float:
    u = _square(t)
    return s * 4 * u + s / u + 2


@functools.lru_cache(maxsize=65536)
def _crossings(s: int, n: int, py: float) -> tuple[float, ...]:
    """x-coordinates where the closed polygon crosses the line ``y = py``.

    Curve edges are refined to the true curve crossing by bisection; the
    half-open rule counts each vertex once.
    """
    verts, params = _polygon(s, n)
    y0 = verts[:, 1]
    y1 = np.roll(y0, -1)
    hit = ((y0 <= py) & (y1 > py)) | ((y1 <= py) & (y0 > py))
    out = []
    for i in np.nonzero(hit)[0]:
        j = (i + 1) % len(verts)
        ta, tb = params[i], params[j]
        if np.isnan(ta) or np.isnan(tb):
            (xa, ya), (xb, yb) = verts[i], verts[j]
            out.append(xa + (py - ya) * (xb - xa) / (yb - ya))
            continue
        f = lambda t: _y_of_t(s, t) - py  # noqa: E731
        fa, fb = f(ta), f(tb)
        if fa == 0:
            root = ta
        elif fb == 0:
            root = tb
        else:
            root = brentq(f, ta, tb, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        out.append(_x_of_t(s, root))
    return tuple(sorted(out))


def _inside(s: int, n: int, px: np.ndarray, py: float) -> np.ndarray:
    xs = np.asarray(_crossings(s, n, float(py)))
    if xs.size == 0:
        return np.zeros(px.shape, dtype=bool)
    count = (xs[None, :] > px[:, None]).sum(axis=1)
    return count % 2 == 1


def curve_distance(sign, px, py) -> np.ndarray:
    """Exact Euclidean distance from points to ``sigma_+-``.

    Critical points of the squared distance in ``u = t^2`` are roots of

        32u^6 + 48s u^5 + (32 + 8c) u^4 + 4s(c + 2 - px) u^3 - s(2 - px) u - 1

    with ``c = 2 - py``; all roots of the batch are found at once from
    companion matrices.
    """
    s = _sign(sign)
    px = np.atleast_1d(np.asarray(px, dtype=float))
    py = np.atleast_1d(np.asarray(py, dtype=float))
    px, py = np.broadcast_arrays(px, py)
    c = 2.0 - py
    m = px.size
    coeffs = np.zeros((m, 7))
    coeffs[:, 0] = 32.0
    coeffs[:, 1] = 48.0 * s
    coeffs[:, 2] = 32.0 + 8.0 * c.ravel()
    coeffs[:, 3] = 4.0 * s * (c.ravel() + 2.0 - px.ravel())
    coeffs[:, 5] = -s * (2.0 - px.ravel())
    coeffs[:, 6] = -1.0
    comp = np.zeros((m, 6, 6))
    comp[:, 0, :] = -coeffs[:, 1:] / coeffs[:, :1]
    comp[:, np.arange(1, 6), np.arange(0, 5)] = 1.0
    roots = np.linalg.eigvals(comp)
    # any positive u is a point of the curve, so extra candidates only give upper bounds
    u = np.abs(roots.real)
    u = np.where(u > 0, u, np.nan)
    x = s * 4 * u + s / u + 2
    y = 4 * u * u + s * 4 * u + 2
    d = np.hypot(x - px.ravel()[:, None], y - py.ravel()[:, None])
    return np.nanmin(d, axis=1).reshape(px.shape)


def _scale(px, py):
    return np.maximum(1.0, np.hypot(px, py))


def classify_points(xs, ys, tol: float = 1e-8, n_samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Vectorized :func:`classify_point`; returns an object array of labels."""
    px = np.atleast_1d(np.asarray(xs, dtype=float)).ravel()
    py = np.atleast_1d(np.asarray(ys, dtype=float)).ravel()
    if px.shape != py.shape:
        raise ContractError("xs and ys must have the same length")
    labels = np.empty(px.shape, dtype=object)
    labels.fill(RegionLabel.D11)

    finite = np.isfinite(px) & np.isfinite(py)
    window = finite & (np.abs(px) <= _X_LIMIT) & (np.abs(py) <= _Y_LIMIT)
    labels[~window] = RegionLabel.Outside

    idx = np.nonzero(window)[0]
    if idx.size == 0:
        return labels
    qx, qy = px[idx], py[idx]
    band = tol * _scale(qx, qy)
    inner = np.empty(idx.shape, dtype=object)
    inner.fill(RegionLabel.D11)

    for yv in np.unique(qy):
        rows = qy == yv
        in_minus = _inside(-1, n_samples, qx[rows], yv)
        in_plus = _inside(1, n_samples, qx[rows], yv)
        sub = inner[rows]
        sub[in_minus] = RegionLabel.D20
        sub[in_plus] = RegionLabel.D02
        inner[rows] = sub

    d_minus = curve_distance(-1, qx, qy)
    d_plus = curve_distance(1, qx, qy)
    inner[d_plus <= band] = RegionLabel.BoundarySigmaPlus
    inner[d_minus <= band] = RegionLabel.BoundarySigmaMinus
    cusp = np.hypot(qx - CUSP.x, qy - CUSP.y) <= band
    inner[cusp] = RegionLabel.Cusp
    labels[idx] = inner
    return labels


def classify_point(p, tol: float = 1e-8, n_samples: int = DEFAULT_SAMPLES) -> RegionLabel:
    """Region of the (psi3, Psi3)-plane containing ``p``.

    Points within ``tol * max(1, |p|)`` of a curve get the boundary label
    (``Cusp`` near ``(-2, 1)``). ``Outside`` marks non-finite points and
    points beyond the sampled window (``|x| > 9.9e5`` or ``|y| > 3.9e12``).
    """
    x, y = p
    return classify_points([x], [y], tol, n_samples)[0]


def region_grid(bounds=(-10.0, 10.0, 0.0, 10.0), resolution=101, tol: float = 1e-8, n_samples: int = DEFAULT_SAMPLES):
    """Labels on a regular grid over ``(xmin, xmax, ymin, ymax)``.

    ``resolution`` is the number of grid points per axis (an int or an
    ``(nx, ny)`` pair). Returns ``(xs, ys, labels)`` with ``labels[j, i]``
    the label at ``(xs[i], ys[j])``.
    """
    xmin, xmax, ymin, ymax = (float(b) for b in bounds)
    if not (xmin < xmax and ymin < ymax):
        raise ContractError(f"invalid bounds {bounds!r}")
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    nx, ny = int(nx), int(ny)
    if nx < 1 or ny < 1:
        raise ContractError("resolution must be positive")
    xs = np.linspace(xmin, xmax, nx) if nx > 1 else np.array([xmin])
    ys = np.linspace(ymin, ymax, ny) if ny > 1 else np.array([ymin])
    gx, gy = np.meshgrid(xs, ys)
    labels = classify_points(gx.ravel(), gy.ravel(), tol, n_samples).reshape(ny, nx)
    return xs, ys, labels
