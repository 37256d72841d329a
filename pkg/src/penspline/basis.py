"""B-spline spaces on [0, 1]: basis evaluation, design, Gramian and roughness penalty.

The basis is the normalized B-spline basis obtained by repeating the boundary
knots ``m`` times, so the ``d = m + k0`` basis functions form a partition of
unity and reproduce all polynomials of degree ``m - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    DerivativeOrderTooHigh,
    NonIncreasingKnots,
    PointOutOfDomain,
)

__all__ = [
    "SplineSpace",
    "DesignMatrix",
    "PenaltyMatrix",
    "make_space",
    "eval_basis",
    "design_matrix",
    "gramian",
    "penalty_matrix",
    "interpolate_coefficients",
    "monomial_coefficients",
]


@dataclass(frozen=True)
class SplineSpace:
    """Spline space S(m, xi) of order ``m`` with breakpoints ``knots`` in [0, 1].

    Attributes
    ----------
    m : int
        Spline order (degree + 1), at least 2.
    knots : numpy.ndarray, shape (k0 + 2,)
        Strictly increasing breakpoints with knots[0] == 0 and knots[-1] == 1.
    """

    m: int
    knots: np.ndarray
    padded_knots: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        if self.m < 2:
            raise ValueError(f"spline order must be >= 2, got {self.m}")
        if knots.ndim != 1 or knots.size < 2:
            raise ValueError("knots must be a 1-d array with at least 2 entries")
        if knots[0] != 0.0 or knots[-1] != 1.0:
            raise NonIncreasingKnots("knots must start at 0 and end at 1")
        if np.any(np.diff(knots) <= 0):
            raise NonIncreasingKnots("knots must be strictly increasing")
        object.__setattr__(self, "knots", knots)
        padded = np.concatenate(
            [np.zeros(self.m - 1), knots, np.ones(self.m - 1)]
        )
        object.__setattr__(self, "padded_knots", padded)

    @property
    def k0(self) -> int:
        """Number of interior knots."""
        return self.knots.size - 2

    @property
    def dim(self) -> int:
        """Dimension d = m + k0 of the spline space."""
        return self.m + self.k0


@dataclass(frozen=True)
class DesignMatrix:
    """B-spline design matrix B with B[i, j] = B_j(x_i)."""

    values: np.ndarray
    x: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PenaltyMatrix:
    """Roughness penalty matrix R with R[j, k] = int_0^1 D^q B_j D^q B_k dx."""

    values: np.ndarray
    derivative_order: int

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def make_space(m, k0, placement="equidistant", x=None):
    """Construct a spline space with equidistant or quantile-based interior knots.

    Parameters
    ----------
    m : int
        Spline order, at least 2.
    k0 : int
        Number of interior knots, at least 0.
    placement : {'equidistant', 'quantiles'}
        Equidistant knots at j / (k0 + 1), or interior knots at the empirical
        quantiles j / (k0 + 1) of the design points ``x``.
    x : array-like, optional
        Design points in [0, 1]; required for quantile placement.

    Raises
    ------
    NonIncreasingKnots
        If quantile placement produces tied interior knots.
    """
    if m < 2:
        raise ValueError(f"spline order must be >= 2, got {m}")
    if k0 < 0:
        raise ValueError(f"interior knot count must be >= 0, got {k0}")
    if placement == "equidistant":
        knots = np.linspace(0.0, 1.0, k0 + 2)
    elif placement == "quantiles":
        if x is None:
            raise ValueError("quantile placement requires design points x")
        xs = np.sort(np.asarray(x, dtype=float))
        probs = np.arange(1, k0 + 1) / (k0 + 1)
        interior = np.quantile(xs, probs) if k0 > 0 else np.empty(0)
        knots = np.concatenate([[0.0], interior, [1.0]])
        if np.any(np.diff(knots) <= 0):
            raise NonIncreasingKnots(
                "empirical quantiles collapse; too many tied design points"
            )
    else:
        raise ValueError(f"unknown knot placement {placement!r}")
    return SplineSpace(m=m, knots=knots)


def _find_span(t, p, d, x):
    """Index i with t[i] <= x < t[i+1], clamped to [p, d-1] (left limit at x=1)."""
    if x >= t[d]:
        return d - 1
    return int(np.searchsorted(t, x, side="right")) - 1


def _ders_basis_funs(i, x, p, nders, t):
    """Nonzero B-spline basis functions and derivatives at x (Cox-de Boor).

    Returns the (nders + 1, p + 1) array whose row k holds the k-th derivatives
    of the p + 1 basis functions that are nonzero on the span ``i``.
    """
    ndu = np.zeros((p + 1, p + 1))
    ndu[0, 0] = 1.0
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    for j in range(1, p + 1):
        left[j] = x - t[i + 1 - j]
        right[j] = t[i + j] - x
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((nders + 1, p + 1))
    ders[0, :] = ndu[:, p]
    a = np.zeros((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, nders + 1):
            dd = 0.0
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                dd = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                dd += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                dd += a[s2, k] * ndu[r, pk]
            ders[k, r] = dd
            s1, s2 = s2, s1

    fact = float(p)
    for k in range(1, nders + 1):
        ders[k, :] *= fact
        fact *= p - k
    return ders


def eval_basis(space, x, r=0):
    """Evaluate (D^r B_1(x), ..., D^r B_d(x)).

    For r = m - 1 this is the weak derivative: piecewise constant,
    right-continuous at interior knots and left-continuous at x = 1.

    Raises
    ------
    DerivativeOrderTooHigh
        If r >= m.
    PointOutOfDomain
        If x is outside [0, 1].
    """
    if r >= space.m:
        raise DerivativeOrderTooHigh(f"derivative order {r} >= spline order {space.m}")
    if r < 0:
        raise ValueError("derivative order must be nonnegative")
    if not 0.0 <= x <= 1.0:
        raise PointOutOfDomain(f"x = {x} outside [0, 1]")
    p = space.m - 1
    d = space.dim
    t = space.padded_knots
    span = _find_span(t, p, d, x)
    ders = _ders_basis_funs(span, x, p, r, t)
    out = np.zeros(d)
    out[span - p : span + 1] = ders[r]
    return out


def design_matrix(space, x):
    """Design matrix with rows eval_basis(space, x_i, 0)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("design points must be a 1-d array")
    if np.any((x < 0.0) | (x > 1.0)):
        raise PointOutOfDomain("design points must lie in [0, 1]")
    values = np.empty((x.size, space.dim))
    for i, xi in enumerate(x):
        values[i] = eval_basis(space, xi, 0)
    return DesignMatrix(values=values, x=x)


def gramian(B):
    """Empirical Gramian G = B'B / n of a design matrix."""
    V = B.values
    return V.T @ V / V.shape[0]


def penalty_matrix(space, q):
    """Roughness penalty matrix of order q, exact per-interval Gauss-Legendre.

    On each knot interval the integrand is a polynomial of degree at most
    2(m - 1 - q), so m - q quadrature nodes integrate it exactly.
    """
    if not 1 <= q <= space.m - 1:
        raise DerivativeOrderTooHigh(
            f"penalty order q = {q} must be in [1, {space.m - 1}]"
        )
    d = space.dim
    nodes, weights = leggauss(space.m - q)
    R = np.zeros((d, d))
    for a, b in zip(space.knots[:-1], space.knots[1:]):
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        for z, w in zip(nodes, weights):
            v = eval_basis(space, mid + half * z, q)
            R += (w * half) * np.outer(v, v)
    return PenaltyMatrix(values=0.5 * (R + R.T), derivative_order=q)


def _greville_points(space):
    """Greville abscissae; collocation at these points is nonsingular."""
    p = space.m - 1
    t = space.padded_knots
    return np.array([t[i + 1 : i + 1 + p].mean() if p > 0 else t[i] for i in range(space.dim)])


def interpolate_coefficients(space, f):
    """B-spline coefficients of the spline interpolating ``f`` at the Greville points.

    Exact (up to roundoff) whenever ``f`` lies in the spline space, in
    particular for polynomials of degree at most m - 1.
    """
    g = _greville_points(space)
    B = design_matrix(space, g)
    return np.linalg.solve(B.values, np.array([f(xi) for xi in g]))


def monomial_coefficients(space, degree):
    """Coefficient vector of the monomial x**degree (degree <= m - 1)."""
    if degree > space.m - 1:
        raise ValueError(f"monomial degree {degree} not representable at order {space.m}")
    return interpolate_coefficients(space, lambda x: x**degree)
