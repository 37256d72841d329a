"""Frequentist spline estimators: penalized least squares and DR truncation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    CutoffOutOfRange,
    DegreesOfFreedomExhausted,
    DimensionMismatch,
    SingularSystem,
)

__all__ = [
    "FitResult",
    "osplines_fit",
    "shrinkage_weights",
    "truncated_dr_fit",
    "theorem_cutoff",
    "sigma2_hat",
    "simulate_prop5",
]


@dataclass(frozen=True)
class FitResult:
    """Fitted spline: coefficient vector plus fitted values at the design points.

    ``basis`` tags whether ``coefficients`` are B-spline or DR coordinates;
    ``meta`` holds the smoothing parameter or the truncation point.
    """

    coefficients: np.ndarray
    fitted_values: np.ndarray
    basis: str  # "bspline" | "dr"
    meta: dict


def osplines_fit(B, R, Y, lam):
    """Penalized least-squares fit: solve (B'B + lam R) b = B'Y by Cholesky.

    Parameters
    ----------
    B : DesignMatrix
    R : PenaltyMatrix
    Y : array-like, shape (n,)
    lam : float
        Nonnegative smoothing parameter.

    Raises
    ------
    SingularSystem
        If the penalized normal equations are not positive definite.
    """
    if lam < 0:
        raise ValueError("smoothing parameter must be nonnegative")
    Y = np.asarray(Y, dtype=float)
    V = B.values
    if Y.shape != (V.shape[0],):
        raise DimensionMismatch("Y length does not match the design")
    M = V.T @ V + lam * R.values
    try:
        cf = scipy.linalg.cho_factor(M, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("penalized normal equations are singular") from exc
    b = scipy.linalg.cho_solve(cf, V.T @ Y)
    return FitResult(
        coefficients=b, fitted_values=V @ b, basis="bspline", meta={"lam": float(lam)}
    )


def shrinkage_weights(gamma, lam, n):
    """DR shrinkage weights w_j = 1 / (1 + lam * gamma_j / n), in (0, 1]."""
    gamma = np.asarray(gamma, dtype=float)
    return 1.0 / (1.0 + lam * gamma / n)


def truncated_dr_fit(basis, Y, t):
    """Project the observations onto the first t DR basis functions.

    Raises
    ------
    CutoffOutOfRange
        If t is not in {1, ..., d}.
    """
    d = basis.dim
    if not 1 <= t <= d:
        raise CutoffOutOfRange(f"cutoff t = {t} outside [1, {d}]")
    u = basis.dr_design.T @ np.asarray(Y, dtype=float) / basis.n
    u[t:] = 0.0
    return FitResult(
        coefficients=u,
        fitted_values=basis.dr_design @ u,
        basis="dr",
        meta={"t": int(t)},
    )


def theorem_cutoff(n, q, m0):
    """Truncation point t = q + ceil(n^(1/(2 m0 + 1))).

    Exact integer powers are snapped before taking the ceiling so that e.g.
    1024^(1/5) = 4 is not lifted to 5 by roundoff.
    """
    v = float(n) ** (1.0 / (2 * m0 + 1))
    nearest = round(v)
    if abs(v - nearest) < 1e-9:
        v = nearest
    return q + math.ceil(v)


def sigma2_hat(Y, fit):
    """Residual variance estimator ||Y - fitted||^2 / (n - t) for a truncated fit.

    Raises
    ------
    DegreesOfFreedomExhausted
        If t >= n.
    """
    Y = np.asarray(Y, dtype=float)
    t = fit.meta["t"]
    n = Y.size
    if t >= n:
        raise DegreesOfFreedomExhausted(f"t = {t} >= n = {n}")
    resid = Y - fit.fitted_values
    return float(resid @ resid) / (n - t)


def simulate_prop5(basis, f_coeffs_u, sigma2, t, lam, reps, seed):
    """Monte Carlo samples of the squared empirical error of both estimators.

    Draws Y ~ N(f^n, sigma2 I) ``reps`` times (one RNG stream per replicate,
    derived from ``seed``) and records ||f_hat_t - f||_n^2 and
    ||f_hat_lam - f||_n^2, where f is the spline with DR coefficients
    ``f_coeffs_u``.

    Returns
    -------
    (numpy.ndarray, numpy.ndarray)
        Samples for the truncated DR estimator and the penalized estimator.
    """
    u0 = np.asarray(f_coeffs_u, dtype=float)
    Z = basis.dr_design
    n, d = Z.shape
    if not 1 <= t <= d:
        raise CutoffOutOfRange(f"cutoff t = {t} outside [1, {d}]")
    fn = Z @ u0
    w = shrinkage_weights(basis.eigenvalues, lam, n)
    errs_t = np.empty(reps)
    errs_lam = np.empty(reps)
    root = np.random.SeedSequence(seed)
    for r, child in enumerate(root.spawn(reps)):
        rng = np.random.default_rng(child)
        Y = fn + math.sqrt(sigma2) * rng.standard_normal(n)
        u_hat = Z.T @ Y / n
        # ||f_hat - f||_n^2 in DR coordinates (Z'Z/n = I)
        diff_t = u_hat.copy()
        diff_t[t:] = 0.0
        errs_t[r] = np.sum((diff_t - u0) ** 2)
        errs_lam[r] = np.sum((w * u_hat - u0) ** 2)
    return errs_t, errs_lam
