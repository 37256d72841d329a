"""Estimator-style interface: fit/predict wrappers around the core routines."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import estimators, sampler
from .basis import design_matrix, make_space, penalty_matrix
from .drbasis import dr_basis_for_design
from .priors import HyperPrior, ProperPriorSpec


def _validate_fit_input(X, y):
    X, y = check_X_y(X, y, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise ValueError("expected a single covariate column")
    x = X[:, 0]
    if x.min() < 0.0 or x.max() > 1.0:
        raise ValueError("design points must lie in [0, 1]")
    return x, y


def _validate_predict_input(X):
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise ValueError("expected a single covariate column")
    x = X[:, 0]
    if x.min() < 0.0 or x.max() > 1.0:
        raise ValueError("prediction points must lie in [0, 1]")
    return x


class OSplineRegressor(RegressorMixin, BaseEstimator):
    """Penalized least-squares spline regression on [0, 1].

    Parameters
    ----------
    m : int
        Spline order (m = 4 for cubic splines).
    k0 : int
        Number of interior knots.
    q : int
        Order of the derivative in the roughness penalty.
    lam : float
        Smoothing parameter; lam = 0 is the unpenalized fit.
    knot_placement : {'equidistant', 'quantiles'}
    """

    def __init__(self, m=4, k0=20, q=2, lam=1.0, knot_placement="equidistant"):
        self.m = m
        self.k0 = k0
        self.q = q
        self.lam = lam
        self.knot_placement = knot_placement

    def fit(self, X, y):
        x, y = _validate_fit_input(X, y)
        self.space_ = make_space(self.m, self.k0, self.knot_placement, x)
        B = design_matrix(self.space_, x)
        R = penalty_matrix(self.space_, self.q)
        fit = estimators.osplines_fit(B, R, y, self.lam)
        self.coef_ = fit.coefficients
        self.fitted_values_ = fit.fitted_values
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        x = _validate_predict_input(X)
        return design_matrix(self.space_, x).values @ self.coef_


class TruncatedDRRegressor(RegressorMixin, BaseEstimator):
    """Spline regression by projection onto the first t DR basis functions.

    ``t='auto'`` uses the rate-matched cutoff q + ceil(n^(1/(2 m0 + 1)))
    clamped to the basis dimension.
    """

    def __init__(self, m=4, k0=20, q=2, t="auto", m0=None, knot_placement="equidistant"):
        self.m = m
        self.k0 = k0
        self.q = q
        self.t = t
        self.m0 = m0
        self.knot_placement = knot_placement

    def fit(self, X, y):
        x, y = _validate_fit_input(X, y)
        self.space_ = make_space(self.m, self.k0, self.knot_placement, x)
        B = design_matrix(self.space_, x)
        basis = dr_basis_for_design(self.space_, B, self.q)
        if self.t == "auto":
            m0 = self.q if self.m0 is None else self.m0
            t = min(estimators.theorem_cutoff(x.size, self.q, m0), basis.dim)
        else:
            t = int(self.t)
        fit = estimators.truncated_dr_fit(basis, y, t)
        self.basis_ = basis
        self.t_ = t
        self.coef_ = fit.coefficients
        self.fitted_values_ = fit.fitted_values
        self.sigma2_ = estimators.sigma2_hat(y, fit)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        x = _validate_predict_input(X)
        B = design_matrix(self.space_, x)
        return B.values @ self.basis_.to_bspline(self.coef_)


class BayesianOSplineRegressor(RegressorMixin, BaseEstimator):
    """Bayesian spline regression with a hyperprior on the smoothing variance.

    Runs the Gibbs sampler at fit time; ``predict`` returns the posterior mean
    curve and ``predict_interval`` adds a pointwise credible band.

    Parameters
    ----------
    hyperprior : HyperPrior, optional
        Defaults to the Weibull(1/2, 1/500) recommendation.
    prior_flavor : ProperPriorSpec, optional
    sigma2 : float or None
        Known residual variance; None puts an IG(1e-3, 1e-3) prior on it.
    iters, burn_in, thin, seed : int
        Chain schedule; the fit is reproducible for a fixed seed.
    """

    def __init__(self, m=4, k0=20, q=2, hyperprior=None, prior_flavor=None,
                 sigma2=None, iters=12_000, burn_in=None, thin=1, seed=0,
                 knot_placement="equidistant"):
        self.m = m
        self.k0 = k0
        self.q = q
        self.hyperprior = hyperprior
        self.prior_flavor = prior_flavor
        self.sigma2 = sigma2
        self.iters = iters
        self.burn_in = burn_in
        self.thin = thin
        self.seed = seed
        self.knot_placement = knot_placement

    def fit(self, X, y):
        x, y = _validate_fit_input(X, y)
        self.space_ = make_space(self.m, self.k0, self.knot_placement, x)
        hp = self.hyperprior if self.hyperprior is not None else HyperPrior.weibull(0.5, 1.0 / 500.0)
        flavor = self.prior_flavor if self.prior_flavor is not None else ProperPriorSpec()
        residual = (
            sampler.ResidualVariance.known(self.sigma2)
            if self.sigma2 is not None
            else sampler.ResidualVariance.inverse_gamma(1e-3, 1e-3)
        )
        spec = sampler.ModelSpec(
            space=self.space_, q=self.q, hyperprior=hp,
            prior_flavor=flavor, residual=residual,
        )
        self.chain_ = sampler.gibbs_run(
            spec, (x, y), iters=self.iters, burn_in=self.burn_in,
            thin=self.thin, seed=self.seed,
        )
        self.coef_ = self.chain_.draws_b.mean(axis=0)
        self.fitted_values_ = design_matrix(self.space_, x).values @ self.coef_
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        x = _validate_predict_input(X)
        return design_matrix(self.space_, x).values @ self.coef_

    def predict_interval(self, X, level=0.95):
        """Posterior mean and pointwise credible band at the given level."""
        check_is_fitted(self, "chain_")
        x = _validate_predict_input(X)
        B_eval = design_matrix(self.space_, x)
        return sampler.posterior_summary(self.chain_, B_eval, level)
