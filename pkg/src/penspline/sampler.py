"""MCMC for the Bayesian O-splines posterior.

The Gibbs sampler cycles a Gaussian draw of the spline coefficients, a
random-walk Metropolis update of the smoothing variance on the log scale
(exact conjugate draw for an Inverse Gamma hyperprior), and an Inverse Gamma
draw of the residual variance when it is unknown.

Internally the chain runs in Demmler-Reinsch coordinates, where the
coefficient full conditional has diagonal precision for the improper and
projection-proper flavors; the MMR flavor keeps a dense d x d precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numba import njit

from .basis import design_matrix, gramian, penalty_matrix
from .drbasis import dr_basis
from .errors import (
    EmptyChain,
    NonFiniteLogPosterior,
    SingularPrecision,
)
from .priors import HyperPrior, ProperPriorSpec, nullspace_eigenvectors

__all__ = [
    "ModelSpec",
    "ResidualVariance",
    "ChainOutput",
    "conditional_posterior_moments",
    "gibbs_run",
    "tau2_metropolis_step",
    "posterior_summary",
    "marginal_posterior_logdensity",
    "effective_sample_size",
]

_HP_CODES = {"inverse_gamma": 0, "gamma": 1, "weibull": 2, "uniform": 3, "sbp": 4, "fixed": 5}


@dataclass(frozen=True)
class ResidualVariance:
    """Residual-variance treatment: known constant or Inverse Gamma prior."""

    kind: str  # "known" | "inverse_gamma"
    sigma0_sq: float = 1.0
    alpha: float = 1e-3
    beta: float = 1e-3

    def __post_init__(self):
        if self.kind not in ("known", "inverse_gamma"):
            raise ValueError(f"unknown residual variance treatment {self.kind!r}")
        if self.sigma0_sq <= 0 or self.alpha <= 0 or self.beta <= 0:
            raise ValueError("variance parameters must be positive")

    @classmethod
    def known(cls, sigma0_sq):
        return cls("known", sigma0_sq=float(sigma0_sq))

    @classmethod
    def inverse_gamma(cls, alpha, beta):
        return cls("inverse_gamma", alpha=float(alpha), beta=float(beta))


@dataclass(frozen=True)
class ModelSpec:
    """Full Bayesian model: spline space, penalty order, priors."""

    space: object
    q: int
    hyperprior: HyperPrior
    prior_flavor: ProperPriorSpec = field(default_factory=ProperPriorSpec)
    residual: ResidualVariance = field(default_factory=lambda: ResidualVariance.known(1.0))

    def __post_init__(self):
        if not 1 <= self.q <= self.space.m - 1:
            raise ValueError(f"penalty order q = {self.q} must be in [1, {self.space.m - 1}]")


@dataclass(frozen=True)
class ChainOutput:
    """Posterior draws plus diagnostics. Immutable once returned."""

    draws_b: np.ndarray
    draws_tau2: np.ndarray
    draws_sigma2: np.ndarray
    acceptance_rate_tau2: float
    ess: dict
    seed: int

    @property
    def length(self) -> int:
        return self.draws_b.shape[0]


def conditional_posterior_moments(B, R_or_precision, Y, sigma2, tau2=None):
    """Gaussian full-conditional moments of the coefficients.

    Parameters
    ----------
    B : DesignMatrix
    R_or_precision : PenaltyMatrix or ndarray
        Penalty matrix (prior precision R / tau2, requires ``tau2``) or an
        already assembled prior precision matrix.
    Y : array-like, shape (n,)
    sigma2 : float
    tau2 : float, optional

    Returns
    -------
    (mu, Sigma)

    Raises
    ------
    SingularPrecision
        If the posterior precision is not positive definite.
    """
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    V = B.values
    if hasattr(R_or_precision, "values"):
        if tau2 is None or tau2 <= 0:
            raise ValueError("tau2 must be positive when passing a penalty matrix")
        prior_prec = R_or_precision.values / tau2
    else:
        prior_prec = np.asarray(R_or_precision, dtype=float)
    P = V.T @ V / sigma2 + prior_prec
    try:
        cf = scipy.linalg.cho_factor(0.5 * (P + P.T), lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularPrecision("posterior precision is not positive definite") from exc
    Sigma = scipy.linalg.cho_solve(cf, np.eye(P.shape[0]))
    mu = Sigma @ (V.T @ np.asarray(Y, dtype=float) / sigma2)
    return mu, Sigma


@njit(cache=True)
def _hp_log_kernel(code, p1, p2, p3, v):
    """Unnormalized hyperprior log-density (constants cancel in MH ratios)."""
    if code == 0:  # inverse gamma
        return -(p1 + 1.0) * math.log(v) - p2 / v
    if code == 1:  # gamma
        return (p1 - 1.0) * math.log(v) - p2 * v
    if code == 2:  # weibull
        return (p1 - 1.0) * math.log(v) - (p2 * v) ** p1
    if code == 3:  # uniform
        return 0.0 if v < p1 else -np.inf
    if code == 4:  # scaled beta prime
        return (p1 - 1.0) * math.log(v) - (p1 + p2) * math.log1p(v / p3)
    return 0.0


@njit(cache=True)
def _chain_core(
    zty,
    yty,
    n,
    gamma,
    q,
    poly_prec,
    mmr_mat,
    use_dense,
    hp_code,
    hp_p1,
    hp_p2,
    hp_p3,
    tau2_conjugate,
    sigma2_known,
    sigma0_sq,
    sig_shape_draws,
    sig_beta,
    tau_shape_draws,
    hp_ig_beta,
    iters,
    burn_in,
    thin,
    z_u,
    z_prop,
    log_unif,
    tau2_init,
    sigma2_init,
    ls_init,
):
    d = gamma.shape[0]
    s_half = 0.5 * (d - q)
    n_keep = (iters - burn_in + thin - 1) // thin
    u_draws = np.zeros((n_keep, d))
    tau2_draws = np.zeros(n_keep)
    sigma2_draws = np.zeros(n_keep)

    tau2 = tau2_init
    sigma2 = sigma2_init
    ls = ls_init
    fixed_tau2 = hp_code == 5
    accepted = 0
    proposed = 0
    u = np.zeros(d)
    kept = 0
    status = 0

    for it in range(iters):
        # --- coefficients u | tau2, sigma2 ---
        if use_dense:
            P = mmr_mat.copy()
            for j in range(d):
                P[j, j] += n / sigma2 + gamma[j] / tau2 + poly_prec[j]
            L = np.linalg.cholesky(P)
            mean = np.linalg.solve(P, zty / sigma2)
            w = np.linalg.solve(L.T, z_u[it])
            u = mean + w
        else:
            for j in range(d):
                prec = n / sigma2 + gamma[j] / tau2 + poly_prec[j]
                var = 1.0 / prec
                u[j] = zty[j] / sigma2 * var + math.sqrt(var) * z_u[it, j]

        r = 0.0
        for j in range(q, d):
            r += gamma[j] * u[j] * u[j]
        if not np.isfinite(r):
            status = 1
            break

        # --- smoothing variance tau2 | u ---
        if not fixed_tau2:
            if tau2_conjugate:
                tau2 = (hp_ig_beta + 0.5 * r) / tau_shape_draws[it]
            else:
                eta = math.log(tau2)
                lt_cur = -s_half * eta - 0.5 * r * math.exp(-eta) + _hp_log_kernel(
                    hp_code, hp_p1, hp_p2, hp_p3, tau2
                ) + eta
                eta_new = eta + math.exp(ls) * z_prop[it]
                v_new = math.exp(eta_new)
                lt_new = -s_half * eta_new - 0.5 * r * math.exp(-eta_new) + _hp_log_kernel(
                    hp_code, hp_p1, hp_p2, hp_p3, v_new
                ) + eta_new
                log_alpha = lt_new - lt_cur
                if it >= burn_in:
                    proposed += 1
                if log_unif[it] < log_alpha:
                    tau2 = v_new
                    if it >= burn_in:
                        accepted += 1
                if it < burn_in:
                    acc_prob = math.exp(min(0.0, log_alpha))
                    ls += (acc_prob - 0.44) / (it + 1.0) ** 0.6

        # --- residual variance sigma2 | Y, u ---
        if not sigma2_known:
            uu = 0.0
            uz = 0.0
            for j in range(d):
                uu += u[j] * u[j]
                uz += u[j] * zty[j]
            rss = yty - 2.0 * uz + n * uu
            if rss < 0.0:
                rss = 0.0
            sigma2 = (sig_beta + 0.5 * rss) / sig_shape_draws[it]
        else:
            sigma2 = sigma0_sq

        if not (np.isfinite(tau2) and np.isfinite(sigma2)):
            status = 1
            break

        if it >= burn_in and (it - burn_in) % thin == 0:
            for j in range(d):
                u_draws[kept, j] = u[j]
            tau2_draws[kept] = tau2
            sigma2_draws[kept] = sigma2
            kept += 1

    return u_draws, tau2_draws, sigma2_draws, accepted, proposed, status


def _autocorrelations(x):
    x = np.asarray(x, dtype=float)
    n = x.size
    x = x - x.mean()
    if np.allclose(x, 0):
        return np.ones(1)
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n].real / n
    return acov / acov[0]


def effective_sample_size(x):
    """ESS via Geyer's initial positive sequence truncation."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4 or np.allclose(x, x[0]):
        return float(n)
    rho = _autocorrelations(x)
    total = 0.0
    k = 1
    while k + 1 < n:
        pair = rho[k] + rho[k + 1]
        if pair <= 0:
            break
        total += pair
        k += 2
    return float(n / max(1.0, 1.0 + 2.0 * total))


def gibbs_run(spec, data, iters=12_000, burn_in=None, thin=1, seed=0):
    """Run the Gibbs sampler and return posterior draws.

    Parameters
    ----------
    spec : ModelSpec
    data : (x, Y)
        Design points in [0, 1] and observations.
    iters, burn_in, thin : int
        Total iterations, burn-in (default iters // 2) and thinning.
    seed : int
        Draws are bit-reproducible for identical (spec, data, seed).

    Raises
    ------
    NonFiniteLogPosterior
        On numerical overflow inside the chain.
    """
    if burn_in is None:
        burn_in = iters // 2
    if not (iters > burn_in >= 0 and thin >= 1):
        raise ValueError("need iters > burn_in >= 0 and thin >= 1")
    x, Y = data
    x = np.asarray(x, dtype=float)
    Y = np.asarray(Y, dtype=float)
    B = design_matrix(spec.space, x)
    R = penalty_matrix(spec.space, spec.q)
    drb = dr_basis(gramian(B), R, B=B, space=spec.space)
    return _gibbs_run_dr(spec, drb, Y, iters, burn_in, thin, seed)


def _gibbs_run_dr(spec, drb, Y, iters, burn_in, thin, seed):
    """Sampler core operating on a prebuilt DR basis (reused by the harness)."""
    n, d = drb.dr_design.shape
    q = spec.q
    gamma = drb.eigenvalues
    zty = drb.dr_design.T @ Y
    yty = float(Y @ Y)

    flavor = spec.prior_flavor.flavor
    poly_prec = np.zeros(d)
    mmr_mat = np.zeros((d, d))
    use_dense = False
    if flavor == "proper_projection":
        poly_prec[:q] = 1.0 / spec.prior_flavor.tau2_poly
    elif flavor == "proper_mmr":
        Q0 = nullspace_eigenvectors(_penalty_in_bspline(spec), q)
        A = drb.transition
        mmr_mat = A.T @ (Q0 @ Q0.T) @ A / (n * spec.prior_flavor.tau2_poly)
        use_dense = True

    hp = spec.hyperprior
    hp_code = _HP_CODES[hp.family]
    p = hp.params + (1.0,) * (3 - len(hp.params))
    tau2_conjugate = hp.family == "inverse_gamma"
    hp_ig_beta = hp.params[1] if tau2_conjugate else 1.0

    res = spec.residual
    sigma2_known = res.kind == "known"

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    z_u = rng.standard_normal((iters, d))
    z_prop = rng.standard_normal(iters)
    log_unif = np.log(rng.uniform(size=iters))
    sig_shape_draws = (
        rng.standard_gamma(res.alpha + 0.5 * n, size=iters)
        if not sigma2_known
        else np.ones(iters)
    )
    tau_shape_draws = (
        rng.standard_gamma(hp.params[0] + 0.5 * (d - q), size=iters)
        if tau2_conjugate
        else np.ones(iters)
    )

    tau2_init = hp.params[0] if hp.family == "fixed" else 1.0
    sigma2_init = res.sigma0_sq if sigma2_known else max(float(np.var(Y)), 1e-8)

    u_draws, tau2_draws, sigma2_draws, accepted, proposed, status = _chain_core(
        zty,
        yty,
        float(n),
        gamma,
        q,
        poly_prec,
        mmr_mat,
        use_dense,
        hp_code,
        p[0],
        p[1],
        p[2],
        tau2_conjugate,
        sigma2_known,
        res.sigma0_sq,
        sig_shape_draws,
        res.beta,
        tau_shape_draws,
        hp_ig_beta,
        iters,
        burn_in,
        thin,
        z_u,
        z_prop,
        log_unif,
        tau2_init,
        sigma2_init,
        math.log(0.5),
    )
    if status != 0:
        raise NonFiniteLogPosterior(
            "chain produced non-finite state; check scaling of data and priors"
        )
    draws_b = u_draws @ drb.transition.T
    ess = {
        "b": np.array([effective_sample_size(draws_b[:, j]) for j in range(d)]),
        "tau2": effective_sample_size(tau2_draws),
        "sigma2": effective_sample_size(sigma2_draws),
    }
    return ChainOutput(
        draws_b=draws_b,
        draws_tau2=tau2_draws,
        draws_sigma2=sigma2_draws,
        acceptance_rate_tau2=accepted / proposed if proposed else 1.0,
        ess=ess,
        seed=seed,
    )


def _penalty_in_bspline(spec):
    return penalty_matrix(spec.space, spec.q).values


def tau2_metropolis_step(tau2, b, R, q, hp, rng, step_scale=0.5):
    """One random-walk Metropolis update of tau2 on the log scale.

    Targets the full conditional (tau2)^(-(d-q)/2) exp(-b'Rb / (2 tau2)) p(tau2)
    with the log-scale Jacobian included.

    Returns
    -------
    (float, bool)
        New value and whether the proposal was accepted.
    """
    b = np.asarray(b, dtype=float)
    Rv = R.values
    d = Rv.shape[0]
    s_half = 0.5 * (d - q)
    r = float(b @ Rv @ b)
    code = _HP_CODES[hp.family]
    p = hp.params + (1.0,) * (3 - len(hp.params))

    def log_target(v):
        return (
            -s_half * math.log(v)
            - 0.5 * r / v
            + _hp_log_kernel(code, p[0], p[1], p[2], v)
            + math.log(v)
        )

    eta_new = math.log(tau2) + step_scale * rng.standard_normal()
    v_new = math.exp(eta_new)
    log_alpha = log_target(v_new) - log_target(tau2)
    if math.log(rng.uniform()) < log_alpha:
        return v_new, True
    return tau2, False


def posterior_summary(chain, B_eval, level=0.95):
    """Posterior mean curve and pointwise credible band on an evaluation design.

    Raises
    ------
    EmptyChain
        If the chain holds no draws.
    """
    if chain.length == 0:
        raise EmptyChain("no posterior draws")
    V = B_eval.values if hasattr(B_eval, "values") else np.asarray(B_eval, dtype=float)
    curves = chain.draws_b @ V.T
    alpha = 1.0 - level
    mean = V @ chain.draws_b.mean(axis=0)
    lo = np.quantile(curves, alpha / 2, axis=0)
    hi = np.quantile(curves, 1 - alpha / 2, axis=0)
    return mean, lo, hi


def marginal_posterior_logdensity(b, B, R, q, Y, sigma2, hp):
    """Marginal posterior log-density of the coefficients (up to a constant).

    Gaussian likelihood quadratic form plus the marginal coefficient prior.
    """
    from .priors import marginal_prior_logdensity

    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    b = np.asarray(b, dtype=float)
    V = B.values
    Y = np.asarray(Y, dtype=float)
    quad = b @ (V.T @ V) @ b / sigma2 - 2.0 * b @ (V.T @ Y) / sigma2
    return -0.5 * quad + marginal_prior_logdensity(b, R, q, hp)
