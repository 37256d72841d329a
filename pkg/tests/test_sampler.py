import numpy as np
import pytest
import scipy.stats

from penspline.basis import design_matrix, gramian, make_space, penalty_matrix
from penspline.errors import EmptyChain, SingularPrecision
from penspline.priors import HyperPrior, ProperPriorSpec, proper_precision
from penspline.sampler import (
    ChainOutput,
    ModelSpec,
    ResidualVariance,
    conditional_posterior_moments,
    effective_sample_size,
    gibbs_run,
    marginal_posterior_logdensity,
    posterior_summary,
    tau2_metropolis_step,
)


@pytest.fixture(scope="module")
def data():
    space = make_space(4, 8)
    n = 150
    rng = np.random.default_rng(0)
    x = np.sort(rng.uniform(size=n))
    f = np.sin(2 * np.pi * x)
    Y = f + 0.25 * rng.standard_normal(n)
    return space, x, Y, f


def test_conditional_moments_match_ridge_formula(data):
    space, x, Y, f = data
    B = design_matrix(space, x)
    R = penalty_matrix(space, 2)
    sigma2, tau2 = 0.0625, 2.0
    mu, Sigma = conditional_posterior_moments(B, R, Y, sigma2, tau2)
    P = B.values.T @ B.values / sigma2 + R.values / tau2
    ref_S = np.linalg.inv(P)
    ref_mu = ref_S @ B.values.T @ Y / sigma2
    assert np.max(np.abs(mu - ref_mu)) < 1e-8
    assert np.max(np.abs(Sigma - ref_S)) < 1e-8


def test_conditional_moments_accept_precision(data):
    space, x, Y, f = data
    B = design_matrix(space, x)
    R = penalty_matrix(space, 2)
    spec = ProperPriorSpec("proper_projection", 0.01)
    P = proper_precision(B, R, 2, spec, 2.0)
    mu, Sigma = conditional_posterior_moments(B, P, Y, 0.0625)
    assert np.all(np.isfinite(mu))
    assert np.all(np.linalg.eigvalsh(Sigma) > 0)


def test_conditional_moments_singular():
    space = make_space(4, 8)
    B = design_matrix(space, np.array([0.5, 0.6]))
    with pytest.raises(SingularPrecision):
        conditional_posterior_moments(B, np.zeros((12, 12)), np.zeros(2), 1.0)


def test_conjugate_subcase_matches_analytic_posterior(data):
    # fixed tau2 and known sigma2: the sampler must reproduce the exact
    # Gaussian posterior N(mu, Sigma)
    space, x, Y, f = data
    sigma2, tau2 = 0.0625, 5.0
    spec = ModelSpec(
        space=space,
        q=2,
        hyperprior=HyperPrior.fixed(tau2),
        residual=ResidualVariance.known(sigma2),
    )
    chain = gibbs_run(spec, (x, Y), iters=24_000, burn_in=4_000, seed=3)
    B = design_matrix(space, x)
    R = penalty_matrix(space, 2)
    mu, Sigma = conditional_posterior_moments(B, R, Y, sigma2, tau2)
    se = np.sqrt(np.diag(Sigma) / chain.length)
    # draws are iid here, so 4 SE bounds each coordinate comfortably
    assert np.all(np.abs(chain.draws_b.mean(axis=0) - mu) < 4.0 * se)
    emp_cov = np.cov(chain.draws_b.T)
    scale = np.sqrt(np.outer(np.diag(Sigma), np.diag(Sigma)))
    assert np.max(np.abs(emp_cov - Sigma) / scale) < 0.10


def test_ig_hyperprior_metropolis_matches_conjugate(data):
    # the tau2 full conditional under an IG hyperprior is IG(alpha + (d-q)/2,
    # beta + b'Rb/2); a long Metropolis chain must match it
    space, x, Y, f = data
    R = penalty_matrix(space, 2)
    d, q = space.dim, 2
    rng = np.random.default_rng(4)
    b = 0.5 * rng.standard_normal(d)
    r = float(b @ R.values @ b)
    hp = HyperPrior.inverse_gamma(1.0, 0.5)
    tau2 = 1.0
    draws = []
    for _ in range(40_000):
        tau2, _ = tau2_metropolis_step(tau2, b, R, q, hp, rng)
        draws.append(tau2)
    draws = np.array(draws[5_000:])
    exact = scipy.stats.invgamma(a=1.0 + 0.5 * (d - q), scale=0.5 + 0.5 * r)
    ks = scipy.stats.kstest(draws[::10], exact.cdf).statistic
    assert ks < 0.03


def test_chain_deterministic(data):
    space, x, Y, f = data
    spec = ModelSpec(
        space=space,
        q=2,
        hyperprior=HyperPrior.weibull(0.5, 1.0 / 500.0),
        residual=ResidualVariance.inverse_gamma(1e-3, 1e-3),
    )
    c1 = gibbs_run(spec, (x, Y), iters=3000, burn_in=1000, seed=11)
    c2 = gibbs_run(spec, (x, Y), iters=3000, burn_in=1000, seed=11)
    assert np.array_equal(c1.draws_b, c2.draws_b)
    assert np.array_equal(c1.draws_tau2, c2.draws_tau2)
    assert np.array_equal(c1.draws_sigma2, c2.draws_sigma2)
    c3 = gibbs_run(spec, (x, Y), iters=3000, burn_in=1000, seed=12)
    assert not np.array_equal(c1.draws_tau2, c3.draws_tau2)


def test_acceptance_rate_in_window(data):
    space, x, Y, f = data
    spec = ModelSpec(
        space=space,
        q=2,
        hyperprior=HyperPrior.weibull(0.5, 1.0 / 500.0),
        residual=ResidualVariance.inverse_gamma(1e-3, 1e-3),
    )
    chain = gibbs_run(spec, (x, Y), iters=12_000, burn_in=2_000, seed=0)
    assert 0.2 <= chain.acceptance_rate_tau2 <= 0.6


def test_recovers_truth_and_covers(data):
    space, x, Y, f = data
    spec = ModelSpec(
        space=space,
        q=2,
        hyperprior=HyperPrior.weibull(0.5, 1.0 / 500.0),
        residual=ResidualVariance.inverse_gamma(1e-3, 1e-3),
    )
    chain = gibbs_run(spec, (x, Y), iters=12_000, burn_in=2_000, seed=0)
    B = design_matrix(space, x)
    mean, lo, hi = posterior_summary(chain, B, 0.95)
    assert float(np.mean((mean - f) ** 2)) < 0.01
    assert float(np.mean((f >= lo) & (f <= hi))) > 0.8
    assert float(np.mean(chain.draws_sigma2)) == pytest.approx(0.0625, rel=0.5)


def test_proper_flavors_run_and_agree_at_large_tau2_poly(data):
    # with a weak polynomial penalty both proper flavors reduce to the improper fit
    space, x, Y, f = data
    base = dict(q=2, hyperprior=HyperPrior.weibull(0.5, 1.0 / 500.0),
                residual=ResidualVariance.known(0.0625))
    curves = {}
    for flavor in ("improper", "proper_projection", "proper_mmr"):
        spec = ModelSpec(space=space, prior_flavor=ProperPriorSpec(flavor, 100.0), **base)
        chain = gibbs_run(spec, (x, Y), iters=8_000, burn_in=2_000, seed=7)
        B = design_matrix(space, x)
        curves[flavor] = B.values @ chain.draws_b.mean(axis=0)
    assert np.max(np.abs(curves["proper_projection"] - curves["improper"])) < 0.05
    assert np.max(np.abs(curves["proper_mmr"] - curves["improper"])) < 0.05


def test_ess_iid_and_correlated():
    rng = np.random.default_rng(0)
    iid = rng.standard_normal(4000)
    assert effective_sample_size(iid) > 2500
    # AR(1) with rho = 0.9 has ESS ratio about (1-rho)/(1+rho) = 1/19
    ar = np.empty(40_000)
    ar[0] = 0.0
    eps = rng.standard_normal(40_000)
    for i in range(1, ar.size):
        ar[i] = 0.9 * ar[i - 1] + eps[i]
    ratio = effective_sample_size(ar) / ar.size
    assert 0.02 < ratio < 0.12
    assert effective_sample_size(np.full(100, 3.0)) == 100.0


def test_posterior_summary_empty_chain():
    empty = ChainOutput(
        draws_b=np.zeros((0, 3)),
        draws_tau2=np.zeros(0),
        draws_sigma2=np.zeros(0),
        acceptance_rate_tau2=1.0,
        ess={},
        seed=0,
    )
    with pytest.raises(EmptyChain):
        posterior_summary(empty, np.eye(3))


def test_marginal_posterior_logdensity_prefers_good_fit(data):
    space, x, Y, f = data
    B = design_matrix(space, x)
    R = penalty_matrix(space, 2)
    hp = HyperPrior.weibull(0.5, 1.0 / 500.0)
    good = np.linalg.lstsq(B.values, f, rcond=None)[0]
    bad = good + 2.0
    bad[::2] -= 4.0  # rough perturbation
    lg = marginal_posterior_logdensity(good, B, R, 2, Y, 0.0625, hp)
    lb = marginal_posterior_logdensity(bad, B, R, 2, Y, 0.0625, hp)
    assert lg > lb


def test_model_spec_validation(data):
    space, *_ = data
    with pytest.raises(ValueError):
        ModelSpec(space=space, q=4, hyperprior=HyperPrior.fixed(1.0))
    with pytest.raises(ValueError):
        ResidualVariance("known", sigma0_sq=-1.0)
    with pytest.raises(ValueError):
        gibbs_run(
            ModelSpec(space=space, q=2, hyperprior=HyperPrior.fixed(1.0)),
            (np.array([0.5]), np.array([1.0])),
            iters=10,
            burn_in=20,
        )
