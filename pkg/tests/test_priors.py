import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from penspline.basis import design_matrix, make_space, penalty_matrix
from penspline.errors import InvalidShape, NonPositiveInput, ZeroRoughness
from penspline.priors import (
    HyperPrior,
    ProperPriorSpec,
    RateSchedule,
    check_a5,
    corollary1_schedule,
    dr_prior_logpdf,
    hyperprior_log_tail,
    hyperprior_logpdf,
    marginal_prior_logdensity,
    nullspace_eigenvectors,
    proper_precision,
)

FAMILIES = [
    HyperPrior.inverse_gamma(1.5, 0.8),
    HyperPrior.gamma(0.7, 2.0),
    HyperPrior.weibull(0.5, 1.0 / 500.0),
    HyperPrior.uniform(3.0),
    HyperPrior.scaled_beta_prime(1.2, 0.9, 2.5),
]


from oracles import mp_log_marginal


@pytest.mark.parametrize("hp", FAMILIES, ids=[h.family for h in FAMILIES])
def test_hyperprior_density_normalized(hp):
    val, _ = quad(
        lambda v: math.exp(hyperprior_logpdf(hp, v)),
        0.0,
        np.inf if hp.family != "uniform" else hp.params[0],
        limit=400,
    )
    assert val == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("hp", FAMILIES, ids=[h.family for h in FAMILIES])
def test_marginal_prior_matches_quadrature_oracle(hp):
    space = make_space(4, 8)
    d, q = space.dim, 2
    R = penalty_matrix(space, q)
    s = 0.5 * (d - q)
    rng = np.random.default_rng(0)
    for _ in range(8):
        b = 0.3 * rng.standard_normal(d)
        r = float(b @ R.values @ b)
        mine = marginal_prior_logdensity(b, R, q, hp)
        oracle = mp_log_marginal(hp, r, s)
        assert mine == pytest.approx(oracle, rel=1e-6, abs=1e-6)


def test_weibull_k1_equals_gamma_alpha1():
    # Weibull(1, lam) and Gamma(1, lam) are the same exponential distribution
    space = make_space(4, 8)
    R = penalty_matrix(space, 2)
    rng = np.random.default_rng(1)
    wb = HyperPrior.weibull(1.0, 0.05)
    ga = HyperPrior.gamma(1.0, 0.05)
    for _ in range(10):
        b = 0.5 * rng.standard_normal(space.dim)
        assert marginal_prior_logdensity(b, R, 2, wb) == pytest.approx(
            marginal_prior_logdensity(b, R, 2, ga), rel=1e-6
        )


def test_marginal_prior_decreasing_in_roughness():
    # rougher coefficient vectors are less likely a priori
    space = make_space(4, 8)
    R = penalty_matrix(space, 2)
    drb_dir = np.linalg.eigh(R.values)[1][:, -1]  # roughest direction
    for hp in FAMILIES:
        vals = [
            marginal_prior_logdensity(c * drb_dir, R, 2, hp) for c in (0.1, 0.5, 2.0)
        ]
        assert vals[0] > vals[1] > vals[2]


def test_zero_roughness_rejected():
    space = make_space(4, 8)
    R = penalty_matrix(space, 2)
    b = np.ones(space.dim)  # constant spline, b'Rb = 0
    with pytest.raises(ZeroRoughness):
        marginal_prior_logdensity(b, R, 2, HyperPrior.weibull(0.5, 1.0))
    # IG marginal stays finite on the nullset
    val = marginal_prior_logdensity(b, R, 2, HyperPrior.inverse_gamma(1.0, 1.0))
    assert np.isfinite(val)


@pytest.mark.parametrize("hp", FAMILIES, ids=[h.family for h in FAMILIES])
def test_log_tail_matches_quadrature(hp):
    for x in (0.05, 0.5, 2.0):
        mine = hyperprior_log_tail(hp, x)
        if hp.family == "uniform" and x >= hp.params[0]:
            assert mine == -math.inf
            continue
        hi = hp.params[0] if hp.family == "uniform" else np.inf
        val, _ = quad(lambda v: math.exp(hyperprior_logpdf(hp, v)), x, hi, limit=400)
        assert mine == pytest.approx(math.log(val), rel=1e-6, abs=1e-8)


def test_log_tail_deep_underflow_weibull():
    hp = HyperPrior.weibull(0.5, 1000.0)
    # survival prob exp(-sqrt(1000 x)); far below float underflow at x = 1e4
    assert hyperprior_log_tail(hp, 1e4) == pytest.approx(-math.sqrt(1e7), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(v=st.floats(min_value=1e-6, max_value=1e6))
def test_uniform_logpdf_indicator(v):
    hp = HyperPrior.uniform(2.0)
    if v < 2.0:
        assert hyperprior_logpdf(hp, v) == pytest.approx(-math.log(2.0))
    else:
        assert hyperprior_logpdf(hp, v) == -math.inf


def test_nonpositive_input():
    with pytest.raises(NonPositiveInput):
        hyperprior_logpdf(HyperPrior.gamma(1.0, 1.0), 0.0)


def test_proper_precision_projection_and_mmr():
    space = make_space(4, 8)
    n = 200
    x = np.arange(1, n + 1) / n
    B = design_matrix(space, x)
    R = penalty_matrix(space, 2)
    tau2, tau2_poly = 2.0, 0.01
    for flavor in ("proper_projection", "proper_mmr"):
        spec = ProperPriorSpec(flavor, tau2_poly)
        P = proper_precision(B, R, 2, spec, tau2)
        vals = np.linalg.eigvalsh(P)
        assert vals[0] > 0  # proper: strictly positive definite
    # projection flavor: quadratic form on a linear spline is governed by tau2_poly
    from penspline.basis import monomial_coefficients

    spec = ProperPriorSpec("proper_projection", tau2_poly)
    P = proper_precision(B, R, 2, spec, tau2)
    c = monomial_coefficients(space, 1)
    # linear spline: b'Rb = 0, H projection leaves it unchanged
    expect = float(c @ (B.values.T @ B.values) @ c) / (n * tau2_poly)
    assert float(c @ P @ c) == pytest.approx(expect, rel=1e-8)


def test_nullspace_eigenvectors_orthonormal():
    space = make_space(4, 8)
    R = penalty_matrix(space, 2).values
    Q0 = nullspace_eigenvectors(R, 2)
    assert Q0.shape == (space.dim, 2)
    assert np.max(np.abs(Q0.T @ Q0 - np.eye(2))) < 1e-10
    assert np.max(np.abs(R @ Q0)) < 1e-8 * np.abs(R).max()


def test_dr_prior_logpdf_gaussian_oracle():
    gamma = np.array([0.0, 0.0, 1.0, 4.0, 25.0])
    u = np.array([0.3, -0.2, 0.5, 0.1, -0.4])
    tau2, tau2_poly = 2.0, 0.5
    var = np.array([tau2_poly, tau2_poly, tau2 / 1.0, tau2 / 4.0, tau2 / 25.0])
    ref = float(np.sum(-0.5 * np.log(2 * np.pi * var) - 0.5 * u**2 / var))
    assert dr_prior_logpdf(u, gamma, 2, tau2, tau2_poly) == pytest.approx(ref, rel=1e-12)


def test_corollary1_schedule_values():
    # uniform upper endpoint at n = 1e5, m0 = 2, c = 1 is (1e5)^(-1/5) = 0.1
    hp = corollary1_schedule("uniform", 2, 100_000, c=1.0)
    assert hp.family == "uniform"
    assert hp.params[0] == pytest.approx(0.1, rel=1e-12)
    n = 1000
    tau2_star = n ** (-0.2)
    n_eps2 = n**0.2 * math.log(n)
    hp = corollary1_schedule("gamma", 2, n, alpha=1.0, c_beta=2.0)
    assert hp.params == (1.0, pytest.approx(2.0 * n_eps2 / tau2_star))
    hp = corollary1_schedule("weibull", 2, n, k=0.5, c_lambda=1.0)
    assert hp.params == (0.5, pytest.approx(n_eps2**2 / tau2_star))


def test_corollary1_invalid_shapes():
    with pytest.raises(InvalidShape):
        corollary1_schedule("gamma", 2, 1000, alpha=1.5)
    with pytest.raises(InvalidShape):
        corollary1_schedule("weibull", 2, 1000, k=2.0)


def test_a5_verdicts():
    verdicts = {
        "uniform": ({"c": 1.0}, 0.5, 1.0, True),
        "gamma": ({"alpha": 1.0, "c_beta": 1.0}, 1.0, 6.0, True),
        "weibull": ({"k": 0.5, "c_lambda": 1.0}, 1.0, 25.0, True),
        "inverse_gamma": ({"alpha": 1.0, "beta": 1.0}, 1.0, 5.0, False),
        "sbp": ({"c_lambda": 1.0}, 1.0, 25.0, False),
    }
    for family, (constants, c1, c2, expect_all) in verdicts.items():
        sched = RateSchedule(family, 2, constants)
        for n in (1_000, 10_000, 100_000):
            a, b, c = check_a5(sched, n, c1, c2)
            assert all((a, b, c)) == expect_all, (family, n, (a, b, c))


def test_a5_failure_modes():
    # inverse gamma: density increases from 0 near the origin -> (a) fails
    sched = RateSchedule("inverse_gamma", 2, {"alpha": 1.0, "beta": 1.0})
    a, _, _ = check_a5(sched, 10_000, 1.0, 5.0)
    assert not a
    # sbp: polynomial tail is far too heavy -> (c) fails
    sched = RateSchedule("sbp", 2, {"c_lambda": 1.0})
    _, _, c = check_a5(sched, 10_000, 1.0, 25.0)
    assert not c


def test_hyperprior_validation():
    with pytest.raises(ValueError):
        HyperPrior("cauchy", (1.0,))
    with pytest.raises(ValueError):
        HyperPrior.gamma(-1.0, 1.0)
    with pytest.raises(ValueError):
        ProperPriorSpec("bogus")
