"""Simulation-study harness: data generation, experiments, CSV/JSON emission.

Every experiment returns a list of long-format records with a stable schema
(schema_version, experiment, seed, replicate, factors, metric, value) and is
deterministic given its config and seed: replicate r of factor cell c always
uses the RNG stream derived from (seed, experiment id, c, r).
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import estimators, priors, sampler
from .basis import design_matrix, gramian, make_space, penalty_matrix
from .drbasis import dr_basis, dr_coords
from .errors import ConfigError, GramianNotPositiveDefinite, UnknownTestFunction

SCHEMA_VERSION = 1

EXPERIMENTS = ("adaptivity", "proper-vs-mmr", "concentration", "prop5", "a5-screen", "fit")

TEST_FUNCTIONS = {
    **{f"sine{k}": (lambda k: (lambda x: np.sin((k - 1) * np.pi * x)))(k) for k in range(1, 8)},
    "linear": lambda x: 4.0 * x - 2.0,
    "linear_sine": lambda x: 4.0 * x - 2.0 + np.sin(2.0 * np.pi * x),
    "sine2pi": lambda x: np.sin(2.0 * np.pi * x),
}


def gen_data(f0, n, sigma0, design="uniform", seed=0):
    """Simulate (x, Y) with Y_i = f0(x_i) + sigma0 * N(0, 1) noise.

    ``f0`` is a registered test-function id; ``design`` is 'uniform'
    (iid U(0,1)) or 'regular' (x_i = i / n).
    """
    if f0 not in TEST_FUNCTIONS:
        raise UnknownTestFunction(f"unknown test function {f0!r}")
    if sigma0 < 0:
        raise ValueError("sigma0 must be nonnegative")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if design == "uniform":
        x = np.sort(rng.uniform(0.0, 1.0, n))
    elif design == "regular":
        x = np.arange(1, n + 1) / n
    else:
        raise ConfigError(f"unknown design {design!r}")
    f = TEST_FUNCTIONS[f0]
    Y = f(x) + sigma0 * rng.standard_normal(n)
    return x, Y


def _child_seed(seed, experiment, factor_index, replicate):
    exp_id = EXPERIMENTS.index(experiment)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(exp_id, factor_index, replicate))
    return int(ss.generate_state(1)[0])


def _record(experiment, seed, replicate, factors, metric, value):
    if not np.isfinite(value):
        raise ValueError(f"non-finite metric {metric} = {value}")
    return {
        "schema_version": SCHEMA_VERSION,
        "experiment": experiment,
        "seed": seed,
        "replicate": replicate,
        "factors": ";".join(f"{k}={v}" for k, v in factors),
        "metric": metric,
        "value": float(value),
    }


def _validate_config(config, defaults, experiment):
    unknown = set(config) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys for {experiment}: {sorted(unknown)}")
    merged = dict(defaults)
    merged.update(config)
    return merged


def _run_cells(tasks, threads):
    """Run (callable, args) tasks, preserving per-task output order."""
    if threads <= 1:
        return [fn(*args) for fn, args in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, *args) for fn, args in tasks]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# adaptivity study (hyperprior vs fixed smoothing variance)

ADAPTIVITY_DEFAULTS = {
    "n": 100,
    "replicates": 100,
    "seed": 0,
    "sigma0": 0.25,
    "m": 4,
    "k0": 20,
    "q": 2,
    "fixed_tau2": [0.5, 5.0, 50.0, 500.0, 5000.0],
    "weibull": [0.5, 1.0 / 500.0],
    "sigma2_prior": [1e-3, 1e-3],
    "iters": 12_000,
    "burn_in": 2_000,
    "thin": 1,
    "threads": 1,
}


def _dataset_with_pd_gramian(space, q, f0, n, sigma0, seed, tries=16):
    """Draw a uniform-design data set whose Gramian is positive definite.

    A random design can leave a basis function unsupported; such draws are
    rejected and redrawn from a derived stream so replicates stay deterministic.
    """
    for attempt in range(tries):
        x, Y = gen_data(f0, n, sigma0, "uniform", seed if attempt == 0 else (seed, attempt))
        B = design_matrix(space, x)
        try:
            drb = dr_basis(gramian(B), penalty_matrix(space, q), B=B, space=space)
        except GramianNotPositiveDefinite:
            continue
        return x, Y, B, drb
    raise GramianNotPositiveDefinite(
        f"no positive-definite design in {tries} draws (n = {n}, d = {space.dim})"
    )


def _adaptivity_cell(cfg, space, k, rep, factor_index):
    """All treatment arms on one replicate data set of test function sine{k}."""
    seed = _child_seed(cfg["seed"], "adaptivity", factor_index, rep)
    x, Y, B, drb = _dataset_with_pd_gramian(
        space, cfg["q"], f"sine{k}", cfg["n"], cfg["sigma0"], seed
    )
    fn = TEST_FUNCTIONS[f"sine{k}"](x)
    resid = sampler.ResidualVariance.inverse_gamma(*cfg["sigma2_prior"])
    arms = [("hyperprior", priors.HyperPrior.weibull(*cfg["weibull"]))]
    arms += [(f"fixed{t}", priors.HyperPrior.fixed(t)) for t in cfg["fixed_tau2"]]
    out = []
    for arm_idx, (arm, hp) in enumerate(arms):
        spec = sampler.ModelSpec(space=space, q=cfg["q"], hyperprior=hp, residual=resid)
        chain = sampler._gibbs_run_dr(
            spec, drb, Y, cfg["iters"], cfg["burn_in"], cfg["thin"],
            _child_seed(cfg["seed"], "adaptivity", 1000 + 10 * factor_index + arm_idx, rep),
        )
        fhat = B.values @ chain.draws_b.mean(axis=0)
        mse = float(np.mean((fhat - fn) ** 2))
        out.append((k, arm, rep, mse))
    return out


def run_adaptivity(config=None, threads=1):
    """MSE of the Weibull-hyperprior arm vs fixed smoothing variances (7 sines)."""
    cfg = _validate_config(config or {}, ADAPTIVITY_DEFAULTS, "adaptivity")
    space = make_space(cfg["m"], cfg["k0"])
    tasks = []
    for k in range(1, 8):
        for rep in range(cfg["replicates"]):
            tasks.append((_adaptivity_cell, (cfg, space, k, rep, k)))
    results = _run_cells(tasks, threads)
    records = []
    log_mses = {}
    for cell in results:
        for k, arm, rep, mse in cell:
            records.append(
                _record("adaptivity", cfg["seed"], rep, [("f", f"sine{k}"), ("arm", arm)], "mse", mse)
            )
            log_mses.setdefault((k, arm), []).append(math.log(mse))
    for (k, arm), vals in sorted(log_mses.items()):
        records.append(
            _record(
                "adaptivity", cfg["seed"], -1,
                [("f", f"sine{k}"), ("arm", arm)], "mean_log_mse", float(np.mean(vals)),
            )
        )
    return records


# ---------------------------------------------------------------------------
# proper-projection vs MMR proper prior

PROPER_VS_MMR_DEFAULTS = {
    "n": 100,
    "seed": 0,
    "sigma0": 0.1,
    "m": 4,
    "k0": 20,
    "q": 2,
    "weibull": [0.5, 1.0 / 500.0],
    "sigma2_prior": [1e-3, 1e-3],
    "tau2_poly_log10": [-4.0, -2.0, 0.05],
    "grid_points": 201,
    "iters": 12_000,
    "burn_in": 2_000,
    "thin": 1,
}


def run_proper_vs_mmr(config=None, threads=1):
    """Posterior-mean curves of the two proper prior flavors across tau2_poly."""
    cfg = _validate_config(config or {}, PROPER_VS_MMR_DEFAULTS, "proper-vs-mmr")
    space = make_space(cfg["m"], cfg["k0"])
    lo, hi, step = cfg["tau2_poly_log10"]
    n_steps = int(round((hi - lo) / step)) + 1
    tau2_polys = 10.0 ** (lo + step * np.arange(n_steps))
    grid = np.linspace(0.0, 1.0, cfg["grid_points"])
    B_eval = design_matrix(space, grid)
    resid = sampler.ResidualVariance.inverse_gamma(*cfg["sigma2_prior"])
    hp = priors.HyperPrior.weibull(*cfg["weibull"])

    records = []
    for fi, f0 in enumerate(("linear", "linear_sine")):
        seed = _child_seed(cfg["seed"], "proper-vs-mmr", fi, 0)
        x, Y, B, drb = _dataset_with_pd_gramian(
            space, cfg["q"], f0, cfg["n"], cfg["sigma0"], seed
        )

        def fit_curve(flavor, tau2_poly, chain_seed):
            spec = sampler.ModelSpec(
                space=space, q=cfg["q"], hyperprior=hp,
                prior_flavor=priors.ProperPriorSpec(flavor, tau2_poly),
                residual=resid,
            )
            chain = sampler._gibbs_run_dr(
                spec, drb, Y, cfg["iters"], cfg["burn_in"], cfg["thin"], chain_seed
            )
            return B_eval.values @ chain.draws_b.mean(axis=0)

        ref = fit_curve("improper", 1.0, _child_seed(cfg["seed"], "proper-vs-mmr", fi, 1))
        # detrended reference: subtract the empirical (design-point) projection onto {1, x}
        X2 = np.column_stack([np.ones_like(x), x])
        coef = np.linalg.lstsq(X2, B.values @ np.linalg.lstsq(B_eval.values, ref, rcond=None)[0], rcond=None)[0]
        detrended = ref - (coef[0] + coef[1] * grid)

        for gi, g in enumerate(grid):
            records.append(
                _record("proper-vs-mmr", cfg["seed"], 0,
                        [("f", f0), ("curve", "improper"), ("grid", gi)], "value", ref[gi])
            )
        for ti, tau2_poly in enumerate(tau2_polys):
            for flavor in ("proper_projection", "proper_mmr"):
                curve = fit_curve(
                    flavor, float(tau2_poly),
                    _child_seed(cfg["seed"], "proper-vs-mmr", fi, 2 + 2 * ti + (flavor == "proper_mmr")),
                )
                factors = [("f", f0), ("flavor", flavor), ("tau2_poly", f"{tau2_poly:.6g}")]
                records.append(
                    _record("proper-vs-mmr", cfg["seed"], 0, factors,
                            "sup_dist_to_reference", float(np.max(np.abs(curve - ref))))
                )
                records.append(
                    _record("proper-vs-mmr", cfg["seed"], 0, factors,
                            "sup_dist_to_detrended", float(np.max(np.abs(curve - detrended))))
                )
    return records


# ---------------------------------------------------------------------------
# posterior concentration rate study

CONCENTRATION_DEFAULTS = {
    "n_grid": [250, 500, 1000, 2000, 4000],
    "replicates_freq": 200,
    "replicates_bayes": 20,
    "seed": 0,
    "sigma0": 0.25,
    "m": 4,
    "m0": 2,
    "f0": "sine2pi",
    "M": 1.0,
    "c_lambda": 1.0,
    "iters": 6_000,
    "burn_in": 2_000,
    "thin": 1,
    "threads": 1,
}


def _concentration_setup(cfg, n):
    k0 = math.ceil(2.0 * n**0.4)
    space = make_space(cfg["m"], k0)
    x = np.arange(1, n + 1) / n
    B = design_matrix(space, x)
    drb = dr_basis(gramian(B), penalty_matrix(space, cfg["m0"]), B=B, space=space)
    f0n = TEST_FUNCTIONS[cfg["f0"]](x)
    return space, x, B, drb, f0n


def run_concentration(config=None, threads=1):
    """Empirical rate of the truncated DR estimator and the Bayesian posterior."""
    cfg = _validate_config(config or {}, CONCENTRATION_DEFAULTS, "concentration")
    m0 = cfg["m0"]
    records = []
    freq_log_mse = []
    bayes_log_med = {"known": [], "unknown": []}
    log_n = []

    for ni, n in enumerate(cfg["n_grid"]):
        space, x, B, drb, f0n = _concentration_setup(cfg, n)
        d = drb.dim
        t = min(estimators.theorem_cutoff(n, m0, m0), d)
        eps_n = n ** (-m0 / (2 * m0 + 1)) * math.sqrt(math.log(n))

        mses = []
        for rep in range(cfg["replicates_freq"]):
            rng = np.random.default_rng(_child_seed(cfg["seed"], "concentration", ni, rep))
            Y = f0n + cfg["sigma0"] * rng.standard_normal(n)
            fit = estimators.truncated_dr_fit(drb, Y, t)
            mse = float(np.mean((fit.fitted_values - f0n) ** 2))
            mses.append(mse)
            records.append(
                _record("concentration", cfg["seed"], rep, [("n", n), ("estimator", "truncated_dr")],
                        "mse", mse)
            )
        freq_log_mse.append(float(np.mean(np.log(mses))))
        log_n.append(math.log(n))

        hp = priors.corollary1_schedule("weibull", m0, n, k=0.5, c_lambda=cfg["c_lambda"])
        for mode in ("known", "unknown"):
            resid = (
                sampler.ResidualVariance.known(cfg["sigma0"] ** 2)
                if mode == "known"
                else sampler.ResidualVariance.inverse_gamma(1e-3, 1e-3)
            )
            spec = sampler.ModelSpec(space=space, q=m0, hyperprior=hp, residual=resid)
            med_errs = []
            for rep in range(cfg["replicates_bayes"]):
                rng = np.random.default_rng(
                    _child_seed(cfg["seed"], "concentration", 100 + ni, rep)
                )
                Y = f0n + cfg["sigma0"] * rng.standard_normal(n)
                chain = sampler._gibbs_run_dr(
                    spec, drb, Y, cfg["iters"], cfg["burn_in"], cfg["thin"],
                    _child_seed(cfg["seed"], "concentration", 200 + 10 * ni + (mode == "unknown"), rep),
                )
                # ||f - f0||_n per draw, in DR coordinates plus off-space residual
                u_draws = chain.draws_b @ np.linalg.inv(drb.transition).T
                u0 = dr_coords(drb, f0n)
                off2 = float(np.mean((f0n - drb.dr_design @ u0) ** 2))
                errs = np.sqrt(np.sum((u_draws - u0) ** 2, axis=1) + off2)
                med = float(np.median(errs))
                mass_out = float(np.mean(errs >= cfg["M"] * eps_n))
                med_errs.append(med)
                records.append(
                    _record("concentration", cfg["seed"], rep,
                            [("n", n), ("estimator", f"bayes_{mode}")], "median_error", med)
                )
                records.append(
                    _record("concentration", cfg["seed"], rep,
                            [("n", n), ("estimator", f"bayes_{mode}")], "mass_outside", mass_out)
                )
            bayes_log_med[mode].append(float(np.mean(np.log(med_errs))))

    slope_freq = float(np.polyfit(log_n, freq_log_mse, 1)[0])
    records.append(
        _record("concentration", cfg["seed"], -1, [("estimator", "truncated_dr")],
                "log_mse_slope", slope_freq)
    )
    for mode in ("known", "unknown"):
        slope = float(np.polyfit(log_n, bayes_log_med[mode], 1)[0])
        records.append(
            _record("concentration", cfg["seed"], -1, [("estimator", f"bayes_{mode}")],
                    "log_median_error_slope", slope)
        )
    return records


# ---------------------------------------------------------------------------
# squared-error distributions of the two estimators vs analytic mixtures

PROP5_DEFAULTS = {
    "n": 1000,
    "seed": 0,
    "m": 4,
    "k0": 8,
    "q": 2,
    "sigma0": 0.25,
    "lam": 50.0,
    "cutoffs": [3, 6, 12],
    "reps": 5000,
    "f0": "sine2pi",
}


def _mixture_samples_truncated(rng, sigma2, n, t, u0, reps):
    tail = float(np.sum(u0[t:] ** 2))
    return sigma2 / n * rng.chisquare(t, size=reps) + tail


def _mixture_samples_penalized(rng, sigma2, n, gamma, lam, u0, reps):
    w = estimators.shrinkage_weights(gamma, lam, n)
    out = np.zeros(reps)
    for j in range(gamma.size):
        nc = n * u0[j] ** 2 * (w[j] - 1.0) ** 2 / (sigma2 * w[j] ** 2)
        draw = rng.noncentral_chisquare(1.0, nc, size=reps) if nc > 0 else rng.chisquare(1, size=reps)
        out += w[j] ** 2 * draw
    return sigma2 / n * out


def _ks_distance(a, b):
    a = np.sort(a)
    b = np.sort(b)
    allv = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, allv, side="right") / a.size
    cdf_b = np.searchsorted(b, allv, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def run_prop5(config=None, threads=1):
    """KS comparison of simulated estimator errors against the analytic mixtures."""
    cfg = _validate_config(config or {}, PROP5_DEFAULTS, "prop5")
    space = make_space(cfg["m"], cfg["k0"])
    x = np.arange(1, cfg["n"] + 1) / cfg["n"]
    B = design_matrix(space, x)
    drb = dr_basis(gramian(B), penalty_matrix(space, cfg["q"]), B=B, space=space)
    f0n = TEST_FUNCTIONS[cfg["f0"]](x)
    u0 = dr_coords(drb, f0n)
    sigma2 = cfg["sigma0"] ** 2
    records = []
    for ci, t in enumerate(cfg["cutoffs"]):
        t = min(t, drb.dim)
        errs_t, errs_lam = estimators.simulate_prop5(
            drb, u0, sigma2, t, cfg["lam"], cfg["reps"],
            _child_seed(cfg["seed"], "prop5", ci, 0),
        )
        rng = np.random.default_rng(_child_seed(cfg["seed"], "prop5", ci, 1))
        ref_t = _mixture_samples_truncated(rng, sigma2, cfg["n"], t, u0, cfg["reps"])
        ref_lam = _mixture_samples_penalized(
            rng, sigma2, cfg["n"], drb.eigenvalues, cfg["lam"], u0, cfg["reps"]
        )
        records.append(
            _record("prop5", cfg["seed"], 0, [("t", t)], "ks_truncated", _ks_distance(errs_t, ref_t))
        )
        records.append(
            _record("prop5", cfg["seed"], 0, [("t", t)], "ks_penalized", _ks_distance(errs_lam, ref_lam))
        )
    return records


# ---------------------------------------------------------------------------
# hyperprior rate-condition screening

A5_SCREEN_DEFAULTS = {
    "seed": 0,
    "m0": 2,
    "n_grid": [1_000, 10_000, 100_000],
    "families": {
        "uniform": {"constants": {"c": 1.0}, "c1": 0.5, "c2": 1.0},
        "gamma": {"constants": {"alpha": 1.0, "c_beta": 1.0}, "c1": 1.0, "c2": 6.0},
        "weibull": {"constants": {"k": 0.5, "c_lambda": 1.0}, "c1": 1.0, "c2": 25.0},
        "inverse_gamma": {"constants": {"alpha": 1.0, "beta": 1.0}, "c1": 1.0, "c2": 5.0},
        "sbp": {"constants": {"c_lambda": 1.0}, "c1": 1.0, "c2": 25.0},
    },
}


def run_a5_screen(config=None, threads=1):
    """Screen hyperprior schedules against the three rate conditions."""
    cfg = _validate_config(config or {}, A5_SCREEN_DEFAULTS, "a5-screen")
    records = []
    for family, fam_cfg in cfg["families"].items():
        sched = priors.RateSchedule(family, cfg["m0"], fam_cfg["constants"])
        for n in cfg["n_grid"]:
            a, b, c = priors.check_a5(sched, n, fam_cfg["c1"], fam_cfg["c2"])
            for name, val in (("a", a), ("b", b), ("c", c)):
                records.append(
                    _record("a5-screen", cfg["seed"], 0, [("family", family), ("n", n)],
                            f"condition_{name}", float(val))
                )
    return records


# ---------------------------------------------------------------------------
# single end-to-end fit

FIT_DEFAULTS = {
    "seed": 0,
    "n": 100,
    "sigma0": 0.25,
    "f0": "sine2pi",
    "design": "uniform",
    "data": None,  # path to csv with columns x,y; overrides synthetic data
    "m": 4,
    "k0": 20,
    "q": 2,
    "weibull": [0.5, 1.0 / 500.0],
    "sigma2_known": None,  # float for known residual variance
    "sigma2_prior": [1e-3, 1e-3],
    "level": 0.95,
    "grid_points": 201,
    "iters": 12_000,
    "burn_in": 2_000,
    "thin": 1,
}


def run_fit(config=None, threads=1):
    """Fit one data set end to end; returns (records, curve_table)."""
    cfg = _validate_config(config or {}, FIT_DEFAULTS, "fit")
    if cfg["data"] is not None:
        raw = np.genfromtxt(cfg["data"], delimiter=",", names=True)
        x = np.asarray(raw["x"], dtype=float)
        Y = np.asarray(raw["y"], dtype=float)
        order = np.argsort(x)
        x, Y = x[order], Y[order]
    else:
        x, Y = gen_data(cfg["f0"], cfg["n"], cfg["sigma0"], cfg["design"],
                        _child_seed(cfg["seed"], "fit", 0, 0))
    space = make_space(cfg["m"], cfg["k0"])
    resid = (
        sampler.ResidualVariance.known(cfg["sigma2_known"])
        if cfg["sigma2_known"] is not None
        else sampler.ResidualVariance.inverse_gamma(*cfg["sigma2_prior"])
    )
    spec = sampler.ModelSpec(
        space=space, q=cfg["q"], hyperprior=priors.HyperPrior.weibull(*cfg["weibull"]),
        residual=resid,
    )
    chain = sampler.gibbs_run(
        spec, (x, Y), iters=cfg["iters"], burn_in=cfg["burn_in"], thin=cfg["thin"],
        seed=_child_seed(cfg["seed"], "fit", 0, 1),
    )
    grid = np.linspace(0.0, 1.0, cfg["grid_points"])
    mean, lo, hi = sampler.posterior_summary(chain, design_matrix(space, grid), cfg["level"])
    records = [
        _record("fit", cfg["seed"], 0, [], "tau2_posterior_mean", float(chain.draws_tau2.mean())),
        _record("fit", cfg["seed"], 0, [], "sigma2_posterior_mean", float(chain.draws_sigma2.mean())),
        _record("fit", cfg["seed"], 0, [], "acceptance_rate_tau2", chain.acceptance_rate_tau2),
        _record("fit", cfg["seed"], 0, [], "min_ess_b", float(np.min(chain.ess["b"]))),
    ]
    curve = np.column_stack([grid, mean, lo, hi])
    return records, curve


# ---------------------------------------------------------------------------
# output

RUNNERS = {
    "adaptivity": run_adaptivity,
    "proper-vs-mmr": run_proper_vs_mmr,
    "concentration": run_concentration,
    "prop5": run_prop5,
    "a5-screen": run_a5_screen,
}

_CSV_COLUMNS = ["schema_version", "experiment", "seed", "replicate", "factors", "metric", "value"]


def write_results(records, out_dir, config, elapsed):
    """Write results.csv (deterministic row order) and manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = sorted(records, key=lambda r: (r["factors"], r["replicate"], r["metric"]))
    csv_path = out / "results.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_COLUMNS)
        writer.writeheader()
        for rec in records:
            rec = dict(rec)
            rec["value"] = repr(rec["value"])
            writer.writerow(rec)
    digest = hashlib.sha256(csv_path.read_bytes()).hexdigest()
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "results_sha256": digest,
        "elapsed_seconds": elapsed,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
    return csv_path


def write_curve(curve, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "curve.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid", "mean", "lo", "hi"])
        for row in curve:
            writer.writerow([repr(float(v)) for v in row])
    return path
