"""High-precision reference implementations used by several test modules."""

import mpmath as mp


def mp_logpdf(hp, v):
    """Normalized hyperprior log-density, computed with mpmath arithmetic."""
    v = mp.mpf(v)
    fam, p = hp.family, hp.params
    if fam == "inverse_gamma":
        a, b = map(mp.mpf, p)
        return a * mp.log(b) - mp.loggamma(a) - (a + 1) * mp.log(v) - b / v
    if fam == "gamma":
        a, b = map(mp.mpf, p)
        return a * mp.log(b) - mp.loggamma(a) + (a - 1) * mp.log(v) - b * v
    if fam == "weibull":
        k, lam = map(mp.mpf, p)
        return mp.log(k) + k * mp.log(lam) + (k - 1) * mp.log(v) - (lam * v) ** k
    if fam == "uniform":
        (b,) = map(mp.mpf, p)
        return -mp.log(b) if v < b else mp.mpf("-inf")
    if fam == "sbp":
        a, b, g = map(mp.mpf, p)
        return (
            -a * mp.log(g)
            - (mp.loggamma(a) + mp.loggamma(b) - mp.loggamma(a + b))
            + (a - 1) * mp.log(v)
            - (a + b) * mp.log1p(v / g)
        )
    raise ValueError(fam)


def mp_log_marginal(hp, r, s, dps=35):
    """Oracle for log int_0^inf v^(-s) exp(-r/(2v)) p(v) dv.

    High-precision quadrature on eta = log v with split points bracketing the
    integrand peak, which a naive quad over v misses for rough b.
    """
    with mp.workdps(dps):
        r_mp, s_mp = mp.mpf(r), mp.mpf(s)

        def g(eta):
            v = mp.e**eta
            lp = mp_logpdf(hp, v)
            if lp == mp.mpf("-inf"):
                return mp.mpf("-inf")
            return (1 - s_mp) * eta - r_mp / (2 * v) + lp

        grid = [mp.mpf(-60) + mp.mpf(120) * i / 600 for i in range(601)]
        vals = [g(e) for e in grid]
        gstar = max(vals)
        estar = grid[vals.index(gstar)]

        def integrand(eta):
            val = g(eta)
            return mp.e ** (val - gstar) if val > mp.mpf("-inf") else mp.mpf(0)

        if hp.family == "uniform":
            hi = mp.log(mp.mpf(hp.params[0]))
            pts = [mp.mpf(-60), min(estar, hi), hi]
        else:
            pts = [estar - 60, estar, estar + 60]
        total = mp.quad(integrand, pts)
        return float(gstar + mp.log(total))
