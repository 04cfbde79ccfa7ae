"""Cross-module oracle checks behind the ``validate`` subcommand.

Each check returns a :class:`Check` with the measured deviation and the
tolerance it was held to.  Checks are tolerance based, so verdicts do not
depend on the seed.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .bounds import gamma_exp_square_mean, rate_bound, unprecoded_kernel
from .channel import RandomStream, complex_normal
from .precoding import precode_zf, receive
from .rate_mc import mi_user_mc
from .system import SystemConfig

__all__ = ["Check", "run_validate"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ""


def _kernel_check(rng, n=10**6):
    sigma2, p_n, gain, lam = 1.0, 5.0, 0.7, 4.0
    phi = rng.exponential(p_n * gain * lam, n)
    mc = float(np.mean(np.exp(-phi / (2 * sigma2))))
    closed = float(unprecoded_kernel(p_n, gain, lam, sigma2))
    dev = abs(closed - mc) / mc
    return Check("exponential_kernel", dev <= 0.01, dev, 0.01, f"closed={closed:.6g} mc={mc:.6g}")


def _lambda_check(rng, n=10**6):
    # CI pairwise average with the gain ||h_k||^2 / varpi_k drawn from channels
    N, K, p = 3, 2, 10.0
    cfg = SystemConfig(N, K, 2, p)
    beta = math.sqrt(p / (N * K * (1.0 / K) ** 2))
    c = beta * (1.0 / K) / K
    a = c * c * 4.0 / 2.0
    h = complex_normal(rng, (n, N))
    x = np.sum(np.abs(h) ** 2, axis=1)
    mc = float(np.mean(np.exp(-a * x**2)))
    closed = gamma_exp_square_mean(a, float(cfg.n_antennas), 1.0)
    dev = abs(closed - mc) / mc
    return Check("ci_gamma_average", dev <= 0.02, dev, 0.02, f"closed={closed:.6g} mc={mc:.6g}")


def _zf_check(rng, n=10**4):
    worst = 0.0
    for _ in range(n):
        H = complex_normal(rng, (2, 3))
        s = np.exp(1j * np.pi / 2 * rng.integers(0, 4, 2))
        out = precode_zf(H, s, 1.0, "instantaneous")
        for k in range(2):
            worst = max(worst, float(abs(receive(H, out.x, k) - out.beta * s[k])))
    return Check("zf_exactness", worst <= 1e-9, worst, 1e-9)


def _kummer_check():
    worst = 0.0
    for a in np.linspace(0.5, 5.0, 10):
        for b in (0.5, 1.5):
            for z in np.linspace(0.0, 20.0, 11):
                lhs = specfun.hyp1f1(a, b, z).value
                rhs = math.exp(z) * specfun.hyp1f1(b - a, b, -z).value
                worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return Check("kummer_identity", worst <= 1e-8, worst, 1e-8)


def _hyp1f1_closed_check():
    worst = 0.0
    for z in np.linspace(0.1, 20.0, 25):
        worst = max(worst, abs(specfun.hyp1f1(1, 1, z).value / math.exp(z) - 1))
        worst = max(worst, abs(specfun.hyp1f1(1, 2, z).value / (math.expm1(z) / z) - 1))
    return Check("hyp1f1_elementary", worst <= 1e-10, worst, 1e-10)


def _lngamma_check():
    xs = np.linspace(0.5, 50.0, 200)
    worst = max(abs(specfun.ln_gamma(x + 1) - specfun.ln_gamma(x) - math.log(x)) for x in xs)
    return Check("ln_gamma_recurrence", worst <= 1e-10, worst, 1e-10)


def _jensen_check(seed, trials=2000):
    worst = -math.inf
    for scheme in ("none", "zf", "ci"):
        for snr in (0.0, 10.0, 20.0):
            cfg = SystemConfig(2, 2, 2, 10 ** (snr / 10))
            mc = mi_user_mc(cfg, scheme, 0, trials, RandomStream(seed, 7), workers=1)
            gap = (mc.rate - 3 * mc.ci95) - rate_bound(scheme, cfg, 0)
            worst = max(worst, gap)
    return Check("jensen_ordering", worst <= 0.0, max(worst, 0.0), 0.0,
                 f"largest MC-minus-3ci95 excess over bound = {worst:.4g}")


def _endpoint_check():
    worst = 0.0
    for scheme in ("none", "zf", "ci"):
        for M in (2, 4):
            lo = rate_bound(scheme, SystemConfig(2, 2, M, 0.0), 0)
            hi = rate_bound(scheme, SystemConfig(2, 2, M, 1e12), 0)
            worst = max(worst, abs(lo), abs(hi - math.log2(M)))
    return Check("bound_endpoints", worst <= 1e-9, worst, 1e-9)


def run_validate(seed=0):
    """Run every check; returns a list of :class:`Check`."""
    rng = RandomStream(seed, 99).generator()
    return [
        _kernel_check(rng),
        _lambda_check(rng),
        _zf_check(rng),
        _kummer_check(),
        _hyp1f1_closed_check(),
        _lngamma_check(),
        _jensen_check(seed),
        _endpoint_check(),
    ]
