"""Minimum transmit power for a target rate, max-min allocation and Jain's index.

The authoritative minimum-power solver is a bracketed bisection on the
normalized closed-form bound, which is monotone in power.  The three
high-SNR closed forms are kept as fast paths; each raises
:class:`ClosedFormValidityError` when its output is not a usable power.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bounds import gamma_law, rate_bound
from .constellation import enumerate_joint, interference_space
from .specfun import ln_factorial, ln_gamma

__all__ = [
    "DEFAULT_RATE_TOL",
    "DEFAULT_POWER_RTOL",
    "InfeasibleError",
    "NonMonotoneError",
    "ClosedFormValidityError",
    "PowerSolution",
    "ClosedFormCheck",
    "min_power_bisect",
    "min_power_unprecoded_closed",
    "zf_closed_raw",
    "min_power_zf_closed",
    "min_power_ci_closed",
    "min_power_closed",
    "closed_form_check",
    "outer_iterations",
    "maxmin_allocate",
    "equal_split_rates",
    "jain_index",
]

DEFAULT_RATE_TOL = 1e-3
DEFAULT_POWER_RTOL = 1e-4
CLOSED_FORM_RTOL = 0.25
_P_MAX = 1e30
_P_MIN = 1e-30
LOG2E = 1.0 / math.log(2.0)


class InfeasibleError(ValueError):
    """The requested rate cannot be reached at any finite power."""


class NonMonotoneError(ArithmeticError):
    """The rate curve decreased with power during a bisection."""


class ClosedFormValidityError(ValueError):
    """A closed form produced a nonpositive or non-finite power."""


@dataclass(frozen=True)
class PowerSolution:
    """Outcome of the max-min allocation.

    ``rates`` are the per-user rates the bound gives at ``powers``.
    """

    powers: tuple
    rate: float
    feasible: bool
    iterations: int
    rates: tuple

    @property
    def total_power(self):
        return math.fsum(self.powers)


@dataclass(frozen=True)
class ClosedFormCheck:
    closed_form: float
    bisection: float
    rel_gap: float

    @property
    def agrees(self):
        return self.rel_gap <= CLOSED_FORM_RTOL


def _rate_at(scheme, k, config, p):
    return rate_bound(scheme, config.replace(power=p, mode="normalized"), k)


def min_power_bisect(scheme, k, R_T, config, eps_p=DEFAULT_POWER_RTOL):
    """Smallest total power at which user ``k``'s normalized bound reaches ``R_T``.

    The bracket is grown or shrunk geometrically from ``p = sigma2`` and then
    bisected until its relative width is below ``eps_p``; the upper end is
    returned.

    Raises
    ------
    InfeasibleError
        If ``R_T >= log2 M`` or the target is not reached below 1e30.
    NonMonotoneError
        If the bound decreases with power inside the bracket.
    """
    if R_T < 0:
        raise ValueError(f"target rate must be nonnegative, got {R_T}")
    if R_T >= config.bits:
        raise InfeasibleError(
            f"target rate {R_T} is at or above the saturation rate log2(M) = {config.bits}"
        )
    if R_T == 0:
        return 0.0

    def f(p):
        return _rate_at(scheme, k, config, p)

    def check(p_lo, r_lo, p_hi, r_hi):
        if r_hi < r_lo - 1e-12:
            raise NonMonotoneError(
                f"bound fell from {r_lo} at p={p_lo} to {r_hi} at p={p_hi}"
            )

    hi = config.sigma2
    r_hi = f(hi)
    if r_hi >= R_T:
        lo, r_lo = hi, r_hi
        while r_lo >= R_T:
            if lo < _P_MIN:
                return lo
            hi, r_hi = lo, r_lo
            lo = lo / 2.0
            r_lo = f(lo)
            check(lo, r_lo, hi, r_hi)
    else:
        lo, r_lo = hi, r_hi
        while r_hi < R_T:
            if hi > _P_MAX:
                raise InfeasibleError(f"target rate {R_T} not reached below p = {_P_MAX:g}")
            lo, r_lo = hi, r_hi
            hi = hi * 2.0
            r_hi = f(hi)
            check(lo, r_lo, hi, r_hi)

    while (hi - lo) > eps_p * hi:
        mid = math.sqrt(lo * hi)
        r_mid = f(mid)
        check(lo, r_lo, mid, r_mid)
        check(mid, r_mid, hi, r_hi)
        if r_mid >= R_T:
            hi, r_hi = mid, r_mid
        else:
            lo, r_lo = mid, r_mid
    return hi


def _validated(p, label):
    if not (math.isfinite(p) and p > 0):
        raise ClosedFormValidityError(
            f"{label} closed form gave p = {p}, outside its validity range; use bisection"
        )
    return p


def min_power_unprecoded_closed(k, R_T, config):
    """High-SNR minimum power without precoding.

    ``p = [sum_t 2 sigma2/(varpi lam_t) - Y sum_i 2 sigma2/(varpi lam_i)] / (Y - 1)``
    with ``Y = 2^(R_T - log2 M)``, anchors at the first vector of the
    interference and joint spaces.  That expression sits where the per-antenna
    power ``p/N`` enters the bound, so the total power ``N p`` is returned.
    """
    N, K = config.n_antennas, config.n_users
    if N != K:
        raise ValueError(f"needs N == K, got N={N}, K={K}")
    full = enumerate_joint(config.modulation_order, K)
    rest = interference_space(full, k)
    gain, sigma2 = config.gains[k], config.sigma2

    def inv_sum(space):
        lam = np.sum(np.abs(space.vectors[0] - space.vectors[1:]) ** 2, axis=1)
        return math.fsum(2.0 * sigma2 / (gain * lam))

    Y = 2.0 ** (R_T - config.bits)
    p_n = (inv_sum(rest) - Y * inv_sum(full)) / (Y - 1.0)
    return _validated(N * p_n, "unprecoded")


def _zeta(config, s):
    N, K = config.n_antennas, config.n_users
    q = float(np.sum(np.abs(s) ** 2 / config.gains))
    log_num = ln_gamma(1.5 - K + N)
    log_den = 0.5 * math.log(q) + 1.5 * math.log(K) + ln_factorial(N - K)
    return math.exp(log_num - log_den)


def zf_closed_raw(k, R_T, config, j, m=0):
    """Evaluate the raw ZF high-SNR expression for reference index ``j``.

    ``p = sigma2 (R_T - N log2 M) / (log2(e) zeta^2 varpi_k^2 |[s_m - s_j]_k|^2)``.
    No sign or validity check is applied.
    """
    space = enumerate_joint(config.modulation_order, config.n_users)
    s_m = space.vectors[m]
    diff2 = float(abs(s_m[k] - space.vectors[j][k]) ** 2)
    num = config.sigma2 * (R_T - config.n_antennas * config.bits)
    den = LOG2E * _zeta(config, s_m) ** 2 * config.gains[k] ** 2 * diff2
    # j == m leaves nothing in the denominator; report it as undefined
    return num / den if den != 0 else math.nan


def min_power_zf_closed(k, R_T, config, j=None):
    """ZF high-SNR minimum power, validity checked.

    With the anchor convention ``j = m`` the difference in the denominator is
    zero, and for any other ``j`` the numerator is negative, so this always
    raises :class:`ClosedFormValidityError`; bisection is the working path.
    """
    return _validated(zf_closed_raw(k, R_T, config, 0 if j is None else j), "ZF")


def min_power_ci_closed(k, R_T, config, verbatim=False):
    """High-SNR CI minimum power from the leading terms of the Kummer series.

    Keeping only the leading term, each averaged pairwise term is
    ``a1 (c_k^2 xi)^(-nu/2)`` with ``a1 = (2 sigma2)^(nu/2) Gamma(nu/2) / (2 Gamma(nu) theta^nu)``
    and ``c_k^2 = p / (a2 a3)^2``.  Solving
    ``sum_{xi > 0} a1 (c_k^2 xi)^(-nu/2) = 2^(K log2 M - R_T) - M^(K-1)`` gives::

        p = [Y' / (a1 sum (a2 a3)^nu |s|^-nu)]^(-2/nu)

    ``verbatim=True`` evaluates the uncorrected expression instead: leading
    constant ``N log2 M``, right side ``2^(X - R_T) - 1``, exponent
    ``N - K - 1`` on ``a2 a3`` and a root of order ``(K - N + 1)/2``.
    """
    N, K, M = config.n_antennas, config.n_users, config.modulation_order
    space = enumerate_joint(M, K)
    s = space.vectors[0]
    xi = np.abs(s[k] - space.vectors[:, k]) ** 2
    mag = np.sqrt(xi[xi > 1e-12])
    u = config.weights
    a2 = K / abs(config.gains[k] * u[k])
    a3 = math.sqrt(N * float(np.sum(config.gains * np.abs(u) ** 2)))
    sigma = math.sqrt(config.sigma2)

    if verbatim:
        nu = N - K + 1
        log_a1 = (
            nu * math.log(sigma) + 0.5 * (N - K - 1) * math.log(2.0) + nu * math.log(K)
            + ln_gamma(0.5 * nu) - ln_factorial(N - K)
        )
        rhs = 2.0 ** (N * config.bits - R_T) - 1.0
        denom = math.exp(log_a1) * math.fsum((a2 * a3) ** (N - K - 1) * mag ** (-1 + K - N))
        return _validated((rhs / denom) ** (2.0 / (K - N + 1)), "CI")

    nu, theta = gamma_law(config)
    log_a1 = (
        0.5 * nu * math.log(2.0 * config.sigma2) + ln_gamma(0.5 * nu)
        - math.log(2.0) - ln_gamma(nu) - nu * math.log(theta)
    )
    n_zero = len(xi) - 1 - mag.size
    rhs = 2.0 ** (K * config.bits - R_T) - 1.0 - n_zero
    denom = math.exp(log_a1) * math.fsum((a2 * a3) ** nu * mag ** (-nu))
    if rhs <= 0:
        raise ClosedFormValidityError(f"CI closed form needs R_T < log2 M, got {R_T}")
    return _validated((rhs / denom) ** (-2.0 / nu), "CI")


def min_power_closed(scheme, k, R_T, config):
    if scheme == "none":
        return min_power_unprecoded_closed(k, R_T, config)
    if scheme == "zf":
        return min_power_zf_closed(k, R_T, config)
    if scheme == "ci":
        return min_power_ci_closed(k, R_T, config)
    raise ValueError(f"unknown scheme {scheme!r}")


def closed_form_check(scheme, k, R_T, config):
    """Closed form next to bisection; raises if the closed form is invalid."""
    closed = min_power_closed(scheme, k, R_T, config)
    ref = min_power_bisect(scheme, k, R_T, config)
    return ClosedFormCheck(closed, ref, abs(closed - ref) / ref)


def outer_iterations(R_UB, eps, R_LB=0.0):
    """Iteration count of the outer rate bisection, ``ceil(log2((R_UB - R_LB)/eps))``."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return max(0, math.ceil(math.log2((R_UB - R_LB) / eps)))


def _powers_for(scheme, config, R_T, use_closed_forms):
    out = []
    for k in range(config.n_users):
        if use_closed_forms:
            try:
                out.append(min_power_closed(scheme, k, R_T, config))
                continue
            except ClosedFormValidityError:
                pass
        out.append(min_power_bisect(scheme, k, R_T, config))
    return out


def maxmin_allocate(scheme, config, P_t, eps=DEFAULT_RATE_TOL, use_closed_forms=False):
    """Bisection on a common target rate under a total power budget ``P_t``.

    Each candidate rate is tested by solving every user's minimum power and
    comparing the total with ``P_t``.  The loop runs exactly
    ``outer_iterations(log2 M, eps)`` times.  With ``use_closed_forms`` the
    closed forms are tried first and bisection covers their invalid cases.
    """
    if not P_t > 0:
        raise ValueError(f"total power must be positive, got {P_t}")
    lo, hi = 0.0, config.bits
    n_iter = outer_iterations(hi, eps)
    best = [0.0] * config.n_users
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        powers = _powers_for(scheme, config, mid, use_closed_forms)
        if math.fsum(powers) <= P_t:
            lo, best = mid, powers
        else:
            hi = mid
    rates = tuple(_rate_at(scheme, k, config, p) for k, p in enumerate(best))
    return PowerSolution(tuple(best), lo, lo > 0.0, n_iter, rates)


def equal_split_rates(scheme, config, P_t):
    """Per-user bound when every user gets ``P_t / K``."""
    p = P_t / config.n_users
    return tuple(_rate_at(scheme, k, config, p) for k in range(config.n_users))


def jain_index(rates):
    """Jain's fairness index ``(sum r)^2 / (K sum r^2)``.

    >>> round(jain_index([2, 1, 1]), 4)
    0.8889
    """
    r = np.asarray(rates, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("rates must be a nonempty sequence")
    if np.any(r < 0):
        raise ValueError("rates must be nonnegative")
    sq = float(np.sum(r * r))
    if sq == 0:
        raise ValueError("Jain's index is undefined when every rate is zero")
    return float(np.sum(r)) ** 2 / (r.size * sq)
