"""Scalar special functions: log-gamma, Pochhammer symbols and Kummer's 1F1.

``hyp1f1`` sums the Taylor series directly with a term-ratio recurrence.
For nonnegative ``a``, ``b`` and ``z`` every term is positive and double
precision is enough.  When terms can change sign (``z < 0`` or ``a < 0``) the
same series is summed in extended-precision decimal arithmetic so that the
cancellation between large alternating terms does not eat the result.
"""

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

__all__ = [
    "SpecFunResult",
    "ln_gamma",
    "factorial",
    "ln_factorial",
    "pochhammer",
    "hyp1f1",
    "gamma_moment_ratio",
]

MAX_TERMS = 10_000
SERIES_RTOL = 1e-12


@dataclass(frozen=True)
class SpecFunResult:
    """Value of a series evaluation plus its convergence diagnostics."""

    value: float
    converged: bool
    terms_used: int


def ln_gamma(x):
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"ln_gamma is defined here for x > 0, got {x}")
    return math.lgamma(x)


def ln_factorial(n):
    if n < 0 or int(n) != n:
        raise ValueError(f"factorial needs a nonnegative integer, got {n}")
    return math.lgamma(n + 1)


def factorial(n):
    if n < 0 or int(n) != n:
        raise ValueError(f"factorial needs a nonnegative integer, got {n}")
    return float(math.factorial(int(n)))


def pochhammer(a, n):
    """Rising factorial ``a (a+1) ... (a+n-1)``; ``n = 0`` gives 1."""
    if n < 0 or int(n) != n:
        raise ValueError(f"pochhammer needs a nonnegative integer count, got {n}")
    out = 1.0
    for v in range(int(n)):
        out *= a + v
    return out


def gamma_moment_ratio(shape, order=2):
    """``E[X^order]`` for ``X ~ Gamma(shape, 1)``, i.e. ``Gamma(shape+order)/Gamma(shape)``.

    For ``order=2`` this is ``shape * (shape + 1)``.
    """
    return math.exp(ln_gamma(shape + order) - ln_gamma(shape))


def _check_b(b):
    if b <= 0 and float(b).is_integer():
        raise ValueError(f"1F1 is undefined for nonpositive integer b, got {b}")


def hyp1f1(a, b, z, *, rtol=SERIES_RTOL, max_terms=MAX_TERMS):
    """Confluent hypergeometric function ``1F1(a; b; z)`` by direct series.

    Returns
    -------
    SpecFunResult
        ``converged`` is False when ``max_terms`` was hit before the relative
        size of the last term dropped below ``rtol``.
    """
    a, b, z = float(a), float(b), float(z)
    _check_b(b)
    if z == 0.0 or a == 0.0:
        return SpecFunResult(1.0, True, 1)
    if z < 0 or a < 0:
        return _hyp1f1_decimal(a, b, z, rtol, max_terms)

    term = 1.0
    total = 1.0
    for v in range(max_terms):
        ratio = (a + v) * z / ((b + v) * (v + 1))
        term *= ratio
        total += term
        if not math.isfinite(total):
            return SpecFunResult(total, False, v + 2)
        # ratio < 1 means the tail is a shrinking geometric-like series
        if term <= rtol * total and ratio < 0.5:
            return SpecFunResult(total, True, v + 2)
    return SpecFunResult(total, False, max_terms + 1)


def _hyp1f1_decimal(a, b, z, rtol, max_terms):
    # peak term magnitude ~ exp(|z|); reserve that many extra digits
    extra = int(abs(z) / math.log(10)) + 1
    with localcontext() as ctx:
        ctx.prec = 34 + extra
        da, db, dz = Decimal(a), Decimal(b), Decimal(z)
        term = Decimal(1)
        total = Decimal(1)
        small_run = 0
        for v in range(max_terms):
            term = term * (da + v) * dz / ((db + v) * (v + 1))
            total += term
            if term == 0:
                return SpecFunResult(float(total), True, v + 2)
            past_peak = abs((a + v + 1) * z) < 0.5 * abs((b + v + 1) * (v + 2))
            if past_peak and abs(term) <= Decimal(rtol) * abs(total):
                small_run += 1
                if small_run == 2:
                    return SpecFunResult(float(total), True, v + 2)
            else:
                small_run = 0
        return SpecFunResult(float(total), False, max_terms + 1)
