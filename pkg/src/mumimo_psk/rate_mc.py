"""Monte Carlo estimate of the per-user finite-alphabet mutual information.

For each trial a channel matrix and one noise sample per joint symbol vector
are drawn.  The interfering users' symbols are not sampled: every one of the
``M**K`` joint vectors is sent and scored, so only fading and noise are
random.  For user ``k`` and a trial the estimator is

    log2 M - (1/M^K) sum_m log2( sum_i exp(-|y_m - r_i|^2 / sigma2)
                                 / sum_{t : t_k = m_k} exp(-|y_m - r_t|^2 / sigma2) )

where ``r_i`` is the noise-free received sample for vector ``i`` and
``y_m = r_m + n``.  Both sums are taken with a max-shifted log-sum-exp.

Trials are grouped in blocks of ``BLOCK_TRIALS``; block ``b`` always draws
from counter block ``b`` of the stream, so the estimate does not depend on the
number of worker threads.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import RandomStream, complex_normal
from .constellation import enumerate_joint
from .linalg import NotInvertibleError
from .precoding import UnsupportedConfigurationError, received_signals

__all__ = [
    "BLOCK_TRIALS",
    "MIN_TRIALS",
    "WORKERS_ENV",
    "UserRate",
    "RateReport",
    "default_workers",
    "mi_user_trials",
    "mi_user_mc",
    "sum_rate_mc",
]

BLOCK_TRIALS = 64
MIN_TRIALS = 100
WORKERS_ENV = "MUMIMO_PSK_WORKERS"
# cap on elements of the (trials, anchors, candidates) work array
_CHUNK_ELEMENTS = 1 << 21
_RESAMPLE_OFFSET = 1 << 40


@dataclass(frozen=True)
class UserRate:
    """Estimate for one user: mean, 95% half-width and trial count."""

    rate: float
    ci95: float
    trials: int


@dataclass(frozen=True)
class RateReport:
    per_user: tuple
    per_user_ci95: tuple
    sum: float
    ci95: float
    trials: int
    mode: str
    scheme: str


def default_workers():
    """Worker count from ``MUMIMO_PSK_WORKERS``, else the number of cores."""
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
        return n
    return os.cpu_count() or 1


def _logsumexp(x, axis=-1):
    mx = np.max(x, axis=axis, keepdims=True)
    return np.squeeze(mx, axis) + np.log(np.sum(np.exp(x - mx), axis=axis))


def _trial_values(received, noise, same, sigma2):
    """Per-trial log2-ratio average over anchors, shape ``(T,)``."""
    T, S = received.shape
    acc = np.zeros(T)
    chunk = max(1, _CHUNK_ELEMENTS // max(T * S, 1))
    for lo in range(0, S, chunk):
        hi = min(S, lo + chunk)
        y = received[:, lo:hi] + noise[:, lo:hi]
        metric = -np.abs(y[:, :, None] - received[:, None, :]) ** 2 / sigma2
        full = _logsumexp(metric)
        own = _logsumexp(np.where(same[None, lo:hi, :], metric, -np.inf))
        acc += np.sum(full - own, axis=1)
    return acc / (S * math.log(2.0))


def _block(config, scheme, k, stream, block, n, space, same):
    K, N = config.n_users, config.n_antennas
    for attempt in range(8):
        rng = stream.generator(block + attempt * _RESAMPLE_OFFSET)
        H1 = complex_normal(rng, (BLOCK_TRIALS, K, N))
        noise = complex_normal(rng, (BLOCK_TRIALS, len(space)), config.sigma2)
        H = np.sqrt(config.gains)[None, :, None] * H1
        try:
            r = received_signals(
                scheme, H, space.vectors, k, config.power, config.gains,
                config.beta_mode, config.weights,
            )
        except NotInvertibleError:
            continue
        return _trial_values(r[:n], noise[:n], same, config.sigma2)
    raise NotInvertibleError("repeated singular channel draws")


def mi_user_trials(config, scheme, k, trials, stream, workers=None):
    """Per-trial mutual-information samples for user ``k`` (normalized scale)."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if scheme == "none" and config.n_antennas != config.n_users:
        raise UnsupportedConfigurationError(
            f"transmission without precoding needs N == K, got N={config.n_antennas}, K={config.n_users}"
        )
    if not 0 <= k < config.n_users:
        raise IndexError(f"user index {k} out of range for K={config.n_users}")
    space = enumerate_joint(config.modulation_order, config.n_users)
    groups = space.same_symbol_groups(k)
    same = np.zeros((len(space), len(space)), dtype=bool)
    np.put_along_axis(same, groups, True, axis=1)

    n_blocks = -(-trials // BLOCK_TRIALS)
    sizes = [min(BLOCK_TRIALS, trials - b * BLOCK_TRIALS) for b in range(n_blocks)]
    workers = default_workers() if workers is None else workers

    def run(b):
        return _block(config, scheme, k, stream, b, sizes[b], space, same)

    if workers == 1 or n_blocks == 1:
        parts = [run(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    return config.bits - np.concatenate(parts)


def mi_user_mc(config, scheme, k, trials, stream, workers=None):
    """Monte Carlo mutual information of user ``k``.

    Returns
    -------
    UserRate
        ``rate`` is in bits/s/Hz on the scale selected by ``config.mode``;
        ``ci95`` is ``1.96 * std / sqrt(trials)``.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials, got {trials}")
    values = mi_user_trials(config, scheme, k, trials, stream, workers)
    mean = float(np.mean(values))
    if config.mode == "paper_verbatim":
        mean += (config.n_antennas - 1) * config.bits
    ci95 = 1.96 * float(np.std(values, ddof=1)) / math.sqrt(trials)
    return UserRate(mean, ci95, trials)


def sum_rate_mc(config, scheme, trials, stream, workers=None):
    """Sum over users; user ``k`` draws from ``stream.child(k)``."""
    if not isinstance(stream, RandomStream):
        raise TypeError("sum_rate_mc needs a RandomStream")
    users = [
        mi_user_mc(config, scheme, k, trials, stream.child(k), workers)
        for k in range(config.n_users)
    ]
    rates = tuple(u.rate for u in users)
    cis = tuple(u.ci95 for u in users)
    return RateReport(
        per_user=rates,
        per_user_ci95=cis,
        sum=math.fsum(rates),
        ci95=math.sqrt(math.fsum(c * c for c in cis)),
        trials=trials,
        mode=config.mode,
        scheme=scheme,
    )
