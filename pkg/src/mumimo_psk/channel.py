"""Rayleigh fading with distance path loss, user placement and seeded randomness.

Randomness is counter based: a :class:`RandomStream` is a ``(seed, stream)``
pair that maps to a Philox generator keyed by both numbers.  Work is split into
fixed-size blocks addressed through the Philox counter, so the draws a block
sees do not depend on how blocks are distributed over workers.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_PATH_LOSS_EXPONENT",
    "RandomStream",
    "Geometry",
    "ChannelRealization",
    "path_loss",
    "sample_channel",
    "sample_h1",
    "place_users",
    "sample_noise",
    "complex_normal",
]

DEFAULT_PATH_LOSS_EXPONENT = 2.7
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomStream:
    """Reproducible random source identified by ``(seed, stream)``."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= int(v) <= _U64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {v}")

    def generator(self, block=0):
        """Fresh generator positioned at the start of counter block ``block``."""
        bitgen = np.random.Philox(
            key=np.array([self.seed, self.stream], dtype=np.uint64),
            counter=np.array([0, 0, block, 0], dtype=np.uint64),
        )
        return np.random.Generator(bitgen)

    def child(self, *labels):
        """Independent stream derived from this one and integer ``labels``."""
        ss = np.random.SeedSequence([self.seed, self.stream, *[int(v) for v in labels]])
        return RandomStream(self.seed, int(ss.generate_state(1, np.uint64)[0]))


def _rng(stream):
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, RandomStream):
        return stream.generator()
    raise TypeError(f"expected RandomStream or numpy Generator, got {type(stream).__name__}")


@dataclass(frozen=True)
class Geometry:
    distances: tuple
    path_loss_exponent: float = DEFAULT_PATH_LOSS_EXPONENT

    def __post_init__(self):
        d = tuple(float(v) for v in np.atleast_1d(self.distances))
        if not d:
            raise ValueError("geometry needs at least one user")
        if any(not v > 0 for v in d):
            raise ValueError(f"distances must be positive, got {d}")
        if not self.path_loss_exponent > 0:
            raise ValueError(f"path-loss exponent must be positive, got {self.path_loss_exponent}")
        object.__setattr__(self, "distances", d)

    @property
    def n_users(self):
        return len(self.distances)

    @property
    def gains(self):
        """Large-scale power gains ``d_k ** -m`` (the diagonal of ``Sigma``)."""
        return path_loss(np.asarray(self.distances), self.path_loss_exponent)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    H: np.ndarray
    gains: np.ndarray
    H1: np.ndarray

    @property
    def D(self):
        return np.diag(self.gains)


def path_loss(d, m=DEFAULT_PATH_LOSS_EXPONENT):
    """Power attenuation ``d ** -m``; accepts scalars or arrays."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    out = d ** (-float(m))
    return float(out) if out.ndim == 0 else out


def complex_normal(rng, shape, variance=1.0):
    """Circularly symmetric complex Gaussian draws with total variance ``variance``."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_h1(K, N, rng, count=None):
    """Unit-variance i.i.d. fading matrices, shape ``(K, N)`` or ``(count, K, N)``."""
    shape = (K, N) if count is None else (count, K, N)
    return complex_normal(rng, shape)


def sample_channel(geometry, N, stream):
    """Draw ``H = D^{1/2} H1`` for the users in ``geometry`` and ``N`` antennas."""
    K = geometry.n_users
    if N < K:
        raise ValueError(f"need at least as many antennas as users, got N={N}, K={K}")
    H1 = sample_h1(K, N, _rng(stream))
    gains = geometry.gains
    H = np.sqrt(gains)[:, None] * H1
    return ChannelRealization(H, gains, H1)


def place_users(K, r_min, r_max, stream, m=DEFAULT_PATH_LOSS_EXPONENT):
    """Drop ``K`` users uniformly over the annulus ``r_min <= r <= r_max``.

    Uniform over area means the radius has density proportional to ``r``,
    sampled by inverting ``F(r) = (r^2 - r_min^2) / (r_max^2 - r_min^2)``.
    """
    if not 0 < r_min <= r_max:
        raise ValueError(f"need 0 < r_min <= r_max, got r_min={r_min}, r_max={r_max}")
    u = _rng(stream).random(K)
    r = np.sqrt(r_min**2 + u * (r_max**2 - r_min**2))
    return Geometry(tuple(r), m)


def sample_noise(sigma2, stream, size=None):
    """Complex AWGN sample(s) of total variance ``sigma2``."""
    if not sigma2 > 0:
        raise ValueError(f"noise power must be positive, got {sigma2}")
    z = complex_normal(_rng(stream), () if size is None else size, sigma2)
    return complex(z) if size is None else z
