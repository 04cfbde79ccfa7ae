"""The link-level configuration shared by the estimators, bounds and solvers."""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .channel import DEFAULT_PATH_LOSS_EXPONENT, path_loss
from .constellation import SUPPORTED_ORDERS
from .precoding import BETA_MODES, CiParameters

__all__ = ["MODES", "CI_LAWS", "SystemConfig", "db_to_linear"]

MODES = ("normalized", "paper_verbatim")
CI_LAWS = ("gamma_n", "eq39")


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """One operating point of the downlink.

    Attributes
    ----------
    n_antennas, n_users, modulation_order : int
        ``N``, ``K`` and ``M``.
    power : float
        Total transmit power ``p``; with the default ``sigma2 = 1`` this is
        the linear SNR.
    distances : tuple of float, optional
        User distances in meters; ``None`` means every user at unit distance.
    mode : {"normalized", "paper_verbatim"}
        Leading-constant convention of the rate expressions.
    beta_mode : {"longterm", "instantaneous"}
        Power scaling of the precoders in Monte Carlo runs.  The closed-form
        bounds always use the long-term factors.
    u : tuple, optional
        CI weight vector; ``None`` means uniform ``1/K``.
    ci_law : {"gamma_n", "eq39"}
        Distribution assumed for the CI useful gain inside the closed-form bound.
    """

    n_antennas: int
    n_users: int
    modulation_order: int
    power: float
    sigma2: float = 1.0
    distances: tuple = None
    path_loss_exponent: float = DEFAULT_PATH_LOSS_EXPONENT
    mode: str = "normalized"
    beta_mode: str = "longterm"
    u: tuple = None
    ci_law: str = "gamma_n"

    def __post_init__(self):
        N, K, M = self.n_antennas, self.n_users, self.modulation_order
        if not (isinstance(K, (int, np.integer)) and K >= 1):
            raise ValueError(f"n_users must be a positive integer, got {K}")
        if not (isinstance(N, (int, np.integer)) and N >= K):
            raise ValueError(f"n_antennas must be an integer >= n_users, got N={N}, K={K}")
        if M not in SUPPORTED_ORDERS:
            raise ValueError(f"modulation_order must be one of {SUPPORTED_ORDERS}, got {M}")
        if not (self.power >= 0 and math.isfinite(self.power)):
            raise ValueError(f"power must be finite and nonnegative, got {self.power}")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.beta_mode not in BETA_MODES:
            raise ValueError(f"beta_mode must be one of {BETA_MODES}, got {self.beta_mode!r}")
        if self.ci_law not in CI_LAWS:
            raise ValueError(f"ci_law must be one of {CI_LAWS}, got {self.ci_law!r}")
        if self.distances is None:
            object.__setattr__(self, "distances", (1.0,) * K)
        d = tuple(float(v) for v in self.distances)
        if len(d) != K or any(not v > 0 for v in d):
            raise ValueError(f"need {K} positive distances, got {self.distances}")
        object.__setattr__(self, "distances", d)
        if self.u is not None:
            CiParameters(np.asarray(self.u)).weights(K)
            object.__setattr__(self, "u", tuple(self.u))

    @property
    def bits(self):
        """``log2 M``."""
        return math.log2(self.modulation_order)

    @property
    def gains(self):
        return np.asarray(path_loss(np.asarray(self.distances), self.path_loss_exponent)).reshape(-1)

    @property
    def weights(self):
        return CiParameters(None if self.u is None else np.asarray(self.u)).weights(self.n_users)

    @property
    def snr_db(self):
        ratio = self.power / self.sigma2
        return 10.0 * math.log10(ratio) if ratio > 0 else -math.inf

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def at_snr_db(self, snr_db):
        return self.replace(power=float(db_to_linear(snr_db)) * self.sigma2)
