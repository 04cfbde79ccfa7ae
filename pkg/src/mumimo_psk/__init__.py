"""Rates, minimum power and max-min fairness for the MU-MIMO downlink with PSK inputs.

Three transmit schemes are covered: no precoding, zero forcing (ZF) and
closed-form constructive-interference (CI) precoding.  Monte Carlo mutual
information serves as the reference for the closed-form rate bounds.
"""

from .bounds import BoundReport, lambda_term, rate_bound, rate_ci_bound, rate_unprecoded_bound, rate_zf_bound, sum_rate_bound
from .channel import Geometry, RandomStream, path_loss, place_users, sample_channel, sample_noise
from .constellation import enumerate_joint, interference_space, psk_symbols
from .power import PowerSolution, jain_index, maxmin_allocate, min_power_bisect
from .precoding import CiParameters, precode_ci, precode_none, precode_zf, receive
from .rate_mc import RateReport, mi_user_mc, sum_rate_mc
from .system import SystemConfig

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CiParameters",
    "Geometry",
    "PowerSolution",
    "RandomStream",
    "RateReport",
    "SystemConfig",
    "enumerate_joint",
    "interference_space",
    "jain_index",
    "lambda_term",
    "maxmin_allocate",
    "mi_user_mc",
    "min_power_bisect",
    "path_loss",
    "place_users",
    "precode_ci",
    "precode_none",
    "precode_zf",
    "psk_symbols",
    "rate_bound",
    "rate_ci_bound",
    "rate_unprecoded_bound",
    "rate_zf_bound",
    "receive",
    "sample_channel",
    "sample_noise",
    "sum_rate_bound",
    "sum_rate_mc",
]
