"""Experiment runners producing flat result rows, plus CSV emission.

Every runner is a pure function of its configuration: random draws come from
streams derived from ``config.seed`` and fixed labels, and rows are produced
in a fixed order.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from .bounds import rate_bound
from .channel import RandomStream, place_users
from .config import Annulus
from .power import (
    ClosedFormValidityError,
    InfeasibleError,
    equal_split_rates,
    jain_index,
    maxmin_allocate,
    min_power_bisect,
    min_power_closed,
)
from .rate_mc import MIN_TRIALS, sum_rate_mc
from .system import SystemConfig, db_to_linear

__all__ = [
    "CSV_COLUMNS",
    "ResultRow",
    "system_config",
    "run_rate_sweep",
    "run_min_power",
    "run_maxmin",
    "rows_to_csv",
    "write_csv",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "experiment_id", "scheme", "M", "N", "K", "snr_db", "user",
    "quantity", "value", "ci95", "trials", "seed",
)
_SCHEME_LABEL = {"none": 0, "zf": 1, "ci": 2}
_PLACEMENT_LABEL = 1 << 20


@dataclass(frozen=True)
class ResultRow:
    experiment_id: str
    scheme: str
    M: int
    N: int
    K: int
    snr_db: float
    user: object
    quantity: str
    value: float
    ci95: float
    trials: int
    seed: int


def system_config(cfg, power, distances=None):
    return SystemConfig(
        n_antennas=cfg.n_antennas,
        n_users=cfg.n_users,
        modulation_order=cfg.modulation_order,
        power=power,
        sigma2=cfg.sigma2,
        distances=cfg.distances if distances is None else distances,
        path_loss_exponent=cfg.path_loss_exponent,
        mode=cfg.mode,
        beta_mode=cfg.beta_mode,
        u=cfg.u_vector,
        ci_law=cfg.ci_law,
    )


def _row(cfg, exp_id, scheme, snr_db, user, quantity, value, ci95=None):
    return ResultRow(
        exp_id, scheme, cfg.modulation_order, cfg.n_antennas, cfg.n_users,
        snr_db, user, quantity, value, ci95, cfg.trials, cfg.seed,
    )


def _geometries(cfg):
    if not isinstance(cfg.geometry, Annulus):
        return [cfg.distances]
    g = cfg.geometry
    root = RandomStream(cfg.seed, _PLACEMENT_LABEL)
    return [
        place_users(cfg.n_users, g.r_min, g.r_max, root.child(j), cfg.path_loss_exponent).distances
        for j in range(g.placements)
    ]


def run_rate_sweep(cfg, workers=None):
    """MC sum rate and closed-form sum bound per scheme and SNR point.

    With annulus geometry both are averaged over the placements, each
    placement running ``max(trials // placements, 100)`` trials.
    """
    exp_id = cfg.experiment_id or "rate-sweep"
    geoms = _geometries(cfg)
    per_trials = cfg.trials if len(geoms) == 1 else max(cfg.trials // len(geoms), MIN_TRIALS)
    rows = []
    for scheme in cfg.schemes:
        for i, snr in enumerate(cfg.snr_db):
            p = float(db_to_linear(snr)) * cfg.sigma2
            mc, mc_ci2, bnd = [], [], []
            for j, dist in enumerate(geoms):
                sc = system_config(cfg, p, dist)
                stream = RandomStream(cfg.seed, _SCHEME_LABEL[scheme]).child(i, j)
                rep = sum_rate_mc(sc, scheme, per_trials, stream, workers)
                mc.append(rep.sum)
                mc_ci2.append(rep.ci95**2)
                bnd.append(math.fsum(rate_bound(scheme, sc, k) for k in range(cfg.n_users)))
            n = len(geoms)
            rows.append(_row(cfg, exp_id, scheme, snr, "sum", "mc_rate",
                             math.fsum(mc) / n, math.sqrt(math.fsum(mc_ci2)) / n))
            rows.append(_row(cfg, exp_id, scheme, snr, "sum", "bound", math.fsum(bnd) / n))
            log.info("rate-sweep %s %+.1f dB: mc=%.4f bound=%.4f", scheme, snr, rows[-2].value, rows[-1].value)
    return rows


def run_min_power(cfg, target_rate=None, distance_grid=None):
    """Minimum total power for user 0 to reach the target rate, per scheme and distance.

    All users sit at the same distance.  The distance is carried in the
    experiment id (``<id>@d=<meters>m``); ``snr_db`` holds the power in dB
    relative to ``sigma2``.  A ``min_power_closed`` row follows whenever the
    closed form gives a valid value.
    """
    R_T = cfg.target_rate if target_rate is None else target_rate
    grid = cfg.distance_grid if distance_grid is None else distance_grid
    if R_T >= math.log2(cfg.modulation_order):
        raise InfeasibleError(f"target rate {R_T} is not below log2(M)")
    base = cfg.experiment_id or "min-power"
    rows = []
    for scheme in cfg.schemes:
        for d in grid:
            sc = system_config(cfg, cfg.sigma2, (float(d),) * cfg.n_users)
            p = min_power_bisect(scheme, 0, R_T, sc)
            exp_id = f"{base}@d={d:g}m"
            rows.append(_row(cfg, exp_id, scheme, _db(p / cfg.sigma2), 0, "min_power", p))
            try:
                pc = min_power_closed(scheme, 0, R_T, sc)
            except (ClosedFormValidityError, ValueError):
                continue
            rows.append(_row(cfg, exp_id, scheme, _db(pc / cfg.sigma2), 0, "min_power_closed", pc))
    return rows


def _db(x):
    return 10.0 * math.log10(x) if x > 0 else -math.inf


def run_maxmin(cfg, total_power_db=None):
    """Max-min allocation against the equal split, per scheme and power budget.

    ``snr_db`` holds ``P_t / sigma2`` in dB.  Allocated results use the scheme
    name; the equal-split baseline uses ``<scheme>_equal``.
    """
    grid = cfg.total_power_db if total_power_db is None else total_power_db
    exp_id = cfg.experiment_id or "maxmin"
    rows = []
    for scheme in cfg.schemes:
        for pt_db in grid:
            P_t = float(db_to_linear(pt_db)) * cfg.sigma2
            sc = system_config(cfg, P_t)
            sol = maxmin_allocate(scheme, sc, P_t, cfg.epsilon)
            rows.append(_row(cfg, exp_id, scheme, pt_db, "min", "maxmin_rate", sol.rate))
            for k, (pk, rk) in enumerate(zip(sol.powers, sol.rates)):
                rows.append(_row(cfg, exp_id, scheme, pt_db, k, "power", pk))
                rows.append(_row(cfg, exp_id, scheme, pt_db, k, "bound", rk))
            rows.append(_row(cfg, exp_id, scheme, pt_db, "sum", "jain", _jain_or_nan(sol.rates)))
            eq = equal_split_rates(scheme, sc, P_t)
            for k, rk in enumerate(eq):
                rows.append(_row(cfg, exp_id, f"{scheme}_equal", pt_db, k, "bound", rk))
            rows.append(_row(cfg, exp_id, f"{scheme}_equal", pt_db, "sum", "jain", _jain_or_nan(eq)))
            log.info("maxmin %s %.1f dB: R*=%.4f", scheme, pt_db, sol.rate)
    return rows


def _jain_or_nan(rates):
    try:
        return jain_index(rates)
    except ValueError:
        return math.nan


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def rows_to_csv(rows):
    """Render rows as CSV text with a header; floats use shortest round-trip repr."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))
