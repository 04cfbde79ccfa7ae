"""Experiment configuration: JSON loading, validation and CLI overrides."""

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

from .constellation import SUPPORTED_ORDERS
from .precoding import BETA_MODES, SCHEMES
from .rate_mc import MIN_TRIALS
from .system import CI_LAWS, MODES

__all__ = ["ConfigError", "Annulus", "ExperimentConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class Annulus:
    r_min: float = 10.0
    r_max: float = 80.0
    placements: int = 10


def _default_snr():
    return tuple(float(v) for v in range(-10, 55, 5))


@dataclass(frozen=True)
class ExperimentConfig:
    n_antennas: int = 2
    n_users: int = 2
    modulation_order: int = 2
    snr_db: tuple = field(default_factory=_default_snr)
    sigma2: float = 1.0
    geometry: object = None
    path_loss_exponent: float = 2.7
    schemes: tuple = SCHEMES
    trials: int = 10_000
    seed: int = 0
    mode: str = "normalized"
    beta_mode: str = "longterm"
    u_vector: tuple = None
    output: str = None
    experiment_id: str = None
    ci_law: str = "gamma_n"
    target_rate: float = 0.5
    distance_grid: tuple = tuple(float(d) for d in range(10, 101, 10))
    total_power_db: tuple = tuple(float(v) for v in range(60, 101, 10))
    epsilon: float = 1e-3

    def __post_init__(self):
        _validate(self)

    @property
    def distances(self):
        """Fixed distances, or ``None`` for annulus placement."""
        if isinstance(self.geometry, Annulus):
            return None
        if self.geometry is None:
            return (1.0,) * self.n_users
        return self.geometry

    def with_overrides(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        try:
            return replace(self, **changes)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self):
        out = asdict(self)
        if isinstance(self.geometry, Annulus):
            out["geometry"] = asdict(self.geometry)
        elif self.geometry is not None:
            out["geometry"] = {"distances": list(self.geometry)}
        return out


def _fail(name, msg):
    raise ConfigError(f"{name}: {msg}")


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _validate(c):
    if not _is_int(c.n_users) or c.n_users < 1:
        _fail("n_users", f"must be an integer >= 1, got {c.n_users!r}")
    if not _is_int(c.n_antennas) or c.n_antennas < c.n_users:
        _fail("n_antennas", f"must be an integer >= n_users ({c.n_users}), got {c.n_antennas!r}")
    if c.modulation_order not in SUPPORTED_ORDERS:
        _fail("modulation_order", f"must be one of {SUPPORTED_ORDERS}, got {c.modulation_order!r}")
    snr = tuple(float(v) for v in c.snr_db)
    if not snr:
        _fail("snr_db", "grid must be nonempty")
    if any(b <= a for a, b in zip(snr, snr[1:])):
        _fail("snr_db", "grid must be strictly increasing")
    object.__setattr__(c, "snr_db", snr)
    if not (isinstance(c.sigma2, (int, float)) and c.sigma2 > 0):
        _fail("sigma2", f"must be positive, got {c.sigma2!r}")
    if not c.path_loss_exponent > 0:
        _fail("path_loss_exponent", f"must be positive, got {c.path_loss_exponent!r}")
    schemes = tuple(c.schemes)
    if not schemes or any(s not in SCHEMES for s in schemes):
        _fail("schemes", f"must be a nonempty subset of {SCHEMES}, got {list(schemes)}")
    if len(set(schemes)) != len(schemes):
        _fail("schemes", "contains duplicates")
    object.__setattr__(c, "schemes", schemes)
    if not _is_int(c.trials) or c.trials < MIN_TRIALS:
        _fail("trials", f"must be an integer >= {MIN_TRIALS}, got {c.trials!r}")
    if not _is_int(c.seed) or not 0 <= c.seed < 2**64:
        _fail("seed", f"must be an unsigned 64-bit integer, got {c.seed!r}")
    if c.mode not in MODES:
        _fail("mode", f"must be one of {MODES}, got {c.mode!r}")
    if c.beta_mode not in BETA_MODES:
        _fail("beta_mode", f"must be one of {BETA_MODES}, got {c.beta_mode!r}")
    if c.ci_law not in CI_LAWS:
        _fail("ci_law", f"must be one of {CI_LAWS}, got {c.ci_law!r}")
    if c.u_vector is not None:
        u = tuple(float(v) for v in c.u_vector)
        if len(u) != c.n_users:
            _fail("u_vector", f"needs {c.n_users} entries, got {len(u)}")
        if abs(math.fsum(u) - 1.0) > 1e-12 or any(v == 0 for v in u):
            _fail("u_vector", "entries must be nonzero and sum to 1")
        object.__setattr__(c, "u_vector", u)
    _validate_geometry(c)
    if not 0 <= c.target_rate:
        _fail("target_rate", f"must be nonnegative, got {c.target_rate!r}")
    for name in ("distance_grid", "total_power_db"):
        grid = tuple(float(v) for v in getattr(c, name))
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            _fail(name, "grid must be nonempty and strictly increasing")
        object.__setattr__(c, name, grid)
    if any(d <= 0 for d in c.distance_grid):
        _fail("distance_grid", "distances must be positive")
    if not c.epsilon > 0:
        _fail("epsilon", f"must be positive, got {c.epsilon!r}")


def _validate_geometry(c):
    g = c.geometry
    if g is None or isinstance(g, Annulus):
        pass
    elif isinstance(g, dict):
        keys = set(g)
        if keys == {"distances"}:
            g = tuple(float(v) for v in g["distances"])
        elif keys <= {"r_min", "r_max", "placements"}:
            try:
                g = Annulus(**g)
            except TypeError as exc:
                _fail("geometry", str(exc))
        else:
            _fail("geometry", f"expected {{distances}} or {{r_min, r_max, placements}}, got keys {sorted(keys)}")
    else:
        g = tuple(float(v) for v in g)
    if isinstance(g, Annulus):
        if not 0 < g.r_min <= g.r_max:
            _fail("geometry", f"need 0 < r_min <= r_max, got {g.r_min}, {g.r_max}")
        if not _is_int(g.placements) or g.placements < 1:
            _fail("geometry", f"placements must be a positive integer, got {g.placements!r}")
    elif g is not None:
        if len(g) != c.n_users or any(not d > 0 for d in g):
            _fail("geometry", f"needs {c.n_users} positive distances, got {list(g)}")
    object.__setattr__(c, "geometry", g)


_FIELDS = {f.name for f in fields(ExperimentConfig)}


def parse_config(data):
    """Build an :class:`ExperimentConfig` from a decoded JSON object."""
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    unknown = sorted(set(data) - _FIELDS)
    if unknown:
        raise ConfigError(f"config: unknown field(s) {unknown}")
    try:
        return ExperimentConfig(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: {exc}") from None


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON ({exc})") from None
    return parse_config(data)
