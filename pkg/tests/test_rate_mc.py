import math

import numpy as np
import pytest

from mumimo_psk.channel import RandomStream
from mumimo_psk.precoding import UnsupportedConfigurationError
from mumimo_psk.rate_mc import WORKERS_ENV, default_workers, mi_user_mc, mi_user_trials, sum_rate_mc
from mumimo_psk.system import SystemConfig

from oracles import bpsk_awgn_mi, bpsk_rayleigh_mi


@pytest.mark.parametrize("scheme", ["none", "zf", "ci"])
def test_zero_power_gives_zero_rate(scheme):
    r = sum_rate_mc(SystemConfig(2, 2, 4, 0.0), scheme, 200, RandomStream(0))
    assert r.sum == pytest.approx(0.0, abs=1e-12)


def test_zf_saturates_at_high_snr():
    r = sum_rate_mc(SystemConfig(2, 2, 2, 1e4), "zf", 500, RandomStream(1))
    np.testing.assert_allclose(r.per_user, 1.0, atol=1e-3)


@pytest.mark.parametrize("p", [0.3, 1.0, 2.0])
def test_single_user_zf_matches_awgn_quadrature(p):
    # one user, one antenna: y = beta s + n with beta = Gamma(3/2) sqrt(p)
    c = SystemConfig(1, 1, 2, p)
    r = mi_user_mc(c, "zf", 0, 20_000, RandomStream(2))
    ref = bpsk_awgn_mi(math.gamma(1.5) * math.sqrt(p), 1.0)
    assert abs(r.rate - ref) <= 3 * r.ci95


@pytest.mark.parametrize("p", [1.0, 10.0])
def test_single_user_unprecoded_matches_rayleigh_quadrature(p):
    c = SystemConfig(1, 1, 2, p, distances=(1.5,))
    r = mi_user_mc(c, "none", 0, 20_000, RandomStream(3))
    ref = bpsk_rayleigh_mi(p, c.gains[0], 1.0)
    assert abs(r.rate - ref) <= 3 * r.ci95


@pytest.mark.parametrize("scheme", ["none", "zf", "ci"])
def test_equal_distance_users_are_symmetric(scheme):
    r = sum_rate_mc(SystemConfig(2, 2, 4, 10.0), scheme, 4000, RandomStream(4))
    a, b = r.per_user
    assert abs(a - b) <= 3 * math.hypot(*r.per_user_ci95)


@pytest.mark.parametrize("scheme", ["zf", "ci"])
def test_rate_grows_with_power_under_common_draws(scheme):
    rates = [
        mi_user_mc(SystemConfig(2, 2, 4, p), scheme, 0, 1000, RandomStream(5)).rate
        for p in (0.5, 2.0, 8.0, 32.0, 128.0)
    ]
    assert np.all(np.diff(rates) > 0)


@pytest.mark.parametrize("snr_db", [0, 5, 10])
def test_ci_beats_zf_at_low_snr(snr_db):
    c = SystemConfig(2, 2, 2, 10 ** (snr_db / 10))
    zf = sum_rate_mc(c, "zf", 4000, RandomStream(6, 1))
    ci = sum_rate_mc(c, "ci", 4000, RandomStream(6, 2))
    assert ci.sum > zf.sum + 3 * math.hypot(zf.ci95, ci.ci95)


def test_rates_bounded_by_bits_per_user():
    vals = mi_user_trials(SystemConfig(2, 2, 4, 5.0), "ci", 0, 300, RandomStream(7))
    # a single noisy sample can dip below zero, only the mean cannot
    assert np.all(vals <= 2 + 1e-12)
    assert vals.mean() > 0


def test_worker_count_does_not_change_results():
    c = SystemConfig(3, 2, 4, 10.0, distances=(10.0, 40.0), sigma2=1e-4)
    a = sum_rate_mc(c, "zf", 700, RandomStream(8), workers=1)
    b = sum_rate_mc(c, "zf", 700, RandomStream(8), workers=4)
    assert a == b


def test_verbatim_offset():
    base = SystemConfig(3, 2, 4, 10.0)
    a = mi_user_mc(base, "zf", 0, 200, RandomStream(9))
    b = mi_user_mc(base.replace(mode="paper_verbatim"), "zf", 0, 200, RandomStream(9))
    assert b.rate - a.rate == pytest.approx(2 * 2, abs=1e-12)


def test_input_checks():
    with pytest.raises(ValueError):
        mi_user_mc(SystemConfig(2, 2, 2, 1.0), "zf", 0, 50, RandomStream(0))
    with pytest.raises(UnsupportedConfigurationError):
        mi_user_mc(SystemConfig(3, 2, 2, 1.0), "none", 0, 200, RandomStream(0))
    with pytest.raises(IndexError):
        mi_user_mc(SystemConfig(2, 2, 2, 1.0), "zf", 2, 200, RandomStream(0))


def test_workers_env(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert default_workers() == 3
    monkeypatch.setenv(WORKERS_ENV, "zero")
    with pytest.raises(ValueError):
        default_workers()
