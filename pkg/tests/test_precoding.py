import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mumimo_psk.channel import RandomStream, complex_normal
from mumimo_psk.constellation import enumerate_joint
from mumimo_psk.precoding import (
    CiParameters,
    UnsupportedConfigurationError,
    ci_beta_longterm,
    precode_ci,
    precode_none,
    precode_zf,
    receive,
    received_signals,
    zf_beta_longterm,
)


def _h(seed, K, N):
    return complex_normal(np.random.default_rng(seed), (K, N))


def test_precode_none():
    out = precode_none([1, -1], 2.0, 2)
    np.testing.assert_allclose(out.x, [1, -1])
    assert np.sum(np.abs(precode_none([1j, -1], 3.0, 2).x) ** 2) == pytest.approx(3.0)
    np.testing.assert_array_equal(precode_none([1, 1], 0.0, 2).x, [0, 0])
    with pytest.raises(UnsupportedConfigurationError):
        precode_none([1, -1], 1.0, 3)


def test_zf_identity_channel():
    out = precode_zf(np.eye(2), [1, -1], 2.0, "instantaneous")
    np.testing.assert_allclose(out.x, [1, -1])
    assert out.beta == pytest.approx(1.0)


def test_zf_longterm_beta_values():
    # N = K: Gamma(3/2) = sqrt(pi)/2
    s = np.array([1, -1])
    expected = math.sqrt(1 / 2) * (math.sqrt(math.pi) / 2) / (2 * math.sqrt(2))
    assert zf_beta_longterm(1.0, s, np.eye(2), 2, 2) == pytest.approx(expected, rel=1e-14)
    assert zf_beta_longterm(1.0, s, np.eye(2), 2, 2) == pytest.approx(0.3133 / math.sqrt(2), rel=1e-3)
    assert zf_beta_longterm(4.0, s, np.eye(2), 2, 2) == pytest.approx(2 * zf_beta_longterm(1.0, s, np.eye(2), 2, 2))
    # N > K: Gamma(3/2 + N - K) / (N - K)!
    b = zf_beta_longterm(1.0, s, [1.0, 1.0], 4, 2)
    assert b == pytest.approx(math.sqrt(1 / 2) * math.gamma(3.5) / (2 * math.sqrt(2) * 2))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), K=st.integers(1, 4), extra=st.integers(0, 3),
       mode=st.sampled_from(["instantaneous", "longterm"]))
def test_zf_cancels_interference(seed, K, extra, mode):
    N = K + extra
    H = _h(seed, K, N)
    s = np.exp(2j * np.pi * np.random.default_rng(seed + 1).integers(0, 8, K) / 8)
    out = precode_zf(H, s, 3.0, mode, gains=np.ones(K))
    for k in range(K):
        assert abs(receive(H, out.x, k) - out.beta * s[k]) <= 1e-9
    if mode == "instantaneous":
        assert np.sum(np.abs(out.x) ** 2) == pytest.approx(3.0, rel=1e-10)


def test_zf_longterm_needs_gains():
    with pytest.raises(ValueError):
        precode_zf(np.eye(2), [1, 1], 1.0, "longterm")


def test_receive():
    H = _h(0, 2, 2)
    assert receive(H, np.zeros(2), 1, 0.3 + 0.1j) == 0.3 + 0.1j
    x1, x2 = np.array([1, 2j]), np.array([-1j, 0.5])
    n = 0.2
    lhs = receive(H, x1 + x2, 0, n)
    assert lhs == pytest.approx(receive(H, x1, 0, n) + receive(H, x2, 0, n) - n)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), K=st.integers(1, 4), extra=st.integers(0, 2),
       mode=st.sampled_from(["instantaneous", "longterm"]))
def test_ci_literal_form_equals_weighted_matched_filter(seed, K, extra, mode):
    N = K + extra
    rng = np.random.default_rng(seed)
    H = complex_normal(rng, (K, N))
    s = np.exp(2j * np.pi * rng.integers(0, 4, K) / 4)
    w = rng.uniform(0.1, 1.0, K)
    u = w / w.sum()
    out = precode_ci(H, s, 2.0, CiParameters(u, mode), gains=np.ones(K))
    np.testing.assert_allclose(out.x, out.beta / K * H.conj().T @ (u * s), atol=1e-10)


def test_ci_single_user_is_matched_filter_with_full_power():
    H = _h(4, 1, 3)
    out = precode_ci(H, [1j], 2.0, CiParameters(beta_mode="instantaneous"))
    assert np.sum(np.abs(out.x) ** 2) == pytest.approx(2.0, rel=1e-12)
    direction = H.conj().T[:, 0] * 1j
    cos = abs(np.vdot(direction, out.x)) / (np.linalg.norm(direction) * np.linalg.norm(out.x))
    assert cos == pytest.approx(1.0, abs=1e-12)


def test_ci_instantaneous_power_is_p_over_k_squared():
    # beta normalizes u^H V^{-1} u, while the 1/K prefactor stays in x
    H = _h(5, 3, 4)
    s = np.array([1, -1j, -1])
    out = precode_ci(H, s, 5.0, CiParameters(beta_mode="instantaneous"))
    assert np.sum(np.abs(out.x) ** 2) == pytest.approx(5.0 / 9, rel=1e-10)


def test_ci_longterm_mean_power():
    K, N, p = 2, 3, 4.0
    gains = np.array([1.0, 0.5])
    rng = RandomStream(17).generator()
    s = np.array([1, -1])
    total = 0.0
    draws = 100_000
    H = np.sqrt(gains)[None, :, None] * complex_normal(rng, (draws, K, N))
    u = np.full(K, 1 / K)
    beta = ci_beta_longterm(p, s, u, gains, N)
    x = beta / K * np.einsum("tkn,k->tn", H.conj(), u * s)
    total = np.mean(np.sum(np.abs(x) ** 2, axis=1))
    assert total == pytest.approx(p / K**2, rel=0.03)


def test_ci_parameters_validation():
    with pytest.raises(ValueError):
        CiParameters(np.array([0.3, 0.3]))
    with pytest.raises(ValueError):
        CiParameters(beta_mode="sometimes")
    with pytest.raises(ValueError):
        CiParameters(np.array([0.5, 0.5])).weights(3)
    np.testing.assert_allclose(CiParameters().weights(4), 0.25)


@pytest.mark.parametrize("scheme", ["none", "zf", "ci"])
@pytest.mark.parametrize("mode", ["longterm", "instantaneous"])
def test_batched_received_matches_single_vector_path(scheme, mode):
    K = N = 2
    gains = np.array([1.0, 0.3])
    rng = np.random.default_rng(3)
    H = np.sqrt(gains)[None, :, None] * complex_normal(rng, (5, K, N))
    S = enumerate_joint(4, K).vectors
    r = received_signals(scheme, H, S, 1, 2.0, gains, mode)
    for t in range(5):
        for j, s in enumerate(S):
            if scheme == "none":
                x = precode_none(s, 2.0, N).x
            elif scheme == "zf":
                x = precode_zf(H[t], s, 2.0, mode, gains).x
            else:
                x = precode_ci(H[t], s, 2.0, CiParameters(beta_mode=mode), gains).x
            assert r[t, j] == pytest.approx(receive(H[t], x, 1), abs=1e-10)


def test_ci_constructive_region_is_not_guaranteed_with_uniform_weights():
    # With uniform u the closed form reduces to a weighted matched filter, so
    # strong cross terms can rotate y_k out of the symbol's decision sector.
    rng = np.random.default_rng(0)
    outside = 0
    for _ in range(1000):
        H = complex_normal(rng, (2, 2))
        s = np.exp(1j * np.pi / 2 * rng.integers(0, 4, 2))
        out = precode_ci(H, s, 1.0, CiParameters(beta_mode="instantaneous"))
        y = receive(H, out.x, 0)
        if abs(np.angle(y * np.conj(s[0]))) > np.pi / 4:
            outside += 1
    assert 0 < outside < 1000
