"""Downlink transmit schemes: no precoding, zero forcing and closed-form CI.

Each ``precode_*`` function maps one symbol vector ``s`` (length K) to the
transmit vector ``x`` (length N).  :func:`received_signals` evaluates the
noise-free received samples of one user for a whole batch of channels and
every joint symbol vector at once, which is what the Monte Carlo rate
estimator consumes.
"""

import math
from dataclasses import dataclass

import numpy as np

from .linalg import gram, hermitian_inverse, right_pseudo_inverse
from .specfun import ln_factorial, ln_gamma

__all__ = [
    "BETA_MODES",
    "SCHEMES",
    "UnsupportedConfigurationError",
    "PrecoderOutput",
    "CiParameters",
    "precode_none",
    "precode_zf",
    "zf_beta_longterm",
    "ci_beta_longterm",
    "precode_ci",
    "receive",
    "received_signals",
]

BETA_MODES = ("longterm", "instantaneous")
SCHEMES = ("none", "zf", "ci")


class UnsupportedConfigurationError(ValueError):
    """Scheme and dimensions do not fit together (e.g. no precoding with N != K)."""


@dataclass(frozen=True, eq=False)
class PrecoderOutput:
    x: np.ndarray
    beta: float
    scheme: str


@dataclass(frozen=True, eq=False)
class CiParameters:
    """Weight vector ``u`` (with ``sum(u) = 1``) and the power-scaling mode.

    ``u=None`` means the uniform vector ``1/K``; call :meth:`weights` to
    resolve it for a given number of users.
    """

    u: np.ndarray = None
    beta_mode: str = "longterm"

    def __post_init__(self):
        _check_beta_mode(self.beta_mode)
        if self.u is not None:
            u = np.asarray(self.u)
            u = u.astype(complex) if np.iscomplexobj(u) else u.astype(float)
            if u.ndim != 1 or u.size == 0:
                raise ValueError("u must be a nonempty vector")
            if abs(np.sum(u) - 1.0) > 1e-12:
                raise ValueError(f"entries of u must sum to 1, got {np.sum(u)}")
            if np.any(u == 0):
                raise ValueError("entries of u must be nonzero")
            object.__setattr__(self, "u", u)

    def weights(self, K):
        if self.u is None:
            return np.full(K, 1.0 / K)
        if self.u.size != K:
            raise ValueError(f"u has {self.u.size} entries but there are {K} users")
        return self.u


def _check_beta_mode(mode):
    if mode not in BETA_MODES:
        raise ValueError(f"unknown beta mode {mode!r}; choose from {BETA_MODES}")


def _gains_vector(Sigma, K):
    Sigma = np.asarray(Sigma, dtype=float)
    g = np.diag(Sigma) if Sigma.ndim == 2 else np.broadcast_to(Sigma, (K,))
    if np.any(g <= 0):
        raise ValueError("large-scale gains must be positive")
    return np.asarray(g, dtype=float)


def precode_none(s, p, N):
    """Send the symbols straight from the antennas at ``p/N`` per antenna."""
    s = np.asarray(s, dtype=complex)
    if s.shape[-1] != N:
        raise UnsupportedConfigurationError(
            f"transmission without precoding needs N == K, got N={N}, K={s.shape[-1]}"
        )
    if p < 0:
        raise ValueError(f"power must be nonnegative, got {p}")
    beta = math.sqrt(p / N)
    return PrecoderOutput(beta * s, beta, "none")


def zf_beta_longterm(p, s, Sigma, N, K):
    """Constant ZF scaling from the mean of the Gamma-distributed power normalizer.

    ``beta = sqrt(p / s^H Sigma^{-1} s) * Gamma(3/2 - K + N) / (K sqrt(K) (N-K)!)``

    ``Sigma`` may be the diagonal matrix of large-scale gains or the vector of them.
    """
    if N < K:
        raise ValueError(f"zero forcing needs N >= K, got N={N}, K={K}")
    if p == 0:
        return 0.0
    s = np.asarray(s, dtype=complex)
    g = _gains_vector(Sigma, K)
    q = float(np.sum(np.abs(s) ** 2 / g))
    log_scale = ln_gamma(1.5 - K + N) - ln_factorial(N - K) - 1.5 * math.log(K)
    return math.sqrt(p / q) * math.exp(log_scale)


def precode_zf(H, s, p, beta_mode="instantaneous", gains=None):
    """Zero-forcing precoder ``x = beta H^H (H H^H)^{-1} s``.

    ``gains`` (the diagonal of ``Sigma``) is required in long-term mode.
    """
    _check_beta_mode(beta_mode)
    H = np.asarray(H, dtype=complex)
    K, N = H.shape
    s = np.asarray(s, dtype=complex)
    direction = right_pseudo_inverse(H) @ s
    if beta_mode == "instantaneous":
        q = float(np.real(np.vdot(s, hermitian_inverse(gram(H)) @ s)))
        beta = math.sqrt(p / q)
    else:
        if gains is None:
            raise ValueError("long-term scaling needs the large-scale gains")
        beta = zf_beta_longterm(p, s, gains, N, K)
    return PrecoderOutput(beta * direction, beta, "zf")


def ci_beta_longterm(p, s, u, Sigma, N):
    """``beta = sqrt(p / u^H E[V^{-1}] u)`` with ``E[V^{-1}] = diag(s^H)^{-1} N Sigma diag(s)^{-1}``."""
    s = np.asarray(s, dtype=complex)
    u = np.asarray(u)
    g = _gains_vector(Sigma, s.size)
    mean_vinv = np.diag(1.0 / s.conj()) @ (N * np.diag(g)) @ np.diag(1.0 / s)
    return math.sqrt(p / float(np.real(np.vdot(u, mean_vinv @ u))))


def precode_ci(H, s, p, params=CiParameters(), gains=None):
    """Closed-form constructive-interference precoder.

    ``x = (beta/K) H^H (H H^H)^{-1} diag(V^{-1} u) s`` with
    ``V = diag(s^H) (H H^H)^{-1} diag(s)``.  Algebraically this collapses to
    ``x = (beta/K) H^H (u * s)``; the literal form is kept here so it can be
    checked against that identity.
    """
    H = np.asarray(H, dtype=complex)
    K, N = H.shape
    s = np.asarray(s, dtype=complex)
    u = params.weights(K)
    G = gram(H)
    V = np.diag(s.conj()) @ hermitian_inverse(G) @ np.diag(s)
    # V is Hermitian positive definite whenever G is
    Vinv = hermitian_inverse(V)
    if params.beta_mode == "instantaneous":
        beta = math.sqrt(p / float(np.real(np.vdot(u, Vinv @ u))))
    else:
        if gains is None:
            raise ValueError("long-term scaling needs the large-scale gains")
        beta = ci_beta_longterm(p, s, u, gains, N)
    x = (beta / K) * (right_pseudo_inverse(H) @ ((Vinv @ u) * s))
    return PrecoderOutput(x, beta, "ci")


def receive(H, x, k, noise=0.0):
    """User ``k``'s sample ``y_k = h_k x + n_k``."""
    H = np.asarray(H, dtype=complex)
    return complex(H[k] @ np.asarray(x, dtype=complex) + noise)


def received_signals(scheme, H, symbols, k, p, gains, beta_mode="longterm", u=None):
    """Noise-free received samples of user ``k`` for a batch of channels.

    Parameters
    ----------
    scheme : {"none", "zf", "ci"}
    H : ndarray, shape (T, K, N)
        Channel draws.
    symbols : ndarray, shape (S, K)
        Joint symbol vectors (rows of a joint symbol space).
    k : int
        Receiving user.
    p : float
        Transmit power.
    gains : array_like, shape (K,)
        Large-scale gains, used by the long-term scaling factors.

    Returns
    -------
    ndarray, shape (T, S)
    """
    _check_beta_mode(beta_mode)
    H = np.asarray(H, dtype=complex)
    T, K, N = H.shape
    symbols = np.asarray(symbols, dtype=complex)
    gains = _gains_vector(gains, K)

    if scheme == "none":
        if N != K:
            raise UnsupportedConfigurationError(
                f"transmission without precoding needs N == K, got N={N}, K={K}"
            )
        return math.sqrt(p / N) * (H[:, k, :] @ symbols.T)

    if scheme == "zf":
        if beta_mode == "longterm":
            beta = np.array([zf_beta_longterm(p, s, gains, N, K) for s in symbols])
            return np.broadcast_to(beta * symbols[:, k], (T, len(symbols))).copy()
        Ginv = hermitian_inverse(H @ np.conj(np.swapaxes(H, -1, -2)))
        q = np.einsum("sa,tab,sb->ts", symbols.conj(), Ginv, symbols).real
        return np.sqrt(p / q) * symbols[None, :, k]

    if scheme == "ci":
        u = CiParameters(u).weights(K)
        G_row = np.einsum("tn,tjn->tj", H[:, k, :], H.conj())
        us = u[None, :] * symbols
        signal = G_row @ us.T
        if beta_mode == "longterm":
            beta = np.array([ci_beta_longterm(p, s, u, gains, N) for s in symbols])[None, :]
        else:
            G = H @ np.conj(np.swapaxes(H, -1, -2))
            q = np.einsum("sa,tab,sb->ts", us.conj(), G, us).real
            beta = np.sqrt(p / q)
        return (beta / K) * signal

    raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
