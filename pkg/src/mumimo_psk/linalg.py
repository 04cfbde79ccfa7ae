"""Small dense complex-matrix kernels.

Every matrix this package inverts is a Gram matrix ``H H^H`` of a
full-row-rank channel, so inversion goes through a Cholesky factorization
rather than a general LU.  All functions accept stacked inputs with shape
``(..., rows, cols)``.
"""

import numpy as np

__all__ = ["NotInvertibleError", "gram", "hermitian_inverse", "right_pseudo_inverse"]

#: Relative pivot floor below which a Hermitian matrix is declared singular.
PIVOT_RTOL = 1e-12


class NotInvertibleError(np.linalg.LinAlgError):
    """Raised for singular or indefinite Gram matrices (a degenerate draw)."""


def _as_complex(a, name):
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2:
        raise ValueError(f"{name} must be at least 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def gram(H):
    """Return ``H @ H^H`` for a ``K x N`` channel (``K <= N``).

    >>> gram(np.array([[1, 1j]]))
    array([[2.+0.j]])
    """
    H = _as_complex(H, "H")
    K, N = H.shape[-2:]
    if K > N:
        raise ValueError(f"gram expects K <= N, got K={K}, N={N}")
    return H @ np.conj(np.swapaxes(H, -1, -2))


def _cholesky(A):
    A = _as_complex(A, "A")
    if A.shape[-1] != A.shape[-2]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise NotInvertibleError("matrix is not invertible (not positive definite)") from exc
    scale = np.linalg.norm(A, ord=2, axis=(-2, -1))
    pivots = np.abs(np.diagonal(L, axis1=-2, axis2=-1)) ** 2
    if np.any(pivots < PIVOT_RTOL * scale[..., None]):
        raise NotInvertibleError("matrix is not invertible (pivot below threshold)")
    return L


def hermitian_inverse(A):
    """Invert a Hermitian positive definite matrix via Cholesky.

    Raises
    ------
    NotInvertibleError
        If the factorization fails or a pivot falls below
        ``PIVOT_RTOL * ||A||``.  Callers treat this as a degenerate channel
        draw and resample.
    """
    L = _cholesky(A)
    eye = np.broadcast_to(np.eye(L.shape[-1], dtype=complex), L.shape)
    Linv = np.linalg.solve(L, eye)
    return np.conj(np.swapaxes(Linv, -1, -2)) @ Linv


def right_pseudo_inverse(H):
    """Return ``H^H (H H^H)^{-1}`` so that ``H @ result == I_K``."""
    H = _as_complex(H, "H")
    return np.conj(np.swapaxes(H, -1, -2)) @ hermitian_inverse(gram(H))
