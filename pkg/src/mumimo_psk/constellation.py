"""PSK constellations and the joint-symbol enumerations the rate formulas sum over."""

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SUPPORTED_ORDERS",
    "MAX_JOINT_VECTORS",
    "EnumerationSizeError",
    "PskConstellation",
    "JointSymbolSpace",
    "DifferenceSet",
    "psk_symbols",
    "enumerate_joint",
    "interference_space",
    "difference_set",
    "diff_eigenvalue",
]

SUPPORTED_ORDERS = (2, 4, 8, 16)
MAX_JOINT_VECTORS = 4096


class EnumerationSizeError(ValueError):
    """The joint symbol space M**K exceeds the desk-scale cap."""


@dataclass(frozen=True, eq=False)
class PskConstellation:
    order: int
    points: np.ndarray

    @property
    def bits(self):
        return float(np.log2(self.order))

    def min_distance(self):
        d = np.abs(self.points[:, None] - self.points[None, :])
        return float(d[~np.eye(self.order, dtype=bool)].min())


@dataclass(frozen=True, eq=False)
class JointSymbolSpace:
    """All ``M**K`` joint symbol vectors in lexicographic order.

    ``indices[r, k]`` is the constellation index of user ``k`` in row ``r``;
    ``vectors`` holds the matching complex symbols.
    """

    constellation: PskConstellation
    users: int
    indices: np.ndarray
    vectors: np.ndarray

    def __len__(self):
        return self.vectors.shape[0]

    def same_symbol_groups(self, k):
        """Row indices sharing user ``k``'s symbol with each row.

        Returns an integer array of shape ``(M**K, M**(K-1))``.
        """
        if not 0 <= k < self.users:
            raise IndexError(f"user index {k} out of range for K={self.users}")
        col = self.indices[:, k]
        order = np.argsort(col, kind="stable")
        groups = order.reshape(self.constellation.order, -1)
        return groups[col]


@dataclass(frozen=True, eq=False)
class DifferenceSet:
    anchor: int
    differences: np.ndarray

    def eigenvalues(self):
        """``||s_m - s_i||^2`` for every ``i`` (zero at ``i == anchor``)."""
        return np.sum(np.abs(self.differences) ** 2, axis=1)


def psk_symbols(M):
    """``M`` unit-modulus points ``exp(j 2 pi m / M)``, starting at +1."""
    if M not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported PSK order {M}; choose one of {SUPPORTED_ORDERS}")
    points = np.exp(2j * np.pi * np.arange(M) / M)
    # snap the exact axis points so BPSK/QPSK are free of 1e-16 residue
    points = np.round(points.real, 15) + 1j * np.round(points.imag, 15)
    points.setflags(write=False)
    return PskConstellation(M, points)


def enumerate_joint(M, K):
    """Enumerate every joint symbol vector of ``K`` users drawing from ``M``-PSK."""
    if K < 0:
        raise ValueError(f"number of users must be nonnegative, got {K}")
    const = psk_symbols(M)
    size = M**K
    if size > MAX_JOINT_VECTORS:
        raise EnumerationSizeError(
            f"M**K = {M}**{K} = {size} joint vectors exceeds the cap of "
            f"{MAX_JOINT_VECTORS}; reduce the modulation order or the number of users"
        )
    idx = np.array(list(itertools.product(range(M), repeat=K)), dtype=int).reshape(size, K)
    vectors = const.points[idx]
    idx.setflags(write=False)
    vectors.setflags(write=False)
    return JointSymbolSpace(const, K, idx, vectors)


def interference_space(space, k):
    """Joint space over every user except ``k`` (``M**(K-1)`` vectors)."""
    if not 0 <= k < max(space.users, 1):
        raise IndexError(f"user index {k} out of range for K={space.users}")
    return enumerate_joint(space.constellation.order, space.users - 1)


def difference_set(m, space):
    """Difference vectors ``s_m - s_i`` for every ``i`` in the space."""
    diffs = space.vectors[m][None, :] - space.vectors
    diffs[m] = 0.0
    return DifferenceSet(m, diffs)


def diff_eigenvalue(m, i, space):
    """Nonzero eigenvalue of the rank-1 matrix ``s_mi s_mi^H``, i.e. ``||s_m - s_i||^2``."""
    if m == i:
        raise ValueError("diff_eigenvalue needs i != m: the difference vector is zero")
    d = space.vectors[m] - space.vectors[i]
    return float(np.sum(np.abs(d) ** 2))
