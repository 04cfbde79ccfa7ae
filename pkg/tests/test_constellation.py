import itertools
import math
from collections import Counter

import numpy as np
import pytest

from mumimo_psk.constellation import (
    MAX_JOINT_VECTORS,
    EnumerationSizeError,
    diff_eigenvalue,
    difference_set,
    enumerate_joint,
    interference_space,
    psk_symbols,
)


def test_bpsk_qpsk_points():
    np.testing.assert_allclose(psk_symbols(2).points, [1, -1], atol=1e-15)
    np.testing.assert_allclose(psk_symbols(4).points, [1, 1j, -1, -1j], atol=1e-15)


def test_8psk_min_distance():
    assert psk_symbols(8).min_distance() == pytest.approx(2 * math.sin(math.pi / 8), abs=1e-12)


@pytest.mark.parametrize("M", [2, 4, 8, 16])
def test_unit_modulus_and_spacing(M):
    pts = psk_symbols(M).points
    np.testing.assert_allclose(np.abs(pts), 1.0, atol=1e-14)
    steps = np.angle(pts[1:] / pts[:-1])
    np.testing.assert_allclose(steps, 2 * math.pi / M, atol=1e-12)
    assert len(set(np.round(pts, 12))) == M


@pytest.mark.parametrize("M", [2, 4, 8, 16])
def test_rotation_closure(M):
    pts = psk_symbols(M).points
    rotated = pts * np.exp(2j * math.pi / M)
    for r in rotated:
        assert np.min(np.abs(pts - r)) < 1e-12


def test_unsupported_order():
    with pytest.raises(ValueError):
        psk_symbols(3)


def test_enumerate_bpsk_pairs():
    space = enumerate_joint(2, 2)
    np.testing.assert_allclose(space.vectors, [[1, 1], [1, -1], [-1, 1], [-1, -1]], atol=1e-15)
    assert len(enumerate_joint(2, 3)) == 8


def test_enumerate_qpsk_exhaustive():
    space = enumerate_joint(4, 2)
    assert len(space) == 16
    allowed = np.array([1, 1j, -1, -1j])
    for v in space.vectors:
        for x in v:
            assert np.min(np.abs(allowed - x)) < 1e-12
    expected = list(itertools.product(range(4), repeat=2))
    assert [tuple(r) for r in space.indices] == expected


def test_enumeration_cap():
    assert len(enumerate_joint(16, 3)) == MAX_JOINT_VECTORS
    with pytest.raises(EnumerationSizeError, match="reduce"):
        enumerate_joint(8, 5)


def test_interference_space():
    assert enumerate_joint(2, 1).users == 1
    single = interference_space(enumerate_joint(2, 1), 0)
    assert len(single) == 1 and single.vectors.shape == (1, 0)
    np.testing.assert_allclose(interference_space(enumerate_joint(2, 2), 0).vectors, [[1], [-1]], atol=1e-15)
    assert len(interference_space(enumerate_joint(4, 3), 1)) == 16
    with pytest.raises(IndexError):
        interference_space(enumerate_joint(2, 2), 2)


def test_diff_eigenvalue_examples():
    space = enumerate_joint(2, 2)
    # rows: (1,1), (1,-1), (-1,1), (-1,-1)
    assert diff_eigenvalue(0, 2, space) == pytest.approx(4.0)
    assert diff_eigenvalue(0, 3, space) == pytest.approx(8.0)
    with pytest.raises(ValueError):
        diff_eigenvalue(1, 1, space)


def test_diff_eigenvalue_is_rank_one_eigenvalue():
    space = enumerate_joint(4, 3)
    rng = np.random.default_rng(0)
    for _ in range(20):
        m, i = rng.choice(len(space), 2, replace=False)
        d = space.vectors[m] - space.vectors[i]
        eig = np.linalg.eigvalsh(np.outer(d, d.conj()))
        assert diff_eigenvalue(m, i, space) == pytest.approx(eig.max(), rel=1e-12)


def test_difference_set_invariants():
    space = enumerate_joint(4, 2)
    ds = difference_set(5, space)
    assert np.all(ds.differences[5] == 0)
    lam = np.delete(ds.eigenvalues(), 5)
    assert np.all(lam > 0) and np.all(lam <= 4 * 2 + 1e-12)


@pytest.mark.parametrize("M, K", [(M, K) for M in (2, 4, 8) for K in (1, 2, 3)])
def test_difference_multiset_same_for_every_anchor(M, K):
    space = enumerate_joint(M, K)
    ref = Counter(np.round(difference_set(0, space).eigenvalues(), 9))
    for m in range(1, len(space)):
        assert Counter(np.round(difference_set(m, space).eigenvalues(), 9)) == ref


@pytest.mark.parametrize("M, K", [(2, 2), (4, 2), (8, 2), (4, 3)])
def test_zero_mean_coordinates(M, K):
    np.testing.assert_allclose(enumerate_joint(M, K).vectors.sum(axis=0), 0, atol=1e-12)


def test_same_symbol_groups():
    space = enumerate_joint(4, 2)
    groups = space.same_symbol_groups(1)
    assert groups.shape == (16, 4)
    for r, g in enumerate(groups):
        assert r in g
        assert set(space.indices[g, 1]) == {space.indices[r, 1]}


def test_phase_offset_does_not_change_differences():
    space = enumerate_joint(8, 2)
    rotated = space.vectors * np.exp(1j * 0.3)
    a = np.sum(np.abs(space.vectors[0] - space.vectors) ** 2, axis=1)
    b = np.sum(np.abs(rotated[0] - rotated) ** 2, axis=1)
    np.testing.assert_allclose(a, b, atol=1e-12)
