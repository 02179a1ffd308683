import math

import numpy as np
import pytest

from mdimlab.transition import GridMatrix
from mdimlab.spectral import power_iteration, gershgorin_bound, norm_root


def random_matrix(rng, m=None):
    m = m or int(rng.integers(2, 13))
    density = rng.random() * 0.6 + 0.1
    mask = rng.random((m, m)) < density
    pairs = [(i, j) for i in range(m) for j in range(m) if mask[i, j]]
    if not pairs:
        pairs = [(0, 0)]
    return GridMatrix.from_pairs(m, pairs), m


def dense_radius(A):
    return float(np.abs(np.linalg.eigvals(A.to_dense())).max())


def test_all_ones():
    A = GridMatrix.from_pairs(8, [(i, j) for i in range(8) for j in range(8)])
    sr = power_iteration(A)
    assert sr.estimate == pytest.approx(8.0, abs=1e-6)


def test_tridiagonal():
    m = 10
    pairs = [(i, j) for i in range(m) for j in range(m) if abs(i - j) <= 1]
    sr = power_iteration(GridMatrix.from_pairs(m, pairs))
    assert sr.estimate == pytest.approx(1 + 2 * math.cos(math.pi / 11), abs=1e-6)


def test_delay_recurrence_blowup():
    # 0-1 realization of the delay recurrence matrix [[0, N-1], [1, 1]] at
    # N = 5: four source nodes feed a hub with a self loop; the radius solves
    # x^2 = x + 4, i.e. (1 + sqrt 17)/2
    pairs = [(i, 4) for i in range(4)] + [(4, j) for j in range(5)]
    A = GridMatrix.from_pairs(5, pairs)
    sr = power_iteration(A)
    expect = (1 + math.sqrt(17)) / 2
    assert sr.estimate == pytest.approx(expect, abs=1e-6)
    assert sr.estimate == pytest.approx(dense_radius(A), abs=1e-6)
    # total paths of length 2: 4 sources * 5 + hub (4 + 5) = 29
    assert norm_root(A, 2) == pytest.approx(math.sqrt(29.0), abs=1e-9)


def test_power_vs_dense_oracle_and_gershgorin():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        A, _ = random_matrix(rng)
        sr = power_iteration(A)
        r = dense_radius(A)
        assert sr.estimate == pytest.approx(r, abs=1e-6)
        assert gershgorin_bound(A) >= r - 1e-9
        assert sr.estimate <= sr.certified_upper + 1e-9


def test_transpose_radius_agrees():
    rng = np.random.default_rng(5)
    for _ in range(50):
        A, _ = random_matrix(rng)
        ra = power_iteration(A).estimate
        rt = power_iteration(A.transpose()).estimate
        assert ra == pytest.approx(rt, abs=1e-6)


def test_norm_root_dominates_radius():
    rng = np.random.default_rng(11)
    for _ in range(30):
        A, _ = random_matrix(rng)
        est = power_iteration(A).estimate
        for k in range(1, 7):
            assert norm_root(A, k) >= est - 1e-6


def test_norm_root_identity_and_ones():
    ident = GridMatrix.from_pairs(7, [(i, i) for i in range(7)])
    for k in (1, 2, 5):
        assert norm_root(ident, k) == pytest.approx(7.0 ** (1.0 / k), rel=1e-12)
    n = 6
    ones = GridMatrix.from_pairs(n, [(i, j) for i in range(n) for j in range(n)])
    assert norm_root(ones, 2) == pytest.approx(math.sqrt(n ** 3), rel=1e-12)


def test_monotone_in_entries():
    rng = np.random.default_rng(17)
    for _ in range(50):
        m = int(rng.integers(3, 12))
        base = {(int(rng.integers(m)), int(rng.integers(m))) for _ in range(m)}
        extra = base | {(int(rng.integers(m)), int(rng.integers(m))) for _ in range(m)}
        r1 = power_iteration(GridMatrix.from_pairs(m, base)).estimate
        r2 = power_iteration(GridMatrix.from_pairs(m, extra)).estimate
        assert r2 >= r1 - 1e-9


def test_permutation_matrix():
    perm = GridMatrix.from_pairs(5, [(i, (i + 2) % 5) for i in range(5)])
    sr = power_iteration(perm)
    assert sr.estimate == pytest.approx(1.0, abs=1e-9)
    assert gershgorin_bound(perm) == 1.0


def test_zero_matrix():
    A = GridMatrix.from_ranges(4, 0.25, [], [], [])
    sr = power_iteration(A)
    assert sr.estimate == 0.0
    assert sr.iterations == 0
    assert gershgorin_bound(A) == 0.0


def test_nilpotent_matrix():
    A = GridMatrix.from_pairs(4, [(0, 1), (1, 2), (2, 3)])
    sr = power_iteration(A)
    assert sr.estimate == 0.0


def test_tol_validation():
    A = GridMatrix.from_pairs(2, [(0, 0)])
    with pytest.raises(ValueError):
        power_iteration(A, tol=0.5)
    with pytest.raises(ValueError):
        norm_root(A, 0)


def test_norm_budget():
    A = GridMatrix.from_pairs(3, [(0, 1), (1, 2)])
    with pytest.raises(ValueError, match="norm budget exceeded"):
        norm_root(A, 10, op_budget=5)
