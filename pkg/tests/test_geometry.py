import itertools
import math

import numpy as np
import pytest

from mdimlab.geometry import (PointSet, CutOutSet, covering_number, separated_count,
                              cutout_dim_bounds, box_dimension_fit, write_count_table,
                              reciprocal_points, exp_points, reciprocal_cutout,
                              exp_cutout, cantor_cutout, uniform_cutout)


def greedy_cover_points(pts, eps):
    pts = np.sort(np.asarray(pts, dtype=float))
    count, i = 0, 0
    while i < len(pts):
        count += 1
        i = np.searchsorted(pts, pts[i] + eps + 1e-15, side="right")
    return count


def exhaustive_cover(pts, eps):
    # minimum k such that the sorted points split into k consecutive blocks of
    # span <= eps; every interval cover induces such a partition
    pts = np.sort(np.asarray(pts, dtype=float))
    n = len(pts)
    for k in range(1, n + 1):
        for cuts in itertools.combinations(range(1, n), k - 1):
            blocks = np.split(pts, list(cuts))
            if all(b[-1] - b[0] <= eps + 1e-15 for b in blocks):
                return k
    return n


def test_covering_two_points():
    ps = PointSet(np.array([0.0, 1.0]), (0.0, 1.0))
    assert covering_number(ps, 0.5) == 2
    assert covering_number(ps, 1.0) == 1


def test_covering_full_interval():
    cut = CutOutSet((0.0, 1.0), np.zeros((0, 2)))
    assert covering_number(cut, 0.1) == 10
    assert covering_number(cut, 0.25) == 4
    assert covering_number(cut, 1.0 / 3.0) == 3


def test_covering_reciprocal_oracle():
    # independent oracle: dynamic program over interval placements anchored at
    # the points (optimal placements can be normalized to point anchors)
    pts = reciprocal_points(100)
    f = {len(pts): 0}
    arr = pts.points
    for i in range(len(arr) - 1, -1, -1):
        j = int(np.searchsorted(arr, arr[i] + 0.01 + 1e-15, side="right"))
        f[i] = 1 + f[j]
    assert f[0] == 18
    assert covering_number(pts, 0.01) == 18


def test_covering_matches_exhaustive_on_random_sets():
    rng = np.random.default_rng(42)
    for _ in range(500):
        n = rng.integers(1, 13)
        pts = np.sort(rng.random(n))
        pts = np.unique(pts)
        eps = float(rng.random() * 0.4 + 0.01)
        ps = PointSet(pts, (0.0, 1.0))
        assert covering_number(ps, eps) == exhaustive_cover(pts, eps)


def test_covering_scale_halving_bounds():
    rng = np.random.default_rng(7)
    for _ in range(100):
        pts = np.unique(rng.random(rng.integers(2, 40)))
        ps = PointSet(pts, (0.0, 1.0))
        eps = float(rng.random() * 0.3 + 0.01)
        c1 = covering_number(ps, eps)
        c2 = covering_number(ps, eps / 2)
        assert c1 <= c2 <= 2 * c1 + 1


def test_one_point_per_gap_needs_at_most_twice_the_cover():
    # a point chosen in each gap sits between consecutive cover intervals of
    # the closed set, so one extra interval per original one suffices
    rng = np.random.default_rng(3)
    for _ in range(100):
        edges = np.unique(rng.random(rng.integers(4, 24)))
        cut = CutOutSet.from_points(edges, (0.0, 1.0))
        if len(cut.gaps) == 0:
            continue
        t = rng.random(len(cut.gaps))
        sel = cut.gaps[:, 0] + t * (cut.gaps[:, 1] - cut.gaps[:, 0])
        eps = float(rng.random() * 0.2 + 0.01)
        n_sel = covering_number(PointSet(np.unique(sel), (0.0, 1.0)), eps)
        n_cut = covering_number(cut, eps)
        assert n_sel <= 2 * n_cut


def test_empty_set_rejected():
    with pytest.raises(ValueError, match="empty set"):
        PointSet(np.array([]), (0.0, 1.0))


def test_cutout_dim_bounds_power_law():
    cut = CutOutSet((0.0, 1.0), np.array([[0.3, 0.7]]),
                    gap_law=lambda k: np.asarray(k, dtype=float) ** -2.0)
    lo, hi = cutout_dim_bounds(cut, (1000, 10000))
    assert lo == pytest.approx(0.5, abs=1e-12)
    assert hi == pytest.approx(0.5, abs=1e-12)


def test_cutout_dim_bounds_exponential_law():
    cut = CutOutSet((0.0, 1.0), np.array([[0.3, 0.7]]),
                    gap_law=lambda k: np.exp(-np.asarray(k, dtype=float)))
    lo, hi = cutout_dim_bounds(cut, (100, 1000))
    # sup of log k / k over [100, 1000] is attained at k = 100
    assert hi == pytest.approx(math.log(100) / 100, rel=1e-9)
    assert hi <= 0.05
    assert lo == pytest.approx(math.log(1000) / 1000, rel=1e-9)


def test_cutout_dim_bounds_intermittency_exponent():
    # gap law k^(-(1+a)/a) with a = 1 is k^-2, giving exactly 1/2
    cut = CutOutSet((0.0, 1.0), np.array([[0.3, 0.7]]),
                    gap_law=lambda k: np.asarray(k, dtype=float) ** -2.0)
    lo, hi = cutout_dim_bounds(cut, (1000, 10000))
    assert lo == hi == pytest.approx(0.5)


def test_cutout_dim_bounds_errors():
    cut = CutOutSet((0.0, 2.0), np.array([[0.2, 1.4]]))
    with pytest.raises(ValueError, match="scale not sub-unit"):
        cutout_dim_bounds(cut, (1, 1))
    with pytest.raises(ValueError, match="empty index range"):
        cutout_dim_bounds(cut, (3, 2))


def test_positive_measure_residue_warns():
    cut = CutOutSet((0.0, 1.0), np.array([[0.4, 0.6]]), zero_measure=False)
    with pytest.warns(UserWarning, match="positive-measure"):
        cutout_dim_bounds(cut, (1, 1))


def test_box_dimension_interval():
    cut = CutOutSet((0.0, 1.0), np.zeros((0, 2)))
    fit = box_dimension_fit(cut, [2.0 ** -j for j in range(4, 17)])
    assert fit.slope == pytest.approx(1.0, abs=1e-3)
    assert fit.residual < 1e-6


def test_box_dimension_reciprocal():
    fit = box_dimension_fit(reciprocal_points(10 ** 6),
                            [2.0 ** -j for j in range(6, 19)])
    assert fit.slope == pytest.approx(0.5, abs=0.05)


def test_box_dimension_cantor_vs_endpoint_oracle():
    cut = cantor_cutout(12)
    ladder = [3.0 ** -j for j in range(2, 11)]
    fit = box_dimension_fit(cut, ladder)
    assert fit.slope == pytest.approx(math.log(2) / math.log(3), abs=0.05)
    # greedy cover of the explicit endpoint set agrees scale by scale (the
    # level-12 segments are shorter than every ladder scale)
    skel = cut.skeleton_points()
    for eps, count in fit.table:
        assert count == greedy_cover_points(skel, eps)


def test_box_dimension_exponential_points():
    fit = box_dimension_fit(exp_points(60), [2.0 ** -j for j in range(6, 25)])
    assert fit.slope <= 0.10


def test_ladder_validation():
    cut = CutOutSet((0.0, 1.0), np.zeros((0, 2)))
    with pytest.raises(ValueError, match="ladder too short"):
        box_dimension_fit(cut, [0.1, 0.05, 0.025])
    with pytest.raises(ValueError, match="strictly decreasing"):
        box_dimension_fit(cut, [0.1, 0.1, 0.05, 0.025])


def test_dim_bounds_below_fit_on_catalog():
    for cut, ladder in [(reciprocal_cutout(10 ** 5), [2.0 ** -j for j in range(6, 17)]),
                        (cantor_cutout(12), [3.0 ** -j for j in range(2, 11)]),
                        (exp_cutout(40), [2.0 ** -j for j in range(6, 17)])]:
        lo, hi = cutout_dim_bounds(cut, (10, min(len(cut.gaps), 1000)))
        fit = box_dimension_fit(cut, ladder)
        assert lo <= fit.slope + fit.residual + 0.05


def test_gap_ordering_enforced():
    with pytest.raises(ValueError, match="non-increasing"):
        CutOutSet((0.0, 1.0), np.array([[0.1, 0.2], [0.3, 0.6]]))
    with pytest.raises(ValueError, match="overlap"):
        CutOutSet((0.0, 1.0), np.array([[0.1, 0.5], [0.3, 0.6]]))


def test_truncation_remainder():
    cut = reciprocal_cutout(999)
    # gaps cover (1/1000, 1); the remainder is the unresolved [0, 1/1000]
    assert cut.truncation_remainder == pytest.approx(1e-3, rel=1e-6)


def test_separated_count_interval_and_points():
    cut = CutOutSet((0.0, 1.0), np.zeros((0, 2)))
    assert separated_count(cut, 0.25) == 5
    ps = PointSet(np.array([0.0, 0.1, 0.2, 0.9]), (0.0, 1.0))
    assert separated_count(ps, 0.15) == 3


def test_count_table_csv(tmp_path):
    path = tmp_path / "boxdim.csv"
    write_count_table(path, [(2.0 ** -6, 64), (2.0 ** -18, 262144)])
    lines = path.read_text().splitlines()
    assert lines[0] == "epsilon,count"
    assert lines[1] == "0.015625,64"
    assert "e" not in lines[2]  # decimal notation, no scientific exponent


def test_uniform_cutout_is_exact_partition():
    cut = uniform_cutout(4)
    assert len(cut.gaps) == 4
    assert cut.truncation_remainder == pytest.approx(0.0, abs=1e-15)
    assert covering_number(cut, 0.2) == 5  # the five grid points
