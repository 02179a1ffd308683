"""Compact subsets of the line: cut-out decompositions, covering numbers,
box-dimension estimates."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PointSet",
    "CutOutSet",
    "BoxDimFit",
    "covering_number",
    "separated_count",
    "cutout_dim_bounds",
    "box_dimension_fit",
    "write_count_table",
    "reciprocal_points",
    "exp_points",
    "reciprocal_cutout",
    "exp_cutout",
    "cantor_cutout",
    "uniform_cutout",
]

# relative slack for "is this point already covered" decisions; covering
# intervals are closed with diameter exactly eps, so exact boundary hits count
_COVER_TOL = 1e-12


@dataclass(frozen=True)
class PointSet:
    """Finite set of reals, stored sorted ascending inside a bounding interval."""

    points: np.ndarray
    bounds: tuple[float, float]
    dim_box_exact: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            raise ValueError("empty set")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        lo, hi = self.bounds
        if pts[0] < lo or pts[-1] > hi:
            raise ValueError("points outside bounding interval")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class CutOutSet:
    """Compact set ``A = base minus union of open gaps``.

    Gaps are ordered non-increasingly by length (the k-th gap length is the
    k-th scale of the set).  ``gap_law`` optionally extends the length
    sequence beyond the stored truncation: a vectorized callable mapping the
    1-based index k to the k-th gap length.
    """

    base: tuple[float, float]
    gaps: np.ndarray  # shape (n, 2), open intervals, sorted by length desc
    gap_law: object = None
    zero_measure: bool = True  # whether the untruncated family exhausts base
    dim_box_exact: float | None = None
    _segments: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        gaps = np.asarray(self.gaps, dtype=float).reshape(-1, 2)
        lo, hi = self.base
        if hi <= lo:
            raise ValueError("degenerate base interval")
        if gaps.size:
            lens = gaps[:, 1] - gaps[:, 0]
            if np.any(lens <= 0):
                raise ValueError("gaps must be nondegenerate open intervals")
            if np.any(np.diff(lens) > 1e-15 * (hi - lo)):
                raise ValueError("gap lengths must be non-increasing")
            if gaps[:, 0].min() < lo - 1e-12 or gaps[:, 1].max() > hi + 1e-12:
                raise ValueError("gap outside base interval")
            by_pos = gaps[np.argsort(gaps[:, 0], kind="stable")]
            if np.any(by_pos[1:, 0] < by_pos[:-1, 1] - 1e-15 * (hi - lo)):
                raise ValueError("gaps overlap")
            if lens.sum() > (hi - lo) * (1 + 1e-9):
                raise ValueError("gap lengths exceed base length")
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "_segments", _complement_segments(self.base, gaps))

    @property
    def gap_lengths(self) -> np.ndarray:
        return self.gaps[:, 1] - self.gaps[:, 0]

    @property
    def truncation_remainder(self) -> float:
        """Base length not accounted for by the stored gaps."""
        return (self.base[1] - self.base[0]) - float(self.gap_lengths.sum())

    def segments(self) -> np.ndarray:
        """Complement components of the gaps, position-sorted closed intervals
        (possibly degenerate points)."""
        return self._segments

    def skeleton_points(self) -> np.ndarray:
        """Sorted gap endpoints plus base endpoints (a finite subset of A)."""
        pts = np.concatenate([np.asarray(self.base), self.gaps.ravel()])
        return np.unique(pts)

    def gap_length(self, k: int | np.ndarray):
        """Length of the k-th gap (1-based), via the law beyond truncation."""
        k = np.asarray(k)
        n = len(self.gaps)
        if np.all(k <= n):
            return self.gap_lengths[k - 1]
        if self.gap_law is None:
            raise ValueError("gap index beyond truncation and no gap law")
        lawful = np.asarray(self.gap_law(k), dtype=float)
        if n == 0:
            return lawful
        stored = self.gap_lengths[np.minimum(k, n) - 1]
        return np.where(k <= n, stored, lawful)

    @staticmethod
    def from_points(points, base, gap_law=None, zero_measure=True,
                    dim_box_exact=None) -> "CutOutSet":
        """Cut-out set whose gaps are the spaces between consecutive points."""
        pts = np.unique(np.asarray(points, dtype=float))
        gaps = np.column_stack([pts[:-1], pts[1:]])
        gaps = gaps[gaps[:, 1] - gaps[:, 0] > 0]
        order = np.argsort(gaps[:, 0] - gaps[:, 1], kind="stable")  # length desc
        return CutOutSet(tuple(base), gaps[order], gap_law=gap_law,
                         zero_measure=zero_measure, dim_box_exact=dim_box_exact)


def _complement_segments(base, gaps):
    lo, hi = base
    if len(gaps) == 0:
        return np.array([[lo, hi]])
    by_pos = gaps[np.argsort(gaps[:, 0], kind="stable")]
    starts = np.concatenate([[lo], by_pos[:, 1]])
    ends = np.concatenate([by_pos[:, 0], [hi]])
    keep = ends >= starts - 1e-15 * (hi - lo)
    segs = np.column_stack([starts[keep], np.maximum(ends[keep], starts[keep])])
    return segs


# ---------------------------------------------------------------------------
# covering / separation counts

def covering_number(obj, eps: float) -> int:
    """Minimum number of closed intervals of diameter eps covering the set.

    Computed by the left-to-right greedy sweep, which is optimal in one
    dimension: each interval is anchored at the leftmost point not yet
    covered.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if isinstance(obj, PointSet):
        return _cover_points(obj.points, eps)
    if isinstance(obj, CutOutSet):
        return _cover_segments(obj.segments(), eps)
    pts = np.sort(np.asarray(obj, dtype=float))
    if pts.size == 0:
        raise ValueError("empty set")
    return _cover_points(pts, eps)


def _cover_points(pts, eps):
    tol = eps * _COVER_TOL
    count = 0
    i = 0
    n = len(pts)
    while i < n:
        count += 1
        i = np.searchsorted(pts, pts[i] + eps + tol, side="right")
    return count


def _cover_segments(segs, eps):
    # per segment the greedy lays ceil(len/eps) contiguous intervals; a
    # partially covered segment continues from the previous cover's edge
    tol = _COVER_TOL
    count = 0
    cover_end = -math.inf
    for lo, hi in segs:
        if hi <= cover_end + eps * tol + abs(cover_end) * tol:
            continue
        start = max(lo, cover_end)
        k = max(1, math.ceil((hi - start) / eps - 1e-9))
        count += k
        cover_end = start + k * eps
    return count


def separated_count(obj, eps: float) -> int:
    """Cardinality of a maximal eps-separated subset (greedy keep-first sweep,
    maximal in one dimension).  For a CutOutSet the closed set itself is used,
    so interior segments contribute ``floor(len/eps) + 1`` points."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if isinstance(obj, CutOutSet):
        count = 0
        last = -math.inf
        for lo, hi in obj.segments():
            start = max(lo, last + eps)
            if start > hi + eps * _COVER_TOL:
                continue
            k = 1 + int(math.floor((hi - start) / eps + 1e-9))
            count += k
            last = start + (k - 1) * eps
        return count
    pts = obj.points if isinstance(obj, PointSet) else np.sort(np.asarray(obj, dtype=float))
    if pts.size == 0:
        raise ValueError("empty set")
    count = 0
    last = -math.inf
    for p in pts:
        if p >= last + eps * (1 - _COVER_TOL):
            count += 1
            last = p
    return count


# ---------------------------------------------------------------------------
# dimension estimates

def cutout_dim_bounds(cut: CutOutSet, k_range: tuple[int, int]) -> tuple[float, float]:
    """Finite-index proxies for the box-dimension bounds of a cut-out set.

    Returns ``(inf, sup)`` of ``log k / log(1/eps_k)`` over ``k`` in the
    inclusive index interval ``k_range``, where ``eps_k`` is the k-th gap
    length.
    """
    k_lo, k_hi = int(k_range[0]), int(k_range[1])
    if k_hi < k_lo or k_lo < 1:
        raise ValueError("empty index range")
    ks = np.arange(k_lo, k_hi + 1)
    eps_k = cut.gap_length(ks)
    if np.any(eps_k >= 1):
        raise ValueError("scale not sub-unit")
    if not cut.zero_measure:
        warnings.warn("cut-out set has positive-measure residue; "
                      "dimension proxy may be meaningless", stacklevel=2)
    ratios = np.log(ks) / np.log(1.0 / eps_k)
    return float(ratios.min()), float(ratios.max())


@dataclass
class BoxDimFit:
    slope: float
    residual: float
    table: list  # (eps, count) pairs


def box_dimension_fit(obj, eps_ladder) -> BoxDimFit:
    """Least-squares box-dimension estimate over a decreasing scale ladder.

    The slope of ``log covering_number`` against ``log(1/eps)`` is fitted by
    least squares; the residual is the maximum absolute deviation of the data
    from the fitted line.
    """
    ladder = [float(e) for e in eps_ladder]
    if len(ladder) < 4:
        raise ValueError("ladder too short")
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly decreasing")
    counts = [covering_number(obj, e) for e in ladder]
    x = np.log(1.0 / np.asarray(ladder))
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    return BoxDimFit(float(slope), residual, list(zip(ladder, counts)))


def write_count_table(path, table):
    """CSV export of an (eps, count) table, decimal notation."""
    with open(path, "w") as fh:
        fh.write("epsilon,count\n")
        for eps, count in table:
            fh.write("%s,%d\n" % (np.format_float_positional(eps, trim="-"), count))


# ---------------------------------------------------------------------------
# catalog sets

def reciprocal_points(n_max: int) -> PointSet:
    """{1/n : n <= n_max} together with 0; box dimension 1/2."""
    pts = np.concatenate([[0.0], 1.0 / np.arange(n_max, 0, -1, dtype=float)])
    return PointSet(pts, (0.0, 1.0), dim_box_exact=0.5)


def exp_points(n_max: int) -> PointSet:
    """{e^-n : 0 <= n <= n_max} together with 0; box dimension 0."""
    pts = np.concatenate([[0.0], np.exp(-np.arange(n_max, -1, -1, dtype=float))])
    return PointSet(pts, (0.0, 1.0), dim_box_exact=0.0)


def reciprocal_cutout(k_max: int) -> CutOutSet:
    """Cut-out representation of {1/n} with gap law 1/(k(k+1))."""
    return CutOutSet.from_points(
        reciprocal_points(k_max + 1).points, (0.0, 1.0),
        gap_law=lambda k: 1.0 / (np.asarray(k, dtype=float) * (np.asarray(k) + 1.0)),
        dim_box_exact=0.5)


def exp_cutout(n_max: int) -> CutOutSet:
    """Cut-out representation of {e^-n} with gap law e^(1-k)(1 - 1/e)."""
    return CutOutSet.from_points(
        exp_points(n_max).points, (0.0, 1.0),
        gap_law=lambda k: np.exp(1.0 - np.asarray(k, dtype=float)) * (1.0 - math.exp(-1.0)),
        dim_box_exact=0.0)


def cantor_cutout(depth: int) -> CutOutSet:
    """Middle-thirds construction truncated at the given depth."""
    gaps = []
    intervals = [(0.0, 1.0)]
    for _ in range(depth):
        nxt = []
        for lo, hi in intervals:
            third = (hi - lo) / 3.0
            gaps.append((lo + third, hi - third))
            nxt.append((lo, lo + third))
            nxt.append((hi - third, hi))
        intervals = nxt
    gaps = np.asarray(gaps)
    order = np.argsort(gaps[:, 0] - gaps[:, 1], kind="stable")

    def law(k):
        level = np.floor(np.log2(np.asarray(k, dtype=float))).astype(int) + 1
        return 3.0 ** (-level.astype(float))

    return CutOutSet((0.0, 1.0), gaps[order], gap_law=law,
                     dim_box_exact=math.log(2) / math.log(3))


def uniform_cutout(c: int) -> CutOutSet:
    """Base [0,1] split into c equal open gaps; A is the (c+1)-point grid."""
    edges = np.linspace(0.0, 1.0, c + 1)
    gaps = np.column_stack([edges[:-1], edges[1:]])
    return CutOutSet((0.0, 1.0), gaps, dim_box_exact=0.0)
