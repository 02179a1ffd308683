"""Transition sets in the square and their occupancy matrices on an eps-grid.

The occupancy matrix is stored as merged column-index ranges per row: graphs
of monotone branches occupy contiguous column runs, so a matrix with ~10^8
ones typically needs only ~10^6 ranges.  Matrix-vector products run on the
ranges via prefix sums, never materializing individual entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import PointSet, CutOutSet, box_dimension_fit
from .dynamics import PiecewiseMap

__all__ = ["TransitionSet", "GridMatrix", "grid_matrix",
           "delayed_transitions", "friedland_set", "full_square",
           "box_set", "point_cloud", "graph_of"]

_GRID_GUARD = 1e-9  # snap tolerance for cell boundaries, relative to eps


@dataclass(frozen=True)
class TransitionSet:
    """Relation in I x I prescribing admissible consecutive pairs.

    kind is one of 'graph', 'union', 'delayed', 'boxes', 'cloud'.
    """

    kind: str
    base: tuple[float, float]
    maps: tuple = ()                  # graph / union
    points: np.ndarray = None         # delayed: the set F; cloud: (x, y) pairs
    anchors: tuple = ()               # delayed
    rects: tuple = ()                 # boxes: (xlo, xhi, ylo, yhi)
    predicted_mdim: float | None = None
    predicted_note: str | None = None

    @property
    def delay(self):
        return len(self.anchors) + 1


def graph_of(pmap: PiecewiseMap) -> TransitionSet:
    return TransitionSet("graph", pmap.base, maps=(pmap,),
                         predicted_mdim=pmap.predicted_mdim,
                         predicted_note=pmap.predicted_note)


def full_square(base=(0.0, 1.0)) -> TransitionSet:
    """The everything-allowed relation I x I (full shift on the interval)."""
    lo, hi = base
    return TransitionSet("boxes", (lo, hi), rects=((lo, hi, lo, hi),),
                         predicted_mdim=1.0,
                         predicted_note="full shift: box dimension of the interval")


def box_set(rects, base=(0.0, 1.0)) -> TransitionSet:
    return TransitionSet("boxes", tuple(base), rects=tuple(tuple(r) for r in rects))


def point_cloud(pairs, base=(0.0, 1.0)) -> TransitionSet:
    pts = np.asarray(pairs, dtype=float).reshape(-1, 2)
    lo, hi = base
    if pts.size and (pts.min() < lo or pts.max() > hi):
        raise ValueError("points outside base square")
    return TransitionSet("cloud", tuple(base), points=pts)


def delayed_transitions(F: PointSet, k: int, anchors) -> TransitionSet:
    """Relation routing F through a chain of k-1 anchors back into F.

    Admissible words look like (x, a_1, ..., a_{k-1}, x', a_1, ...); the
    predicted metric mean dimension dim_B(F)/k is attached as metadata.
    """
    anchors = tuple(float(a) for a in anchors)
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(anchors) != k - 1:
        raise ValueError("need exactly k-1 anchors")
    if len(set(anchors)) != len(anchors):
        raise ValueError("anchors must be pairwise distinct")
    lo, hi = F.bounds
    if F.dim_box_exact is not None:
        dim, note = F.dim_box_exact, "exact box dimension of F"
    else:
        ladder = [2.0 ** -j for j in range(4, 15)]
        dim = box_dimension_fit(F, ladder).slope
        note = "fitted box dimension of F"
    return TransitionSet("delayed", (lo, hi), points=F.points, anchors=anchors,
                         predicted_mdim=dim / k,
                         predicted_note="delayed full shift: %s divided by delay %d" % (note, k))


def friedland_set(maps) -> TransitionSet:
    """Union of the generator graphs of a finite family of maps."""
    maps = tuple(maps)
    if not maps:
        raise ValueError("need at least one map")
    base = maps[0].base
    for m in maps[1:]:
        if abs(m.base[0] - base[0]) > 1e-12 or abs(m.base[1] - base[1]) > 1e-12:
            raise ValueError("mismatched base intervals")
    return TransitionSet("union", base, maps=maps)


# ---------------------------------------------------------------------------
# grid matrix

class GridMatrix:
    """0-1 occupancy matrix of a transition set on the eps-grid, stored as
    merged (row, col_lo, col_hi) ranges with 0-based indices."""

    def __init__(self, m, eps, rows, jlo, jhi, truncation_warning=False, meta=None):
        self.m = int(m)
        self.eps = float(eps)
        self.rows = rows
        self.jlo = jlo
        self.jhi = jhi
        self.truncation_warning = bool(truncation_warning)
        self.meta = dict(meta or {})
        # row segmentation reused by every matvec
        if len(rows):
            starts = np.flatnonzero(np.diff(rows)) + 1
            self._seg_starts = np.concatenate([[0], starts])
            self._seg_rows = rows[self._seg_starts]
        else:
            self._seg_starts = np.zeros(0, dtype=np.int64)
            self._seg_rows = np.zeros(0, dtype=np.int64)

    @classmethod
    def from_ranges(cls, m, eps, rows, jlo, jhi, **kw):
        rows = np.asarray(rows, dtype=np.int64)
        jlo = np.asarray(jlo, dtype=np.int64)
        jhi = np.asarray(jhi, dtype=np.int64)
        if len(rows) == 0:
            return cls(m, eps, rows, jlo, jhi, **kw)
        if rows.min() < 0 or rows.max() >= m:
            raise ValueError("row index out of range")
        jlo = np.clip(jlo, 0, m - 1)
        jhi = np.clip(jhi, 0, m - 1)
        order = np.lexsort((jlo, rows))
        rows, jlo, jhi = rows[order], jlo[order], jhi[order]
        # remove overlap inside each row: clip each range below the running
        # max of previous range ends (encode row into the running key)
        key = rows * (m + 2) + jhi
        runmax = np.maximum.accumulate(key)
        prev = np.concatenate([[-1], runmax[:-1]])
        prev_row = prev // (m + 2)
        prev_hi = np.where(prev_row == rows, prev % (m + 2), -1)
        jlo = np.maximum(jlo, prev_hi + 1)
        keep = jlo <= jhi
        return cls(m, eps, rows[keep], jlo[keep], jhi[keep], **kw)

    @classmethod
    def from_pairs(cls, m, pairs, eps=None):
        """Build from explicit (row, col) index pairs, 0-based."""
        pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        eps = eps if eps is not None else 1.0 / max(m, 1)
        return cls.from_ranges(m, eps, pairs[:, 0], pairs[:, 1], pairs[:, 1])

    # -- queries ------------------------------------------------------------

    @property
    def nnz(self):
        return int(np.sum(self.jhi - self.jlo + 1))

    def row_sums(self):
        out = np.zeros(self.m, dtype=np.int64)
        if len(self.rows):
            sums = np.add.reduceat(self.jhi - self.jlo + 1, self._seg_starts)
            out[self._seg_rows] = sums
        return out

    def col_sums(self):
        diff = np.zeros(self.m + 1, dtype=np.int64)
        np.add.at(diff, self.jlo, 1)
        np.add.at(diff, self.jhi + 1, -1)
        return np.cumsum(diff[:-1])

    def matvec(self, v):
        """A @ v via prefix sums over the column ranges."""
        s = np.concatenate([[0.0], np.cumsum(v)])
        contrib = s[self.jhi + 1] - s[self.jlo]
        out = np.zeros(self.m)
        if len(self.rows):
            out[self._seg_rows] = np.add.reduceat(contrib, self._seg_starts)
        return out

    def transpose(self):
        if self.nnz > 20_000_000:
            raise ValueError("transpose would densify beyond budget")
        r, c = self.entry_arrays()
        return GridMatrix.from_ranges(self.m, self.eps, c, r, r,
                                      truncation_warning=self.truncation_warning,
                                      meta=self.meta)

    def entry_arrays(self):
        """Explicit (rows, cols) of all entries; use only on modest matrices."""
        lengths = (self.jhi - self.jlo + 1)
        r = np.repeat(self.rows, lengths)
        idx = np.arange(lengths.sum()) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        c = np.repeat(self.jlo, lengths) + idx
        return r, c

    def to_dense(self, limit=4096):
        if self.m > limit:
            raise ValueError("matrix too large to densify")
        A = np.zeros((self.m, self.m))
        for r, a, b in zip(self.rows, self.jlo, self.jhi):
            A[r, a:b + 1] = 1.0
        return A

    def export(self, path):
        """Coordinate-format text export: `m m nnz`, then 1-based `row col`."""
        r, c = self.entry_arrays()
        with open(path, "w") as fh:
            fh.write("%d %d %d\n" % (self.m, self.m, len(r)))
            for i, j in zip(r, c):
                fh.write("%d %d\n" % (i + 1, j + 1))


# -- cell helpers -----------------------------------------------------------

def _cells_of_interval(lo, hi, eps, m, closed):
    """Index range of grid cells meeting the closed interval [lo, hi],
    coordinates already shifted to [0, L]."""
    qlo = np.asarray(lo, dtype=float) / eps
    qhi = np.asarray(hi, dtype=float) / eps
    if closed:
        ilo = np.floor(qlo - _GRID_GUARD).astype(np.int64)
    else:
        ilo = np.floor(qlo + _GRID_GUARD).astype(np.int64)
    ihi = np.floor(qhi + _GRID_GUARD).astype(np.int64)
    ilo = np.clip(ilo, 0, m - 1)
    ihi = np.clip(np.maximum(ihi, ilo), 0, m - 1)
    return ilo, ihi


def grid_matrix(gamma: TransitionSet, eps: float, closed_boxes: bool = False) -> GridMatrix:
    """Occupancy matrix of the transition set on the eps-grid.

    With ``closed_boxes=False`` (default) the grid is the half-open partition
    [(i-1)e, ie) (last cell closed): every point lands in exactly one cell, so
    a full affine c-branch map yields spectral radius c at aligned scales.
    ``closed_boxes=True`` marks closed products [(i-1)e, ie] x [(j-1)e, je]
    instead, where boundary touching counts (the identity graph then comes out
    tridiagonal rather than diagonal).

    For graphs of piecewise-monotone maps the marking is exact: per x-cell the
    image interval of each branch restricted to the cell is computed from the
    monotone endpoint values.
    """
    lo, hi = gamma.base
    L = hi - lo
    if eps > L / 2:
        raise ValueError("eps must be at most half the base length")
    m = int(math.ceil(L / eps - _GRID_GUARD))
    rows_l, jlo_l, jhi_l = [], [], []
    warn = False

    def add(r, a, b):
        rows_l.append(np.asarray(r, dtype=np.int64).ravel())
        jlo_l.append(np.asarray(a, dtype=np.int64).ravel())
        jhi_l.append(np.asarray(b, dtype=np.int64).ravel())

    def add_rect(xlo, xhi, ylo, yhi):
        i0, i1 = _cells_of_interval(xlo - lo, xhi - lo, eps, m, closed_boxes)
        j0, j1 = _cells_of_interval(ylo - lo, yhi - lo, eps, m, closed_boxes)
        ii = np.arange(i0, i1 + 1)
        add(ii, np.full(ii.shape, j0), np.full(ii.shape, j1))

    def add_points(xs, ys):
        i0, i1 = _cells_of_interval(xs - lo, xs - lo, eps, m, closed_boxes)
        j0, j1 = _cells_of_interval(ys - lo, ys - lo, eps, m, closed_boxes)
        if closed_boxes:
            # a boundary point can sit in two cells per axis
            for di in (0, 1):
                for dj in (0, 1):
                    ii = np.where(di == 0, i0, i1)
                    jj = np.where(dj == 0, j0, j1)
                    add(ii, jj, jj)
        else:
            add(i0, j0, j0)

    if gamma.kind == "boxes":
        for r in gamma.rects:
            add_rect(*r)
    elif gamma.kind == "cloud":
        if gamma.points.size:
            add_points(gamma.points[:, 0], gamma.points[:, 1])
    elif gamma.kind == "delayed":
        pts = gamma.points
        a = gamma.anchors
        add_points(pts, np.full(pts.shape, a[0]))
        if len(a) > 1:
            add_points(np.asarray(a[:-1]), np.asarray(a[1:]))
        add_points(np.full(pts.shape, a[-1]), pts)
    elif gamma.kind in ("graph", "union"):
        for pmap in gamma.maps:
            w, parts = _graph_ranges(pmap, eps, m, lo, closed_boxes)
            warn = warn or w
            for r, a, b in parts:
                add(r, a, b)
    else:
        raise ValueError("unknown transition set kind %r" % gamma.kind)

    rows = np.concatenate(rows_l) if rows_l else np.zeros(0, dtype=np.int64)
    jlo = np.concatenate(jlo_l) if jlo_l else np.zeros(0, dtype=np.int64)
    jhi = np.concatenate(jhi_l) if jhi_l else np.zeros(0, dtype=np.int64)
    return GridMatrix.from_ranges(
        m, eps, rows, jlo, jhi, truncation_warning=warn,
        meta={"base": gamma.base, "closed_boxes": closed_boxes, "kind": gamma.kind})


def _graph_ranges(pmap, eps, m, base_lo, closed):
    """Ranges for the graph of one piecewise-monotone map."""
    parts = []
    lefts = pmap.lefts - base_lo
    rights = pmap.rights - base_lo
    n = pmap.n_branches
    # interior grid lines per branch
    t_lo = np.floor(lefts / eps + 1.0 - _GRID_GUARD).astype(np.int64)
    t_hi = np.ceil(rights / eps - 1.0 + _GRID_GUARD).astype(np.int64)
    counts = np.maximum(t_hi - t_lo + 1, 0)
    total = int(counts.sum())
    # evaluation points: branch left edge, interior lines, branch right edge
    npts = counts + 2
    offsets = np.concatenate([[0], np.cumsum(npts)])
    xs = np.empty(offsets[-1])
    ids = np.repeat(np.arange(n), npts)
    pos_in_branch = np.arange(offsets[-1]) - np.repeat(offsets[:-1], npts)
    first = pos_in_branch == 0
    last = pos_in_branch == npts.repeat(npts) - 1
    xs[first] = lefts
    xs[last] = rights
    mid = ~(first | last)
    xs[mid] = (np.repeat(t_lo, npts)[mid] + pos_in_branch[mid] - 1) * eps
    # branch values; edges use the known one-sided limits
    vals = np.empty_like(xs)
    interior = mid
    if np.any(interior):
        vals[interior] = pmap.branch_forward(ids[interior], xs[interior] + base_lo) - base_lo
    inc = pmap.increasing[ids]
    vals[first] = np.where(inc[first], pmap.img_lo[ids[first]], pmap.img_hi[ids[first]]) - base_lo
    vals[last] = np.where(inc[last], pmap.img_hi[ids[last]], pmap.img_lo[ids[last]]) - base_lo
    # consecutive evaluation points bound the image over each sub-cell piece
    seg_keep = ~last  # pair (p, p+1) within the same branch
    p_lo = xs[seg_keep]
    p_hi = xs[np.flatnonzero(seg_keep) + 1]
    v1 = vals[seg_keep]
    v2 = vals[np.flatnonzero(seg_keep) + 1]
    ymin = np.minimum(v1, v2)
    ymax = np.maximum(v1, v2)
    # each piece lies inside one x-cell by construction
    xcell = np.clip((0.5 * (p_lo + p_hi) / eps).astype(np.int64), 0, m - 1)
    keep = p_hi > p_lo  # drop degenerate pieces at exactly-aligned branch edges
    if closed:
        j0, j1 = _cells_of_interval(ymin[keep], ymax[keep], eps, m, True)
    else:
        # partition semantics: the value at the piece's right x-endpoint is
        # never attained inside the piece (the endpoint is either a grid line
        # owned by the next cell or the open branch edge), and neither is the
        # left-edge value of a branch's first piece; an unattained extreme that
        # falls exactly on a cell boundary must not mark the cell beyond it
        first_pc = first[seg_keep]
        inc_pc = inc[seg_keep]
        top_open = inc_pc | first_pc          # max comes from an open side
        j0 = np.floor(ymin[keep] / eps + _GRID_GUARD).astype(np.int64)
        qtop = ymax[keep] / eps
        j1 = np.where(top_open[keep],
                      np.floor(qtop - _GRID_GUARD).astype(np.int64),
                      np.floor(qtop + _GRID_GUARD).astype(np.int64))
        j0 = np.clip(j0, 0, m - 1)
        j1 = np.clip(np.maximum(j1, j0), 0, m - 1)
    parts.append((xcell[keep], j0, j1))
    # critical points and their fallback values
    cp = pmap.critical_points()
    cv = pmap.forward_array(cp)
    i0, i1 = _cells_of_interval(cp - base_lo, cp - base_lo, eps, m, closed)
    j0, j1 = _cells_of_interval(cv - base_lo, cv - base_lo, eps, m, closed)
    if closed:
        parts.append((i0, j0, j1))
        parts.append((i1, j0, j1))
    else:
        parts.append((i0, j0, j0))
    # truncation residue rectangles
    for xlo, xhi, ylo, yhi in pmap.residue_rects:
        i0, i1 = _cells_of_interval(xlo - base_lo, xhi - base_lo, eps, m, closed)
        ii = np.arange(i0, i1 + 1)
        j0, j1 = _cells_of_interval(ylo - base_lo, yhi - base_lo, eps, m, closed)
        parts.append((ii, np.full(ii.shape, j0), np.full(ii.shape, j1)))
    return (eps < pmap.min_branch_width), parts
