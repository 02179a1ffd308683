"""Piecewise-monotone interval maps: branch families with inverses, Bowen
metrics, inverse-branch cylinder enumeration, and the catalog of example maps.

Maps are immutable after construction.  Branch data is held in flat numpy
arrays so that grid occupancy and orbit evaluation stay vectorized even for
families with ~10^6 branches; ``Branch`` objects are materialized lazily.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .geometry import CutOutSet

__all__ = [
    "Branch",
    "PiecewiseMap",
    "Cylinder",
    "BudgetExceededError",
    "make_gauss",
    "make_mp_induced",
    "make_boxes_map",
    "make_sin_inv",
    "make_affine_full",
    "make_identity",
    "bowen_distance",
    "enumerate_cylinders",
]

_INV_TOL = 1e-12


class BudgetExceededError(RuntimeError):
    """Raised when an enumeration exceeds its node budget.

    ``partial_count`` holds the number of cylinders collected before the
    budget ran out (still a valid undercount).
    """

    def __init__(self, message, partial_count=0):
        super().__init__(message)
        self.partial_count = partial_count


@dataclass(frozen=True)
class Branch:
    """One monotone differentiable piece of an interval map."""

    domain: tuple[float, float]
    increasing: bool
    forward: object
    inverse: object
    eta: float
    image: tuple[float, float]
    full: bool

    @property
    def width(self):
        return self.domain[1] - self.domain[0]


class _LazyBranches(Sequence):
    """Sequence view constructing Branch objects on demand."""

    def __init__(self, pmap):
        self._pmap = pmap

    def __len__(self):
        return len(self._pmap.lefts)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        n = len(self)
        if i < 0:
            i += n
        if not 0 <= i < n:
            raise IndexError(i)
        return self._pmap._make_branch(i)


class PiecewiseMap:
    """Interval map given by monotone branches on disjoint open domains.

    Points outside every branch domain (the critical set and any truncation
    residue) are evaluated by ``fallback``, making orbits total.
    ``residue_rects`` lists regions where the branch family was truncated,
    together with the y-range the untruncated graph fills there; the grid
    builder marks them wholesale.
    """

    def __init__(self, base, lefts, rights, img_lo, img_hi, increasing, full,
                 eta, fwd, inv, fallback, label, params=None,
                 residue_rects=(), gap_law=None, predicted_mdim=None,
                 predicted_note=None, inv_ratio_bound=4.0):
        self.base = (float(base[0]), float(base[1]))
        self.lefts = np.asarray(lefts, dtype=float)
        self.rights = np.asarray(rights, dtype=float)
        if np.any(np.diff(self.lefts) <= 0) or np.any(self.rights[:-1] > self.lefts[1:] + 1e-15):
            raise ValueError("branch domains must be disjoint and position-sorted")
        self.img_lo = np.asarray(img_lo, dtype=float)
        self.img_hi = np.asarray(img_hi, dtype=float)
        self.increasing = np.asarray(increasing, dtype=bool)
        self.full = np.asarray(full, dtype=bool)
        self.eta = np.asarray(eta, dtype=float)
        self._fwd = fwd
        self._inv = inv
        self._fallback = fallback
        self.label = label
        self.params = dict(params or {})
        self.residue_rects = [tuple(map(float, r)) for r in residue_rects]
        self._gap_law = gap_law
        self.predicted_mdim = predicted_mdim
        self.predicted_note = predicted_note
        # bound on the variation of the inverse-chain derivative across one
        # level, used for sound early stopping in cylinder enumeration
        self.inv_ratio_bound = float(inv_ratio_bound)
        self.branches = _LazyBranches(self)
        self._critical = None
        self._width_order = None

    # -- basic queries ------------------------------------------------------

    @property
    def n_branches(self):
        return len(self.lefts)

    @property
    def widths(self):
        return self.rights - self.lefts

    @property
    def min_branch_width(self):
        return float(self.widths.min()) if self.n_branches else math.inf

    def width_order(self):
        if self._width_order is None:
            self._width_order = np.argsort(self.lefts - self.rights, kind="stable")
        return self._width_order

    @property
    def critical_set(self) -> CutOutSet:
        """Base minus the branch domains, as a cut-out set."""
        if self._critical is None:
            gaps = np.column_stack([self.lefts, self.rights])
            order = np.argsort(gaps[:, 0] - gaps[:, 1], kind="stable")
            self._critical = CutOutSet(self.base, gaps[order], gap_law=self._gap_law,
                                       dim_box_exact=self.predicted_mdim)
        return self._critical

    def critical_points(self) -> np.ndarray:
        """Branch endpoints plus base endpoints."""
        pts = np.concatenate([np.asarray(self.base), self.lefts, self.rights])
        return np.unique(pts)

    def _make_branch(self, i):
        def forward(x, _i=i):
            return float(self._fwd(np.asarray([_i]), np.asarray([x], dtype=float))[0])

        def inverse(y, _i=i):
            return float(self._inv(np.asarray([_i]), np.asarray([y], dtype=float))[0])

        return Branch((self.lefts[i], self.rights[i]), bool(self.increasing[i]),
                      forward, inverse, float(self.eta[i]),
                      (self.img_lo[i], self.img_hi[i]), bool(self.full[i]))

    # -- evaluation ---------------------------------------------------------

    def locate(self, x):
        """Branch index containing each point of x strictly inside its open
        domain, -1 elsewhere."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.lefts, x, side="right") - 1
        idx = np.clip(idx, 0, max(self.n_branches - 1, 0))
        if self.n_branches == 0:
            return np.full(x.shape, -1)
        inside = (x > self.lefts[idx]) & (x < self.rights[idx])
        return np.where(inside, idx, -1)

    def forward_array(self, x):
        """Total vectorized evaluation (fallback at non-branch points)."""
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        idx = self.locate(x)
        inside = idx >= 0
        if np.any(inside):
            out[inside] = self._fwd(idx[inside], x[inside])
        if np.any(~inside):
            out[~inside] = self._fallback(x[~inside])
        return out

    def __call__(self, x):
        return float(self.forward_array(np.asarray([x], dtype=float))[0])

    def branch_forward(self, idx, x):
        """Branch-indexed evaluation, valid on closed branch domains (one-sided
        limits at endpoints)."""
        return self._fwd(np.asarray(idx), np.asarray(x, dtype=float))

    def branch_inverse(self, idx, y):
        return self._inv(np.asarray(idx), np.asarray(y, dtype=float))

    def orbit_array(self, x, n):
        """Orbit segments x, Tx, ..., T^(n-1)x as an (n, len(x)) array."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty((n, x.size))
        out[0] = x
        for j in range(1, n):
            out[j] = self.forward_array(out[j - 1])
        return out

    def image_interval(self, i, lo, hi):
        """Closure of the image of [lo, hi] ∩ domain of branch i."""
        lo = max(lo, self.lefts[i])
        hi = min(hi, self.rights[i])
        a, b = self.branch_forward([i, i], [lo, hi])
        return (a, b) if a <= b else (b, a)


def bowen_distance(pmap: PiecewiseMap, x: float, y: float, n: int) -> float:
    """max over j < n of |T^j x - T^j y| (orbits totalized by fallback)."""
    if n < 1:
        raise ValueError("n must be positive")
    orb = pmap.orbit_array([x, y], n)
    return float(np.max(np.abs(orb[:, 0] - orb[:, 1])))


# ---------------------------------------------------------------------------
# cylinder enumeration

@dataclass(frozen=True)
class Cylinder:
    depth: int
    word: tuple
    interval: tuple[float, float]

    @property
    def length(self):
        return self.interval[1] - self.interval[0]

    @property
    def midpoint(self):
        return 0.5 * (self.interval[0] + self.interval[1])


def _pullback_vec(pmap, word, y):
    v = np.asarray(y, dtype=float)
    for b in reversed(word):
        v = pmap.branch_inverse(np.full(v.shape, b, dtype=np.int64), v)
    return v


_VEC_LIMIT = 200_000  # candidate-range size handled by one vectorized pass


def enumerate_cylinders(pmap: PiecewiseMap, depth: int, min_len: float,
                        node_budget: int = 10**7) -> list[Cylinder]:
    """Depth-first enumeration of inverse-branch cylinders.

    Any cylinder whose interval is shorter than ``min_len`` is pruned (all its
    refinements are shorter, so pruning mid-word is sound).  Enumeration cost
    is bounded by ``node_budget`` visited nodes; exceeding it raises
    BudgetExceededError carrying the partial count.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    if min_len < 0:
        raise ValueError("min_len must be nonnegative")
    out = []
    visited = 0
    lefts, rights = pmap.lefts, pmap.rights
    widths = pmap.widths
    worder = pmap.width_order()
    ratio = pmap.inv_ratio_bound

    # stack items: (word, cyl_lo, cyl_hi, img_lo, img_hi)
    stack = [((), pmap.base[0], pmap.base[1], pmap.base[0], pmap.base[1])]
    while stack:
        word, clo, chi, ilo, ihi = stack.pop()
        d = len(word)
        if d == depth:
            out.append(Cylinder(depth, word, (clo, chi)))
            continue
        visited += 1
        if visited > node_budget:
            raise BudgetExceededError("cylinder budget exceeded",
                                      partial_count=len(out))
        children = _children(pmap, word, clo, chi, ilo, ihi, min_len,
                             lefts, rights, widths, worder, ratio)
        stack.extend(children)
    return out


def _children(pmap, word, clo, chi, ilo, ihi, min_len,
              lefts, rights, widths, worder, ratio):
    b0 = int(np.searchsorted(rights, ilo, side="right"))
    b1 = int(np.searchsorted(lefts, ihi, side="left"))
    if b1 <= b0:
        return []
    if b1 - b0 <= _VEC_LIMIT:
        return _children_vectorized(pmap, word, clo, chi, ilo, ihi, min_len,
                                    lefts, rights, b0, b1)
    # huge families: visit branches widest-first and stop once no wider branch
    # can produce a long-enough cylinder (the inverse-chain derivative varies
    # by at most `ratio` per level across the image)
    kids = []
    max_slope = 0.0
    level_ratio = ratio ** (len(word) + 1) if np.isfinite(ratio) else math.inf
    for b in worder:
        if not b0 <= b < b1:
            continue
        b = int(b)
        lo = max(ilo, lefts[b])
        hi = min(ihi, rights[b])
        if hi <= lo:
            continue
        if word:
            a = float(_pullback_vec(pmap, word, [lo])[0])
            c = float(_pullback_vec(pmap, word, [hi])[0])
            new_lo, new_hi = (a, c) if a <= c else (c, a)
            new_lo, new_hi = max(new_lo, clo), min(new_hi, chi)
        else:
            new_lo, new_hi = lo, hi
        length = new_hi - new_lo
        if widths[b] > 0:
            max_slope = max(max_slope, length / widths[b])
        if length >= min_len:
            a, c = pmap.image_interval(b, lo, hi)
            kids.append((word + (b,), new_lo, new_hi, a, c))
        elif max_slope > 0 and np.isfinite(level_ratio):
            if widths[b] * max_slope * level_ratio < min_len:
                break
    return kids


def _children_vectorized(pmap, word, clo, chi, ilo, ihi, min_len,
                         lefts, rights, b0, b1):
    bs = np.arange(b0, b1)
    lo = np.maximum(ilo, lefts[bs])
    hi = np.minimum(ihi, rights[bs])
    ok = hi > lo
    bs, lo, hi = bs[ok], lo[ok], hi[ok]
    if len(bs) == 0:
        return []
    if word:
        a = _pullback_vec(pmap, word, lo)
        c = _pullback_vec(pmap, word, hi)
        new_lo = np.clip(np.minimum(a, c), clo, chi)
        new_hi = np.clip(np.maximum(a, c), clo, chi)
    else:
        new_lo, new_hi = lo, hi
    keep = (new_hi - new_lo) >= min_len
    if not np.any(keep):
        return []
    bs, lo, hi = bs[keep], lo[keep], hi[keep]
    new_lo, new_hi = new_lo[keep], new_hi[keep]
    va = pmap.branch_forward(bs, lo)
    vb = pmap.branch_forward(bs, hi)
    ia = np.minimum(va, vb)
    ib = np.maximum(va, vb)
    return [(word + (int(b),), float(l), float(h), float(x), float(y))
            for b, l, h, x, y in zip(bs, new_lo, new_hi, ia, ib)]


# ---------------------------------------------------------------------------
# catalog constructors

def make_gauss(k_max: int) -> PiecewiseMap:
    """Continued-fraction map x -> 1/x mod 1 with k_max materialized branches.

    Branch k lives on (1/(k+1), 1/k) with inverse y -> 1/(y+k); every branch
    is full.  0 and the branch endpoints 1/n map to 0.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    ks = np.arange(k_max, 0, -1, dtype=float)  # position-ascending
    lefts = 1.0 / (ks + 1.0)
    rights = 1.0 / ks

    def fwd(i, x):
        return 1.0 / x - ks[i]

    def inv(i, y):
        return 1.0 / (y + ks[i])

    def fallback(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        nz = x > 0
        out[nz] = (1.0 / x[nz]) % 1.0
        return out

    n = k_max
    return PiecewiseMap(
        (0.0, 1.0), lefts, rights,
        img_lo=np.zeros(n), img_hi=np.ones(n),
        increasing=np.zeros(n, dtype=bool), full=np.ones(n, dtype=bool),
        eta=ks**2, fwd=fwd, inv=inv, fallback=fallback,
        label="gauss", params={"k_max": k_max},
        residue_rects=[(0.0, lefts[0], 0.0, 1.0)],
        gap_law=lambda k: 1.0 / (np.asarray(k, dtype=float) * (np.asarray(k, dtype=float) + 1.0)),
        predicted_mdim=0.5,
        predicted_note="box dimension of the reciprocal critical set {1/n}",
        inv_ratio_bound=4.0)


def _mp_left(u, alpha):
    return u + 2.0**alpha * u**(1.0 + alpha)


def _mp_thresholds(alpha, n_max, tol):
    """u_0 = 1/2 and f_left(u_{m+1}) = u_m, solved by bisection."""
    us = np.empty(n_max)
    us[0] = 0.5
    for m in range(1, n_max):
        target = us[m - 1]
        lo, hi = 0.0, target
        if not (_mp_left(lo, alpha) < target < _mp_left(hi, alpha)):
            raise ValueError("threshold not bracketed")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _mp_left(mid, alpha) < target:
                lo = mid
            else:
                hi = mid
        us[m] = 0.5 * (lo + hi)
    return us


def make_mp_induced(alpha: float, n_max: int, tol: float = 1e-12) -> PiecewiseMap:
    """First-return map of the intermittent map f(x) = x + 2^a x^(1+a) on
    [0,1/2], 2x-1 on (1/2,1], to the interval (1/2, 1].

    The branch with return time m+1 occupies ((1+u_m)/2, (1+u_{m-1})/2) where
    u_0 = 1/2 and u_{m+1} solves u + 2^a u^(1+a) = u_m; all branches are full
    onto (1/2, 1).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if tol > 1e-10:
        raise ValueError("tol must be at most 1e-10")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    us = _mp_thresholds(alpha, n_max, tol)
    uprime = 0.5 * (1.0 + us)
    # branch i (position-ascending) has m = n_max-1-i left-piece applications
    ms = np.arange(n_max - 1, -1, -1)
    lefts = uprime[ms]
    rights = np.where(ms >= 1, uprime[np.maximum(ms - 1, 0)], 1.0)

    def fwd(i, x):
        y = 2.0 * np.asarray(x, dtype=float) - 1.0
        m = ms[i]
        t = 0
        active = m > t
        while np.any(active):
            y[active] = _mp_left(y[active], alpha)
            t += 1
            active = m > t
        return y

    def inv(i, y):
        w = np.asarray(y, dtype=float).copy()
        m = ms[i]
        t = 0
        active = m > t
        while np.any(active):
            lo = np.zeros(np.count_nonzero(active))
            hi = np.full(np.count_nonzero(active), 0.5)
            target = w[active]
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                below = _mp_left(mid, alpha) < target
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            w[active] = 0.5 * (lo + hi)
            t += 1
            active = m > t
        return 0.5 * (w + 1.0)

    def fallback(x):
        # direct first-return iteration, all points advanced in lockstep
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, 0.5)
        right = x > 0.5
        y = 2.0 * x[right] - 1.0
        active = y <= 0.5
        for _ in range(n_max + 4):
            if not np.any(active):
                break
            y[active] = _mp_left(y[active], alpha)
            active = y <= 0.5
        out[right] = np.minimum(y, 1.0)
        return out

    n = n_max
    return PiecewiseMap(
        (0.5, 1.0), lefts, rights,
        img_lo=np.full(n, 0.5), img_hi=np.ones(n),
        increasing=np.ones(n, dtype=bool), full=np.ones(n, dtype=bool),
        eta=np.full(n, 2.0), fwd=fwd, inv=inv, fallback=fallback,
        label="mp", params={"alpha": alpha, "n_max": n_max},
        residue_rects=[(0.5, lefts[0], 0.5, 1.0)],
        predicted_mdim=alpha / (1.0 + alpha),
        predicted_note="box dimension of the return-time critical set, a/(1+a)",
        inv_ratio_bound=8.0)


def _boxes_levels(k_max):
    ks = np.arange(1, k_max + 1, dtype=float)
    lengths = 6.0 / (math.pi**2 * ks**2)
    a = np.concatenate([[0.0], np.cumsum(lengths)])
    return a


def make_boxes_map(k_max: int = 2000, piece_budget: int = 10**5) -> PiecewiseMap:
    """Self-similar block map: on the k-th window J_k the map is the (k-1)-th
    iterate of the 3-branch tent f(x) = |1 - |3x - 1||, conjugated onto J_k.

    Windows are a_k = sum of 6/(pi^2 j^2), normalized so that they exhaust
    [0,1].  Blocks whose 3^(k-1) monotone pieces exceed ``piece_budget`` are
    not materialized as branches; their squares J_k x J_k are recorded as
    residue rectangles (exact at grid scales coarser than the piece width).
    1 is fixed; window endpoints a_k are fixed as well.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    a = _boxes_levels(k_max)
    lefts_l, rights_l, slopes_l, icepts_l, etas_l = [], [], [], [], []
    k_mat = 0
    for k in range(1, k_max + 1):
        pieces = 3 ** (k - 1)
        if pieces > piece_budget:
            break
        k_mat = k
        blo, bhi = a[k - 1], a[k]
        w = (bhi - blo) / pieces
        p = np.arange(pieces)
        ones = np.zeros(pieces, dtype=int)
        q = p.copy()
        for _ in range(k - 1):
            ones += (q % 3 == 1)
            q //= 3
        dec = (ones % 2).astype(bool)
        dom_lo = blo + p * w
        dom_hi = blo + (p + 1) * w
        slope = np.where(dec, -float(pieces), float(pieces))
        # increasing: F(dom_lo)=blo; decreasing: F(dom_lo)=bhi
        icept = np.where(dec, bhi + float(pieces) * dom_lo, blo - float(pieces) * dom_lo)
        lefts_l.append(dom_lo)
        rights_l.append(dom_hi)
        slopes_l.append(slope)
        icepts_l.append(icept)
        etas_l.append(np.full(pieces, float(pieces)))
    lefts = np.concatenate(lefts_l)
    rights = np.concatenate(rights_l)
    slopes = np.concatenate(slopes_l)
    icepts = np.concatenate(icepts_l)
    etas = np.concatenate(etas_l)
    img_lo = np.minimum(slopes * lefts + icepts, slopes * rights + icepts)
    img_hi = np.maximum(slopes * lefts + icepts, slopes * rights + icepts)

    def fwd(i, x):
        return slopes[i] * np.asarray(x, dtype=float) + icepts[i]

    def inv(i, y):
        return (np.asarray(y, dtype=float) - icepts[i]) / slopes[i]

    def _tent(x):
        return np.abs(1.0 - np.abs(3.0 * x - 1.0))

    def fallback(x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        for j, xv in enumerate(x.ravel()):
            if xv >= a[-1]:
                # truncation tail: windows there have width below any working
                # scale, and the map moves points by less than a window
                out.ravel()[j] = xv
                continue
            k = int(np.searchsorted(a, xv, side="right"))
            k = min(max(k, 1), len(a) - 1)
            blo, bhi = a[k - 1], a[k]
            if xv == blo or xv == bhi:
                out.ravel()[j] = xv
                continue
            t = (xv - blo) / (bhi - blo)
            for _ in range(k - 1):
                t = float(_tent(t))
            out.ravel()[j] = blo + t * (bhi - blo)
        return out

    residue = [(a[k - 1], a[k], a[k - 1], a[k]) for k in range(k_mat + 1, k_max + 1)]
    residue.append((a[-1], 1.0, a[-1], 1.0))
    return PiecewiseMap(
        (0.0, 1.0), lefts, rights, img_lo, img_hi,
        increasing=slopes > 0, full=np.zeros(len(lefts), dtype=bool),
        eta=etas, fwd=fwd, inv=inv, fallback=fallback,
        label="boxes", params={"k_max": k_max, "piece_budget": piece_budget,
                               "k_materialized": k_mat},
        residue_rects=residue,
        predicted_mdim=1.0,
        predicted_note="interval box dimension: window entropies log(3^(k-1)) exhaust every scale",
        inv_ratio_bound=1.0)


def make_sin_inv(k_max: int = 4000) -> PiecewiseMap:
    """The oscillatory map x -> sin(1/|x|) on [-1,1], 0 -> 0.

    Branches are maximal monotone pieces between consecutive extrema
    2/((2k+1)pi), truncated at k_max pieces per side; all interior pieces are
    full onto (-1,1).  The derivative vanishes at the extrema, so no positive
    branch-wise expansion bound exists (eta = 0).
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    xs = 2.0 / ((2.0 * np.arange(k_max + 1) + 1.0) * math.pi)  # x_0 > x_1 > ...
    # positive side, position-ascending: branch t occupies (x_{j+1}, x_j)
    # with j = k_max-1-t; T(x_j) = sin((2j+1)pi/2) = (-1)^j, so the branch is
    # increasing exactly when j is even
    pos_lefts = xs[1:][::-1]
    pos_rights = xs[:-1][::-1]
    pos_j = np.arange(k_max - 1, -1, -1)
    pos_inc = pos_j % 2 == 0
    # negative side mirrors the positive one (the map is even), directions flip
    neg_lefts = -xs[:-1]
    neg_rights = -xs[1:]
    neg_j = np.arange(k_max)
    neg_inc = neg_j % 2 == 1
    # outermost partial pieces (-1, -x_0) and (x_0, 1) are not full branches
    lefts = np.concatenate([(-1.0,), neg_lefts, pos_lefts, (xs[0],)])
    rights = np.concatenate([(-xs[0],), neg_rights, pos_rights, (1.0,)])
    j_par = np.concatenate([(-1,), neg_j, pos_j, (-1,)]).astype(int)
    side = np.concatenate([(-1,), -np.ones(k_max, dtype=int),
                           np.ones(k_max, dtype=int), (1,)])
    inc = np.concatenate([(True,), neg_inc, pos_inc, (False,)])
    sin1 = math.sin(1.0)
    img_lo = np.concatenate([(sin1,), np.full(2 * k_max, -1.0), (sin1,)])
    img_hi = np.concatenate([(1.0,), np.full(2 * k_max, 1.0), (1.0,)])
    full = np.concatenate([(False,), np.ones(2 * k_max, dtype=bool), (False,)])

    def fwd(i, x):
        return np.sin(1.0 / np.abs(np.asarray(x, dtype=float)))

    def inv(i, y):
        y = np.clip(np.asarray(y, dtype=float), -1.0, 1.0)
        j = j_par[i]
        theta = np.where(j < 0, np.arcsin(y),
                         (j + 1) * math.pi + (-1.0) ** (j + 1) * np.arcsin(y))
        return side[i] / theta

    def fallback(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        nz = x != 0
        out[nz] = np.sin(1.0 / np.abs(x[nz]))
        return out

    n = 2 * k_max + 2
    return PiecewiseMap(
        (-1.0, 1.0), lefts, rights, img_lo, img_hi,
        increasing=inc, full=full, eta=np.zeros(n),
        fwd=fwd, inv=inv, fallback=fallback,
        label="sininv", params={"k_max": k_max},
        residue_rects=[(-xs[-1], xs[-1], -1.0, 1.0)],
        predicted_mdim=0.5,
        predicted_note="box dimension of the extrema set {2/((2k+1)pi)}",
        inv_ratio_bound=math.inf)


def make_affine_full(cut: CutOutSet) -> PiecewiseMap:
    """Full affine branch on every gap of a cut-out set: the increasing
    bijection from the gap onto the interior of the base."""
    if len(cut.gaps) < 1:
        raise ValueError("cut-out set must have at least one gap")
    order = np.argsort(cut.gaps[:, 0], kind="stable")
    lefts = cut.gaps[order, 0]
    rights = cut.gaps[order, 1]
    blo, bhi = cut.base
    slopes = (bhi - blo) / (rights - lefts)
    icepts = blo - slopes * lefts

    def fwd(i, x):
        return slopes[i] * np.asarray(x, dtype=float) + icepts[i]

    def inv(i, y):
        return (np.asarray(y, dtype=float) - icepts[i]) / slopes[i]

    def fallback(x):
        return np.full(np.asarray(x, dtype=float).shape, blo)

    n = len(lefts)
    segs = cut.segments()
    residue = [(lo, hi, blo, bhi) for lo, hi in segs if hi - lo > 1e-12 * (bhi - blo)]
    law = cut.gap_law

    def scaled_law(k):
        return np.asarray(law(k), dtype=float) if law is not None else None

    return PiecewiseMap(
        (blo, bhi), lefts, rights,
        img_lo=np.full(n, blo), img_hi=np.full(n, bhi),
        increasing=np.ones(n, dtype=bool), full=np.ones(n, dtype=bool),
        eta=slopes, fwd=fwd, inv=inv, fallback=fallback,
        label="affine", params={"n_gaps": n},
        residue_rects=residue,
        gap_law=law,
        predicted_mdim=cut.dim_box_exact,
        predicted_note="box dimension of the defining cut-out set"
        if cut.dim_box_exact is not None else None,
        inv_ratio_bound=1.0)


def make_pitfall_map(n_max: int = 40) -> PiecewiseMap:
    """Full affine branches on the gaps of {e^-n} left of 1/e, constant 0 on
    [1/e, 1].

    The graph itself carries only logarithmically many wide branches (its
    honest entropy growth is flat), but the closure of the graph contains
    [1/e,1] x {0} and {0} x [1/e,1], a delayed loop of dimension 1/2: closing
    the transition set before generating sequences manufactures orbits.  Note
    the occupancy matrix cannot see the difference (a graph and its closure
    meet exactly the same grid cells), so the spectral upper bound for this
    map is loose by construction.
    """
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    pts = np.exp(-np.arange(n_max, 0, -1, dtype=float))  # e^-n_max .. e^-1
    lefts = pts[:-1]
    rights = pts[1:]
    slopes = 1.0 / (rights - lefts)
    icepts = -slopes * lefts

    def fwd(i, x):
        return slopes[i] * np.asarray(x, dtype=float) + icepts[i]

    def inv(i, y):
        return (np.asarray(y, dtype=float) - icepts[i]) / slopes[i]

    def fallback(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    n = len(lefts)
    return PiecewiseMap(
        (0.0, 1.0), lefts, rights, np.zeros(n), np.ones(n),
        increasing=np.ones(n, dtype=bool), full=np.ones(n, dtype=bool),
        eta=slopes, fwd=fwd, inv=inv, fallback=fallback,
        label="pitfall", params={"n_max": n_max},
        residue_rects=[(0.0, pts[0], 0.0, 1.0),
                       (math.exp(-1.0), 1.0, 0.0, 0.0)],
        predicted_mdim=0.0,
        predicted_note="box dimension of {e^-n} is 0; "
                       "the closure-augmented relation jumps to 1/2",
        inv_ratio_bound=4.0)


def make_identity() -> PiecewiseMap:
    """Identity on [0,1] as a single full affine branch."""
    m = make_affine_full(CutOutSet((0.0, 1.0), np.array([[0.0, 1.0]])))
    m.label = "identity"
    # fixed endpoints rather than the generic constant fallback
    m._fallback = lambda x: np.asarray(x, dtype=float)
    m.predicted_mdim = 0.0
    m.predicted_note = "finite-entropy map"
    return m
