"""Scale-indexed entropy estimates and metric-mean-dimension slope fits.

Per scale eps the upper estimate is log of a certified spectral bound on the
grid occupancy matrix; the lower estimate is the best separated-set count
available for the transition structure (full branches, pruned cylinders, or
delayed-shift separation).  Slopes of both against log(1/eps) sandwich the
metric mean dimension.

The per-depth cylinder values are finite-n surrogates of a limit in n; they
are reported with their depth so non-monotone trends stay visible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import separated_count
from .dynamics import PiecewiseMap, enumerate_cylinders, BudgetExceededError
from .transition import TransitionSet, grid_matrix, graph_of
from .spectral import power_iteration, gershgorin_bound

__all__ = ["EntropyRecord", "MdimEstimate", "geometric_ladder",
           "eps_entropy_upper", "eps_entropy_lower_branches",
           "eps_entropy_lower_cylinders", "bowen_separated_count",
           "mdim_sandwich", "iterate_count_check", "write_entropy_csv"]


@dataclass(frozen=True)
class EntropyRecord:
    eps: float
    h_lower: float
    h_upper: float
    n_used: int
    method_lower: str
    method_upper: str
    flags: tuple = ()


@dataclass
class MdimEstimate:
    slope_lower: float
    slope_upper: float
    residual_lower: float
    residual_upper: float
    eps_range: tuple
    records: list
    predicted: float | None = None
    predicted_note: str | None = None

    def summary(self):
        lines = ["sandwich: lower slope %.4f (resid %.3f), upper slope %.4f (resid %.3f)"
                 % (self.slope_lower, self.residual_lower,
                    self.slope_upper, self.residual_upper)]
        if self.predicted is not None:
            lines.append("predicted: %.4f (%s)" % (self.predicted, self.predicted_note or ""))
        return "\n".join(lines)


def geometric_ladder(start: float = 2.0**-6, stop: float = 2.0**-18,
                     ratio: float = 2.0) -> list[float]:
    """Scales start, start/ratio, ... down to stop (inclusive up to rounding)."""
    if ratio <= 1.0:
        raise ValueError("ladder ratio must exceed 1")
    if not 0 < stop <= start:
        raise ValueError("need 0 < stop <= start")
    out = []
    e = float(start)
    while e >= stop * (1 - 1e-9):
        out.append(e)
        e /= ratio
    return out


# ---------------------------------------------------------------------------
# upper estimates

def eps_entropy_upper(gamma: TransitionSet, eps: float, closed_boxes: bool = False,
                      tol: float = 1e-8, max_iter: int = 10**4) -> float:
    """log of the best certified spectral upper bound for the eps-grid matrix."""
    return _upper_detail(gamma, eps, closed_boxes, tol, max_iter)[0]


def _upper_detail(gamma, eps, closed_boxes=False, tol=1e-8, max_iter=10**4):
    A = grid_matrix(gamma, eps, closed_boxes=closed_boxes)
    sr = power_iteration(A, tol=tol, max_iter=max_iter)
    gersh = sr.certified_upper
    if sr.fallback or sr.estimate >= gersh:
        r, method = gersh, "gershgorin"
    else:
        r, method = sr.estimate, "power"
    flags = []
    if A.truncation_warning:
        flags.append("truncated")
    if sr.fallback:
        flags.append("spectral-fallback")
    if sr.periodic:
        flags.append("periodic")
    h = math.log(r) if r > 1.0 else 0.0
    return h, method, tuple(flags), A, sr


# ---------------------------------------------------------------------------
# lower estimates

def eps_entropy_lower_branches(pmap: PiecewiseMap, eps: float):
    """log of the number of alternately selected full branches wider than eps.

    Alternation keeps the chosen domains pairwise separated by at least eps
    (each skipped neighbor is itself wider than eps), so cylinders over the
    chosen branches give a separated-set count valid at every depth.
    Returns (value, count, flagged); flagged is True when the map has no full
    branches at all.
    """
    wide = pmap.full & (pmap.widths >= eps)
    n_sel = int(np.count_nonzero(wide))
    if not np.any(pmap.full):
        return 0.0, 0, True
    count = (n_sel + 1) // 2
    return (math.log(count) if count >= 1 else 0.0), count, False


def eps_entropy_lower_cylinders(pmap: PiecewiseMap, eps: float, depth: int,
                                node_budget: int = 10**7):
    """(1/depth) log of an eps-separated count extracted from depth-cylinders.

    One point per cylinder of length >= eps, thinned greedily until pairwise
    Bowen-d_depth separation holds.  Budget overruns downgrade to the partial
    count, which is still a valid lower estimate.
    Returns (value, count, flags).
    """
    flags = ()
    try:
        cyls = enumerate_cylinders(pmap, depth, min_len=eps, node_budget=node_budget)
    except BudgetExceededError as exc:
        count = max(exc.partial_count, 1)
        return math.log(count) / depth, count, ("budget-partial",)
    if not cyls:
        return 0.0, 0, ("no-cylinders",)
    mids = np.sort(np.array([c.midpoint for c in cyls]))
    count = _thin_separated(pmap.orbit_array(mids, depth), eps)
    return math.log(count) / depth, count, flags


def _thin_separated(orbits, eps):
    """Greedy keep-first thinning of column points to pairwise Bowen
    separation >= eps; columns must be sorted by the 0-th coordinate."""
    n, N = orbits.shape
    kept = []
    kept_x = []
    for i in range(N):
        x = orbits[0, i]
        ok = True
        for j in range(len(kept) - 1, -1, -1):
            if x - kept_x[j] >= eps:
                break
            if np.max(np.abs(orbits[:, i] - orbits[:, kept[j]])) < eps:
                ok = False
                break
        if ok:
            kept.append(i)
            kept_x.append(x)
    return len(kept)


def bowen_separated_count(steps, eps: float, base: tuple[float, float],
                          spacing: float | None = None) -> int:
    """Greedy separated-point count for the orbit metric of a composition.

    ``steps`` is the sequence of maps applied in order; the metric is the max
    of coordinate distances along (x, s_1 x, s_2 s_1 x, ...).  Candidates are
    a uniform grid of spacing eps/4 (by default) over the base interval; the
    greedy undercounts the true maximal separated set, so the value stays a
    valid lower-type estimate.
    """
    lo, hi = base
    if spacing is None:
        spacing = eps / 4.0
    N = int(math.floor((hi - lo) / spacing + 1e-9)) + 1
    xs = lo + spacing * np.arange(N)
    xs[-1] = min(xs[-1], hi)
    orbits = np.empty((len(steps) + 1, N))
    orbits[0] = xs
    for j, s in enumerate(steps):
        orbits[j + 1] = s.forward_array(orbits[j])
    return _thin_separated(orbits, eps)


# ---------------------------------------------------------------------------
# sandwich assembly

def _lower_detail(gamma, eps, depth_schedule, node_budget):
    if gamma.kind == "graph":
        pmap = gamma.maps[0]
        best, n_used, method, flags = 0.0, 0, "none", ()
        v, count, flagged = eps_entropy_lower_branches(pmap, eps)
        if not flagged and v >= best:
            best, n_used, method = v, 1, "branches"
        for depth in depth_schedule:
            v, count, fl = eps_entropy_lower_cylinders(pmap, eps, depth, node_budget)
            if v > best:
                best, n_used, method, flags = v, depth, "cylinders", fl
        return best, n_used, method, flags
    if gamma.kind == "delayed":
        k = gamma.delay
        count = separated_count(gamma.points, eps)
        return math.log(count) / k if count >= 1 else 0.0, k, "delayed-sep", ()
    if gamma.kind == "boxes":
        lo, hi = gamma.base
        for (xlo, xhi, ylo, yhi) in gamma.rects:
            if xlo <= lo and xhi >= hi and ylo <= lo and yhi >= hi:
                count = int(math.floor((hi - lo) / eps + 1e-9)) + 1
                return math.log(count), 1, "interval-sep", ()
        return 0.0, 0, "none", ("no-lower-method",)
    return 0.0, 0, "none", ("no-lower-method",)


def _fit(ladder, values):
    x = np.log(1.0 / np.asarray(ladder))
    y = np.asarray(values, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    return float(slope), residual


def mdim_sandwich(gamma: TransitionSet, ladder, depth_schedule=(2, 3, 4),
                  node_budget: int = 10**7, closed_boxes: bool = False,
                  threads: int = 1) -> MdimEstimate:
    """Entropy sandwich across a decreasing scale ladder with slope fits."""
    ladder = [float(e) for e in ladder]
    if len(ladder) < 4:
        raise ValueError("ladder too short")
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly decreasing")

    def one(eps):
        h_up, m_up, flags_up, _, _ = _upper_detail(gamma, eps, closed_boxes)
        h_lo, n_used, m_lo, flags_lo = _lower_detail(gamma, eps, depth_schedule,
                                                     node_budget)
        return EntropyRecord(eps, h_lo, h_up, n_used, m_lo, m_up,
                             flags_up + flags_lo)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(one, ladder))
    else:
        records = [one(e) for e in ladder]
    slope_lo, resid_lo = _fit(ladder, [r.h_lower for r in records])
    slope_up, resid_up = _fit(ladder, [r.h_upper for r in records])
    return MdimEstimate(slope_lo, slope_up, resid_lo, resid_up,
                        (min(ladder), max(ladder)), records,
                        predicted=gamma.predicted_mdim,
                        predicted_note=gamma.predicted_note)


def iterate_count_check(pmap: PiecewiseMap, k: int, n: int, eps: float,
                        max_candidates: int = 20000) -> bool:
    """Separated sets for the k-th iterate embed into base-map separated sets.

    Builds a greedy eps-separated set for the k-th iterate's depth-n orbit
    metric and verifies it is eps-separated for the base map's orbit metric of
    depth (n-1)k + 1 (the iterate's observation times are a subset).
    """
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    lo, hi = pmap.base
    spacing = max(eps / 4.0, (hi - lo) / max_candidates)
    N = int(math.floor((hi - lo) / spacing + 1e-9)) + 1
    xs = lo + spacing * np.arange(N)
    depth_base = (n - 1) * k + 1
    orbits = pmap.orbit_array(xs, depth_base)
    iterate_view = orbits[:: k]  # times 0, k, ..., (n-1)k
    kept = []
    for i in range(N):
        ok = True
        for j in kept:
            if np.max(np.abs(iterate_view[:, i] - iterate_view[:, j])) < eps:
                ok = False
                break
        if ok:
            kept.append(i)
    for a in range(len(kept)):
        for b in range(a + 1, len(kept)):
            if np.max(np.abs(orbits[:, kept[a]] - orbits[:, kept[b]])) < eps:
                return False
    return True


def write_entropy_csv(path, records):
    """CSV export: epsilon,n,h_lower,h_upper,method_lower,method_upper."""
    with open(path, "w") as fh:
        fh.write("epsilon,n,h_lower,h_upper,method_lower,method_upper\n")
        for r in records:
            fh.write("%s,%d,%.12g,%.12g,%s,%s\n"
                     % (np.format_float_positional(r.eps, trim="-"), r.n_used,
                        r.h_lower, r.h_upper, r.method_lower, r.method_upper))
