"""Free semigroup actions of finitely many interval maps: random-walk entropy
estimates and union-graph (Friedland) spectral upper bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import PiecewiseMap, make_boxes_map
from .entropy import bowen_separated_count, eps_entropy_upper
from .transition import friedland_set

__all__ = ["RandomWalk", "SemigroupSpec", "make_zero_entropy_pair",
           "walk_entropy", "friedland_upper"]


@dataclass(frozen=True)
class RandomWalk:
    """Distribution over generator-index sequences.

    kind 'bernoulli': i.i.d. letters drawn with ``weights``.
    kind 'atomic': mixture of periodic words (tuples of 0-based generator
    indices) with ``weights``.
    """

    kind: str
    weights: tuple
    words: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("bernoulli", "atomic"):
            raise ValueError("walk kind must be 'bernoulli' or 'atomic'")
        w = np.asarray(self.weights, dtype=float)
        if abs(w.sum() - 1.0) > 1e-12 or np.any(w < 0):
            raise ValueError("weights must be a probability vector")
        if self.kind == "atomic":
            if len(self.words) != len(self.weights):
                raise ValueError("one weight per word")
            if any(len(word) == 0 for word in self.words):
                raise ValueError("periodic words must be nonempty")

    @staticmethod
    def bernoulli(weights, seed=0):
        return RandomWalk("bernoulli", tuple(weights), seed=seed)

    @staticmethod
    def atomic(words, weights=None):
        words = tuple(tuple(w) for w in words)
        if weights is None:
            weights = tuple(1.0 / len(words) for _ in words)
        return RandomWalk("atomic", tuple(weights), words=words)


@dataclass(frozen=True)
class SemigroupSpec:
    generators: tuple
    walk: RandomWalk

    def __post_init__(self):
        if not self.generators:
            raise ValueError("need at least one generator")
        base = self.generators[0].base
        for g in self.generators[1:]:
            if abs(g.base[0] - base[0]) > 1e-12 or abs(g.base[1] - base[1]) > 1e-12:
                raise ValueError("generators must share the base interval")

    @property
    def base(self):
        return self.generators[0].base


def make_zero_entropy_pair(k_max: int = 2000, piece_budget: int = 10**5):
    """Two zero-entropy continuous maps whose joint action has positive
    metric mean dimension.

    g1 is 0 on [0,1/2] and a half-scale copy of the block map on [1/2,1];
    g2 shifts [0,1/2] up by 1/2 and is 1 on [1/2,1].  Both squares are
    constant maps (g1 o g1 = 0, g2 o g2 = 1), yet compositions g2 o g1
    reproduce the block map at half scale.
    """
    T = make_boxes_map(k_max=k_max, piece_budget=piece_budget)

    # g1 branches: images of T's branches under the conjugation x -> (1+x)/2,
    # values halved; the flat left half is an exact residue segment
    lefts = 0.5 * (1.0 + T.lefts)
    rights = 0.5 * (1.0 + T.rights)
    img_lo = 0.5 * T.img_lo
    img_hi = 0.5 * T.img_hi

    def g1_fwd(i, x):
        return 0.5 * T.branch_forward(i, 2.0 * np.asarray(x, dtype=float) - 1.0)

    def g1_inv(i, y):
        w = T.branch_inverse(i, 2.0 * np.asarray(y, dtype=float))
        return 0.5 * (1.0 + w)

    def g1_fallback(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        right = x > 0.5
        if np.any(right):
            out[right] = 0.5 * T.forward_array(2.0 * x[right] - 1.0)
        return out

    residue = [(0.0, 0.5, 0.0, 0.0)]
    residue += [(0.5 * (1 + xlo), 0.5 * (1 + xhi), 0.5 * ylo, 0.5 * yhi)
                for (xlo, xhi, ylo, yhi) in T.residue_rects]
    g1 = PiecewiseMap((0.0, 1.0), lefts, rights, img_lo, img_hi,
                      increasing=T.increasing, full=np.zeros(T.n_branches, bool),
                      eta=T.eta, fwd=g1_fwd, inv=g1_inv, fallback=g1_fallback,
                      label="zero-pair-g1", residue_rects=residue,
                      predicted_mdim=0.0, predicted_note="zero-entropy generator",
                      inv_ratio_bound=1.0)

    def g2_fwd(i, x):
        return np.asarray(x, dtype=float) + 0.5

    def g2_inv(i, y):
        return np.asarray(y, dtype=float) - 0.5

    def g2_fallback(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0.5, x + 0.5, 1.0)

    g2 = PiecewiseMap((0.0, 1.0), np.array([0.0]), np.array([0.5]),
                      img_lo=np.array([0.5]), img_hi=np.array([1.0]),
                      increasing=np.array([True]), full=np.array([False]),
                      eta=np.array([1.0]), fwd=g2_fwd, inv=g2_inv,
                      fallback=g2_fallback, label="zero-pair-g2",
                      residue_rects=[(0.5, 1.0, 1.0, 1.0)],
                      predicted_mdim=0.0, predicted_note="zero-entropy generator",
                      inv_ratio_bound=1.0)
    return g1, g2


def _word_steps(generators, word, n):
    """First n-1 letters of the periodic extension of `word`, as maps."""
    reps = -(-max(n - 1, 0) // len(word))
    seq = (tuple(word) * max(reps, 1))[: max(n - 1, 0)]
    return [generators[i] for i in seq]


def walk_entropy(spec: SemigroupSpec, eps: float, n: int, samples: int = 64) -> float:
    """(1/n) log of the walk-averaged separated-point count at scale eps.

    Per word the count is a greedy maximal separated set under the word's
    orbit metric (coordinates x, g_{w_1} x, ..., up to n-1 applications),
    extracted from a candidate grid of spacing eps/4; for atomic walks the
    average is exact over the listed periodic words, for Bernoulli walks it is
    a seeded Monte Carlo over ``samples`` words.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if eps <= 0:
        raise ValueError("eps must be positive")
    gens = spec.generators
    walk = spec.walk
    if walk.kind == "atomic":
        counts = [bowen_separated_count(_word_steps(gens, w, n), eps, spec.base)
                  for w in walk.words]
        avg = float(np.dot(walk.weights, counts))
    else:
        rng = np.random.default_rng(walk.seed)
        p = np.asarray(walk.weights)
        total = 0.0
        for _ in range(samples):
            letters = rng.choice(len(gens), size=max(n - 1, 0), p=p)
            steps = [gens[i] for i in letters]
            total += bowen_separated_count(steps, eps, spec.base)
        avg = total / samples
    return math.log(max(avg, 1.0)) / n


def friedland_upper(spec: SemigroupSpec, eps: float, closed_boxes: bool = False) -> float:
    """Certified upper bound via the union-of-graphs transition set."""
    return eps_entropy_upper(friedland_set(spec.generators), eps,
                             closed_boxes=closed_boxes)
