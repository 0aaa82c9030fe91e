"""Difference sets of tuple pairs and their projections per RHS attribute.

A difference set is the attribute mask on which two tuples disagree. Pairs
that agree everywhere produce the empty set and are discarded. Projecting a
pool of difference sets "modulo A" keeps the sets containing A, with A
removed; a resulting empty set is kept as a sentinel (it poisons the
sub-hypergraph for A: no FD with that RHS can hold).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from ._kernels import kernels_for
from .relation import DeltaRelation, EncodedRelation


@dataclass(frozen=True)
class PairSample:
    pairs: tuple[tuple[int, int], ...]
    seed: int
    epsilon: float


def diff(rel, t1: int, t2: int) -> int:
    """Mask of attributes where rows t1 and t2 differ (rows may be in r or delta)."""
    mask = 0
    for a in range(rel.m):
        if rel.code(a, t1) != rel.code(a, t2):
            mask |= 1 << a
    return mask


def _pair_offset(i: int, n: int) -> int:
    # first linear index of pairs (i, *) in lexicographic order
    return i * (2 * n - i - 1) // 2


def _unrank_pair(t: int, n: int) -> tuple[int, int]:
    # invert the lexicographic pair index with exact integer arithmetic
    d = (2 * n - 1) * (2 * n - 1) - 8 * t
    i = ((2 * n - 1) - math.isqrt(d)) // 2
    while _pair_offset(i + 1, n) <= t:
        i += 1
    while _pair_offset(i, n) > t:
        i -= 1
    j = t - _pair_offset(i, n) + i + 1
    return i, j


def sample_pairs(n: int, epsilon: float, seed: int) -> PairSample:
    """Uniform sample without replacement of round(C(n,2)**epsilon) row pairs.

    Pair indices are unranked deterministically, so the same seed reproduces
    the same sample at any n.
    """
    if n < 2:
        return PairSample((), seed, epsilon)
    total = n * (n - 1) // 2
    k = min(int(math.pow(total, epsilon) + 0.5), total)
    rng = random.Random(seed)
    indices = rng.sample(range(total), k)
    pairs = tuple(sorted(_unrank_pair(t, n) for t in indices))
    return PairSample(pairs, seed, epsilon)


def sampled_diffs(rel: EncodedRelation, sample: PairSample) -> set[int]:
    """Difference sets of the sampled pairs, deduplicated, empties dropped."""
    if not sample.pairs:
        return set()
    pairs = np.asarray(sample.pairs, dtype=np.int64)
    return kernels_for(rel.m).diff_masks_for_pairs(rel.matrix(), pairs)


def pairwise_diffs(delta: DeltaRelation) -> set[int]:
    """Difference sets over all pairs within the delta batch."""
    if delta.n_delta < 2:
        return set()
    return kernels_for(delta.m).diff_masks_all_pairs(delta.matrix())


def modulo(diffs, attr: int) -> set[int]:
    """Project difference sets modulo one attribute: {D \\ {A} | A in D}."""
    bit = 1 << attr
    return {d & ~bit for d in diffs if d & bit}
