"""Minimal hitting set enumeration with resumable state.

Candidate LHSs for an RHS attribute are exactly the minimal hitting sets
(transversals) of its sub-hypergraph. Enumeration uses an MMCS-style
branch-and-prune search over an uncovered edge's vertices, with critical-edge
bookkeeping for minimality. After new edges arrive, enumeration resumes
instead of restarting: stored transversals that hit every new edge are
retained; the rest are retired, and each retired set seeds a constrained
search for the minimal transversals that strictly contain it. The union of
retained and added sets equals a fresh enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ._kernels import kernels_for
from .bitset import bits
from .errors import StalenessError
from .hypergraph import SubHypergraph


@dataclass
class TransversalStore:
    rhs: int
    mhs: set[int] = field(default_factory=set)
    generation: int = -1  # hypergraph generation mhs was computed against

    @property
    def initialized(self) -> bool:
        return self.generation >= 0


@dataclass
class ResumeResult:
    retained: set[int]
    added: set[int]
    retired: set[int]


def _order_rank(h: SubHypergraph) -> list[int]:
    """Branch vertices by ascending edge frequency, ties by attribute index."""
    freq = [0] * h.num_attrs
    for e in h.edges:
        for v in bits(e):
            freq[v] += 1
    order = sorted(range(h.num_attrs), key=lambda v: (freq[v], v))
    rank = [0] * h.num_attrs
    for r, v in enumerate(order):
        rank[v] = r
    return rank


def enumerate_transversals(h: SubHypergraph) -> set[int]:
    """All minimal transversals of ``h``; {0} (the empty LHS) if it has no edges."""
    if h.poisoned:
        return set()
    kern = kernels_for(h.num_attrs)
    return set(kern.mmcs_extend(h.edges, 0, h.vertices, _order_rank(h)))


def fresh_store(h: SubHypergraph) -> TransversalStore:
    store = TransversalStore(h.rhs)
    store.mhs = enumerate_transversals(h)
    store.generation = h.generation
    return store


def resume(store: TransversalStore, h: SubHypergraph, new_edges: list[int]) -> ResumeResult:
    """Refresh ``store`` after ``new_edges`` were inserted into ``h``.

    Every minimal transversal of the grown hypergraph either already hit the
    new edges (retained) or strictly contains a retired one, so extending each
    retired set and re-minimising the union reproduces a fresh enumeration.
    """
    if h.poisoned:
        retired = set(store.mhs)
        store.mhs = set()
        store.generation = h.generation
        return ResumeResult(set(), set(), retired)
    if store.generation + len(new_edges) != h.generation:
        raise StalenessError(
            f"store at generation {store.generation} cannot absorb "
            f"{len(new_edges)} edges to reach generation {h.generation}"
        )
    retained, retired = set(), set()
    for x in store.mhs:
        if all(x & e for e in new_edges):
            retained.add(x)
        else:
            retired.add(x)
    added: set[int] = set()
    if retired:
        kern = kernels_for(h.num_attrs)
        edges = h.edges
        rank = _order_rank(h)
        for x in sorted(retired):
            added.update(kern.mmcs_extend(edges, x, h.vertices & ~x, rank))
        added -= retained
        added = _filter_minimal(retained | added) - retained
    store.mhs = retained | added
    store.generation = h.generation
    return ResumeResult(retained, added, retired)


def _filter_minimal(masks: set[int]) -> set[int]:
    """Drop any set that strictly contains another (defensive re-check)."""
    out = set()
    ordered = sorted(masks, key=lambda x: (x.bit_count(), x))
    for x in ordered:
        if not any(y & x == y for y in out):
            out.add(x)
    return out


def critical_edge_witness(h: SubHypergraph, x: int) -> bool:
    """True iff ``x`` hits every edge and each of its vertices is the sole
    cover of some edge (the critical-edge characterisation of minimality)."""
    edges = h.edges
    if not all(x & e for e in edges):
        return False
    if x == 0:
        return True  # vacuous transversal of an edgeless hypergraph
    if not edges:
        return False
    for v in bits(x):
        if not any(e & x == (1 << v) for e in edges):
            return False
    return True
