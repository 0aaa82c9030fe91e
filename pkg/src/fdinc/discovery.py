"""One-time discovery: seed partial hypergraphs from sampled pairs, then
iterate candidate enumeration and grouped validation to a fixpoint.

Per RHS attribute the loop is: consume newly logged difference sets into the
sub-hypergraph, resume transversal enumeration, validate the not-yet-decided
candidates against the full relation, and log the witness difference sets of
failures. Witness diffs are broadcast: one shared log feeds every
sub-hypergraph (projected modulo its own RHS) at round boundaries. The run
ends when every log entry is consumed everywhere and no candidate is left
undecided; at that point each attribute's minimal transversals are exactly
its validated FDs.

Sampling only shrinks the work, never the result: any FD the sample misses is
caught by validation, whose witness edges grow the hypergraph until the
transversals stabilise. Different seeds therefore change the work done, not
the final FD set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import diffset, hitting
from .bitset import bits
from .errors import InternalError
from .freqmap import MappingCache
from .hypergraph import SubHypergraph
from .relation import EncodedRelation, build_sorted_views
from .validation import (
    Candidate,
    choose_sort_attr,
    group_candidates,
    validate_constant,
    validate_group,
)


class FDSet:
    """The current complete set of minimal non-trivial FDs, keyed by RHS."""

    def __init__(self, num_attrs: int) -> None:
        self.num_attrs = num_attrs
        self.per_rhs: dict[int, set[int]] = {a: set() for a in range(num_attrs)}

    def add(self, rhs: int, lhs: int) -> None:
        if lhs & (1 << rhs):
            raise InternalError("trivial FD added to FDSet")
        self.per_rhs[rhs].add(lhs)

    def remove(self, rhs: int, lhs: int) -> None:
        self.per_rhs[rhs].discard(lhs)

    def purge_rhs(self, rhs: int) -> list[int]:
        removed = sorted(self.per_rhs[rhs])
        self.per_rhs[rhs] = set()
        return removed

    def contains(self, rhs: int, lhs: int) -> bool:
        return lhs in self.per_rhs[rhs]

    def count(self) -> int:
        return sum(len(v) for v in self.per_rhs.values())

    def sorted_items(self) -> list[tuple[int, int]]:
        """(rhs, lhs) pairs, ordered by rhs index then LHS attribute tuple."""
        out = []
        for rhs in range(self.num_attrs):
            for lhs in sorted(self.per_rhs[rhs], key=lambda x: tuple(bits(x))):
                out.append((rhs, lhs))
        return out

    def snapshot(self) -> dict[int, frozenset]:
        return {a: frozenset(v) for a, v in self.per_rhs.items()}

    def __eq__(self, other) -> bool:
        if isinstance(other, FDSet):
            return self.per_rhs == other.per_rhs
        if isinstance(other, dict):
            return {a: set(v) for a, v in self.per_rhs.items()} == {
                a: set(v) for a, v in other.items()
            }
        return NotImplemented


@dataclass
class DiscoveryState:
    rel: EncodedRelation
    fdset: FDSet
    cache: MappingCache
    hypergraphs: dict[int, SubHypergraph]
    stores: dict[int, hitting.TransversalStore]
    epsilon: float
    theta: float
    seed: int
    views: list | None = None
    last_stats: object = None

    def ensure_views(self):
        if self.views is None:
            self.views = build_sorted_views(self.rel)
        return self.views


class DiffLog:
    """Append-only, deduplicated pool of witness difference sets."""

    def __init__(self) -> None:
        self.masks: list[int] = []
        self._seen: set[int] = set()

    def extend(self, masks) -> None:
        for m in masks:
            if m and m not in self._seen:
                self._seen.add(m)
                self.masks.append(m)

    def __len__(self) -> int:
        return len(self.masks)


@dataclass
class RoundContext:
    """Mutable per-run bookkeeping shared by the fixpoint driver and hooks."""

    log: DiffLog
    diff_source: object  # row-addressable view covering every possible witness
    removed: list[tuple[int, int]] = field(default_factory=list)
    ptr: dict[int, int] = field(default_factory=dict)
    pending: dict[int, list[int]] = field(default_factory=dict)
    decided: dict[int, dict[int, bool]] = field(default_factory=dict)


def run_rounds(state: DiscoveryState, ctx: RoundContext, validate_fn, *,
               allow_retire: bool, attr_order=None) -> None:
    """Drive every attribute to a global fixpoint of its settle loop.

    ``validate_fn(rhs, masks)`` must return (lhs, is_valid, witness) triples
    and perform its own mapping-cache bookkeeping; the driver owns the FD set,
    the decided map, retirement, and witness-diff logging.
    """
    attrs = list(attr_order) if attr_order is not None else list(range(state.rel.m))
    if sorted(attrs) != list(range(state.rel.m)):
        raise InternalError("attribute order must be a permutation of the schema")
    for a in attrs:
        ctx.ptr.setdefault(a, 0)
        ctx.pending.setdefault(a, [])
        ctx.decided.setdefault(a, {})

    while True:
        for a in attrs:
            _settle(state, ctx, a, validate_fn, allow_retire)
        if all(ctx.ptr[a] == len(ctx.log) for a in attrs):
            break

    for a in attrs:
        h = state.hypergraphs[a]
        if h.poisoned:
            continue
        if state.stores[a].mhs != state.fdset.per_rhs[a]:
            raise InternalError(
                f"attribute {a}: transversals and validated FDs diverge at fixpoint"
            )


def _settle(state, ctx, a, validate_fn, allow_retire) -> None:
    h = state.hypergraphs[a]
    store = state.stores[a]
    fdset = state.fdset
    while True:
        fresh = ctx.log.masks[ctx.ptr[a]:]
        ctx.ptr[a] = len(ctx.log)
        if fresh:
            report = h.bulk_update(fresh)
            ctx.pending[a].extend(report.inserted)
        if h.poisoned:
            for lhs in fdset.purge_rhs(a):
                state.cache.drop(lhs, a)
                ctx.removed.append((a, lhs))
                if not allow_retire:
                    raise InternalError(
                        f"validated FD retired during one-time discovery (rhs {a})"
                    )
            store.mhs = set()
            store.generation = h.generation
            if ctx.ptr[a] == len(ctx.log):
                return
            continue
        if not store.initialized:
            store.mhs = hitting.enumerate_transversals(h)
            store.generation = h.generation
            ctx.pending[a] = []
        elif ctx.pending[a]:
            res = hitting.resume(store, h, ctx.pending[a])
            ctx.pending[a] = []
            for lhs in sorted(res.retired):
                if fdset.contains(a, lhs):
                    if not allow_retire:
                        raise InternalError(
                            f"validated FD retired during one-time discovery (rhs {a})"
                        )
                    fdset.remove(a, lhs)
                    state.cache.drop(lhs, a)
                    ctx.removed.append((a, lhs))
        undecided = sorted(x for x in store.mhs if x not in ctx.decided[a])
        if not undecided and ctx.ptr[a] == len(ctx.log):
            return
        if undecided:
            for lhs, is_valid, witness in validate_fn(a, undecided):
                ctx.decided[a][lhs] = is_valid
                if is_valid:
                    fdset.add(a, lhs)
                else:
                    ctx.log.extend([diffset.diff(ctx.diff_source, *witness)])


def discover(
    rel: EncodedRelation,
    epsilon: float = 0.3,
    theta: float = 0.8,
    seed: int = 0,
    attr_order=None,
) -> DiscoveryState:
    """Run the one-time discovery over a base relation.

    Returns the state holding the FD set, the mapping cache, and the
    per-attribute hypergraphs and transversal stores needed for incremental
    updates. ``attr_order`` exists to exercise order-independence in tests.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must be in (0, 1)")
    state = DiscoveryState(
        rel=rel,
        fdset=FDSet(rel.m),
        cache=MappingCache(theta, rel.n),
        hypergraphs={a: SubHypergraph(a, rel.m) for a in range(rel.m)},
        stores={a: hitting.TransversalStore(a) for a in range(rel.m)},
        epsilon=epsilon,
        theta=theta,
        seed=seed,
    )
    views = state.ensure_views()
    sample = diffset.sample_pairs(rel.n, epsilon, seed)
    ctx = RoundContext(log=DiffLog(), diff_source=rel)
    ctx.log.extend(sorted(diffset.sampled_diffs(rel, sample)))

    def validate_init(rhs: int, masks: list[int]):
        results = []
        plain = []
        for lhs in masks:
            if lhs == 0:
                verdict = validate_constant(rel, rhs)
                if verdict.status == "valid":
                    state.cache.record_frequent(0, rhs, verdict.freq_entries, rel.n)
                    results.append((0, True, None))
                else:
                    results.append((0, False, verdict.witness))
            else:
                plain.append(Candidate(lhs, rhs))
        for g in group_candidates(plain):
            choose_sort_attr(g, views)
            for verdict in validate_group(g, rel, views, theta):
                if verdict.status == "valid":
                    state.cache.record_frequent(
                        verdict.candidate.lhs, rhs, verdict.freq_entries, rel.n
                    )
                    results.append((verdict.candidate.lhs, True, None))
                else:
                    results.append((verdict.candidate.lhs, False, verdict.witness))
        return results

    run_rounds(state, ctx, validate_init, allow_retire=False, attr_order=attr_order)
    state.cache.assert_space_bound(state.fdset.count())
    return state
