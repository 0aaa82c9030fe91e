"""Per-RHS minimal hypergraphs of difference-set edges.

Each RHS attribute owns a sub-hypergraph whose vertices are the remaining
attributes and whose edges are difference sets projected modulo that RHS.
Only minimal edges are kept (an antichain): any hitting set of the minimal
edges hits all edges, so subsumed edges carry no information. Inserting the
empty edge poisons the hypergraph: it is unhittable, meaning two tuples agree
on every other attribute but differ on the RHS, so no FD with this RHS holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import diffset
from .errors import InternalError


@dataclass
class ChangeReport:
    inserted: list[int] = field(default_factory=list)
    removed: list[int] = field(default_factory=list)
    poisoned_now: bool = False
    gen_before: int = 0
    gen_after: int = 0

    @property
    def changed(self) -> bool:
        return bool(self.inserted) or self.poisoned_now


class SubHypergraph:
    """Antichain of minimal edges for one RHS attribute, with dynamic insert."""

    def __init__(self, rhs: int, num_attrs: int) -> None:
        self.rhs = rhs
        self.num_attrs = num_attrs
        self.vertices = ((1 << num_attrs) - 1) & ~(1 << rhs)
        self.poisoned = False
        self.generation = 0
        # kept sorted by (cardinality, mask) to short-circuit subset checks
        self._edges: list[int] = []

    @property
    def edges(self) -> list[int]:
        return list(self._edges)

    def __len__(self) -> int:
        return len(self._edges)

    def add_edge(self, e: int, report: ChangeReport | None = None) -> ChangeReport:
        """Insert a minimal edge, dropping subsumed supersets.

        Returns a report flagging one of: unchanged (some existing edge is a
        subset of ``e``), inserted (with the removed supersets), or poisoned
        (``e`` is empty). Edges containing the RHS are a contract violation.
        """
        if report is None:
            report = ChangeReport(gen_before=self.generation, gen_after=self.generation)
        if e & (1 << self.rhs):
            raise InternalError(f"edge {e:#x} contains rhs attribute {self.rhs}")
        if e & ~self.vertices:
            raise InternalError(f"edge {e:#x} uses vertices outside the schema")
        if self.poisoned:
            return report
        if e == 0:
            self.poisoned = True
            self._edges.clear()
            self.generation += 1
            report.poisoned_now = True
            report.gen_after = self.generation
            return report
        size = e.bit_count()
        for other in self._edges:
            if other.bit_count() > size:
                break
            if other & e == other:
                return report  # subsumed: an existing edge is a subset of e
        survivors = [x for x in self._edges if x & e != e or x == e]
        removed = [x for x in self._edges if x & e == e and x != e]
        self._edges = survivors
        self._insert_sorted(e)
        self.generation += 1
        report.inserted.append(e)
        report.removed.extend(removed)
        report.gen_after = self.generation
        return report

    def _insert_sorted(self, e: int) -> None:
        key = (e.bit_count(), e)
        lo, hi = 0, len(self._edges)
        while lo < hi:
            mid = (lo + hi) // 2
            x = self._edges[mid]
            if (x.bit_count(), x) < key:
                lo = mid + 1
            else:
                hi = mid
        self._edges.insert(lo, e)

    def bulk_update(self, diffs) -> ChangeReport:
        """Apply a pool of raw difference sets, projected modulo this RHS.

        Equivalent to sequential add_edge over modulo(diffs, rhs); the final
        edge set is independent of insertion order. The report says whether
        any minimal edge was inserted, which gates another enumeration round.
        """
        report = ChangeReport(gen_before=self.generation, gen_after=self.generation)
        # smallest edges first: subsumed projections then never get inserted
        for e in sorted(diffset.modulo(diffs, self.rhs), key=lambda x: (x.bit_count(), x)):
            self.add_edge(e, report)
            if self.poisoned:
                break
        report.gen_after = self.generation
        return report
