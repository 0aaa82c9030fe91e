"""High-frequency LHS-key -> RHS-value cache for valid FDs.

For each minimal FD the cache keeps the (LHS key, RHS code, count) mappings
whose count reaches a fraction theta of the dataset, default 0.8. Keys are
exact tuples of dictionary codes over the LHS attributes (ascending attribute
order): equal keys mean equal projections, with no hash collisions, which is
what makes the incremental comparison sound. At most floor(1/theta) entries
can qualify per FD, so the cache size is bounded by |F|/theta regardless of
the number of tuples.

On an incremental batch, a delta-side map with *all* keys and counts is built
per candidate and compared against the cache: a key match with a different
RHS code proves the FD invalid; if every delta mapping is already cached the
FD holds on the union outright; leftover delta mappings are "residual" and
trigger the selective table scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bitset import bits
from .errors import InternalError
from .relation import DeltaRelation


def frequency_floor(theta: float, n_total: int) -> int:
    """Smallest count c with c / n_total >= theta (float-noise tolerant)."""
    return max(1, math.ceil(theta * n_total - 1e-9))


@dataclass
class MapEntry:
    key: tuple[int, ...]
    rhs_code: int
    count: int


@dataclass
class DeltaEntry:
    key: tuple[int, ...]
    rhs_code: int
    count: int
    first_row: int  # global row id of the first delta row with this mapping


@dataclass
class DeltaMap:
    lhs: int
    entries: list[DeltaEntry]

    def key_positions(self) -> dict[int, int]:
        """attr -> component index of that attribute inside the key tuple."""
        return {a: i for i, a in enumerate(bits(self.lhs))}


@dataclass
class CompareResult:
    kind: str  # 'valid' | 'invalid' | 'uncertain'
    residual: list[DeltaEntry] = field(default_factory=list)
    matches: list[tuple[MapEntry, DeltaEntry]] = field(default_factory=list)
    conflict: tuple[MapEntry, DeltaEntry] | None = None


class MappingCache:
    def __init__(self, theta: float = 0.8, base_n: int = 0) -> None:
        if not (0.0 < theta <= 1.0):
            raise ValueError("theta must be in (0, 1]")
        self.theta = theta
        self.base_n = base_n
        self._tables: dict[tuple[int, int], list[MapEntry]] = {}

    # -- bookkeeping -------------------------------------------------------

    def entries_for(self, lhs: int, rhs: int) -> list[MapEntry]:
        return self._tables.get((lhs, rhs), [])

    def fds(self):
        return sorted(self._tables)

    def total_entries(self) -> int:
        return sum(len(v) for v in self._tables.values())

    def drop(self, lhs: int, rhs: int) -> None:
        self._tables.pop((lhs, rhs), None)

    def drop_rhs(self, rhs: int) -> None:
        for key in [k for k in self._tables if k[1] == rhs]:
            del self._tables[key]

    # -- mutation ----------------------------------------------------------

    def record_frequent(self, lhs: int, rhs: int, entries, n_total: int) -> None:
        """Insert qualifying mappings for a valid FD and re-check old ones.

        ``entries`` are (key, rhs_code, count) triples; only those meeting the
        frequency floor against ``n_total`` are stored, and previously stored
        entries that fall below it are evicted.
        """
        floor = frequency_floor(self.theta, n_total)
        table = {e.key: e for e in self._tables.get((lhs, rhs), [])}
        for key, rhs_code, count in entries:
            if count >= floor:
                table[key] = MapEntry(tuple(key), int(rhs_code), int(count))
        kept = [e for e in sorted(table.values(), key=lambda e: e.key) if e.count >= floor]
        if kept:
            self._tables[(lhs, rhs)] = kept
        else:
            self._tables.pop((lhs, rhs), None)

    def apply_matches(self, lhs: int, rhs: int, matches) -> None:
        """Fold delta counts into matched entries (key and RHS code equal)."""
        for entry, delta_entry in matches:
            if entry.key != delta_entry.key or entry.rhs_code != delta_entry.rhs_code:
                raise InternalError("mismatched entries passed to apply_matches")
            entry.count += delta_entry.count

    def evict_below(self, n_total: int) -> None:
        """Re-check every entry against a grown total; drop the infrequent."""
        floor = frequency_floor(self.theta, n_total)
        for fd in list(self._tables):
            kept = [e for e in self._tables[fd] if e.count >= floor]
            if kept:
                self._tables[fd] = kept
            else:
                del self._tables[fd]
        self.base_n = n_total

    # -- invariants --------------------------------------------------------

    def assert_space_bound(self, fd_count: int) -> None:
        """Total entries <= |F| * floor(1/theta), and per-FD the same bound."""
        per_fd = int(1.0 / self.theta + 1e-9)
        for fd, entries in self._tables.items():
            if len(entries) > per_fd:
                raise InternalError(
                    f"cache bound violated for {fd}: {len(entries)} > {per_fd}"
                )
            rhs_by_key: dict[tuple[int, ...], int] = {}
            for e in entries:
                if rhs_by_key.setdefault(e.key, e.rhs_code) != e.rhs_code:
                    raise InternalError(f"two RHS codes cached for one key of {fd}")
        if self.total_entries() > fd_count * per_fd:
            raise InternalError(
                f"cache bound violated: {self.total_entries()} entries "
                f"for {fd_count} FDs at theta={self.theta}"
            )


def build_delta(delta: DeltaRelation, lhs: int, rhs: int) -> DeltaMap:
    """Delta-side map: every (key, rhs code) seen in the batch, with counts.

    No frequency filter applies here. A key carrying two RHS codes is legal:
    it signals a within-delta conflict that the pairwise difference sets have
    already captured.
    """
    attrs = list(bits(lhs))
    base_n = delta.base.n
    acc: dict[tuple[tuple[int, ...], int], list[int]] = {}
    for i in range(delta.n_delta):
        key = tuple(int(delta.columns[a][i]) for a in attrs)
        rhs_code = int(delta.columns[rhs][i])
        slot = acc.get((key, rhs_code))
        if slot is None:
            acc[(key, rhs_code)] = [1, base_n + i]
        else:
            slot[0] += 1
    entries = [
        DeltaEntry(key, rhs_code, count, first_row)
        for (key, rhs_code), (count, first_row) in sorted(acc.items())
    ]
    return DeltaMap(lhs, entries)


def compare(delta_map: DeltaMap, base_entries: list[MapEntry]) -> CompareResult:
    """Three-way comparison of a delta map against the cached base mappings.

    Invalid: some delta key equals a cached key with a different RHS code.
    Valid: every delta mapping is already cached (nothing left to check).
    Uncertain: leftover delta mappings require the selective table scan.
    """
    by_key = {e.key: e for e in base_entries}
    matches: list[tuple[MapEntry, DeltaEntry]] = []
    residual: list[DeltaEntry] = []
    for de in delta_map.entries:
        be = by_key.get(de.key)
        if be is None:
            residual.append(de)
        elif be.rhs_code == de.rhs_code:
            matches.append((be, de))
        else:
            return CompareResult("invalid", conflict=(be, de))
    if not residual:
        return CompareResult("valid", matches=matches)
    return CompareResult("uncertain", residual=residual, matches=matches)
