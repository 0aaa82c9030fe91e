"""Dictionary-encoded column store with per-attribute sorted views.

Cells are strings; each column gets its own dictionary assigning codes in
first-seen row order, so encoding is deterministic for a given input file.
Missing values follow NULL-equals-NULL semantics: the empty string and the
configured null token are normalised to one shared value per column, hence
one shared code. Two cells compare equal iff their codes are equal.

The base relation and its sorted views are immutable once built. Incremental
batches live in a separate :class:`DeltaRelation` that shares (and extends)
the base dictionaries; they are folded into a new base relation only after an
update round completes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import IngestError, SchemaMismatchError


@dataclass(frozen=True)
class Schema:
    attributes: tuple[str, ...]

    def __post_init__(self):
        if len(self.attributes) < 1:
            raise IngestError("schema must have at least one attribute")
        if len(set(self.attributes)) != len(self.attributes):
            raise IngestError("duplicate attribute names in header")

    @property
    def m(self) -> int:
        return len(self.attributes)

    def index(self, name: str) -> int:
        return self.attributes.index(name)


class Dictionary:
    """Bijection between column values and dense integer codes."""

    __slots__ = ("values", "codes")

    def __init__(self) -> None:
        self.values: list[str] = []
        self.codes: dict[str, int] = {}

    def encode(self, value: str) -> int:
        code = self.codes.get(value)
        if code is None:
            code = len(self.values)
            self.codes[value] = code
            self.values.append(value)
        return code

    def decode(self, code: int) -> str:
        return self.values[code]

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class EncodedRelation:
    schema: Schema
    columns: list[np.ndarray]       # one int32 array of codes per attribute
    dictionaries: list[Dictionary]  # shared with (and extended by) deltas
    null_token: str = ""

    @property
    def n(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def m(self) -> int:
        return self.schema.m

    def code(self, attr: int, row: int) -> int:
        return int(self.columns[attr][row])

    def decode_cell(self, attr: int, row: int) -> str:
        return self.dictionaries[attr].decode(self.code(attr, row))

    def matrix(self) -> np.ndarray:
        """Attribute-major (m x n) code matrix; used by the diff kernels."""
        return np.vstack(self.columns)


@dataclass
class DeltaRelation:
    """A batch of appended tuples, held apart from the base relation.

    Rows are addressed by global ids: base rows keep 0..n-1, delta rows get
    n..n+d-1. Base sorted views are never rebuilt for a delta.
    """

    base: EncodedRelation
    columns: list[np.ndarray]

    @property
    def n_delta(self) -> int:
        return len(self.columns[0]) if self.columns and len(self.columns) else 0

    @property
    def n_union(self) -> int:
        return self.base.n + self.n_delta

    @property
    def m(self) -> int:
        return self.base.m

    def code(self, attr: int, row: int) -> int:
        nb = self.base.n
        if row < nb:
            return int(self.base.columns[attr][row])
        return int(self.columns[attr][row - nb])

    def matrix(self) -> np.ndarray:
        """Attribute-major code matrix of the delta rows only."""
        if self.n_delta == 0:
            return np.zeros((self.m, 0), dtype=np.int32)
        return np.vstack(self.columns)


@dataclass
class SortedView:
    """Stable sort of row ids by one attribute's codes, with block ranges.

    ``blocks[code] = (start, end)`` is the maximal contiguous range of
    ``order`` holding exactly the rows with that code; the ranges partition
    0..n. Ties are broken by original row id (stable sort).
    """

    attribute: int
    order: np.ndarray              # permutation of row ids, int32
    blocks: dict[int, tuple[int, int]]
    max_block_size: int = field(default=0)

    @property
    def distinct_count(self) -> int:
        return len(self.blocks)

    def block_rows(self, code: int) -> np.ndarray:
        start, end = self.blocks[code]
        return self.order[start:end]

    def sorted_codes(self) -> list[int]:
        return sorted(self.blocks)


def _normalise(cell: str, null_token: str) -> str:
    return null_token if (cell == "" or cell == null_token) else cell


def ingest_csv(path, null_token: str = "") -> EncodedRelation:
    """Load an RFC-4180-style CSV (header required, UTF-8) into codes.

    Any cell equal to ``null_token``, and any empty cell, maps to the single
    shared null code of its column. Ragged rows and files without data rows
    are rejected.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        schema = Schema(tuple(header))
        m = schema.m
        dictionaries = [Dictionary() for _ in range(m)]
        raw_columns: list[list[int]] = [[] for _ in range(m)]
        line = 1
        for row in reader:
            line += 1
            if len(row) != m:
                raise IngestError(
                    f"{path}: line {line}: expected {m} fields, got {len(row)}"
                )
            for a in range(m):
                raw_columns[a].append(
                    dictionaries[a].encode(_normalise(row[a], null_token))
                )
    if not raw_columns[0]:
        raise IngestError(f"{path}: zero tuples (header only)")
    columns = [np.asarray(col, dtype=np.int32) for col in raw_columns]
    return EncodedRelation(schema, columns, dictionaries, null_token)


def build_sorted_views(rel: EncodedRelation) -> list[SortedView]:
    """One stable sorted view per attribute, block map covering every code."""
    if rel.n == 0:
        raise IngestError("cannot build sorted views over an empty relation")
    views = []
    for attr in range(rel.m):
        col = rel.columns[attr]
        order = np.argsort(col, kind="stable").astype(np.int32)
        sorted_codes = col[order]
        boundaries = np.flatnonzero(sorted_codes[1:] != sorted_codes[:-1]) + 1
        starts = np.concatenate(([0], boundaries))
        ends = np.concatenate((boundaries, [len(col)]))
        blocks = {
            int(sorted_codes[s]): (int(s), int(e)) for s, e in zip(starts, ends)
        }
        max_block = int((ends - starts).max())
        views.append(SortedView(attr, order, blocks, max_block))
    return views


def append_batch(rel: EncodedRelation, delta_rows) -> DeltaRelation:
    """Encode raw rows against the base dictionaries as a delta snapshot."""
    m = rel.m
    raw_columns: list[list[int]] = [[] for _ in range(m)]
    for i, row in enumerate(delta_rows):
        if len(row) != m:
            raise SchemaMismatchError(
                f"delta row {i + 1}: expected {m} fields, got {len(row)}"
            )
        for a in range(m):
            raw_columns[a].append(
                rel.dictionaries[a].encode(_normalise(row[a], rel.null_token))
            )
    columns = [np.asarray(col, dtype=np.int32) for col in raw_columns]
    return DeltaRelation(rel, columns)


def read_delta_csv(path, rel: EncodedRelation) -> DeltaRelation:
    """Read a delta CSV whose header must match the base schema exactly."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        if tuple(header) != rel.schema.attributes:
            raise SchemaMismatchError(
                f"{path}: header does not match the base schema"
            )
        rows = []
        line = 1
        for row in reader:
            line += 1
            if len(row) != rel.m:
                raise IngestError(
                    f"{path}: line {line}: expected {rel.m} fields, got {len(row)}"
                )
            rows.append(row)
    return append_batch(rel, rows)


def merge(delta: DeltaRelation) -> EncodedRelation:
    """Fold a delta into a new base relation (dictionaries are shared)."""
    base = delta.base
    if delta.n_delta == 0:
        return base
    columns = [
        np.concatenate((base.columns[a], delta.columns[a]))
        for a in range(base.m)
    ]
    return EncodedRelation(base.schema, columns, base.dictionaries, base.null_token)
