"""Durable, versioned state file for a discovery run.

A state directory holds one binary file (``state.fdinc``) plus a lock file.
The binary format is self-describing and endian-fixed (everything
little-endian): a magic string, then named length-prefixed sections in fixed
order. The ``meta`` section is canonical JSON (sorted keys) and duplicates
every component's generation counter so the loader can cross-check
consistency. All collections are serialised in a canonical order, which makes
``serialize(load(b)) == b`` hold byte-for-byte.

Sections (see README for the field-level layout):

    meta         canonical JSON manifest
    columns      per attribute: n int32 codes
    dicts        per attribute: value strings in code order
    hypergraphs  per attribute: poisoned flag, generation, minimal edges
    stores       per attribute: generation, minimal transversals
    fds          per RHS: LHS masks
    cache        per FD: (key codes, rhs code, count) entries

Writes go to a temporary file in the same directory followed by an atomic
rename, so an interrupted update leaves the previous state loadable. A
POSIX ``flock`` on the lock file keeps a state directory single-owner.
"""

from __future__ import annotations

import fcntl
import json
import os
import struct
from pathlib import Path

import numpy as np

from .discovery import DiscoveryState, FDSet
from .errors import StateError
from .freqmap import MapEntry, MappingCache
from .hitting import TransversalStore
from .hypergraph import SubHypergraph
from .relation import Dictionary, EncodedRelation, Schema

MAGIC = b"FDINC01\n"
FORMAT_VERSION = 1
STATE_FILENAME = "state.fdinc"
LOCK_FILENAME = "lock"

_SECTIONS = ("meta", "columns", "dicts", "hypergraphs", "stores", "fds", "cache")


def _mask_words(m: int) -> int:
    return max(1, (m + 63) // 64)


def _pack_mask(mask: int, words: int) -> bytes:
    return b"".join(
        struct.pack("<Q", (mask >> (64 * w)) & 0xFFFFFFFFFFFFFFFF)
        for w in range(words)
    )


def _unpack_mask(buf: bytes, offset: int, words: int) -> tuple[int, int]:
    mask = 0
    for w in range(words):
        (word,) = struct.unpack_from("<Q", buf, offset + 8 * w)
        mask |= word << (64 * w)
    return mask, offset + 8 * words


def serialize_state(state: DiscoveryState) -> bytes:
    rel = state.rel
    m = rel.m
    words = _mask_words(m)
    meta = {
        "version": FORMAT_VERSION,
        "attributes": list(rel.schema.attributes),
        "null_token": rel.null_token,
        "n": rel.n,
        "epsilon": state.epsilon,
        "theta": state.theta,
        "seed": state.seed,
        "cache_base_n": state.cache.base_n,
        "mask_words": words,
        "generations": {
            "hypergraphs": [state.hypergraphs[a].generation for a in range(m)],
            "stores": [state.stores[a].generation for a in range(m)],
        },
        "fd_count": state.fdset.count(),
    }
    sections: dict[str, bytes] = {}
    sections["meta"] = json.dumps(
        meta, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")

    sections["columns"] = b"".join(
        rel.columns[a].astype("<i4").tobytes() for a in range(m)
    )

    parts = []
    for a in range(m):
        values = rel.dictionaries[a].values
        parts.append(struct.pack("<I", len(values)))
        for v in values:
            raw = v.encode("utf-8")
            parts.append(struct.pack("<I", len(raw)))
            parts.append(raw)
    sections["dicts"] = b"".join(parts)

    parts = []
    for a in range(m):
        h = state.hypergraphs[a]
        edges = sorted(h.edges, key=lambda e: (e.bit_count(), e))
        parts.append(struct.pack("<BQI", int(h.poisoned), h.generation, len(edges)))
        parts.extend(_pack_mask(e, words) for e in edges)
    sections["hypergraphs"] = b"".join(parts)

    parts = []
    for a in range(m):
        s = state.stores[a]
        mhs = sorted(s.mhs)
        parts.append(struct.pack("<qI", s.generation, len(mhs)))
        parts.extend(_pack_mask(x, words) for x in mhs)
    sections["stores"] = b"".join(parts)

    parts = []
    for rhs in range(m):
        masks = sorted(state.fdset.per_rhs[rhs])
        parts.append(struct.pack("<I", len(masks)))
        parts.extend(_pack_mask(x, words) for x in masks)
    sections["fds"] = b"".join(parts)

    parts = [struct.pack("<I", len(state.cache.fds()))]
    for lhs, rhs in state.cache.fds():
        entries = state.cache.entries_for(lhs, rhs)
        parts.append(_pack_mask(lhs, words))
        parts.append(struct.pack("<II", rhs, len(entries)))
        key_len = lhs.bit_count()
        for e in entries:
            assert len(e.key) == key_len
            parts.append(struct.pack(f"<{key_len}i" if key_len else "<0i", *e.key))
            parts.append(struct.pack("<iQ", e.rhs_code, e.count))
    sections["cache"] = b"".join(parts)

    out = [MAGIC]
    for name in _SECTIONS:
        raw = sections[name]
        out.append(struct.pack("<B", len(name)))
        out.append(name.encode("ascii"))
        out.append(struct.pack("<Q", len(raw)))
        out.append(raw)
    return b"".join(out)


def deserialize_state(buf: bytes) -> DiscoveryState:
    if buf[: len(MAGIC)] != MAGIC:
        raise StateError("not a fdinc state file (bad magic)")
    offset = len(MAGIC)
    sections: dict[str, bytes] = {}
    for expected in _SECTIONS:
        try:
            (name_len,) = struct.unpack_from("<B", buf, offset)
            offset += 1
            name = buf[offset : offset + name_len].decode("ascii")
            offset += name_len
            (size,) = struct.unpack_from("<Q", buf, offset)
            offset += 8
            raw = buf[offset : offset + size]
            if len(raw) != size:
                raise StateError("truncated state file")
            offset += size
        except struct.error as exc:
            raise StateError(f"truncated state file: {exc}") from None
        if name != expected:
            raise StateError(f"unexpected section {name!r} (wanted {expected!r})")
        sections[name] = raw
    if offset != len(buf):
        raise StateError("trailing bytes after the last section")

    meta = json.loads(sections["meta"].decode("utf-8"))
    if meta.get("version") != FORMAT_VERSION:
        raise StateError(f"unsupported state version {meta.get('version')!r}")
    attributes = tuple(meta["attributes"])
    m = len(attributes)
    n = int(meta["n"])
    words = int(meta["mask_words"])
    if words != _mask_words(m):
        raise StateError("mask width does not match the schema")

    raw = sections["columns"]
    if len(raw) != 4 * m * n:
        raise StateError("columns section has the wrong size")
    columns = [
        np.frombuffer(raw, dtype="<i4", count=n, offset=4 * n * a).astype(np.int32)
        for a in range(m)
    ]

    dicts = []
    off = 0
    raw = sections["dicts"]
    for _ in range(m):
        (count,) = struct.unpack_from("<I", raw, off)
        off += 4
        d = Dictionary()
        for _ in range(count):
            (vlen,) = struct.unpack_from("<I", raw, off)
            off += 4
            d.encode(raw[off : off + vlen].decode("utf-8"))
            off += vlen
        dicts.append(d)
    rel = EncodedRelation(Schema(attributes), columns, dicts, meta["null_token"])

    hypergraphs = {}
    off = 0
    raw = sections["hypergraphs"]
    for a in range(m):
        poisoned, generation, count = struct.unpack_from("<BQI", raw, off)
        off += 13
        h = SubHypergraph(a, m)
        edges = []
        for _ in range(count):
            e, off = _unpack_mask(raw, off, words)
            edges.append(e)
        h._edges = sorted(edges, key=lambda e: (e.bit_count(), e))
        h.poisoned = bool(poisoned)
        h.generation = generation
        if h.generation != meta["generations"]["hypergraphs"][a]:
            raise StateError(f"hypergraph generation mismatch for attribute {a}")
        hypergraphs[a] = h

    stores = {}
    off = 0
    raw = sections["stores"]
    for a in range(m):
        generation, count = struct.unpack_from("<qI", raw, off)
        off += 12
        mhs = set()
        for _ in range(count):
            x, off = _unpack_mask(raw, off, words)
            mhs.add(x)
        store = TransversalStore(a, mhs, generation)
        if store.generation != meta["generations"]["stores"][a]:
            raise StateError(f"store generation mismatch for attribute {a}")
        stores[a] = store

    fdset = FDSet(m)
    off = 0
    raw = sections["fds"]
    for rhs in range(m):
        (count,) = struct.unpack_from("<I", raw, off)
        off += 4
        for _ in range(count):
            x, off = _unpack_mask(raw, off, words)
            fdset.add(rhs, x)

    cache = MappingCache(float(meta["theta"]), int(meta["cache_base_n"]))
    off = 0
    raw = sections["cache"]
    (fd_count,) = struct.unpack_from("<I", raw, off)
    off += 4
    for _ in range(fd_count):
        lhs, off = _unpack_mask(raw, off, words)
        rhs, entry_count = struct.unpack_from("<II", raw, off)
        off += 8
        key_len = lhs.bit_count()
        entries = []
        for _ in range(entry_count):
            key = struct.unpack_from(f"<{key_len}i", raw, off) if key_len else ()
            off += 4 * key_len
            rhs_code, count = struct.unpack_from("<iQ", raw, off)
            off += 12
            entries.append(MapEntry(tuple(key), rhs_code, count))
        cache._tables[(lhs, rhs)] = entries

    state = DiscoveryState(
        rel=rel,
        fdset=fdset,
        cache=cache,
        hypergraphs=hypergraphs,
        stores=stores,
        epsilon=float(meta["epsilon"]),
        theta=float(meta["theta"]),
        seed=int(meta["seed"]),
    )
    if state.fdset.count() != meta["fd_count"]:
        raise StateError("FD count disagrees with the manifest")
    return state


# -- state directory ---------------------------------------------------------


def state_path(state_dir) -> Path:
    return Path(state_dir) / STATE_FILENAME


def save_state(state: DiscoveryState, state_dir) -> None:
    """Serialise into the directory with a write-new-then-swap replace."""
    directory = Path(state_dir)
    directory.mkdir(parents=True, exist_ok=True)
    final = state_path(directory)
    tmp = final.with_suffix(final.suffix + ".tmp")
    raw = serialize_state(state)
    with open(tmp, "wb") as fh:
        fh.write(raw)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, final)


def load_state(state_dir) -> DiscoveryState:
    final = state_path(state_dir)
    if not final.exists():
        raise StateError(f"{final}: no state file")
    return deserialize_state(final.read_bytes())


class StateLock:
    """Exclusive advisory lock scoping one process to a state directory."""

    def __init__(self, state_dir) -> None:
        self.path = Path(state_dir) / LOCK_FILENAME
        self._fd: int | None = None

    def __enter__(self) -> "StateLock":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd = os.open(self.path, os.O_CREAT | os.O_RDWR, 0o644)
        try:
            fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            os.close(fd)
            raise StateError(f"{self.path.parent}: state directory is locked")
        self._fd = fd
        return self

    def __exit__(self, *exc) -> None:
        if self._fd is not None:
            fcntl.flock(self._fd, fcntl.LOCK_UN)
            os.close(self._fd)
            self._fd = None
