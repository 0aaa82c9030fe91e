"""Pure-Python kernel backend.

This is the reference implementation: the compiled backend must match it
bit-for-bit on every output, including witness choice and ordering. Masks are
plain Python ints, so this backend has no limit on schema width.
"""

from __future__ import annotations

import numpy as np

from .common import BlockScan

NAME = "pure"
MAX_ATTRS = None  # unbounded


def _weights(m: int) -> np.ndarray:
    return (np.int64(1) << np.arange(m, dtype=np.int64)).reshape(m, 1)


def diff_masks_for_pairs(matrix: np.ndarray, pairs: np.ndarray) -> set[int]:
    """Difference-set masks for explicit row pairs of ``matrix`` (attrs x rows)."""
    if len(pairs) == 0:
        return set()
    m = matrix.shape[0]
    if m <= 62:
        neq = matrix[:, pairs[:, 0]] != matrix[:, pairs[:, 1]]
        masks = (_weights(m) * neq).sum(axis=0)
        out = set(int(v) for v in masks)
    else:
        out = set()
        for i, j in pairs:
            mask = 0
            for a in range(m):
                if matrix[a, i] != matrix[a, j]:
                    mask |= 1 << a
            out.add(mask)
    out.discard(0)
    return out


def diff_masks_all_pairs(matrix: np.ndarray) -> set[int]:
    """Difference-set masks over all unordered row pairs of ``matrix``."""
    m, k = matrix.shape
    out: set[int] = set()
    if k < 2:
        return out
    if m <= 62:
        w = _weights(m)
        for i in range(k - 1):
            neq = matrix[:, i + 1 :] != matrix[:, i : i + 1]
            out.update(int(v) for v in (w * neq).sum(axis=0))
    else:
        for i in range(k - 1):
            for j in range(i + 1, k):
                mask = 0
                for a in range(m):
                    if matrix[a, i] != matrix[a, j]:
                        mask |= 1 << a
                out.add(mask)
    out.discard(0)
    return out


def mmcs_extend(edges: list[int], base: int, cand: int, order_rank) -> list[int]:
    """Enumerate minimal hitting sets T with base <= T <= base | cand.

    ``edges`` must be non-empty masks. ``order_rank[v]`` fixes the branching
    order of candidate vertices (lower rank first). The result lists each
    qualifying set exactly once, in search order.
    """
    E = len(edges)
    edges_with: dict[int, list[int]] = {}
    for idx, e in enumerate(edges):
        if e == 0:
            raise ValueError("empty hyperedge reached the search kernel")
        v = e
        while v:
            low = v & -v
            edges_with.setdefault(low.bit_length() - 1, []).append(idx)
            v ^= low

    cover = [0] * E
    critv = [-1] * E
    crit_count: dict[int, int] = {}
    s_vertices: list[int] = []
    v = base
    while v:
        low = v & -v
        s_vertices.append(low.bit_length() - 1)
        v ^= low
    for u in s_vertices:
        crit_count[u] = 0
    for idx, e in enumerate(edges):
        inter = e & base
        c = inter.bit_count()
        cover[idx] = c
        if c == 1:
            u = inter.bit_length() - 1
            critv[idx] = u
            crit_count[u] += 1
    if E and any(crit_count[u] == 0 for u in s_vertices):
        return []  # base is already non-minimal against these edges
    if E == 0 and base != 0:
        return []

    out: list[int] = []
    s_mask = [base]

    def rec(cand: int) -> None:
        uncov = [i for i in range(E) if cover[i] == 0]
        if not uncov:
            out.append(s_mask[0])
            return
        best = min(uncov, key=lambda i: ((edges[i] & cand).bit_count(), i))
        c_set = edges[best] & cand
        if c_set == 0:
            return
        cand &= ~c_set
        branch = []
        v = c_set
        while v:
            low = v & -v
            branch.append(low.bit_length() - 1)
            v ^= low
        branch.sort(key=lambda b: order_rank[b])
        for b in branch:
            became_one: list[int] = []
            became_two: list[int] = []
            for idx in edges_with.get(b, ()):
                cover[idx] += 1
                if cover[idx] == 1:
                    critv[idx] = b
                    became_one.append(idx)
                elif cover[idx] == 2:
                    became_two.append(idx)
                    crit_count[critv[idx]] -= 1
            crit_count[b] = crit_count.get(b, 0) + len(became_one)
            if all(crit_count[u] > 0 for u in s_vertices):
                s_vertices.append(b)
                s_mask[0] |= 1 << b
                rec(cand)
                s_mask[0] &= ~(1 << b)
                s_vertices.pop()
            crit_count[b] -= len(became_one)
            for idx in became_two:
                crit_count[critv[idx]] += 1
            for idx in became_one:
                critv[idx] = -1
            for idx in edges_with.get(b, ()):
                cover[idx] -= 1
            cand |= 1 << b

    rec(cand & ~base)
    return out


def scan_block(
    rows: np.ndarray,
    cols,
    lhs: tuple[int, ...],
    rhs: int,
    min_count: int,
    probe_keys: np.ndarray | None = None,
    probe_rhs: np.ndarray | None = None,
) -> BlockScan:
    """Bucket ``rows`` by their LHS key and check RHS homogeneity.

    Scans rows in the given order. The first row whose RHS code differs from
    its bucket's first row yields an ``internal`` conflict and scanning stops.
    Otherwise probes are checked in index order (first mismatching probe
    yields a ``cross`` conflict), then bucket counts are reported: matched
    buckets via ``matches`` (no count filter), unmatched buckets with
    count >= min_count via ``groups``, in first-seen order.
    """
    rhs_col = cols[rhs]
    lhs_cols = [cols[a] for a in lhs]
    buckets: dict[tuple[int, ...], list[int]] = {}
    for r in rows:
        r = int(r)
        key = tuple(int(c[r]) for c in lhs_cols)
        st = buckets.get(key)
        if st is None:
            buckets[key] = [r, int(rhs_col[r]), 1]
        elif int(rhs_col[r]) != st[1]:
            return BlockScan((st[0], r), None, [], [])
        else:
            st[2] += 1

    matches: list[tuple[int, int, int]] = []
    matched: set[tuple[int, ...]] = set()
    if probe_keys is not None:
        for i in range(len(probe_keys)):
            key = tuple(int(c) for c in probe_keys[i])
            st = buckets.get(key)
            if st is None:
                continue
            if int(probe_rhs[i]) != st[1]:
                return BlockScan(None, (st[0], i), [], [])
            matches.append((i, st[0], st[2]))
            matched.add(key)
    groups = [
        (st[0], st[2])
        for key, st in buckets.items()
        if st[2] >= min_count and key not in matched
    ]
    return BlockScan(None, None, groups, matches)
