"""Brute-force reference implementations for tests and acceptance checks.

Deliberately independent of the engine: validity here is decided by full
partition refinement over raw code columns, and minimal transversals by
exhaustive subset filtering. Nothing in this module touches the kernels, the
hypergraph machinery, or the grouped block validation, so an engine/oracle
agreement is evidence rather than tautology. Desk-scale size guards refuse
inputs these exhaustive methods cannot handle.
"""

from __future__ import annotations

from itertools import combinations

from .bitset import from_bits
from .errors import SizeGuardError
from .relation import EncodedRelation

MAX_ORACLE_ROWS = 2000
MAX_ORACLE_ATTRS = 15
MAX_MHS_VERTICES = 16


def check_fd(rel: EncodedRelation, lhs: int, rhs: int):
    """Exact validity of lhs->rhs: partition all rows by the LHS projection.

    Returns None when valid, else the first violating row pair in row order.
    """
    if lhs & (1 << rhs):
        raise ValueError("trivial FD: rhs contained in lhs")
    attrs = [a for a in range(rel.m) if lhs & (1 << a)]
    cols = [rel.columns[a] for a in attrs]
    rhs_col = rel.columns[rhs]
    seen: dict[tuple[int, ...], tuple[int, int]] = {}
    for r in range(rel.n):
        key = tuple(int(c[r]) for c in cols)
        hit = seen.get(key)
        if hit is None:
            seen[key] = (r, int(rhs_col[r]))
        elif hit[1] != int(rhs_col[r]):
            return (hit[0], r)
    return None


def brute_fds(rel: EncodedRelation) -> dict[int, set[int]]:
    """The complete minimal non-trivial FD set, level-wise with superset pruning.

    Returns {rhs: set of lhs masks}. Guarded to desk scale.
    """
    if rel.n > MAX_ORACLE_ROWS or rel.m > MAX_ORACLE_ATTRS:
        raise SizeGuardError(
            f"brute_fds refuses {rel.n} rows x {rel.m} attrs "
            f"(guard: {MAX_ORACLE_ROWS} x {MAX_ORACLE_ATTRS})"
        )
    out: dict[int, set[int]] = {}
    for rhs in range(rel.m):
        others = [a for a in range(rel.m) if a != rhs]
        minimal: list[int] = []
        for size in range(0, len(others) + 1):
            for combo in combinations(others, size):
                lhs = from_bits(combo)
                if any(mn & lhs == mn for mn in minimal):
                    continue
                if check_fd(rel, lhs, rhs) is None:
                    minimal.append(lhs)
        out[rhs] = set(minimal)
    return out


def brute_mhs(edges) -> set[int]:
    """Minimal hitting sets by filtering every vertex subset.

    An empty edge makes the hypergraph transversal-free; no edges at all make
    the empty set the single transversal.
    """
    edge_list = list(edges)
    if any(e == 0 for e in edge_list):
        return set()
    if not edge_list:
        return {0}
    universe = 0
    for e in edge_list:
        universe |= e
    verts = [v for v in range(universe.bit_length()) if universe & (1 << v)]
    if len(verts) > MAX_MHS_VERTICES:
        raise SizeGuardError(f"brute_mhs refuses {len(verts)} vertices")
    hitting_by_size: list[int] = []
    minimal: set[int] = set()
    for size in range(0, len(verts) + 1):
        for combo in combinations(verts, size):
            x = from_bits(combo)
            if any(mn & x == mn for mn in minimal):
                continue
            if all(x & e for e in edge_list):
                minimal.add(x)
    return minimal


def transversal_fds(rel: EncodedRelation) -> dict[int, set[int]]:
    """Second oracle route: full pairwise difference sets, then transversals.

    Cross-checks brute_fds through an entirely different argument (agreement
    of the two routes is itself a tested property).
    """
    if rel.n > MAX_ORACLE_ROWS or rel.m > MAX_MHS_VERTICES:
        raise SizeGuardError("transversal_fds size guard exceeded")
    diffs: set[int] = set()
    for r1 in range(rel.n - 1):
        for r2 in range(r1 + 1, rel.n):
            mask = 0
            for a in range(rel.m):
                if rel.columns[a][r1] != rel.columns[a][r2]:
                    mask |= 1 << a
            if mask:
                diffs.add(mask)
    out: dict[int, set[int]] = {}
    for rhs in range(rel.m):
        bit = 1 << rhs
        projected = {d & ~bit for d in diffs if d & bit}
        out[rhs] = brute_mhs(projected)
    return out
