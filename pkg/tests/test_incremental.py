import random

import pytest

from conftest import (
    fds_as_pairs,
    load_students_delta,
    make_relation,
    random_relation,
    random_rows,
)
from fdinc.bitset import from_bits
from fdinc.discovery import discover
from fdinc.errors import SchemaMismatchError
from fdinc.incremental import update
from fdinc.oracle import brute_fds, check_fd
from fdinc.relation import append_batch, merge


def rows_of(rel):
    return [
        [rel.decode_cell(a, r) for a in range(rel.m)] for r in range(rel.n)
    ]


def split_state(rel, frac=0.8, seed=0, epsilon=0.3, theta=0.8):
    rows = rows_of(rel)
    rng = random.Random(seed)
    order = list(range(len(rows)))
    rng.shuffle(order)
    cut = max(1, int(len(rows) * frac))
    base_rows = [rows[i] for i in order[:cut]]
    delta_rows = [rows[i] for i in order[cut:]]
    base = make_relation(rel.schema.attributes, base_rows)
    return base, delta_rows


def test_students_worked_update(students_base):
    state = discover(students_base)
    a = students_base.schema.index
    delta = load_students_delta(state.rel)
    state = update(state, delta)
    assert state.fdset == brute_fds(state.rel)
    removed = set(state.last_stats.removed)
    added = set(state.last_stats.added)
    assert removed == {(a("SDorm"), from_bits([a("SMajor")]))}
    assert added == {(a("SDorm"), from_bits([a("SGrade"), a("SMajor")]))}


def test_empty_delta_no_change(students_base):
    state = discover(students_base)
    before = state.fdset.snapshot()
    delta = append_batch(state.rel, [])
    state = update(state, delta)
    assert state.fdset.snapshot() == before
    assert state.last_stats.added == [] and state.last_stats.removed == []


def test_update_requires_matching_base(students_base):
    state = discover(students_base)
    other = random_relation(seed=5, n=10, m=6)
    delta = append_batch(other, [])
    with pytest.raises(SchemaMismatchError):
        update(state, delta)


@pytest.mark.parametrize("case", range(10))
def test_incremental_equals_static_on_random_splits(case):
    rel = random_relation(seed=2000 + case, n=40 + 13 * case, m=4 + case % 4,
                          null_rate=0.1)
    base, delta_rows = split_state(rel, seed=case)
    state = discover(base, seed=case)
    delta = append_batch(state.rel, delta_rows)
    state = update(state, delta)
    assert state.fdset == brute_fds(state.rel)
    # the merged relation must contain exactly the original multiset of rows
    assert sorted(map(tuple, rows_of(state.rel))) == sorted(
        map(tuple, rows_of(rel))
    )


def test_multibatch_equals_oneshot():
    rel = random_relation(seed=31, n=90, m=5, null_rate=0.08)
    base, delta_rows = split_state(rel, seed=3)
    one = discover(base, seed=1)
    one = update(one, append_batch(one.rel, delta_rows))

    many = discover(base, seed=1)
    third = max(1, len(delta_rows) // 3)
    for i in range(0, len(delta_rows), third):
        many = update(many, append_batch(many.rel, delta_rows[i : i + third]))
    assert one.fdset == many.fdset
    assert fds_as_pairs(one.fdset.per_rhs) == fds_as_pairs(brute_fds(one.rel))


def test_candidates_hold_locally_before_cross_validation():
    # every surviving FD holds on the base and on the delta taken alone
    rel = random_relation(seed=55, n=60, m=5)
    base, delta_rows = split_state(rel, seed=7)
    state = discover(base, seed=0)
    base_before = state.rel
    delta = append_batch(state.rel, delta_rows)
    delta_rel = make_relation(rel.schema.attributes, delta_rows)
    state = update(state, delta)
    for rhs, lhs in state.fdset.sorted_items():
        assert check_fd(base_before, lhs, rhs) is None
        assert check_fd(delta_rel, lhs, rhs) is None


def test_single_row_delta_can_invalidate():
    # one inserted tuple produces no within-delta diffs but must still be
    # validated against the base
    rel = make_relation(["a", "b"], [["k", "1"], ["k", "1"], ["j", "2"]])
    state = discover(rel)
    assert from_bits([0]) in state.fdset.per_rhs[1]
    delta = append_batch(state.rel, [["k", "9"]])
    state = update(state, delta)
    assert state.fdset == brute_fds(state.rel)
    assert from_bits([0]) not in state.fdset.per_rhs[1]


def test_delta_breaks_constant_column():
    rel = make_relation(["a", "b"], [["k", "1"], ["m", "1"]])
    state = discover(rel)
    assert state.fdset.per_rhs[1] == {0}
    delta = append_batch(state.rel, [["z", "2"]])
    state = update(state, delta)
    assert state.fdset == brute_fds(state.rel)


def test_full_scan_changes_no_verdict():
    for case in range(6):
        rel = random_relation(seed=4000 + case, n=70, m=5, null_rate=0.1)
        base, delta_rows = split_state(rel, seed=case)
        s1 = discover(base, seed=2)
        s1 = update(s1, append_batch(s1.rel, delta_rows))
        s2 = discover(base, seed=2)
        s2 = update(s2, append_batch(s2.rel, delta_rows), full_scan=True)
        assert s1.fdset == s2.fdset
        assert s1.fdset == brute_fds(s1.rel)


def test_selective_scan_reads_fewer_blocks():
    rel = random_relation(seed=90, n=200, m=6, cards=[2, 5, 200, 50, 200, 3])
    base, delta_rows = split_state(rel, seed=11)
    state = discover(base, seed=0)
    state = update(state, append_batch(state.rel, delta_rows[:10]))
    scans = state.last_stats.table_scans
    assert scans, "expected at least one table scan"
    assert any(read < total for read, total in scans)
    assert all(read <= total for read, total in scans)


def test_space_bound_after_updates():
    rel = random_relation(seed=61, n=80, m=5)
    base, delta_rows = split_state(rel, seed=9)
    state = discover(base)
    state = update(state, append_batch(state.rel, delta_rows))
    state.cache.assert_space_bound(state.fdset.count())
