import random

import pytest

from fdinc.bitset import from_bits, popcount
from fdinc.errors import StalenessError
from fdinc.hitting import (
    critical_edge_witness,
    enumerate_transversals,
    fresh_store,
    resume,
)
from fdinc.hypergraph import SubHypergraph
from fdinc.oracle import brute_mhs


def build(num_attrs, rhs, edges):
    h = SubHypergraph(rhs, num_attrs)
    for e in edges:
        h.add_edge(e)
    return h


def random_hypergraph(rng, max_vertices=12, max_edges=20, rhs_slot=True):
    nv = rng.randrange(2, max_vertices + 1)
    num_attrs = nv + 1  # one slot reserved as rhs
    h = SubHypergraph(rhs=nv, num_attrs=num_attrs)
    for _ in range(rng.randrange(0, max_edges + 1)):
        e = from_bits(v for v in range(nv) if rng.random() < rng.uniform(0.15, 0.6))
        if e:
            h.add_edge(e)
    return h


def test_single_edge():
    h = build(4, 0, [from_bits([1, 2])])
    assert enumerate_transversals(h) == {from_bits([1]), from_bits([2])}


def test_triangle_exact():
    h = build(4, 3, [from_bits([0, 1]), from_bits([1, 2]), from_bits([0, 2])])
    assert enumerate_transversals(h) == brute_mhs(h.edges)


def test_no_edges_yields_empty_lhs():
    h = build(4, 1, [])
    assert enumerate_transversals(h) == {0}


def test_poisoned_yields_nothing():
    h = build(4, 1, [])
    h.add_edge(0)
    assert enumerate_transversals(h) == set()


def test_enumerate_matches_brute_force_on_random_instances():
    rng = random.Random(404)
    for _ in range(120):
        h = random_hypergraph(rng)
        assert enumerate_transversals(h) == brute_mhs(h.edges)


def test_minimality_witness_on_outputs():
    rng = random.Random(77)
    for _ in range(40):
        h = random_hypergraph(rng, max_vertices=9, max_edges=12)
        for x in enumerate_transversals(h):
            assert critical_edge_witness(h, x)


def test_resume_worked_example():
    h = build(5, 0, [from_bits([1])])
    store = fresh_store(h)
    assert store.mhs == {from_bits([1])}
    rep = h.add_edge(from_bits([2, 3]))
    res = resume(store, h, rep.inserted)
    assert res.retired == {from_bits([1])}
    assert res.retained == set()
    assert res.added == {from_bits([1, 2]), from_bits([1, 3])}
    assert store.mhs == enumerate_transversals(h)


def test_resume_noop_when_new_edge_already_hit():
    h = build(5, 0, [from_bits([1]), from_bits([2])])
    store = fresh_store(h)
    rep = h.add_edge(from_bits([1, 3]))  # subsumed: nothing inserted
    assert rep.inserted == []
    res = resume(store, h, rep.inserted)
    assert res.added == set() and res.retired == set()


def test_resume_staleness_error():
    h = build(5, 0, [from_bits([1])])
    store = fresh_store(h)
    h.add_edge(from_bits([2]))
    with pytest.raises(StalenessError):
        resume(store, h, [])  # an inserted edge was not reported


def test_resume_equals_restart_on_random_sequences():
    rng = random.Random(2024)
    for _ in range(60):
        nv = rng.randrange(3, 11)
        h = SubHypergraph(rhs=nv, num_attrs=nv + 1)
        store = fresh_store(h)
        for _ in range(rng.randrange(1, 8)):
            batch = []
            for _ in range(rng.randrange(1, 4)):
                e = from_bits(v for v in range(nv) if rng.random() < 0.35)
                batch.append(e | (1 << nv))  # a raw diff containing the rhs
            rep = h.bulk_update(batch)
            res = resume(store, h, rep.inserted)
            fresh = enumerate_transversals(h)
            assert res.retained | res.added == fresh
            assert store.mhs == fresh
            assert res.retained & res.retired == set()
            for x in res.added:
                assert any(x & r == r and x != r for r in res.retired) or not res.retired


def test_resume_after_poison():
    h = build(5, 0, [from_bits([1])])
    store = fresh_store(h)
    rep = h.bulk_update([from_bits([0])])  # diff {rhs}: empty edge, poisons
    assert h.poisoned
    res = resume(store, h, rep.inserted)
    assert store.mhs == set()
    assert res.retired == {from_bits([1])}


def test_deterministic_enumeration_order():
    h = build(6, 5, [from_bits([0, 1, 2]), from_bits([2, 3]), from_bits([0, 4])])
    runs = {tuple(sorted(enumerate_transversals(h))) for _ in range(3)}
    assert len(runs) == 1
