import pytest

from conftest import fds_as_pairs, make_relation, random_relation
from fdinc.bitset import from_bits
from fdinc.errors import SizeGuardError
from fdinc.oracle import brute_fds, brute_mhs, check_fd, transversal_fds


def idx(rel, *names):
    return from_bits(rel.schema.index(n) for n in names)


def test_student_key_fd_valid(students_base):
    rel = students_base
    assert check_fd(rel, idx(rel, "SNO"), rel.schema.index("SName")) is None


def test_valid_but_not_minimal(students_base):
    rel = students_base
    lhs = idx(rel, "SNO", "SName")
    rhs = rel.schema.index("SMajor")
    assert check_fd(rel, lhs, rhs) is None
    assert lhs not in brute_fds(rel)[rhs]
    assert idx(rel, "SNO") in brute_fds(rel)[rhs]


def test_all_other_attributes_as_key():
    rel = make_relation(["a", "b"], [["1", "x"], ["2", "y"]])
    assert check_fd(rel, from_bits([0]), 1) is None


def test_check_fd_witness_is_first_violation(students_base):
    rel = students_base
    witness = check_fd(rel, idx(rel, "SName"), rel.schema.index("SAge"))
    # rows 1 (s2) and 2 (s3) are the first same-name pair with differing ages
    assert witness == (1, 2)
    r1, r2 = witness
    assert rel.code(1, r1) == rel.code(1, r2)
    assert rel.code(2, r1) != rel.code(2, r2)


def test_students_complete_fd_set(students_base):
    rel = students_base
    fds = brute_fds(rel)
    a = rel.schema.index
    expected = {
        (a("SName"), idx(rel, "SNO")),
        (a("SAge"), idx(rel, "SNO")),
        (a("SGrade"), idx(rel, "SNO")),
        (a("SMajor"), idx(rel, "SNO")),
        (a("SDorm"), idx(rel, "SNO")),
        (a("SDorm"), idx(rel, "SMajor")),
        (a("SNO"), idx(rel, "SName", "SAge", "SGrade", "SMajor")),
    }
    assert fds_as_pairs(fds) == expected


def test_identical_rows_give_constant_fds():
    rel = make_relation(["a", "b"], [["1", "x"]] * 4)
    fds = brute_fds(rel)
    assert fds == {0: {0}, 1: {0}}  # {} -> a and {} -> b


def test_brute_mhs_single_edge():
    assert brute_mhs([from_bits([1, 2])]) == {from_bits([1]), from_bits([2])}


def test_brute_mhs_triangle():
    edges = [from_bits([0, 1]), from_bits([1, 2]), from_bits([0, 2])]
    assert brute_mhs(edges) == {
        from_bits([0, 1]),
        from_bits([1, 2]),
        from_bits([0, 2]),
    }


def test_brute_mhs_empty_edge_unhittable():
    assert brute_mhs([0, from_bits([1])]) == set()


def test_brute_mhs_no_edges():
    assert brute_mhs([]) == {0}


def test_size_guards():
    rel = random_relation(seed=1, n=5, m=5)
    big = make_relation([f"c{i}" for i in range(16)], [["x"] * 16])
    with pytest.raises(SizeGuardError):
        brute_fds(big)
    with pytest.raises(SizeGuardError):
        brute_mhs([from_bits(range(17))])
    brute_fds(rel)  # within guard


@pytest.mark.parametrize("seed", [11, 12, 13, 14, 15])
def test_two_oracle_routes_agree(seed):
    rel = random_relation(seed, n=40, m=5, null_rate=0.1)
    assert brute_fds(rel) == transversal_fds(rel)
