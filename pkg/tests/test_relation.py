import numpy as np
import pytest

from conftest import DATA_DIR, make_relation, random_rows
from fdinc.errors import IngestError, SchemaMismatchError
from fdinc.relation import (
    append_batch,
    build_sorted_views,
    ingest_csv,
    merge,
    read_delta_csv,
)


def test_students_table_shape(students_base):
    assert students_base.n == 6
    assert students_base.m == 6
    assert students_base.schema.attributes[0] == "SNO"


def test_header_only_file_rejected(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("a,b,c\n")
    with pytest.raises(IngestError, match="zero tuples"):
        ingest_csv(p)


def test_empty_file_rejected(tmp_path):
    p = tmp_path / "none.csv"
    p.write_text("")
    with pytest.raises(IngestError):
        ingest_csv(p)


def test_ragged_row_reports_line_number(tmp_path):
    p = tmp_path / "ragged.csv"
    p.write_text("a,b\n1,2\n3\n")
    with pytest.raises(IngestError, match="line 3"):
        ingest_csv(p)


def test_duplicate_header_rejected(tmp_path):
    p = tmp_path / "dup.csv"
    p.write_text("a,a\n1,2\n")
    with pytest.raises(IngestError):
        ingest_csv(p)


def test_roundtrip_every_cell(tmp_path):
    rows = random_rows(seed=7, n=50, m=6)
    p = tmp_path / "t.csv"
    p.write_text(
        ",".join(f"c{i}" for i in range(6))
        + "\n"
        + "\n".join(",".join(r) for r in rows)
        + "\n"
    )
    rel = ingest_csv(p)
    for r, row in enumerate(rows):
        for a, cell in enumerate(row):
            assert rel.decode_cell(a, r) == cell


def test_encoding_deterministic(tmp_path):
    p = DATA_DIR / "students_base.csv"
    r1 = ingest_csv(p)
    r2 = ingest_csv(p)
    for a in range(r1.m):
        assert np.array_equal(r1.columns[a], r2.columns[a])
        assert r1.dictionaries[a].values == r2.dictionaries[a].values


def test_null_token_and_empty_share_a_code():
    rel = make_relation(["a", "b"], [["NA", "x"], ["", "y"], ["z", ""]], null_token="NA")
    assert rel.code(0, 0) == rel.code(0, 1)  # "NA" and "" collapse
    assert rel.code(0, 2) != rel.code(0, 0)
    # NULL-equals-NULL: equal cells compare equal through codes only
    assert rel.code(1, 2) == rel.dictionaries[1].encode("NA")


def test_sorted_view_blocks_small_case():
    # column with codes [2, 0, 2, 1]: groups in code order 0, 1, 2
    rel = make_relation(["x"], [["c"], ["a"], ["c"], ["b"]])
    rel.columns[0] = np.asarray([2, 0, 2, 1], dtype=np.int32)
    view = build_sorted_views(rel)[0]
    assert list(view.order) == [1, 3, 0, 2]
    assert view.blocks == {0: (0, 1), 1: (1, 2), 2: (2, 4)}
    assert view.distinct_count == 3


def test_sorted_view_constant_column():
    rel = make_relation(["x"], [["k"]] * 5)
    view = build_sorted_views(rel)[0]
    assert view.distinct_count == 1
    assert view.max_block_size == 5


def test_sorted_views_partition_rows(students_base, students_views):
    for view in students_views:
        sizes = [e - s for s, e in view.blocks.values()]
        assert sum(sizes) == students_base.n
        # each block is value-homogeneous and stable by row id
        for code, (s, e) in view.blocks.items():
            rows = view.order[s:e]
            assert all(students_base.code(view.attribute, int(r)) == code for r in rows)
            assert list(rows) == sorted(rows)


def test_append_batch_union_size(students_base):
    delta = read_delta_csv(DATA_DIR / "students_delta.csv", students_base)
    assert delta.n_delta == 4
    assert delta.n_union == 10


def test_append_empty_delta(students_base):
    delta = append_batch(students_base, [])
    assert delta.n_delta == 0
    assert delta.n_union == students_base.n
    assert merge(delta) is students_base


def test_append_arity_mismatch(students_base):
    with pytest.raises(SchemaMismatchError):
        append_batch(students_base, [["1", "2"]])


def test_delta_new_value_grows_dictionary(students_base):
    before = len(students_base.dictionaries[5])
    append_batch(students_base, [["999", "Amy", "20", "2021", "Math", "D9"]])
    assert len(students_base.dictionaries[5]) == before + 1


def test_delta_header_mismatch(tmp_path, students_base):
    p = tmp_path / "bad.csv"
    p.write_text("X,Y\n1,2\n")
    with pytest.raises(SchemaMismatchError):
        read_delta_csv(p, students_base)


def test_merge_concatenates(students_base):
    delta = read_delta_csv(DATA_DIR / "students_delta.csv", students_base)
    union = merge(delta)
    assert union.n == 10
    assert union.decode_cell(1, 8) == "Bob"
    assert union.decode_cell(5, 9) == "D4"
