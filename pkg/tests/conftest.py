import random
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from fdinc.relation import Dictionary, EncodedRelation, Schema, build_sorted_views

settings.register_profile("suite", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("suite")

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def make_relation(header, rows, null_token=""):
    """Encode in-memory string rows exactly as ingest_csv would."""
    schema = Schema(tuple(header))
    dicts = [Dictionary() for _ in range(schema.m)]
    cols = [[] for _ in range(schema.m)]
    for row in rows:
        assert len(row) == schema.m
        for a, cell in enumerate(row):
            cell = str(cell)
            if cell == "" or cell == null_token:
                cell = null_token
            cols[a].append(dicts[a].encode(cell))
    columns = [np.asarray(c, dtype=np.int32) for c in cols]
    return EncodedRelation(schema, columns, dicts, null_token)


def random_rows(seed, n, m, cards=None, null_rate=0.0):
    """Deterministic random string table with mixed column cardinalities."""
    rng = random.Random(seed)
    if cards is None:
        choices = [2, 3, 5, 10, 25, max(2, n)]
        cards = [rng.choice(choices) for _ in range(m)]
    rows = []
    for _ in range(n):
        row = []
        for a in range(m):
            if null_rate and rng.random() < null_rate:
                row.append("")
            else:
                row.append(f"v{rng.randrange(cards[a])}")
        rows.append(row)
    return rows


def random_relation(seed, n, m, cards=None, null_rate=0.0):
    header = [f"A{i}" for i in range(m)]
    return make_relation(header, random_rows(seed, n, m, cards, null_rate))


def fds_as_pairs(per_rhs):
    return {(rhs, lhs) for rhs, masks in per_rhs.items() for lhs in masks}


@pytest.fixture(scope="session")
def students_base():
    from fdinc.relation import ingest_csv

    return ingest_csv(DATA_DIR / "students_base.csv")


@pytest.fixture()
def students_views(students_base):
    return build_sorted_views(students_base)


def load_students_delta(rel):
    from fdinc.relation import read_delta_csv

    return read_delta_csv(DATA_DIR / "students_delta.csv", rel)
