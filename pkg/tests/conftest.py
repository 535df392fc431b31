from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from nbtree_ids import Dataset

DATA = Path(__file__).parent / "data"
FIXTURE = DATA / "kdd_fixture_1000.csv"
SEPARABLE = DATA / "kdd_separable.csv"

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

D4_ROWS = [("sun", "y"), ("sun", "n"), ("rain", "y"), ("rain", "n")]
D4_LABELS = ["play", "play", "stay", "play"]


def d4() -> Dataset:
    return Dataset.from_rows(D4_ROWS, D4_LABELS, names=["outlook", "windy"], class_order=["play", "stay"])


@pytest.fixture
def d4_data() -> Dataset:
    return d4()


@pytest.fixture(scope="session")
def fixture_path() -> Path:
    return FIXTURE


@pytest.fixture(scope="session")
def separable_path() -> Path:
    return SEPARABLE


@st.composite
def discrete_tables(draw, max_rows=30, max_attrs=4, max_values=3, max_classes=3, weighted=False):
    """Random small all-discrete datasets as ``(rows, labels, weights)``."""
    n = draw(st.integers(1, max_rows))
    p = draw(st.integers(1, max_attrs))
    k = draw(st.integers(1, max_classes))
    v = draw(st.integers(1, max_values))
    rows = draw(st.lists(st.tuples(*[st.sampled_from([f"v{i}" for i in range(v)])] * p), min_size=n, max_size=n))
    labels = draw(st.lists(st.sampled_from([f"c{i}" for i in range(k)]), min_size=n, max_size=n))
    weights = draw(st.lists(st.integers(1, 4), min_size=n, max_size=n)) if weighted else [1] * n
    return rows, labels, weights


def random_table(rng: np.random.Generator, n: int, p: int, v: int, k: int):
    rows = [tuple(f"v{x}" for x in rng.integers(0, v, size=p)) for _ in range(n)]
    labels = [f"c{x}" for x in rng.integers(0, k, size=n)]
    return rows, labels


def contradiction_free(rows, labels):
    """First label wins per attribute vector."""
    seen = {}
    for r, c in zip(rows, labels):
        seen.setdefault(r, c)
    return rows, [seen[r] for r in rows]


# -- acceptance reporting ----------------------------------------------------

ACCEPTANCE_RESULTS: list[tuple[int, str, str, float, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, status, title, seconds, detail in sorted(ACCEPTANCE_RESULTS):
        line = f"criterion {n}: {status}  {title}  ({seconds:.2f}s)"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
