from __future__ import annotations

import io
import json

import numpy as np
import pytest

from conftest import random_table
from nbtree_ids import (Dataset, HybridNBTreeClassifier, ID3Classifier, NaiveBayesClassifier, dump, dumps, load,
                        load_dataset, loads)
from nbtree_ids.benchmark import stratified_split
from nbtree_ids.serialization import ModelFormatError

KINDS = [HybridNBTreeClassifier, NaiveBayesClassifier, ID3Classifier]


@pytest.fixture(scope="module")
def split(fixture_path):
    return stratified_split(load_dataset(fixture_path), 0.2, 0)


@pytest.mark.parametrize("cls", KINDS)
def test_roundtrip_fixture(cls, split):
    train, test = split
    m = cls(schema=train.schema, class_order=train.class_order).fit(train)
    text = dumps(m)
    back = loads(text)
    assert dumps(back) == text
    assert (back.predict(test) == m.predict(test)).all()
    assert np.array_equal(back.predict_proba(test), m.predict_proba(test))


@pytest.mark.parametrize("cls", KINDS)
def test_roundtrip_discrete_unlimited(cls):
    rng = np.random.default_rng(6)
    rows, labels = random_table(rng, 200, 4, 3, 4)
    d = Dataset.from_rows(rows, labels)
    params = {"min_examples": 1, "max_depth": None} if cls is not NaiveBayesClassifier else {}
    m = cls(**params).fit(d)
    back = loads(dumps(m))
    X = np.array([tuple(f"v{x}" for x in rng.integers(0, 4, size=4)) for _ in range(300)], dtype=object)
    assert (back.predict(X) == m.predict(X)).all()


def test_file_layout(split):
    train, _ = split
    m = HybridNBTreeClassifier(schema=train.schema, class_order=train.class_order).fit(train)
    lines = dumps(m).splitlines()
    header = json.loads(lines[0])
    assert header["format"] == "nbtree-ids-model" and header["kind"] == "hybrid"
    assert header["params"]["alpha"] == 1.0 and header["params"]["max_depth"] == 10
    assert len(header["schema"]) == 41
    assert set(header["plan"]["borders"]) == {a.name for a in train.schema if a.kind.value == "continuous"}
    assert header["relabel_report"] == m.relabel_report_
    assert len(lines) == 1 + header["n_nodes"] == 1 + m.n_nodes_
    node = json.loads(lines[1])
    assert node["node"] == 0 and "priors" in node["nb"]


def test_dump_and_load_paths(tmp_path, split):
    train, test = split
    m = NaiveBayesClassifier(schema=train.schema).fit(train)
    p = tmp_path / "m.jsonl"
    dump(m, p)
    assert (load(p).predict(test) == m.predict(test)).all()
    buf = io.StringIO()
    dump(m, buf)
    buf.seek(0)
    assert dumps(load(buf)) == dumps(m)


@pytest.mark.parametrize("text", ["", "not json\n", json.dumps({"format": "other"}) + "\n",
                                  json.dumps({"format": "nbtree-ids-model", "version": 99}) + "\n"])
def test_bad_files(text):
    with pytest.raises(ModelFormatError):
        loads(text)


def test_truncated_file(split):
    train, _ = split
    m = ID3Classifier(schema=train.schema).fit(train)
    lines = dumps(m).splitlines()
    with pytest.raises(ModelFormatError):
        loads("\n".join(lines[:-1]))


def test_unfitted_model_rejected():
    with pytest.raises(Exception):
        dumps(NaiveBayesClassifier())
