from __future__ import annotations

import gzip
import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbtree_ids import (CLASS_ORDER, KDD99_LABELS, KDD99_SCHEMA, AttributeKind, AttributeSchema, Dataset, Example,
                        load_dataset, load_label_mapper, map_attack_label, parse_record)
from nbtree_ids.data_model import (AttributeValueError, EmptyDatasetError, RecordFormatError, UnknownLabelError,
                                   format_record)

NORMAL_LINE = ("0,tcp,http,SF,181,5450,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,8,8,0.00,0.00,0.00,0.00,1.00,0.00,0.00,"
               "9,9,1.00,0.00,0.11,0.00,0.00,0.00,0.00,0.00,normal.")

TABLE_LABELS = {
    "DoS": ["back", "land", "neptune", "pod", "smurf", "teardrop"],
    "R2L": ["ftp_write", "guess_passwd", "imap", "multihop", "phf", "spy", "warezclient", "warezmaster"],
    "U2R": ["buffer_overflow", "perl", "loadmodule", "rootkit"],
    "Probe": ["ipsweep", "nmap", "portsweep", "satan"],
}


def test_schema_has_41_attributes_in_order():
    assert len(KDD99_SCHEMA) == 41
    assert [a.index for a in KDD99_SCHEMA] == list(range(41))
    assert KDD99_SCHEMA[1].name == "protocol_type" and KDD99_SCHEMA[1].kind is AttributeKind.DISCRETE
    assert KDD99_SCHEMA[24].name == "serror_rate" and KDD99_SCHEMA[24].kind is AttributeKind.CONTINUOUS
    discrete = {a.name for a in KDD99_SCHEMA if a.kind is AttributeKind.DISCRETE}
    assert discrete == {"protocol_type", "service", "flag", "land", "logged_in", "is_host_login", "is_guest_login"}


def test_class_order_is_fixed():
    assert CLASS_ORDER == ("Normal", "Probe", "DoS", "U2R", "R2L")


def test_parse_normal_record():
    e = parse_record(NORMAL_LINE)
    assert e.raw_label == "normal" and e.label == "normal"
    assert len(e.values) == 41
    assert e.values[:6] == (0.0, "tcp", "http", "SF", 181.0, 5450.0)
    assert parse_record(NORMAL_LINE, mapper=KDD99_LABELS).label == "Normal"


def test_parse_wrong_field_count_reports_line():
    line = NORMAL_LINE.split(",")
    del line[3]
    with pytest.raises(RecordFormatError, match="line 7"):
        parse_record(",".join(line), lineno=7)


def test_parse_bad_real_names_attribute():
    fields = NORMAL_LINE.split(",")
    fields[24] = "0.5x"
    with pytest.raises(AttributeValueError, match="serror_rate") as info:
        parse_record(",".join(fields))
    assert info.value.attribute == "serror_rate"


def test_parse_missing_marker():
    fields = NORMAL_LINE.split(",")
    fields[0], fields[1] = "?", "?"
    e = parse_record(",".join(fields))
    assert math.isnan(e.values[0]) and e.values[1] is None


@pytest.mark.parametrize("raw,cat", [("neptune", "DoS"), ("ipsweep", "Probe"), ("normal", "Normal"),
                                     ("smurt", "DoS"), ("NEPTUNE.", "DoS")])
def test_map_attack_label(raw, cat):
    assert map_attack_label(raw) == cat


def test_mapping_is_total_over_table_labels():
    for cat, names in TABLE_LABELS.items():
        for name in names:
            assert map_attack_label(name) == cat
    assert len({n for ns in TABLE_LABELS.values() for n in ns}) == 22


def test_unknown_label_strict_and_fallback():
    with pytest.raises(UnknownLabelError, match="xterm"):
        map_attack_label("xterm")
    lenient = load_label_mapper(strict=False, fallback="R2L")
    assert lenient("xterm") == "R2L"


def test_label_config_extends_bundled(tmp_path):
    cfg = tmp_path / "extra.yaml"
    cfg.write_text("labels:\n  xterm: U2R\n")
    m = load_label_mapper(cfg)
    assert m("xterm") == "U2R" and m("neptune") == "DoS"


def _lines(n):
    fields = NORMAL_LINE.split(",")
    out = []
    for i in range(n):
        f = list(fields)
        f[4] = str(100 + i)
        f[-1] = ["normal.", "neptune.", "ipsweep."][i % 3]
        out.append(",".join(f))
    return out


def test_load_three_rows():
    d = load_dataset(io.BytesIO(("\n".join(_lines(3)) + "\n").encode()))
    assert len(d) == 3
    assert list(d.labels) == ["Normal", "DoS", "Probe"]
    assert d.class_counts() == {"Normal": 1, "Probe": 1, "DoS": 1, "U2R": 0, "R2L": 0}


def test_load_gzip_autodetected(tmp_path):
    p = tmp_path / "records"
    p.write_bytes(gzip.compress(("\n".join(_lines(5)) + "\n").encode()))
    assert len(load_dataset(p)) == 5


def test_load_preserves_order_and_multiplicity():
    lines = _lines(4)
    lines = [lines[0], lines[1], lines[0], lines[3], lines[0]]
    d = load_dataset(io.BytesIO("\n".join(lines).encode()))
    assert len(d) == 5
    assert [e.values[4] for e in d] == [100.0, 101.0, 100.0, 103.0, 100.0]


def test_load_empty_source():
    with pytest.raises(EmptyDatasetError):
        load_dataset(io.BytesIO(b"\n\n"))


def test_load_errors_carry_line_numbers():
    lines = _lines(4)
    lines[2] = lines[2].rsplit(",", 1)[0] + ",xterm."
    with pytest.raises(UnknownLabelError, match="line 3"):
        load_dataset(io.BytesIO("\n".join(lines).encode()))
    lines = _lines(4)
    lines[3] = lines[3].rsplit(",", 2)[0] + ",normal."
    with pytest.raises(RecordFormatError, match="line 4"):
        load_dataset(io.BytesIO("\n".join(lines).encode()))


def test_fast_and_slow_paths_agree(fixture_path):
    d = load_dataset(fixture_path)
    examples = [parse_record(line, mapper=KDD99_LABELS) for line in fixture_path.read_text().splitlines()]
    slow = Dataset.from_examples(KDD99_SCHEMA, examples, CLASS_ORDER)
    assert list(d.labels) == list(slow.labels)
    for a, b in zip(d.columns, slow.columns):
        assert list(a) == list(b)


def test_fixture_counts(fixture_path):
    d = load_dataset(fixture_path)
    assert len(d) == 1000
    assert all(v > 0 for v in d.class_counts().values())


@given(st.lists(st.floats(0, 1e9, allow_nan=False).map(lambda x: round(x, 2)), min_size=34, max_size=34),
       st.sampled_from(["tcp", "udp", "icmp"]), st.sampled_from(sorted(KDD99_LABELS.mapping)))
def test_parse_format_roundtrip(reals, proto, label):
    values, it = [], iter(reals)
    for a in KDD99_SCHEMA:
        values.append(next(it) if a.kind is AttributeKind.CONTINUOUS else (proto if a.index == 1 else "x"))
    e = Example(tuple(values), label, 1.0, label)
    back = parse_record(format_record(e))
    assert back.values == e.values and back.raw_label == label


def test_attribute_schema_invariants():
    with pytest.raises(ValueError):
        AttributeSchema("x", AttributeKind.CONTINUOUS, 0, (2.0, 1.0), True)
    with pytest.raises(ValueError):
        AttributeSchema("x", AttributeKind.DISCRETE, 0, (1.0,), True)
    with pytest.raises(ValueError):
        AttributeSchema("x", AttributeKind.CONTINUOUS, 0, (1.0,), False)
    a = AttributeSchema("x", "continuous", 0, (1.0, 2.0), True)
    assert not a.is_continuous


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset.from_rows([("a",)], ["c"], weights=[0])
    with pytest.raises(ValueError):
        Dataset.from_rows([("a",)], ["c"], class_order=["d"])
    d = Dataset.from_rows([("a", "b"), ("c", "d")], ["x", "y"])
    assert d.class_order == ("x", "y")
    assert d.project([1]).schema[0].name == "a1" and d.project([1]).schema[0].index == 0
    assert d.take(np.array([1])).labels.tolist() == ["y"]
