"""Dataset representation and KDD99 record handling.

Records are comma-separated rows of 41 attribute values followed by a
label that carries a trailing dot in the published files
(``0,tcp,http,SF,181,5450,...,normal.``).  Attribute kinds and the
raw-label -> category mapping live in a YAML config so that test-set
attack names can be added without code changes.
"""
from __future__ import annotations

import enum
import gzip
import io
import logging
import math
import os
from collections import Counter
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np
import pandas as pd
import yaml

logger = logging.getLogger(__name__)

MISSING_MARKERS = frozenset({"?", ""})
GZIP_MAGIC = b"\x1f\x8b"
DATA_DIR_ENV = "NBTREE_IDS_DATA"


class AttackClass(str, enum.Enum):
    NORMAL = "Normal"
    PROBE = "Probe"
    DOS = "DoS"
    U2R = "U2R"
    R2L = "R2L"

    def __str__(self) -> str:
        return self.value


# Deterministic tie-break order used everywhere a class choice can tie.
CLASS_ORDER: tuple[str, ...] = tuple(c.value for c in AttackClass)


class AttributeKind(str, enum.Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


class DataError(ValueError):
    """Base class for input data problems."""


class RecordFormatError(DataError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class AttributeValueError(DataError):
    def __init__(self, attribute: str, value: str, lineno: int | None = None):
        self.attribute = attribute
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{where}cannot parse {value!r} as a real for continuous attribute {attribute!r}")


class UnknownLabelError(DataError):
    def __init__(self, raw: str, lineno: int | None = None):
        self.raw = raw
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{where}unknown attack label {raw!r}; add it to the label mapping config")


class EmptyDatasetError(DataError):
    pass


class SchemaMismatchError(DataError):
    pass


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    kind: AttributeKind
    index: int
    borders: tuple[float, ...] = ()
    discretized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", AttributeKind(self.kind))
        object.__setattr__(self, "borders", tuple(float(b) for b in self.borders))
        if any(b >= c for b, c in zip(self.borders, self.borders[1:])):
            raise ValueError(f"borders of {self.name!r} must be strictly increasing")
        if self.borders and not (self.kind is AttributeKind.CONTINUOUS and self.discretized):
            raise ValueError(f"only discretized continuous attributes carry borders ({self.name!r})")

    @property
    def is_continuous(self) -> bool:
        """True while the attribute still holds raw reals."""
        return self.kind is AttributeKind.CONTINUOUS and not self.discretized


@dataclass(frozen=True)
class Example:
    values: tuple
    label: str
    weight: float = 1.0
    raw_label: str | None = None


class LabelMapper:
    """Maps raw KDD99 labels (``neptune``) to the five categories (``DoS``).

    With ``strict=True`` unknown labels raise :class:`UnknownLabelError`;
    otherwise they map to ``fallback``.
    """

    def __init__(self, mapping: Mapping[str, str], strict: bool = True, fallback: str | None = None):
        self.mapping = {k.strip().lower().rstrip("."): str(v) for k, v in mapping.items()}
        self.strict = strict
        self.fallback = fallback
        if not strict and fallback is None:
            raise ValueError("non-strict label mapping needs a fallback category")

    def __call__(self, raw: str, lineno: int | None = None) -> str:
        key = raw.strip().lower().rstrip(".")
        try:
            return self.mapping[key]
        except KeyError:
            if self.strict:
                raise UnknownLabelError(key, lineno) from None
            return self.fallback

    def extend(self, extra: Mapping[str, str]) -> "LabelMapper":
        return LabelMapper({**self.mapping, **extra}, strict=self.strict, fallback=self.fallback)


def _read_config(path) -> dict:
    if path is None:
        text = resources.files("nbtree_ids").joinpath("data/kdd99.yaml").read_text()
    else:
        text = Path(path).read_text()
    return yaml.safe_load(text) or {}


def schema_from_config(cfg: Mapping) -> tuple[AttributeSchema, ...]:
    attrs = cfg.get("attributes")
    if not attrs:
        raise ValueError("config has no 'attributes' list")
    return tuple(AttributeSchema(a["name"], AttributeKind(a["kind"]), i) for i, a in enumerate(attrs))


def load_schema(path=None) -> tuple[AttributeSchema, ...]:
    """Attribute schema from a YAML config; the bundled KDD99 one by default."""
    return schema_from_config(_read_config(path))


def load_label_mapper(path=None, strict: bool = True, fallback: str | None = None) -> LabelMapper:
    """Label mapper from a YAML config.

    A user config's ``labels`` section extends the bundled KDD99 table, so
    it only needs to list the extra names (e.g. test-set-only attacks).
    """
    base = _read_config(None).get("labels", {})
    extra = _read_config(path).get("labels", {}) if path is not None else {}
    return LabelMapper({**base, **extra}, strict=strict, fallback=fallback)


KDD99_SCHEMA: tuple[AttributeSchema, ...] = load_schema()
KDD99_LABELS: LabelMapper = load_label_mapper()


def map_attack_label(raw: str, mapper: LabelMapper | None = None) -> str:
    return (mapper or KDD99_LABELS)(raw)


def _parse_real(text: str, attr: AttributeSchema, lineno):
    if text in MISSING_MARKERS:
        return math.nan
    try:
        value = float(text)
    except ValueError:
        raise AttributeValueError(attr.name, text, lineno) from None
    if not math.isfinite(value):
        raise AttributeValueError(attr.name, text, lineno)
    return value


def parse_record(line: str, schema: Sequence[AttributeSchema] = KDD99_SCHEMA,
                 mapper: LabelMapper | None = None, lineno: int | None = None) -> Example:
    """Parse one comma-separated record.

    The label keeps its raw spelling (dot stripped) in ``raw_label``; when a
    ``mapper`` is given ``label`` holds the mapped category, otherwise the
    raw label.
    """
    fields = [f.strip() for f in line.rstrip("\r\n").split(",")]
    if len(fields) != len(schema) + 1:
        raise RecordFormatError(f"expected {len(schema) + 1} fields, got {len(fields)}", lineno)
    values = []
    for attr, text in zip(schema, fields):
        if attr.kind is AttributeKind.CONTINUOUS:
            values.append(_parse_real(text, attr, lineno))
        else:
            values.append(None if text in MISSING_MARKERS else text)
    raw = fields[-1].lower().rstrip(".")
    label = mapper(raw, lineno) if mapper is not None else raw
    return Example(tuple(values), label, 1.0, raw)


def _format_value(value, attr: AttributeSchema) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "?"
    if attr.kind is AttributeKind.CONTINUOUS and not attr.discretized:
        value = float(value)
        return str(int(value)) if value.is_integer() and abs(value) < 2**53 else repr(value)
    return str(value)


def format_record(example: Example, schema: Sequence[AttributeSchema] = KDD99_SCHEMA) -> str:
    label = example.raw_label if example.raw_label is not None else example.label
    body = ",".join(_format_value(v, a) for v, a in zip(example.values, schema))
    return f"{body},{label}."


@dataclass(frozen=True)
class Dataset:
    """Column-oriented, immutable collection of examples.

    ``columns[i]`` holds attribute ``i``: float64 with NaN for missing while
    continuous, object (text, ``None`` for missing) while discrete, int64
    interval indices once discretized.
    """

    schema: tuple[AttributeSchema, ...]
    columns: tuple[np.ndarray, ...]
    labels: np.ndarray
    weights: np.ndarray = None
    raw_labels: np.ndarray | None = None
    class_order: tuple[str, ...] = CLASS_ORDER

    def __post_init__(self):
        n = len(self.labels)
        object.__setattr__(self, "schema", tuple(self.schema))
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=object))
        object.__setattr__(self, "class_order", tuple(self.class_order))
        if self.weights is None:
            object.__setattr__(self, "weights", np.ones(n))
        else:
            object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if len(self.columns) != len(self.schema):
            raise SchemaMismatchError(f"{len(self.columns)} columns for {len(self.schema)} attributes")
        for col, attr in zip(self.columns, self.schema):
            if len(col) != n:
                raise SchemaMismatchError(f"column {attr.name!r} has {len(col)} rows, expected {n}")
        if len(self.weights) != n or (n and self.weights.min() <= 0):
            raise ValueError("weights must be positive, one per example")
        unknown = set(np.unique(self.labels)) - set(self.class_order) if n else set()
        if unknown:
            raise ValueError(f"labels {sorted(unknown)} missing from class_order {self.class_order}")

    @classmethod
    def from_examples(cls, schema: Sequence[AttributeSchema], examples: Iterable[Example],
                      class_order: Sequence[str] | None = None) -> "Dataset":
        schema = tuple(schema)
        examples = list(examples)
        for i, e in enumerate(examples):
            if len(e.values) != len(schema):
                raise SchemaMismatchError(f"example {i} has {len(e.values)} values, schema has {len(schema)}")
        columns = []
        for j, attr in enumerate(schema):
            raw = [e.values[j] for e in examples]
            if attr.is_continuous:
                columns.append(np.array([math.nan if v is None else float(v) for v in raw], dtype=float))
            elif attr.discretized:
                columns.append(np.array(raw, dtype=np.int64))
            else:
                columns.append(_object_array(raw))
        labels = [e.label for e in examples]
        if class_order is None:
            class_order = sorted(set(labels), key=str)
        raw_labels = _object_array([e.raw_label if e.raw_label is not None else e.label for e in examples])
        return cls(schema, tuple(columns), _object_array(labels), np.array([e.weight for e in examples], float),
                   raw_labels, tuple(class_order))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], labels: Sequence[str], names: Sequence[str] | None = None,
                  weights=None, class_order=None) -> "Dataset":
        """Small all-discrete dataset from Python rows; convenient for tests."""
        rows = [tuple(r) for r in rows]
        p = len(rows[0]) if rows else len(names or ())
        names = names or [f"a{j}" for j in range(p)]
        schema = tuple(AttributeSchema(n, AttributeKind.DISCRETE, j) for j, n in enumerate(names))
        weights = [1.0] * len(rows) if weights is None else weights
        return cls.from_examples(schema, [Example(r, l, float(w)) for r, l, w in zip(rows, labels, weights)],
                                 class_order)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[Example]:
        for i in range(len(self)):
            yield self.example(i)

    def example(self, i: int) -> Example:
        values = tuple(_scalar(col[i]) for col in self.columns)
        raw = self.raw_labels[i] if self.raw_labels is not None else None
        return Example(values, self.labels[i], float(self.weights[i]), raw)

    @property
    def arity(self) -> int:
        return len(self.schema)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def is_discrete(self) -> bool:
        return not any(a.is_continuous for a in self.schema)

    def class_counts(self, weighted: bool = False) -> dict[str, float]:
        """Rows (or total weight) per class in ``class_order``."""
        out = {}
        for c in self.class_order:
            mask = self.labels == c
            out[c] = float(self.weights[mask].sum()) if weighted else int(mask.sum())
        return out

    def take(self, index) -> "Dataset":
        index = np.asarray(index)
        return replace(
            self,
            columns=tuple(col[index] for col in self.columns),
            labels=self.labels[index],
            weights=self.weights[index],
            raw_labels=None if self.raw_labels is None else self.raw_labels[index],
        )

    def project(self, indices: Sequence[int]) -> "Dataset":
        """Keep only the given attributes, renumbering their schema indices."""
        schema = tuple(replace(self.schema[j], index=k) for k, j in enumerate(indices))
        return replace(self, schema=schema, columns=tuple(self.columns[j] for j in indices))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({a.name: col for a, col in zip(self.schema, self.columns)})


def _object_array(values) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    out[:] = list(values)
    return out


def _scalar(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def open_source(source) -> IO[bytes]:
    """Binary stream for a path or stream, transparently gunzipping by magic bytes."""
    if isinstance(source, (str, os.PathLike)):
        stream = open(source, "rb")
    else:
        stream = source
    if not hasattr(stream, "peek"):
        stream = io.BufferedReader(stream if isinstance(stream, io.RawIOBase) else io.BytesIO(stream.read()))
    if stream.peek(2)[:2] == GZIP_MAGIC:
        return gzip.GzipFile(fileobj=stream)
    return stream


def _parse_slow(text: str, schema, mapper) -> list[Example]:
    examples = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            examples.append(parse_record(line, schema, mapper, lineno))
    return examples


def load_dataset(source, schema: Sequence[AttributeSchema] = KDD99_SCHEMA,
                 mapper: LabelMapper | None = KDD99_LABELS, class_order: Sequence[str] = CLASS_ORDER) -> Dataset:
    """Load a record file (path or byte stream, plain or gzip) into a Dataset.

    Record order and multiplicity are preserved.  Parsing goes through
    pandas; any malformed input is re-parsed line by line so the error
    carries the offending line number.
    """
    schema = tuple(schema)
    with open_source(source) as stream:
        text = stream.read().decode("utf-8", errors="replace")
    if not text.strip():
        raise EmptyDatasetError("no records in input")

    n_fields = len(schema) + 1
    try:
        if any(line.count(",") != n_fields - 1 for line in text.splitlines() if line.strip()):
            raise ValueError("wrong field count")
        frame = pd.read_csv(io.StringIO(text), header=None, names=range(n_fields), dtype=str,
                            na_filter=False, skipinitialspace=True, engine="c")
        if frame.isna().to_numpy().any():
            raise ValueError("short record")
        columns = []
        for j, attr in enumerate(schema):
            col = frame[j].str.strip()
            missing = col.isin(MISSING_MARKERS).to_numpy()
            if attr.kind is AttributeKind.CONTINUOUS:
                values = pd.to_numeric(col.where(~missing, "nan"), errors="raise").to_numpy(dtype=float)
                if not np.isfinite(values[~missing]).all():
                    raise ValueError("non-finite real")
                columns.append(values)
            else:
                values = col.to_numpy(dtype=object)
                values[missing] = None
                columns.append(values)
        raw = frame[n_fields - 1].str.strip().str.lower().str.rstrip(".").to_numpy(dtype=object)
    except (ValueError, pd.errors.ParserError):
        examples = _parse_slow(text, schema, mapper)
        # the slow path raises with a line number whenever the fast path had a reason to fail
        return Dataset.from_examples(schema, examples, class_order)

    if mapper is None:
        labels = raw
    else:
        table = {}
        for r in pd.unique(raw):
            try:
                table[r] = mapper(r)
            except UnknownLabelError:
                lineno = _lineno_of_row(text, int(np.flatnonzero(raw == r)[0]))
                raise UnknownLabelError(r, lineno) from None
        labels = _object_array([table[r] for r in raw])
    if mapper is None and class_order == CLASS_ORDER:
        class_order = tuple(sorted(set(labels)))
    ds = Dataset(schema, tuple(columns), labels, None, raw, tuple(class_order))
    logger.info("loaded %d records: %s", len(ds), ds.class_counts())
    return ds


def _lineno_of_row(text: str, row: int) -> int:
    seen = -1
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            seen += 1
            if seen == row:
                return lineno
    return -1


def raw_label_counts(ds: Dataset) -> Counter:
    return Counter(ds.raw_labels if ds.raw_labels is not None else ds.labels)


def default_data_path(name: str) -> Path:
    """Resolve ``name`` against ``$NBTREE_IDS_DATA`` (falls back to the cwd)."""
    return Path(os.environ.get(DATA_DIR_ENV, ".")) / name
