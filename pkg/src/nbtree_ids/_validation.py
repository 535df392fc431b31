"""Input validation helpers shared by the estimators and transformers.

Everything downstream works on a tuple of per-attribute 1-D arrays:
float64 (NaN = missing) for continuous attributes, object (``None`` =
missing) for discrete ones, int64 for discretized ones.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
import pandas as pd

from .data_model import AttributeKind, AttributeSchema, Dataset, SchemaMismatchError, _object_array


def infer_schema(X) -> tuple[AttributeSchema, ...]:
    """Guess attribute kinds: numeric columns are continuous, the rest discrete."""
    if isinstance(X, Dataset):
        return X.schema
    if isinstance(X, pd.DataFrame):
        out = []
        for j, name in enumerate(X.columns):
            dtype = X[name].dtype
            numeric = pd.api.types.is_numeric_dtype(dtype) and not pd.api.types.is_bool_dtype(dtype)
            out.append(AttributeSchema(str(name), AttributeKind.CONTINUOUS if numeric else AttributeKind.DISCRETE, j))
        return tuple(out)
    arr = _as_2d(X)
    out = []
    for j in range(arr.shape[1]):
        kind = AttributeKind.CONTINUOUS if _is_numeric_column(arr[:, j]) else AttributeKind.DISCRETE
        out.append(AttributeSchema(f"x{j}", kind, j))
    return tuple(out)


def _is_numeric_column(col: np.ndarray) -> bool:
    if col.dtype.kind in "iuf":
        return True
    if col.dtype.kind != "O":
        return False
    return all(v is None or (isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool))
               for v in col)


def _as_2d(X) -> np.ndarray:
    arr = np.asarray(X, dtype=object if not isinstance(X, np.ndarray) else None)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array of examples, got shape {arr.shape}")
    return arr


def check_columns(X, schema: Sequence[AttributeSchema]) -> tuple[np.ndarray, ...]:
    """Split ``X`` into typed per-attribute columns following ``schema``.

    Raises :class:`SchemaMismatchError` naming the first attribute that is
    absent from ``X``.
    """
    schema = tuple(schema)
    if isinstance(X, Dataset):
        if [a.name for a in X.schema] != [a.name for a in schema]:
            _raise_mismatch([a.name for a in X.schema], schema)
        raw = list(X.columns)
    elif isinstance(X, pd.DataFrame):
        names = [str(c) for c in X.columns]
        if names != [a.name for a in schema] and not all(isinstance(c, int) for c in X.columns):
            missing = [a.name for a in schema if a.name not in names]
            if missing:
                _raise_mismatch(names, schema)
            X = X[[a.name for a in schema]]
        if X.shape[1] != len(schema):
            _raise_mismatch(names, schema)
        raw = [X.iloc[:, j].to_numpy() for j in range(X.shape[1])]
    else:
        arr = _as_2d(X)
        if arr.shape[1] != len(schema):
            _raise_mismatch([f"x{j}" for j in range(arr.shape[1])], schema, arity=arr.shape[1])
        raw = [arr[:, j] for j in range(arr.shape[1])]

    columns = []
    for attr, col in zip(schema, raw):
        if attr.discretized:
            columns.append(np.asarray(col, dtype=np.int64))
        elif attr.kind is AttributeKind.CONTINUOUS:
            try:
                values = pd.to_numeric(pd.Series(col, dtype=object if col.dtype.kind == "O" else None),
                                       errors="raise").to_numpy(dtype=float)
            except (ValueError, TypeError) as exc:
                raise ValueError(f"continuous attribute {attr.name!r} holds non-numeric values") from exc
            if np.isinf(values).any():
                raise ValueError(f"continuous attribute {attr.name!r} holds infinite values")
            columns.append(values)
        else:
            values = _object_array(col)
            values[pd.isna(values)] = None
            columns.append(values)
    return tuple(columns)


def _raise_mismatch(names, schema, arity=None):
    names = list(names)
    if arity is not None:
        if arity < len(schema):
            raise SchemaMismatchError(
                f"data has {arity} attributes but the model expects {len(schema)}; "
                f"first missing attribute is {schema[arity].name!r}")
        raise SchemaMismatchError(f"data has {arity} attributes but the model expects {len(schema)}")
    for attr in schema:
        if attr.name not in names:
            raise SchemaMismatchError(f"attribute {attr.name!r} expected by the model is absent from the data")
    extra = [n for n in names if n not in {a.name for a in schema}]
    raise SchemaMismatchError(f"data has unexpected attributes {extra}")


def check_targets(y, n: int) -> np.ndarray:
    labels = _object_array(np.asarray(y, dtype=object).ravel())
    if len(labels) != n:
        raise ValueError(f"got {len(labels)} labels for {n} examples")
    if pd.isna(labels).any():
        raise ValueError("labels contain missing values")
    return labels


def check_sample_weight(sample_weight, n: int) -> np.ndarray:
    if sample_weight is None:
        return np.ones(n)
    w = np.asarray(sample_weight, dtype=float).ravel()
    if len(w) != n:
        raise ValueError(f"got {len(w)} sample weights for {n} examples")
    if not np.all(np.isfinite(w)) or (w <= 0).any():
        raise ValueError("sample weights must be positive and finite")
    return w


def resolve_class_order(labels: np.ndarray, class_order: Sequence | None) -> tuple:
    """Classes present in ``labels``, in declared order (sorted when undeclared)."""
    present = set(pd.unique(labels))
    if class_order is None:
        return tuple(sorted(present, key=lambda c: (str(type(c)), c)))
    unknown = present - set(class_order)
    if unknown:
        raise ValueError(f"labels {sorted(map(str, unknown))} are not in class_order")
    return tuple(c for c in class_order if c in present)


def encode_labels(labels: np.ndarray, classes: Sequence) -> np.ndarray:
    index = {c: i for i, c in enumerate(classes)}
    return np.fromiter((index[c] for c in labels), dtype=np.int64, count=len(labels))
