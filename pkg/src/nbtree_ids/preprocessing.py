"""Noise handling and supervised discretization.

Dataset-level operations (``deduplicate``, ``resolve_contradictions``,
``impute_missing``, ``build_discretization``, ``apply_discretization``)
are thin wrappers over array routines that the estimators also call
directly.  ``MissingValueImputer`` and ``BoundaryDiscretizer`` expose the
same procedures as scikit-learn transformers.

Interval convention: ``k`` borders give ``k + 1`` half-open intervals
``(-inf, b1), [b1, b2), ..., [bk, +inf)``; a value equal to a border
belongs to the interval above it.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (check_columns, check_sample_weight, check_targets, encode_labels, infer_schema,
                          resolve_class_order)
from .data_model import AttributeKind, AttributeSchema, Dataset, DataError

DEFAULT_MIN_INTERVAL_SUPPORT = 0.01


class UnimputableError(DataError):
    pass


class AttributeKindError(DataError):
    pass


# ---------------------------------------------------------------------------
# grouping identical examples


def row_groups(columns: Sequence[np.ndarray], labels: np.ndarray | None = None):
    """Group ids of identical rows, numbered by first occurrence.

    Returns ``(group, first)`` where ``group[i]`` is row ``i``'s group and
    ``first[g]`` the index of the first row of group ``g``.  Missing values
    compare equal to each other.
    """
    cols = list(columns) + ([labels] if labels is not None else [])
    n = len(cols[0]) if cols else 0
    if n == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    codes = pd.DataFrame({j: pd.factorize(c, use_na_sentinel=True)[0] for j, c in enumerate(cols)})
    group = codes.groupby(list(codes.columns), sort=False).ngroup().to_numpy(np.int64)
    _, first = np.unique(group, return_index=True)
    return group, first


def dedup_arrays(columns, labels, weights):
    """Indices of surviving rows and their merged weights."""
    group, first = row_groups(columns, labels)
    merged = np.bincount(group, weights=weights, minlength=len(first))
    return first, merged


def contradiction_arrays(columns, label_codes, weights, n_classes):
    """Majority relabeling of value-identical rows.

    Returns ``(keep, new_codes, new_weights, n_resolved)``.  The kept row of
    each group is its first row carrying the winning label; ties go to the
    lowest class code (earliest in class order).
    """
    group, first = row_groups(columns)
    n_groups = len(first)
    table = np.bincount(group * n_classes + label_codes, weights=weights,
                        minlength=n_groups * n_classes).reshape(n_groups, n_classes)
    winner = table.argmax(axis=1)
    n_resolved = int(((table > 0).sum(axis=1) > 1).sum())
    rows = np.flatnonzero(label_codes == winner[group])
    _, pos = np.unique(group[rows], return_index=True)
    keep = rows[pos]
    order = np.argsort(first, kind="stable")
    keep = keep[order]
    return keep, winner[order], table.sum(axis=1)[order], n_resolved


def deduplicate(d: Dataset) -> Dataset:
    """Merge examples identical in all values and label into one weighted example."""
    keep, merged = dedup_arrays(d.columns, d.labels, d.weights)
    return replace(d.take(keep), weights=merged)


def resolve_contradictions(d: Dataset, return_count: bool = False):
    """Relabel each group of value-identical examples to its majority label.

    The group collapses to one example carrying the group's total weight.
    With ``return_count`` the number of groups that had conflicting labels
    is returned as well.
    """
    codes = encode_labels(d.labels, d.class_order)
    keep, winners, weights, n_resolved = contradiction_arrays(d.columns, codes, d.weights, len(d.class_order))
    labels = np.array([d.class_order[c] for c in winners], dtype=object)
    out = replace(d.take(keep), labels=labels, weights=weights)
    return (out, n_resolved) if return_count else out


# ---------------------------------------------------------------------------
# missing values


def _weighted_mode(values: np.ndarray, weights: np.ndarray):
    totals: dict = {}
    for v, w in zip(values, weights):
        totals[v] = totals.get(v, 0.0) + w
    best = max(totals.values())
    return min((v for v, t in totals.items() if t == best), key=lambda v: (str(type(v)), v))


def _weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    v, w = values[order], weights[order]
    cum = np.cumsum(w)
    half = cum[-1] / 2.0
    i = int(np.searchsorted(cum, half))
    if np.isclose(cum[i], half) and i + 1 < len(v):
        return float((v[i] + v[i + 1]) / 2.0)
    return float(v[i])


def _fill_value(col: np.ndarray, weights: np.ndarray, continuous: bool):
    if continuous:
        ok = ~np.isnan(col)
        return _weighted_median(col[ok], weights[ok]) if ok.any() else None
    ok = np.array([v is not None for v in col], dtype=bool)
    return _weighted_mode(col[ok], weights[ok]) if ok.any() else None


def _missing_mask(col: np.ndarray, continuous: bool) -> np.ndarray:
    if continuous:
        return np.isnan(col)
    return np.array([v is None for v in col], dtype=bool)


class MissingValueImputer(TransformerMixin, BaseEstimator):
    """Fill missing values with the most frequent value (discrete) or the median (continuous).

    ``fit_transform(X, y)`` fills from the example's own class (falling
    back to the whole training set when the class never observed the
    attribute); ``transform`` has no labels and always uses the
    whole-training-set statistic.
    """

    def __init__(self, schema=None):
        self.schema = schema

    def fit(self, X, y=None, sample_weight=None):
        schema = tuple(self.schema) if self.schema is not None else infer_schema(X)
        columns = check_columns(X, schema)
        n = len(columns[0]) if columns else 0
        w = check_sample_weight(sample_weight, n)
        self._fit_columns(schema, columns, None if y is None else check_targets(y, n), w)
        return self

    def _fit_columns(self, schema, columns, labels, weights):
        self.schema_ = tuple(schema)
        self.n_features_in_ = len(schema)
        self.fill_values_ = []
        self.class_fill_values_ = {}
        for attr, col in zip(self.schema_, columns):
            fill = _fill_value(col, weights, attr.is_continuous)
            if fill is None:
                raise UnimputableError(f"attribute {attr.name!r} is missing in every example")
            self.fill_values_.append(fill)
        if labels is not None:
            for c in pd.unique(labels):
                mask = labels == c
                self.class_fill_values_[c] = [_fill_value(col[mask], weights[mask], attr.is_continuous)
                                              for attr, col in zip(self.schema_, columns)]
        return self

    def _transform_columns(self, columns, labels=None):
        out = []
        for j, (attr, col) in enumerate(zip(self.schema_, columns)):
            missing = _missing_mask(col, attr.is_continuous)
            if not missing.any():
                out.append(col)
                continue
            col = col.copy()
            if labels is None:
                col[missing] = self.fill_values_[j]
            else:
                for i in np.flatnonzero(missing):
                    fill = self.class_fill_values_.get(labels[i], [None] * len(self.schema_))[j]
                    col[i] = self.fill_values_[j] if fill is None else fill
            out.append(col)
        return tuple(out)

    def transform(self, X):
        check_is_fitted(self, "fill_values_")
        return _stack(self._transform_columns(check_columns(X, self.schema_)))

    def fit_transform(self, X, y=None, sample_weight=None):
        self.fit(X, y, sample_weight)
        columns = check_columns(X, self.schema_)
        return _stack(self._transform_columns(columns, None if y is None else check_targets(y, len(columns[0]))))


def impute_missing(d: Dataset) -> Dataset:
    """Class-conditional imputation of every missing value in ``d``."""
    imputer = MissingValueImputer(schema=d.schema)._fit_columns(d.schema, d.columns, d.labels, d.weights)
    return replace(d, columns=imputer._transform_columns(d.columns, d.labels))


def _stack(columns) -> np.ndarray:
    if all(c.dtype.kind in "if" for c in columns):
        return np.column_stack(columns) if columns else np.zeros((0, 0))
    out = np.empty((len(columns[0]), len(columns)), dtype=object)
    for j, c in enumerate(columns):
        out[:, j] = c
    return out


# ---------------------------------------------------------------------------
# discretization


def boundary_cut_points(values, labels, weights=None, min_support: float = 0.0) -> np.ndarray:
    """Interval borders for one continuous attribute.

    Distinct values are sorted and a border is placed midway between each
    adjacent pair whose sets of observed classes differ.  Intervals whose
    weight falls below ``min_support`` (an absolute weight) are then merged
    into their lower neighbour; a too-light first interval absorbs the
    intervals above it instead.  Missing values are ignored.
    """
    values = np.asarray(values, dtype=float)
    weights = np.ones(len(values)) if weights is None else np.asarray(weights, dtype=float)
    ok = ~np.isnan(values)
    values, weights = values[ok], weights[ok]
    label_codes = pd.factorize(np.asarray(labels, dtype=object)[ok], sort=False)[0]
    if len(values) == 0:
        return np.zeros(0)
    distinct, inverse = np.unique(values, return_inverse=True)
    if len(distinct) == 1:
        return np.zeros(0)
    n_classes = int(label_codes.max()) + 1
    seen = np.zeros((len(distinct), n_classes), dtype=bool)
    seen[inverse, label_codes] = True
    cut = np.flatnonzero((seen[1:] != seen[:-1]).any(axis=1))
    lo, hi = distinct[cut], distinct[cut + 1]
    borders = lo + (hi - lo) / 2.0
    # rounding can land the midpoint on the lower value, which would put it above the border
    borders = np.where(borders <= lo, hi, borders)
    if min_support <= 0 or len(borders) == 0:
        return borders

    group_weight = np.bincount(inverse, weights=weights, minlength=len(distinct))
    bounds = np.concatenate(([0], cut + 1, [len(distinct)]))
    support = np.add.reduceat(group_weight, bounds[:-1])
    kept_borders: list[float] = []
    current = support[0]
    for border, s in zip(borders, support[1:]):
        if current < min_support or s < min_support:
            current += s
        else:
            kept_borders.append(float(border))
            current = s
    return np.asarray(kept_borders, dtype=float)


def interval_index(values, borders) -> np.ndarray:
    """Interval of each value under the half-open ``[b_i, b_{i+1})`` convention."""
    return np.searchsorted(np.asarray(borders, dtype=float), np.asarray(values, dtype=float),
                           side="right").astype(np.int64)


@dataclass(frozen=True)
class DiscretizationPlan:
    """Borders per continuous attribute, keyed by attribute name."""

    borders: Mapping[str, tuple[float, ...]]
    min_interval_support: float = DEFAULT_MIN_INTERVAL_SUPPORT

    def __post_init__(self):
        if not 0.0 <= self.min_interval_support <= 1.0:
            raise ValueError("min_interval_support must lie in [0, 1]")
        object.__setattr__(self, "borders", {k: tuple(float(b) for b in v) for k, v in self.borders.items()})
        for name, b in self.borders.items():
            if any(x >= y for x, y in zip(b, b[1:])):
                raise ValueError(f"borders of {name!r} are not strictly increasing")

    def n_intervals(self, name: str) -> int:
        return len(self.borders[name]) + 1

    def interval_labels(self, name: str) -> list[str]:
        b = self.borders[name]
        edges = [float("-inf"), *b, float("inf")]
        return [f"[{lo:g}, {hi:g})" if i else f"(-inf, {hi:g})" for i, (lo, hi) in enumerate(zip(edges, edges[1:]))]

    def to_dict(self) -> dict:
        return {"min_interval_support": self.min_interval_support,
                "borders": {k: list(v) for k, v in self.borders.items()}}

    @classmethod
    def from_dict(cls, data: Mapping) -> "DiscretizationPlan":
        return cls({k: tuple(v) for k, v in data["borders"].items()}, data["min_interval_support"])


def build_discretization(d: Dataset, attr: AttributeSchema | str | None = None,
                         min_interval_support: float = DEFAULT_MIN_INTERVAL_SUPPORT) -> DiscretizationPlan:
    """Plan for one continuous attribute of ``d`` (or all of them when ``attr`` is None)."""
    if len(d) == 0:
        raise DataError("cannot discretize an empty dataset")
    if attr is None:
        targets = [a for a in d.schema if a.is_continuous]
    else:
        name = attr if isinstance(attr, str) else attr.name
        matches = [a for a in d.schema if a.name == name]
        if not matches:
            raise KeyError(name)
        if not matches[0].is_continuous:
            raise AttributeKindError(f"attribute {name!r} is not continuous")
        targets = matches
    floor = min_interval_support * d.total_weight
    borders = {a.name: tuple(boundary_cut_points(d.columns[a.index], d.labels, d.weights, floor))
               for a in targets}
    return DiscretizationPlan(borders, min_interval_support)


def apply_discretization(d: Dataset, plan: DiscretizationPlan) -> Dataset:
    """Replace every planned continuous column by its interval indices."""
    schema, columns = list(d.schema), list(d.columns)
    for j, attr in enumerate(d.schema):
        if attr.name in plan.borders and attr.is_continuous:
            b = plan.borders[attr.name]
            columns[j] = interval_index(d.columns[j], b)
            schema[j] = replace(attr, borders=b, discretized=True)
    return replace(d, schema=tuple(schema), columns=tuple(columns))


class BoundaryDiscretizer(TransformerMixin, BaseEstimator):
    """Supervised discretizer: class-boundary midpoints with a minimum interval support.

    Continuous columns become interval indices; discrete columns pass
    through unchanged.
    """

    def __init__(self, min_interval_support=DEFAULT_MIN_INTERVAL_SUPPORT, schema=None):
        self.min_interval_support = min_interval_support
        self.schema = schema

    def fit(self, X, y, sample_weight=None):
        schema = tuple(self.schema) if self.schema is not None else infer_schema(X)
        columns = check_columns(X, schema)
        n = len(columns[0])
        labels = check_targets(y, n)
        w = check_sample_weight(sample_weight, n)
        floor = self.min_interval_support * w.sum()
        self.schema_ = schema
        self.n_features_in_ = len(schema)
        self.borders_ = [boundary_cut_points(col, labels, w, floor) if a.is_continuous else None
                         for a, col in zip(schema, columns)]
        self.plan_ = DiscretizationPlan({a.name: tuple(b) for a, b in zip(schema, self.borders_) if b is not None},
                                        self.min_interval_support)
        return self

    def transform(self, X):
        check_is_fitted(self, "borders_")
        columns = check_columns(X, self.schema_)
        return _stack(tuple(c if b is None else interval_index(c, b) for c, b in zip(columns, self.borders_)))
