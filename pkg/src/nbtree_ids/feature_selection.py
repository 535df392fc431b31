"""Information-gain attribute ranking and top-k selection."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_columns, check_sample_weight, check_targets, encode_labels, infer_schema
from .data_model import Dataset, EmptyDatasetError
from .decision_tree import attribute_gains
from .naive_bayes import _encode_dataset
from .preprocessing import DEFAULT_MIN_INTERVAL_SUPPORT, boundary_cut_points, interval_index


@dataclass(frozen=True)
class AttributeRanking:
    """``(index, name, gain)`` triples, highest gain first, ties by index."""

    entries: tuple[tuple[int, str, float], ...]

    @classmethod
    def from_gains(cls, names: Sequence[str], gains: Sequence[float]) -> "AttributeRanking":
        order = sorted(range(len(gains)), key=lambda j: (-gains[j], j))
        return cls(tuple((j, names[j], float(gains[j])) for j in order))

    @property
    def indices(self) -> list[int]:
        return [j for j, _, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def to_report(self) -> str:
        width = max((len(n) for _, n, _ in self.entries), default=9)
        lines = [f"{'attribute':<{width}}  gain_bits"]
        lines += [f"{n:<{width}}  {g:.6f}" for _, n, g in self.entries]
        return "\n".join(lines) + "\n"


def rank_attributes(d: Dataset) -> AttributeRanking:
    """Rank every attribute of a discretized dataset by information gain."""
    if len(d) == 0:
        raise EmptyDatasetError("cannot rank attributes of an empty dataset")
    codes, vocab = _encode_dataset(d)
    y = encode_labels(d.labels, d.class_order)
    gains = attribute_gains(codes, y, d.weights, len(d.class_order), [len(v) for v in vocab], range(d.arity))
    return AttributeRanking.from_gains([a.name for a in d.schema], gains)


def select_top_k(r: AttributeRanking, k: int) -> tuple[int, ...]:
    """Indices of the ``k`` best attributes, in schema order."""
    if not 1 <= k <= len(r):
        raise ValueError(f"k must lie in [1, {len(r)}], got {k}")
    return tuple(sorted(r.indices[:k]))


class InfoGainSelector(TransformerMixin, BaseEstimator):
    """Keep the ``k`` attributes with the highest information gain.

    Continuous attributes are discretized with the boundary method before
    their gain is measured.  ``attributes`` overrides the ranking with an
    explicit list of indices.
    """

    def __init__(self, k=19, attributes=None, min_interval_support=DEFAULT_MIN_INTERVAL_SUPPORT, schema=None):
        self.k = k
        self.attributes = attributes
        self.min_interval_support = min_interval_support
        self.schema = schema

    def fit(self, X, y=None, sample_weight=None):
        if isinstance(X, Dataset) and y is None:
            y, sample_weight = X.labels, X.weights
        schema = tuple(self.schema) if self.schema is not None else infer_schema(X)
        columns = check_columns(X, schema)
        n = len(columns[0])
        labels = check_targets(y, n)
        w = check_sample_weight(sample_weight, n)
        classes = sorted(set(labels.tolist()), key=str)
        y_codes = encode_labels(labels, classes)
        codes = np.empty((n, len(schema)), dtype=np.int64)
        widths = []
        for j, (attr, col) in enumerate(zip(schema, columns)):
            if attr.is_continuous:
                ok = ~np.isnan(col)
                borders = boundary_cut_points(col, labels, w, self.min_interval_support * w[ok].sum())
                codes[:, j] = np.where(ok, interval_index(col, borders), len(borders) + 1)  # missing: own bucket
                widths.append(len(borders) + 2)
            else:
                cats, inverse = np.unique(np.array([str(v) for v in col]), return_inverse=True)
                codes[:, j] = inverse
                widths.append(len(cats))
        gains = attribute_gains(codes, y_codes, w, len(classes), widths, range(len(schema)))
        self.schema_ = schema
        self.n_features_in_ = len(schema)
        self.ranking_ = AttributeRanking.from_gains([a.name for a in schema], gains)
        if self.attributes is not None:
            self.selected_ = tuple(sorted(int(a) for a in self.attributes))
        else:
            self.selected_ = select_top_k(self.ranking_, self.k)
        return self

    def get_support(self, indices: bool = False):
        check_is_fitted(self, "selected_")
        if indices:
            return np.asarray(self.selected_)
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[list(self.selected_)] = True
        return mask

    def transform(self, X):
        check_is_fitted(self, "selected_")
        if isinstance(X, Dataset):
            return X.project(self.selected_)
        if hasattr(X, "iloc"):
            return X.iloc[:, list(self.selected_)]
        return np.asarray(X)[:, list(self.selected_)]
