"""Shared fit-time preprocessing for the classifiers.

Every classifier sees the same pipeline: class-conditional imputation,
merging of duplicate examples into weights, optional majority relabeling
of contradictory examples, boundary discretization of continuous
attributes, and finally integer coding of every attribute.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (check_columns, check_sample_weight, check_targets, encode_labels, infer_schema,
                          resolve_class_order)
from .data_model import AttributeSchema, Dataset, EmptyDatasetError
from .preprocessing import (DEFAULT_MIN_INTERVAL_SUPPORT, MissingValueImputer, boundary_cut_points,
                            contradiction_arrays, dedup_arrays, interval_index)


def _sort_key(v):
    return (str(type(v)), v)


@dataclass
class FeatureEncoder:
    """Maps raw attribute values to integer codes.

    Discrete attributes use the sorted training categories (unseen values
    and missing markers code to -1); continuous attributes use interval
    indices under the stored borders.
    """

    schema: tuple[AttributeSchema, ...]
    categories: list  # per attribute: list of values, or None for continuous
    borders: list  # per attribute: float array, or None for discrete
    imputer: MissingValueImputer

    @property
    def widths(self) -> list[int]:
        return [len(c) if c is not None else len(b) + 1 for c, b in zip(self.categories, self.borders)]

    def vocabulary(self, j: int) -> list:
        """Value carried by each code of attribute ``j``."""
        if self.categories[j] is not None:
            return list(self.categories[j])
        return list(range(len(self.borders[j]) + 1))

    def encode(self, columns) -> np.ndarray:
        n = len(columns[0]) if columns else 0
        codes = np.empty((n, len(columns)), dtype=np.int64)
        for j, col in enumerate(columns):
            if self.borders[j] is not None:
                codes[:, j] = interval_index(col, self.borders[j])
            else:
                codes[:, j] = pd.Categorical(col, categories=self.categories[j]).codes
        return codes


class DiscreteClassifierMixin(ClassifierMixin, BaseEstimator):
    """Common fit/predict plumbing; subclasses implement ``_fit_codes`` and ``_proba_codes``."""

    _resolve_contradictions = False

    def _input_schema(self, X):
        if self.schema is not None:
            return tuple(self.schema)
        return infer_schema(X)

    def _prepare_fit(self, X, y, sample_weight):
        if isinstance(X, Dataset):
            if y is None:
                y, sample_weight = X.labels, X.weights if sample_weight is None else sample_weight
            class_order = self.class_order if self.class_order is not None else X.class_order
        else:
            class_order = self.class_order
        if y is None:
            raise ValueError("y is required")
        schema = self._input_schema(X)
        columns = check_columns(X, schema)
        n = len(columns[0]) if columns else 0
        if n == 0:
            raise EmptyDatasetError("cannot train on an empty dataset")
        labels = check_targets(y, n)
        weights = check_sample_weight(sample_weight, n)
        classes = resolve_class_order(labels, class_order)
        y_codes = encode_labels(labels, classes)

        imputer = MissingValueImputer(schema=schema)._fit_columns(schema, columns, labels, weights)
        columns = imputer._transform_columns(columns, labels)

        keep, weights = dedup_arrays(columns, y_codes, weights)
        columns, y_codes = tuple(c[keep] for c in columns), y_codes[keep]
        n_contradictions = 0
        if self._resolve_contradictions:
            keep, y_codes, weights, n_contradictions = contradiction_arrays(columns, y_codes, weights, len(classes))
            columns = tuple(c[keep] for c in columns)

        floor = self.min_interval_support * weights.sum()
        categories, borders = [], []
        for attr, col in zip(schema, columns):
            if attr.is_continuous:
                categories.append(None)
                borders.append(boundary_cut_points(col, y_codes, weights, floor))
            else:
                categories.append(sorted(set(col.tolist()), key=_sort_key))
                borders.append(None)
        self.encoder_ = FeatureEncoder(schema, categories, borders, imputer)
        self.schema_ = schema
        self.classes_ = np.asarray(classes)
        self.n_features_in_ = len(schema)
        if isinstance(X, pd.DataFrame):
            self.feature_names_in_ = np.asarray([str(c) for c in X.columns], dtype=object)
        self.preprocess_report_ = {
            "examples": int(n),
            "unique_examples": int(len(y_codes)),
            "contradictory_groups": int(n_contradictions),
        }
        return self.encoder_.encode(columns), y_codes, weights

    def _encode(self, X) -> np.ndarray:
        check_is_fitted(self, "encoder_")
        columns = check_columns(X, self.schema_)
        columns = self.encoder_.imputer._transform_columns(columns)
        return self.encoder_.encode(columns)

    def fit(self, X, y=None, sample_weight=None):
        codes, y_codes, weights = self._prepare_fit(X, y, sample_weight)
        self._fit_codes(codes, y_codes, weights)
        return self

    def predict_proba(self, X) -> np.ndarray:
        return self._proba_codes(self._encode(X))

    def predict(self, X) -> np.ndarray:
        return self.classes_[self._predict_codes(self._encode(X))]

    def _predict_codes(self, codes) -> np.ndarray:
        return self._proba_codes(codes).argmax(axis=1)
