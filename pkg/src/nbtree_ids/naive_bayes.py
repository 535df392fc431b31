"""Categorical naive Bayes with additive smoothing.

Priors are ``(w_c + alpha) / (W + alpha * C)`` and conditionals
``(n(v, c) + alpha) / (w_c + alpha * |U|)`` where ``U`` is the set of
values the attribute takes in the training data.  A value outside ``U``
gets the floor ``alpha / (w_c + alpha * |U|)``; with ``alpha = 0`` that is
an exact zero.  Scores are accumulated in log space.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from ._base import DiscreteClassifierMixin
from .data_model import Dataset, EmptyDatasetError, Example
from .preprocessing import DEFAULT_MIN_INTERVAL_SUPPORT

DEFAULT_ALPHA = 1.0


@dataclass(frozen=True, eq=False)
class NBModel:
    """Trained prior and conditional tables.

    ``class_index`` maps the model's classes (those present in its training
    data, in class order) to positions in the caller's class list.
    ``conditionals[k]`` belongs to attribute ``attributes[k]`` and has shape
    ``(n_classes, width + 1)``; the last column is the unseen-value floor,
    so code ``-1`` indexes it directly.
    """

    classes: tuple
    class_index: np.ndarray
    class_weights: np.ndarray
    priors: np.ndarray
    attributes: tuple[int, ...]
    conditionals: tuple[np.ndarray, ...]
    universe_sizes: tuple[int, ...]
    alpha: float
    vocabulary: tuple[tuple, ...] | None = None

    @cached_property
    def _log_priors(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.priors)

    @cached_property
    def _log_tables(self) -> tuple[np.ndarray, ...]:
        # (width + 1, n_classes) so that table[codes] is already row-major per example
        with np.errstate(divide="ignore"):
            return tuple(np.ascontiguousarray(np.log(t).T) for t in self.conditionals)

    def joint_log_scores(self, codes: np.ndarray) -> np.ndarray:
        """``log P(c) + sum_k log P(x_k | c)`` for every row of ``codes``."""
        codes = np.atleast_2d(codes)
        scores = np.broadcast_to(self._log_priors, (len(codes), len(self.classes))).copy()
        for a, table in zip(self.attributes, self._log_tables):
            scores += table[codes[:, a]]
        return scores

    def posterior(self, codes: np.ndarray) -> np.ndarray:
        """Normalized scores; rows whose every class scores zero come back all-zero."""
        scores = self.joint_log_scores(codes)
        top = scores.max(axis=1, keepdims=True)
        ambiguous = ~np.isfinite(top[:, 0])
        top[ambiguous] = 0.0
        p = np.exp(scores - top)
        total = p.sum(axis=1, keepdims=True)
        total[ambiguous] = 1.0
        return p / total

    def predict_local(self, codes: np.ndarray) -> np.ndarray:
        """Index into ``classes`` of the best class; all-zero rows fall back to the prior."""
        scores = self.joint_log_scores(codes)
        best = scores.argmax(axis=1)
        ambiguous = ~np.isfinite(scores.max(axis=1))
        if ambiguous.any():
            best[ambiguous] = int(np.argmax(self.priors))
        return best

    def predict(self, codes: np.ndarray) -> np.ndarray:
        """Like ``predict_local`` but as positions in the caller's class list."""
        return self.class_index[self.predict_local(codes)]

    def encode_example(self, values: Sequence) -> np.ndarray:
        if self.vocabulary is None:
            raise ValueError("model has no value vocabulary; pass integer codes")
        if len(values) != len(self.vocabulary):
            raise ValueError(f"expected {len(self.vocabulary)} values, got {len(values)}")
        return np.array([lookup.get(v, -1) for lookup, v in zip(self._lookup, values)], dtype=np.int64)

    @cached_property
    def _lookup(self) -> list[dict]:
        return [{v: i for i, v in enumerate(vocab)} for vocab in self.vocabulary]

    def conditional(self, attribute: int, value, cls) -> float:
        """``P(attribute = value | cls)`` by raw value."""
        k = self.attributes.index(attribute)
        code = self._lookup[attribute].get(value, -1)
        return float(self.conditionals[k][self.classes.index(cls), code])

    def prior(self, cls) -> float:
        return float(self.priors[self.classes.index(cls)])


def fit_nb(codes: np.ndarray, y: np.ndarray, weights: np.ndarray, widths: Sequence[int],
           attributes: Sequence[int], alpha: float, class_labels: Sequence,
           vocabulary=None) -> NBModel:
    """Count-based training on integer-coded data.

    ``y`` indexes ``class_labels``; only classes with positive weight enter
    the model.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if len(y) == 0:
        raise EmptyDatasetError("cannot train naive Bayes on an empty dataset")
    n_all = len(class_labels)
    totals = np.bincount(y, weights=weights, minlength=n_all)
    present = np.flatnonzero(totals > 0)
    local = np.full(n_all, -1, dtype=np.int64)
    local[present] = np.arange(len(present))
    y_local = local[y]
    n_classes = len(present)
    class_weights = totals[present]
    priors = (class_weights + alpha) / (class_weights.sum() + alpha * n_classes)

    tables, sizes = [], []
    for a in attributes:
        width = widths[a]
        counts = np.bincount(y_local * width + codes[:, a], weights=weights,
                             minlength=n_classes * width).reshape(n_classes, width)
        universe = int((counts.sum(axis=0) > 0).sum())
        denom = (class_weights + alpha * universe)[:, None]
        table = np.empty((n_classes, width + 1))
        table[:, :width] = (counts + alpha) / denom
        table[:, width] = alpha / denom[:, 0]
        tables.append(table)
        sizes.append(universe)
    return NBModel(
        classes=tuple(class_labels[i] for i in present),
        class_index=present,
        class_weights=class_weights,
        priors=priors,
        attributes=tuple(int(a) for a in attributes),
        conditionals=tuple(tables),
        universe_sizes=tuple(sizes),
        alpha=float(alpha),
        vocabulary=vocabulary,
    )


def _encode_dataset(d: Dataset):
    if not d.is_discrete:
        names = [a.name for a in d.schema if a.is_continuous]
        raise ValueError(f"dataset has undiscretized continuous attributes: {names}")
    vocab, codes = [], np.empty((len(d), d.arity), dtype=np.int64)
    for j, col in enumerate(d.columns):
        values = sorted(set(col.tolist()), key=lambda v: (str(type(v)), v))
        index = {v: i for i, v in enumerate(values)}
        codes[:, j] = [index[v] for v in col.tolist()]
        vocab.append(tuple(values))
    return codes, tuple(vocab)


def train_nb(d: Dataset, alpha: float = DEFAULT_ALPHA) -> NBModel:
    """Train on a fully discrete dataset; example weights act as multiplicities."""
    if len(d) == 0:
        raise EmptyDatasetError("cannot train naive Bayes on an empty dataset")
    codes, vocab = _encode_dataset(d)
    index = {c: i for i, c in enumerate(d.class_order)}
    y = np.array([index[c] for c in d.labels], dtype=np.int64)
    widths = [len(v) for v in vocab]
    return fit_nb(codes, y, d.weights, widths, range(d.arity), alpha, d.class_order, vocab)


def _example_values(e) -> Sequence:
    return e.values if isinstance(e, Example) else e


def posterior_scores(m: NBModel, e) -> dict:
    """Normalized class scores for one example (an :class:`Example` or a value sequence).

    If every class scores exactly zero (only possible with ``alpha = 0``)
    all scores are zero, which :func:`classify_nb` resolves by prior.
    """
    p = m.posterior(m.encode_example(_example_values(e))[None, :])[0]
    return {c: float(s) for c, s in zip(m.classes, p)}


def classify_nb(m: NBModel, e):
    return m.classes[int(m.predict_local(m.encode_example(_example_values(e))[None, :])[0])]


class NaiveBayesClassifier(DiscreteClassifierMixin):
    """Naive Bayes baseline over discretized attributes.

    Parameters
    ----------
    alpha : float
        Additive smoothing; 0 disables it.
    min_interval_support : float
        Minimum fraction of the training weight per interval when
        discretizing continuous attributes.
    schema : sequence of AttributeSchema, optional
        Attribute kinds; inferred from the input when omitted.
    class_order : sequence, optional
        Tie-break order of the classes; sorted labels when omitted.
    """

    def __init__(self, alpha=DEFAULT_ALPHA, min_interval_support=DEFAULT_MIN_INTERVAL_SUPPORT,
                 schema=None, class_order=None):
        self.alpha = alpha
        self.min_interval_support = min_interval_support
        self.schema = schema
        self.class_order = class_order

    def _fit_codes(self, codes, y, weights):
        enc = self.encoder_
        vocab = tuple(tuple(enc.vocabulary(j)) for j in range(len(self.schema_)))
        self.model_ = fit_nb(codes, y, weights, enc.widths, range(codes.shape[1]), self.alpha,
                             list(self.classes_), vocab)

    def _proba_codes(self, codes):
        proba = np.zeros((len(codes), len(self.classes_)))
        post = self.model_.posterior(codes)
        ambiguous = post.sum(axis=1) == 0
        post[ambiguous] = self.model_.priors
        proba[:, self.model_.class_index] = post
        return proba

    def _predict_codes(self, codes):
        return self.model_.predict(codes)
