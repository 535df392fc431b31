"""Hybrid naive Bayes / decision tree learner.

Training, after the shared preprocessing:

1. fit naive Bayes on the whole training set and relabel every example
   with its most probable class;
2. refit on the relabeled data; this is the root model;
3. while a node's model misclassifies any of its (relabeled) examples,
   split the node on the unused attribute with the highest information
   gain and fit a fresh naive Bayes model on every child, leaving the
   path's split attributes out of the child's product.

Every node keeps its model.  Prediction descends by attribute value and
classifies with the model of the deepest node reached; a value with no
branch stops the descent at the current node.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._base import DiscreteClassifierMixin
from .data_model import Dataset, Example
from .decision_tree import choose_split, partition
from .naive_bayes import DEFAULT_ALPHA, NBModel, classify_nb, fit_nb
from .preprocessing import DEFAULT_MIN_INTERVAL_SUPPORT


@dataclass(eq=False)
class HybridNode:
    nb: NBModel
    depth: int
    subset_weight: float
    training_errors: float = 0.0
    attribute: int | None = None
    children: dict = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.attribute is None

    def iter_nodes(self):
        yield self
        for code in sorted(self.children):
            yield from self.children[code].iter_nodes()


def relabel_ml(d: Dataset, m: NBModel):
    """Relabel every example of ``d`` with ``m``'s prediction.

    Returns the relabeled dataset (``d`` itself keeps the original labels)
    and the total weight of examples whose label changed.
    """
    labels = np.array([classify_nb(m, e) for e in d], dtype=object)
    changed = labels != d.labels
    return Dataset(d.schema, d.columns, labels, d.weights, d.raw_labels, d.class_order), float(d.weights[changed].sum())


class HybridNBTreeClassifier(DiscreteClassifierMixin):
    """Decision tree whose every node carries its own naive Bayes model.

    Parameters
    ----------
    alpha : float
        Additive smoothing of every node model.
    max_depth : int or None
        Depth limit of the tree; ``0`` yields the relabeled root model only,
        ``None`` means unlimited.
    min_examples : float
        Nodes lighter than this (total example weight) are not split.
    min_interval_support : float
        Minimum fraction of training weight per discretization interval.
    schema, class_order
        As for :class:`~nbtree_ids.naive_bayes.NaiveBayesClassifier`.
    """

    _resolve_contradictions = True

    def __init__(self, alpha=DEFAULT_ALPHA, max_depth=10, min_examples=5,
                 min_interval_support=DEFAULT_MIN_INTERVAL_SUPPORT, schema=None, class_order=None):
        self.alpha = alpha
        self.max_depth = max_depth
        self.min_examples = min_examples
        self.min_interval_support = min_interval_support
        self.schema = schema
        self.class_order = class_order

    def _fit_codes(self, codes, y, weights):
        widths = self.encoder_.widths
        classes = list(self.classes_)
        n_attrs = codes.shape[1]
        vocab = tuple(tuple(self.encoder_.vocabulary(j)) for j in range(n_attrs))

        def train(index, attributes, targets):
            return fit_nb(codes[index], targets[index], weights[index], widths, attributes, self.alpha,
                          classes, vocab)

        everything = np.arange(len(y))
        first = train(everything, range(n_attrs), y)
        relabeled = first.predict(codes)
        changed = relabeled != y
        self.relabel_report_ = {
            "changed_examples": float(weights[changed].sum()),
            "changed_unique": int(changed.sum()),
            "total_examples": float(weights.sum()),
        }
        max_depth = np.inf if self.max_depth is None else self.max_depth

        def grow(index, nb, depth, used):
            pred = nb.predict(codes[index])
            wrong = pred != relabeled[index]
            node = HybridNode(nb, depth, float(weights[index].sum()), float(weights[index][wrong].sum()))
            if not wrong.any() or depth >= max_depth or node.subset_weight < self.min_examples:
                return node
            candidates = [a for a in range(n_attrs) if a not in used]
            sub = codes[index]
            a = choose_split(sub, relabeled[index], weights[index], len(classes), widths, candidates)
            if a is None:
                return node
            node.attribute = a
            child_used = used | {a}
            remaining = [b for b in range(n_attrs) if b not in child_used]
            for value, child_index in partition(sub[:, a], index):
                node.children[value] = grow(child_index, train(child_index, remaining, relabeled),
                                            depth + 1, child_used)
            return node

        self.root_ = grow(everything, train(everything, range(n_attrs), relabeled), 0, frozenset())

    def _route(self, codes):
        """Group row indices by the node they stop at."""
        stops = []

        def descend(node, index):
            if node.is_leaf or len(index) == 0:
                stops.append((node, index))
                return
            values = codes[index, node.attribute]
            has_child = np.isin(values, list(node.children))
            if (~has_child).any():
                stops.append((node, index[~has_child]))
            for value, sub in partition(values[has_child], index[has_child]):
                descend(node.children[value], sub)

        descend(self.root_, np.arange(len(codes)))
        return stops

    def _proba_codes(self, codes):
        proba = np.zeros((len(codes), len(self.classes_)))
        for node, index in self._route(codes):
            if len(index):
                post = node.nb.posterior(codes[index])
                ambiguous = post.sum(axis=1) == 0
                post[ambiguous] = node.nb.priors
                proba[np.ix_(index, node.nb.class_index)] = post
        return proba

    def _predict_codes(self, codes):
        out = np.empty(len(codes), dtype=np.int64)
        for node, index in self._route(codes):
            if len(index):
                out[index] = node.nb.predict(codes[index])
        return out

    def predict_with_posterior(self, X):
        codes = self._encode(X)
        pred = self._predict_codes(codes)
        proba = self._proba_codes(codes)
        return self.classes_[pred], proba[np.arange(len(pred)), pred]

    @property
    def n_nodes_(self) -> int:
        return sum(1 for _ in self.root_.iter_nodes())

    @property
    def depth_(self) -> int:
        return max(n.depth for n in self.root_.iter_nodes())


def build_hybrid(d: Dataset, alpha=DEFAULT_ALPHA, max_depth=10, min_examples=5,
                 min_interval_support=DEFAULT_MIN_INTERVAL_SUPPORT) -> HybridNBTreeClassifier:
    """Train the hybrid model on a raw dataset (preprocessing included)."""
    return HybridNBTreeClassifier(alpha=alpha, max_depth=max_depth, min_examples=min_examples,
                                  min_interval_support=min_interval_support, schema=d.schema,
                                  class_order=d.class_order).fit(d)


def classify_hybrid(m: HybridNBTreeClassifier, e):
    """``(label, posterior of that label)`` for one raw example."""
    values = e.values if isinstance(e, Example) else e
    X = np.empty((1, len(values)), dtype=object)
    X[0, :] = list(values)
    labels, post = m.predict_with_posterior(X)
    return labels[0], float(post[0])
