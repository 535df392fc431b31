"""Entropy, information gain and the ID3 baseline."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._base import DiscreteClassifierMixin
from .data_model import Dataset, EmptyDatasetError, Example
from .preprocessing import DEFAULT_MIN_INTERVAL_SUPPORT

# gains within this distance of the best count as tied (resolved by attribute index)
GAIN_TOLERANCE = 1e-12


def entropy_of_weights(class_weights: np.ndarray) -> float:
    """Shannon entropy in bits of a vector of class weights (0 log 0 = 0)."""
    w = np.asarray(class_weights, dtype=float)
    total = w.sum()
    if total <= 0:
        raise EmptyDatasetError("entropy of an empty dataset is undefined")
    p = w[w > 0] / total
    return float(-(p * np.log2(p)).sum())


def _children_entropy(joint: np.ndarray) -> float:
    """Weighted mean entropy of the rows of a (value, class) weight table."""
    sizes = joint.sum(axis=1)
    total = sizes.sum()
    rows = joint[sizes > 0]
    sizes = sizes[sizes > 0]
    p = rows / sizes[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log2(p), 0.0).sum(axis=1)
    return float((sizes / total * h).sum())


def attribute_gains(codes: np.ndarray, y: np.ndarray, weights: np.ndarray, n_classes: int,
                    widths: Sequence[int], attributes: Sequence[int]) -> np.ndarray:
    """Information gain of each listed attribute on integer-coded data."""
    parent = entropy_of_weights(np.bincount(y, weights=weights, minlength=n_classes))
    gains = np.empty(len(attributes))
    for k, a in enumerate(attributes):
        width = widths[a]
        joint = np.bincount(codes[:, a] * n_classes + y, weights=weights,
                            minlength=width * n_classes).reshape(width, n_classes)
        gains[k] = max(parent - _children_entropy(joint), 0.0)
    return gains


def choose_split(codes, y, weights, n_classes, widths, candidates: Sequence[int]):
    """Attribute to split on, or None when no candidate partitions the rows.

    The highest-gain attribute wins, ties going to the lowest index.  When
    every gain is zero but the rows are still separable (XOR-like
    structure), the lowest-index attribute taking two or more values is
    used so that impure nodes keep being refined.
    """
    candidates = sorted(candidates)
    varying = [a for a in candidates if codes[:, a].min() != codes[:, a].max()]
    if not varying:
        return None
    gains = attribute_gains(codes, y, weights, n_classes, widths, varying)
    best = gains.max()
    if best <= GAIN_TOLERANCE:
        return varying[0]
    return varying[int(np.flatnonzero(gains >= best - GAIN_TOLERANCE)[0])]


def partition(values: np.ndarray, index: np.ndarray):
    """Yield ``(value, sub_index)`` for each distinct value, in increasing value order."""
    if len(values) == 0:
        return
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    cuts = np.flatnonzero(np.diff(sorted_vals)) + 1
    for chunk in np.split(order, cuts):
        yield int(values[chunk[0]]), index[chunk]


@dataclass(eq=False)
class TreeNode:
    """A leaf when ``attribute`` is None; otherwise children keyed by attribute code.

    ``label`` is the node's majority class (an index into the estimator's
    classes) and ``default`` the code of the heaviest child, followed for
    values that have no branch.
    """

    label: int
    weight: float
    attribute: int | None = None
    children: dict = field(default_factory=dict)
    default: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.attribute is None

    def iter_nodes(self):
        yield self
        for code in sorted(self.children):
            yield from self.children[code].iter_nodes()

    def depth(self) -> int:
        return 0 if self.is_leaf else 1 + max(c.depth() for c in self.children.values())


def grow_tree(codes, y, weights, n_classes, widths, max_depth=None, min_examples=1.0) -> TreeNode:
    max_depth = np.inf if max_depth is None else max_depth

    def build(index, depth, used):
        class_w = np.bincount(y[index], weights=weights[index], minlength=n_classes)
        node = TreeNode(int(class_w.argmax()), float(class_w.sum()))
        if (class_w > 0).sum() <= 1 or depth >= max_depth or class_w.sum() < min_examples:
            return node
        candidates = [a for a in range(codes.shape[1]) if a not in used]
        sub = codes[index]
        a = choose_split(sub, y[index], weights[index], n_classes, widths, candidates)
        if a is None:
            return node
        node.attribute = a
        for value, child_index in partition(sub[:, a], index):
            node.children[value] = build(child_index, depth + 1, used | {a})
        node.default = max(node.children, key=lambda v: (node.children[v].weight, -v))
        return node

    return build(np.arange(len(y)), 0, frozenset())


def route(node: TreeNode, codes: np.ndarray, index: np.ndarray, out: np.ndarray) -> None:
    """Write each row's leaf label into ``out``; unseen values follow ``default``."""
    if node.is_leaf:
        out[index] = node.label
        return
    values = codes[index, node.attribute]
    known = np.isin(values, list(node.children))
    values = np.where(known, values, node.default)
    for value, sub in partition(values, index):
        route(node.children[value], codes, sub, out)


def entropy(d: Dataset) -> float:
    """Class entropy of ``d`` in bits, weights counting as multiplicities."""
    if len(d) == 0:
        raise EmptyDatasetError("entropy of an empty dataset is undefined")
    return entropy_of_weights(list(d.class_counts(weighted=True).values()))


def _attribute_position(d: Dataset, attr) -> int:
    if isinstance(attr, (int, np.integer)):
        return int(attr)
    name = getattr(attr, "name", attr)
    for a in d.schema:
        if a.name == name:
            return a.index
    raise KeyError(name)


def info_gain(d: Dataset, attr) -> float:
    """Entropy reduction from partitioning ``d`` on a discrete attribute."""
    j = _attribute_position(d, attr)
    if d.schema[j].is_continuous:
        raise ValueError(f"attribute {d.schema[j].name!r} must be discretized first")
    parent = entropy(d)
    col = d.columns[j].tolist()
    children = 0.0
    for v in set(col):
        mask = np.array([x == v for x in col])
        sub = d.take(np.flatnonzero(mask))
        children += sub.total_weight / d.total_weight * entropy(sub)
    return max(parent - children, 0.0)


class ID3Classifier(DiscreteClassifierMixin):
    """Unpruned ID3 over discretized attributes.

    Growth stops at pure nodes, at ``max_depth``, below ``min_examples``
    total weight, or when no unused attribute separates the rows.
    """

    def __init__(self, max_depth=20, min_examples=5, min_interval_support=DEFAULT_MIN_INTERVAL_SUPPORT,
                 schema=None, class_order=None):
        self.max_depth = max_depth
        self.min_examples = min_examples
        self.min_interval_support = min_interval_support
        self.schema = schema
        self.class_order = class_order

    def _fit_codes(self, codes, y, weights):
        self.tree_ = grow_tree(codes, y, weights, len(self.classes_), self.encoder_.widths,
                               self.max_depth, self.min_examples)

    def _predict_codes(self, codes):
        out = np.empty(len(codes), dtype=np.int64)
        route(self.tree_, codes, np.arange(len(codes)), out)
        return out

    def _proba_codes(self, codes):
        proba = np.zeros((len(codes), len(self.classes_)))
        proba[np.arange(len(codes)), self._predict_codes(codes)] = 1.0
        return proba

    @property
    def n_nodes_(self) -> int:
        return sum(1 for _ in self.tree_.iter_nodes())

    @property
    def depth_(self) -> int:
        return self.tree_.depth()


def train_id3(d: Dataset, max_depth=20, min_examples=5) -> ID3Classifier:
    """Fit ID3 on a (discretized) dataset, keeping its schema and class order."""
    if len(d) == 0:
        raise EmptyDatasetError("cannot train ID3 on an empty dataset")
    return ID3Classifier(max_depth=max_depth, min_examples=min_examples, schema=d.schema,
                         class_order=d.class_order).fit(d)


def classify_tree(model: ID3Classifier, e) -> str:
    values = e.values if isinstance(e, Example) else e
    X = np.empty((1, len(values)), dtype=object)
    X[0, :] = list(values)
    return model.predict(X)[0]
