"""Confusion accounting, detection rate and false-positive metrics.

For a class ``c``:

* precision, recall, overall accuracy and false alarm are the one-vs-rest
  ratios ``TP/(TP+FP)``, ``TP/(TP+FN)``, ``(TP+TN)/T`` and ``(FP+FN)/T``;
* detection rate is the share of ``c`` examples predicted as ``c``;
* false-positive rate of an attack class is the share of normal examples
  predicted as that class; for the normal class it is the share of attack
  examples predicted as normal.

Undefined ratios (zero denominator) are reported as 0 and listed in
``undefined``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .data_model import CLASS_ORDER, AttackClass


@dataclass(frozen=True)
class ConfusionMatrix:
    """Weights indexed ``[true class, predicted class]``."""

    classes: tuple
    matrix: np.ndarray

    @property
    def total(self) -> float:
        return float(self.matrix.sum())

    def index(self, cls) -> int:
        return self.classes.index(cls)

    def binary_counts(self, positive) -> tuple[float, float, float, float]:
        """One-vs-rest ``(TP, FP, FN, TN)`` for ``positive``."""
        k = self.index(positive)
        m = self.matrix
        tp = m[k, k]
        fp = m[:, k].sum() - tp
        fn = m[k, :].sum() - tp
        tn = m.sum() - tp - fp - fn
        return float(tp), float(fp), float(fn), float(tn)

    def row_total(self, cls) -> float:
        return float(self.matrix[self.index(cls)].sum())


def confusion(preds: Sequence, truth: Sequence, weights=None, classes: Sequence = CLASS_ORDER) -> ConfusionMatrix:
    """Tally predictions against (original, never relabeled) true labels."""
    preds, truth = list(preds), list(truth)
    if len(preds) != len(truth):
        raise ValueError(f"{len(preds)} predictions for {len(truth)} true labels")
    if not preds:
        raise ValueError("nothing to evaluate")
    classes = tuple(classes)
    index = {c: i for i, c in enumerate(classes)}
    unknown = {c for c in preds + truth if c not in index}
    if unknown:
        raise ValueError(f"labels {sorted(map(str, unknown))} not in classes {classes}")
    w = np.ones(len(preds)) if weights is None else np.asarray(weights, dtype=float)
    k = len(classes)
    flat = np.fromiter((index[t] * k + index[p] for t, p in zip(truth, preds)), dtype=np.int64, count=len(preds))
    return ConfusionMatrix(classes, np.bincount(flat, weights=w, minlength=k * k).reshape(k, k))


class BinaryMetrics(NamedTuple):
    precision: float
    recall: float
    overall: float
    false_alarm: float
    undefined: frozenset = frozenset()


class DetectionRates(NamedTuple):
    dr: float  # percent
    fp: float  # percent
    undefined: frozenset = frozenset()


def _ratio(num, den, name, undefined: set) -> float:
    if den == 0:
        undefined.add(name)
        return 0.0
    return num / den


def binary_metrics(cm: ConfusionMatrix, positive) -> BinaryMetrics:
    tp, fp, fn, tn = cm.binary_counts(positive)
    undefined: set = set()
    total = tp + fp + fn + tn
    return BinaryMetrics(
        _ratio(tp, tp + fp, "precision", undefined),
        _ratio(tp, tp + fn, "recall", undefined),
        _ratio(tp + tn, total, "overall", undefined),
        _ratio(fp + fn, total, "false_alarm", undefined),
        frozenset(undefined),
    )


def dr_fp(cm: ConfusionMatrix, cls, normal=AttackClass.NORMAL.value) -> DetectionRates:
    """Detection rate and false-positive rate of ``cls``, in percent."""
    undefined: set = set()
    k = cm.index(cls)
    m = cm.matrix
    dr = _ratio(m[k, k], m[k].sum(), "dr", undefined) * 100.0
    if normal not in cm.classes:
        undefined.add("fp")
        return DetectionRates(dr, 0.0, frozenset(undefined))
    z = cm.index(normal)
    if k == z:
        attacks = [i for i in range(len(cm.classes)) if i != z]
        fp = _ratio(m[attacks, z].sum(), m[attacks].sum(), "fp", undefined) * 100.0
    else:
        fp = _ratio(m[z, k], m[z].sum(), "fp", undefined) * 100.0
    return DetectionRates(dr, fp, frozenset(undefined))


@dataclass(frozen=True)
class ClassMetrics:
    cls: str
    support: float
    dr: float
    fp: float
    precision: float
    recall: float
    overall: float
    false_alarm: float
    undefined: frozenset = frozenset()


@dataclass(frozen=True)
class MetricsReport:
    rows: tuple[ClassMetrics, ...]
    confusion: ConfusionMatrix
    title: str = ""
    meta: dict = field(default_factory=dict)

    def row(self, cls) -> ClassMetrics:
        for r in self.rows:
            if r.cls == cls:
                return r
        raise KeyError(cls)

    def macro(self) -> dict[str, float]:
        keys = ("dr", "fp", "precision", "recall", "overall", "false_alarm")
        present = [r for r in self.rows if r.support > 0]
        return {k: float(np.mean([getattr(r, k) for r in present])) if present else 0.0 for k in keys}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["class", "dr_pct", "fp_pct", "precision_pct", "recall_pct", "overall_pct", "false_alarm_pct"])
        for r in self.rows:
            writer.writerow([r.cls, *_cells(r)])
        return buf.getvalue()

    def to_table(self) -> str:
        head = (f"{'class':<8}{'support':>10}{'DR%':>9}{'FP%':>9}{'prec%':>9}{'recall%':>9}"
                f"{'overall%':>10}{'f.alarm%':>10}")
        lines = [self.title, head] if self.title else [head]
        for r in self.rows:
            vals = _cells(r)
            lines.append(f"{r.cls:<8}{r.support:>10.0f}{vals[0]:>9}{vals[1]:>9}{vals[2]:>9}{vals[3]:>9}"
                         f"{vals[4]:>10}{vals[5]:>10}")
        return "\n".join(lines)


def _cells(r: ClassMetrics) -> list[str]:
    """Percent strings at two decimals, ``n/a`` where undefined."""
    values = {"dr": r.dr, "fp": r.fp, "precision": r.precision * 100, "recall": r.recall * 100,
              "overall": r.overall * 100, "false_alarm": r.false_alarm * 100}
    return ["n/a" if k in r.undefined else f"{v:.2f}" for k, v in values.items()]


def metrics_report(cm: ConfusionMatrix, title: str = "", normal=AttackClass.NORMAL.value, **meta) -> MetricsReport:
    rows = []
    for cls in cm.classes:
        b = binary_metrics(cm, cls)
        d = dr_fp(cm, cls, normal)
        rows.append(ClassMetrics(cls, cm.row_total(cls), d.dr, d.fp, b.precision, b.recall, b.overall,
                                 b.false_alarm, b.undefined | d.undefined))
    return MetricsReport(tuple(rows), cm, title, dict(meta))


def evaluate(preds, truth, weights=None, classes: Sequence = CLASS_ORDER, title: str = "", **meta) -> MetricsReport:
    return metrics_report(confusion(preds, truth, weights, classes), title, **meta)
