"""Independent brute-force re-derivations used as test oracles.

Plain Python over lists; nothing here imports the package under test.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict


def entropy(labels, weights=None) -> float:
    weights = [1.0] * len(labels) if weights is None else list(weights)
    totals = defaultdict(float)
    for c, w in zip(labels, weights):
        totals[c] += w
    n = sum(totals.values())
    return -sum(t / n * math.log2(t / n) for t in totals.values() if t > 0)


def info_gain(rows, labels, attr, weights=None) -> float:
    weights = [1.0] * len(labels) if weights is None else list(weights)
    n = sum(weights)
    groups = defaultdict(list)
    for r, c, w in zip(rows, labels, weights):
        groups[r[attr]].append((c, w))
    rest = 0.0
    for members in groups.values():
        ls, ws = zip(*members)
        rest += sum(ws) / n * entropy(ls, ws)
    return entropy(labels, weights) - rest


def nb_posterior(rows, labels, query, alpha, weights=None) -> dict:
    """Direct (non-log) product, normalized; classes are those present."""
    weights = [1.0] * len(labels) if weights is None else list(weights)
    classes = []
    for c in labels:
        if c not in classes:
            classes.append(c)
    total = sum(weights)
    raw = {}
    for c in classes:
        wc = sum(w for l, w in zip(labels, weights) if l == c)
        score = (wc + alpha) / (total + alpha * len(classes))
        for k, v in enumerate(query):
            universe = {r[k] for r in rows}
            n = sum(w for r, l, w in zip(rows, labels, weights) if l == c and r[k] == v)
            score *= (n + alpha) / (wc + alpha * len(universe))
        raw[c] = score
    z = sum(raw.values())
    return {c: (s / z if z > 0 else 0.0) for c, s in raw.items()}


def dedup(rows, labels):
    """Pairwise-equality dedup: ``[(row, label, count)]`` in first-occurrence order."""
    out = []
    for r, c in zip(rows, labels):
        for i, (r2, c2, k) in enumerate(out):
            if tuple(r2) == tuple(r) and c2 == c:
                out[i] = (r2, c2, k + 1)
                break
        else:
            out.append((tuple(r), c, 1))
    return out


def cut_points(values, labels) -> list[float]:
    """Midpoints between adjacent distinct values whose class sets differ (no support floor)."""
    classes = defaultdict(set)
    for v, c in zip(values, labels):
        classes[v].add(c)
    distinct = sorted(classes)
    out = []
    for a, b in zip(distinct, distinct[1:]):
        if classes[a] != classes[b]:
            m = (a + b) / 2
            out.append(b if m <= a else m)
    return out


def binary_counts(preds, truth, positive):
    tp = sum(1 for p, t in zip(preds, truth) if p == positive and t == positive)
    fp = sum(1 for p, t in zip(preds, truth) if p == positive and t != positive)
    fn = sum(1 for p, t in zip(preds, truth) if p != positive and t == positive)
    tn = sum(1 for p, t in zip(preds, truth) if p != positive and t != positive)
    return tp, fp, fn, tn


def dr_fp(preds, truth, cls, normal="Normal"):
    in_cls = [p for p, t in zip(preds, truth) if t == cls]
    dr = 100.0 * sum(p == cls for p in in_cls) / len(in_cls) if in_cls else None
    if cls == normal:
        attacks = [p for p, t in zip(preds, truth) if t != normal]
        fp = 100.0 * sum(p == normal for p in attacks) / len(attacks) if attacks else None
    else:
        normals = [p for p, t in zip(preds, truth) if t == normal]
        fp = 100.0 * sum(p == cls for p in normals) / len(normals) if normals else None
    return dr, fp


def majority(labels, class_order):
    counts = Counter(labels)
    return min(counts, key=lambda c: (-counts[c], class_order.index(c)))
