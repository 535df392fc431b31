"""Text model files.

A model file is JSON Lines: the first line is a header (format version,
model kind, parameter echo, schema, discretization plan, category lists,
imputation values, training reports), every following line one tree node
in pre-order.  Naive Bayes tables are written as one row per observed
attribute value holding the per-class probabilities, plus the per-class
floor used for values outside the node's training universe.  Floats are
written with ``repr`` so a reload reproduces every probability exactly.
"""
from __future__ import annotations

import json
import os

import numpy as np

from ._base import FeatureEncoder
from .data_model import AttributeKind, AttributeSchema
from .decision_tree import ID3Classifier, TreeNode
from .hybrid import HybridNBTreeClassifier, HybridNode
from .naive_bayes import NaiveBayesClassifier, NBModel
from .preprocessing import DiscretizationPlan, MissingValueImputer

FORMAT = "nbtree-ids-model"
VERSION = 1

_KINDS = {"hybrid": HybridNBTreeClassifier, "nb": NaiveBayesClassifier, "id3": ID3Classifier}


class ModelFormatError(ValueError):
    pass


def _py(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def _kind_of(model) -> str:
    for kind, cls in _KINDS.items():
        if type(model) is cls:
            return kind
    raise TypeError(f"cannot serialize {type(model).__name__}")


def _header(model, kind: str) -> dict:
    enc: FeatureEncoder = model.encoder_
    params = {k: v for k, v in model.get_params().items() if k not in ("schema", "class_order")}
    return {
        "format": FORMAT,
        "version": VERSION,
        "kind": kind,
        "params": {k: _py(v) for k, v in params.items()},
        "classes": [_py(c) for c in model.classes_],
        "class_order": None if model.class_order is None else [_py(c) for c in model.class_order],
        "schema": [_schema_entry(a) for a in model.schema_],
        "plan": DiscretizationPlan(
            {a.name: tuple(b) for a, b in zip(enc.schema, enc.borders) if b is not None},
            model.min_interval_support).to_dict(),
        "categories": {a.name: [_py(v) for v in c] for a, c in zip(enc.schema, enc.categories) if c is not None},
        "fill_values": [_py(v) for v in enc.imputer.fill_values_],
        "preprocess_report": model.preprocess_report_,
        "relabel_report": getattr(model, "relabel_report_", None),
    }


def _schema_entry(a: AttributeSchema) -> dict:
    entry = {"name": a.name, "kind": a.kind.value}
    if a.discretized:
        entry.update(discretized=True, borders=list(a.borders))
    return entry


def _nb_payload(nb: NBModel, schema, vocab) -> dict:
    attributes = []
    for a, table, universe in zip(nb.attributes, nb.conditionals, nb.universe_sizes):
        floor = table[:, -1]
        rows = []
        for code in range(table.shape[1] - 1):
            col = table[:, code]
            if (col > floor).any():
                rows.append([_py(vocab[a][code]), [float(p) for p in col]])
        attributes.append({"attribute": schema[a].name, "universe": universe,
                           "floor": [float(p) for p in floor], "rows": rows})
    return {
        "classes": [_py(c) for c in nb.classes],
        "class_weights": [float(w) for w in nb.class_weights],
        "priors": [float(p) for p in nb.priors],
        "alpha": nb.alpha,
        "attributes": attributes,
    }


def _nb_from_payload(data: dict, schema, vocab, classes) -> NBModel:
    names = [a.name for a in schema]
    lookup = [{v: i for i, v in enumerate(vs)} for vs in vocab]
    class_pos = {c: i for i, c in enumerate(classes)}
    attributes, tables, sizes = [], [], []
    for entry in data["attributes"]:
        a = names.index(entry["attribute"])
        width = len(vocab[a])
        floor = np.asarray(entry["floor"], dtype=float)
        table = np.repeat(floor[:, None], width + 1, axis=1)
        for value, probs in entry["rows"]:
            table[:, lookup[a][value]] = probs
        attributes.append(a)
        tables.append(table)
        sizes.append(int(entry["universe"]))
    return NBModel(
        classes=tuple(data["classes"]),
        class_index=np.array([class_pos[c] for c in data["classes"]], dtype=np.int64),
        class_weights=np.asarray(data["class_weights"], dtype=float),
        priors=np.asarray(data["priors"], dtype=float),
        attributes=tuple(attributes),
        conditionals=tuple(tables),
        universe_sizes=tuple(sizes),
        alpha=float(data["alpha"]),
        vocabulary=tuple(tuple(v) for v in vocab),
    )


def _dump_lines(model) -> list[str]:
    kind = _kind_of(model)
    header = _header(model, kind)
    schema = model.schema_
    vocab = [model.encoder_.vocabulary(j) for j in range(len(schema))]
    nodes: list[dict] = []

    if kind == "nb":
        nodes.append({"node": 0, "nb": _nb_payload(model.model_, schema, vocab)})
    elif kind == "hybrid":
        def visit(node: HybridNode):
            entry = {"node": len(nodes), "depth": node.depth, "weight": node.subset_weight,
                     "errors": node.training_errors, "split": None}
            nodes.append(entry)
            if not node.is_leaf:
                children = []
                for code in sorted(node.children):
                    child_id = len(nodes)
                    visit(node.children[code])
                    children.append([_py(vocab[node.attribute][code]), child_id])
                entry["split"] = {"attribute": schema[node.attribute].name, "children": children}
            entry["nb"] = _nb_payload(node.nb, schema, vocab)
        visit(model.root_)
    else:
        def visit(node: TreeNode):
            entry = {"node": len(nodes), "label": _py(model.classes_[node.label]), "weight": node.weight,
                     "split": None}
            nodes.append(entry)
            if not node.is_leaf:
                children = []
                for code in sorted(node.children):
                    child_id = len(nodes)
                    visit(node.children[code])
                    children.append([_py(vocab[node.attribute][code]), child_id])
                entry["split"] = {"attribute": schema[node.attribute].name, "children": children,
                                  "default": _py(vocab[node.attribute][node.default])}
        visit(model.tree_)

    header["n_nodes"] = len(nodes)
    return [json.dumps(header)] + [json.dumps(n) for n in nodes]


def dumps(model) -> str:
    return "\n".join(_dump_lines(model)) + "\n"


def dump(model, target) -> None:
    text = dumps(model)
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        target.write(text)


def loads(text: str):
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ModelFormatError("empty model file")
    try:
        header = json.loads(lines[0])
        nodes = [json.loads(line) for line in lines[1:]]
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON Lines: {exc}") from exc
    if header.get("format") != FORMAT:
        raise ModelFormatError("not an nbtree-ids model file")
    if header.get("version") != VERSION:
        raise ModelFormatError(f"unsupported model format version {header.get('version')}")
    if len(nodes) != header["n_nodes"]:
        raise ModelFormatError(f"expected {header['n_nodes']} nodes, found {len(nodes)}")

    kind = header["kind"]
    schema = tuple(AttributeSchema(a["name"], AttributeKind(a["kind"]), i, tuple(a.get("borders", ())),
                                   a.get("discretized", False)) for i, a in enumerate(header["schema"]))
    plan = DiscretizationPlan.from_dict(header["plan"])
    model = _KINDS[kind](**header["params"], schema=schema, class_order=header["class_order"])
    categories = [header["categories"].get(a.name) for a in schema]
    borders = [np.asarray(plan.borders[a.name], dtype=float) if a.name in plan.borders else None for a in schema]
    imputer = MissingValueImputer(schema=schema)
    imputer.schema_ = schema
    imputer.n_features_in_ = len(schema)
    imputer.fill_values_ = list(header["fill_values"])
    imputer.class_fill_values_ = {}
    model.encoder_ = FeatureEncoder(schema, categories, borders, imputer)
    model.schema_ = schema
    model.classes_ = np.asarray(header["classes"])
    model.n_features_in_ = len(schema)
    model.preprocess_report_ = header["preprocess_report"]
    if header.get("relabel_report") is not None:
        model.relabel_report_ = header["relabel_report"]

    classes = list(header["classes"])
    vocab = [model.encoder_.vocabulary(j) for j in range(len(schema))]
    lookup = [{v: i for i, v in enumerate(vs)} for vs in vocab]
    names = [a.name for a in schema]

    if kind == "nb":
        model.model_ = _nb_from_payload(nodes[0]["nb"], schema, vocab, classes)
    elif kind == "hybrid":
        def build(i):
            n = nodes[i]
            node = HybridNode(_nb_from_payload(n["nb"], schema, vocab, classes), n["depth"], n["weight"], n["errors"])
            if n["split"] is not None:
                a = names.index(n["split"]["attribute"])
                node.attribute = a
                node.children = {lookup[a][v]: build(cid) for v, cid in n["split"]["children"]}
            return node
        model.root_ = build(0)
    else:
        def build(i):
            n = nodes[i]
            node = TreeNode(classes.index(n["label"]), n["weight"])
            if n["split"] is not None:
                a = names.index(n["split"]["attribute"])
                node.attribute = a
                node.children = {lookup[a][v]: build(cid) for v, cid in n["split"]["children"]}
                node.default = lookup[a][n["split"]["default"]]
            return node
        model.tree_ = build(0)
    return model


def load(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return loads(fh.read())
    return loads(source.read())
