"""Command-line entry point: ``nbtree-ids {preprocess,train,evaluate,rank,benchmark}``.

Every run parameter can come from a YAML file given with ``--config``;
flags given on the command line win over the file.  Relative data paths
that do not exist are looked up under ``$NBTREE_IDS_DATA``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import fields
from pathlib import Path

import yaml

from . import serialization
from .benchmark import METHODS, RunConfig, make_model, resolve_attrs, run_benchmark, stratified_sample
from .data_model import (DATA_DIR_ENV, DataError, Dataset, SchemaMismatchError, format_record, load_dataset,
                         load_label_mapper, load_schema)
from .evaluation import evaluate
from .feature_selection import InfoGainSelector
from .preprocessing import (apply_discretization, build_discretization, deduplicate, impute_missing,
                            resolve_contradictions)
from .serialization import ModelFormatError

logger = logging.getLogger("nbtree_ids")

DEFAULT_TRAIN_NAME = "kddcup.data_10_percent"


class CLIError(Exception):
    """Failure reported to the user as ``error: ...`` with exit status 1."""


def resolve_path(path: str | None, what: str) -> Path:
    if path is None:
        base = os.environ.get(DATA_DIR_ENV)
        if base is None:
            raise CLIError(f"no {what} given (use --{what} or set ${DATA_DIR_ENV})")
        for name in (DEFAULT_TRAIN_NAME, DEFAULT_TRAIN_NAME + ".gz"):
            candidate = Path(base) / name
            if candidate.is_file():
                return candidate
        raise CLIError(f"no {what} given and {Path(base) / DEFAULT_TRAIN_NAME} does not exist")
    p = Path(path)
    if p.is_file():
        return p
    base = os.environ.get(DATA_DIR_ENV)
    if base and not p.is_absolute() and (Path(base) / p).is_file():
        return Path(base) / p
    raise CLIError(f"cannot read {what} file {path!r}: no such file")


def _load(path: str | None, what: str, args) -> Dataset:
    p = resolve_path(path, what)
    schema = load_schema(args.schema) if args.schema else None
    mapper = load_label_mapper(args.labels)
    try:
        return load_dataset(p, schema, mapper) if schema else load_dataset(p, mapper=mapper)
    except DataError as exc:
        raise CLIError(f"{p}: {exc}") from exc
    except OSError as exc:
        raise CLIError(f"cannot read {what} file {str(p)!r}: {exc.strerror or exc}") from exc


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CLIError(f"cannot write {path!r}: {exc.strerror or exc}") from exc


def run_config(args) -> RunConfig:
    """Defaults < ``--config`` file < explicit flags."""
    values = {}
    if args.config:
        try:
            loaded = yaml.safe_load(Path(args.config).read_text()) or {}
        except OSError as exc:
            raise CLIError(f"cannot read config file {args.config!r}: {exc.strerror or exc}") from exc
        known = {f.name for f in fields(RunConfig)}
        unknown = set(loaded) - known - {"train", "test", "kind", "labels", "schema"}
        if unknown:
            raise CLIError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update({k: v for k, v in loaded.items() if k in known})
        for key in ("train", "test", "kind", "labels", "schema"):
            if getattr(args, key, None) is None and key in loaded:
                setattr(args, key, loaded[key])
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    cfg = RunConfig(**values)
    _check_ranges(cfg)
    return cfg


def _check_ranges(cfg: RunConfig) -> None:
    if cfg.alpha < 0:
        raise CLIError("--alpha must be >= 0")
    for name in ("max_depth", "id3_max_depth"):
        v = getattr(cfg, name)
        if v is not None and v < 0:
            raise CLIError(f"--{name.replace('_', '-')} must be >= 0")
    if cfg.min_examples < 0:
        raise CLIError("--min-examples must be >= 0")
    if not 0 <= cfg.min_support < 1:
        raise CLIError("--min-support must lie in [0, 1)")
    if not 0 < cfg.sample_frac <= 1:
        raise CLIError("--sample-frac must lie in (0, 1]")
    if not 0 < cfg.test_frac < 1:
        raise CLIError("--test-frac must lie in (0, 1)")


def _depth(value: str):
    return None if value.lower() in ("none", "inf", "unlimited") else int(value)


def cmd_preprocess(args) -> None:
    cfg = run_config(args)
    d = stratified_sample(_load(args.train, "train", args), cfg.sample_frac, cfg.seed)
    imputed = impute_missing(d)
    unique = deduplicate(imputed)
    resolved, n_contra = resolve_contradictions(unique, return_count=True)
    plan = build_discretization(resolved, min_interval_support=cfg.min_support)
    report = {
        "config": cfg.as_dict(),
        "examples": len(d),
        "missing_values": int(sum(_count_missing(c) for c in d.columns)),
        "unique_examples": len(unique),
        "contradictory_groups": n_contra,
        "class_counts": d.class_counts(),
        "unique_class_counts": resolved.class_counts(),
        "discretization": plan.to_dict(),
    }
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if args.records_out:
        _write(args.records_out, "".join(format_record(e, resolved.schema) + "\n" for e in resolved))
    discretized = apply_discretization(resolved, plan)
    print(f"{len(d)} examples -> {len(unique)} unique, {n_contra} contradictory groups resolved, "
          f"{sum(a.discretized for a in discretized.schema)} attributes discretized", file=sys.stderr)


def _count_missing(col) -> int:
    if col.dtype.kind == "f":
        return int((col != col).sum())
    return int(sum(v is None for v in col))


def cmd_train(args) -> None:
    cfg = run_config(args)
    kind = args.kind or "hybrid"
    if not args.out:
        raise CLIError("train needs --out for the model file")
    d = stratified_sample(_load(args.train, "train", args), cfg.sample_frac, cfg.seed)
    indices, _ = resolve_attrs(cfg.attrs, d, cfg.min_support)
    if indices is not None:
        d = d.project(indices)
    model = make_model(kind, cfg, d.schema, d.class_order)
    start = time.perf_counter()
    model.fit(d)
    elapsed = time.perf_counter() - start
    _write(args.out, serialization.dumps(model))
    print(f"model: {kind} -> {args.out}")
    print(f"training examples: {len(d)} ({model.preprocess_report_['unique_examples']} unique), "
          f"attributes: {d.arity}")
    if kind == "hybrid":
        r = model.relabel_report_
        print(f"relabeled examples: {r['changed_examples']:.0f} of {r['total_examples']:.0f}")
        print(f"nodes: {model.n_nodes_}, depth: {model.depth_}")
    elif kind == "id3":
        print(f"nodes: {model.n_nodes_}, depth: {model.depth_}")
    print(f"wall time: {elapsed:.2f}s")


def _align(d: Dataset, model) -> Dataset:
    """Project ``d`` onto the model's attributes, by name."""
    names = [a.name for a in d.schema]
    positions = []
    for attr in model.schema_:
        if attr.name not in names:
            raise CLIError(f"schema mismatch: model attribute {attr.name!r} is missing from the data")
        positions.append(names.index(attr.name))
    if positions == list(range(len(names))):
        return d
    return d.project(positions)


def cmd_evaluate(args) -> None:
    run_config(args)
    if not args.model:
        raise CLIError("evaluate needs --model")
    model_path = resolve_path(args.model, "model")
    try:
        model = serialization.load(model_path)
    except (ModelFormatError, ValueError, KeyError) as exc:
        raise CLIError(f"{model_path}: not a valid model file ({exc})") from exc
    d = _align(_load(args.test, "test", args), model)
    try:
        preds = model.predict(d)
    except SchemaMismatchError as exc:
        raise CLIError(f"schema mismatch: {exc}") from exc
    report = evaluate(preds, d.labels, classes=d.class_order, title=f"{model_path.name} on {len(d)} examples")
    print(report.to_table())
    if args.out:
        _write(args.out, report.to_csv())


def cmd_rank(args) -> None:
    cfg = run_config(args)
    d = stratified_sample(_load(args.train, "train", args), cfg.sample_frac, cfg.seed)
    selector = InfoGainSelector(k=d.arity, min_interval_support=cfg.min_support, schema=d.schema).fit(d)
    report = selector.ranking_.to_report()
    if args.out:
        _write(args.out, report)
    else:
        sys.stdout.write(report)


def cmd_benchmark(args) -> None:
    cfg = run_config(args)
    train = _load(args.train, "train", args)
    test = _load(args.test, "test", args) if args.test else None
    methods = tuple(args.methods.split(",")) if args.methods else METHODS
    bad = set(methods) - set(METHODS)
    if bad:
        raise CLIError(f"unknown methods: {', '.join(sorted(bad))}")
    result = run_benchmark(train, test, cfg, methods)
    print(f"config: {json.dumps(cfg.as_dict(), sort_keys=True)}")
    print(f"train: {result.n_train} examples, test: {result.n_test} examples")
    for res in result.methods.values():
        print(f"{res.kind}: trained in {res.fit_seconds:.2f}s")
    print()
    print(result.grid("test"))
    print()
    print(result.grid("train"))
    if args.out:
        _write(args.out, result.to_csv())


def _common(p: argparse.ArgumentParser, *, train=False, test=False, model=False) -> None:
    p.add_argument("--config", help="YAML file with run parameters (flags override it)")
    p.add_argument("--labels", help="YAML file whose 'labels' section extends the bundled label map")
    p.add_argument("--schema", help="YAML file with an 'attributes' list replacing the KDD99 schema")
    if train:
        p.add_argument("--train", help="training records (plain or gzip)")
    if test:
        p.add_argument("--test", help="labeled test records (plain or gzip)")
    if model:
        p.add_argument("--model", help="model file")
    p.add_argument("--out", help="output path")
    p.add_argument("--alpha", type=float, help="additive smoothing (default 1)")
    p.add_argument("--max-depth", type=_depth, help="hybrid depth limit (default 10; 'none' = unlimited)")
    p.add_argument("--id3-max-depth", type=_depth, help="ID3 depth limit (default 20)")
    p.add_argument("--min-examples", type=float, help="smallest node weight that may split (default 5)")
    p.add_argument("--min-support", type=float, help="minimum training fraction per interval (default 0.01)")
    p.add_argument("--attrs", help="'all', 'top-K' or comma-separated attribute indices")
    p.add_argument("--sample-frac", type=float, help="seeded stratified training sample fraction")
    p.add_argument("--test-frac", type=float, help="held-out fraction when no --test is given (default 0.2)")
    p.add_argument("--seed", type=int, help="sampling seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbtree-ids",
                                     description="Hybrid naive Bayes / decision tree intrusion detection.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="dedup, resolve contradictions, plan discretization")
    _common(p, train=True)
    p.add_argument("--records-out", help="also write the cleaned unique records here")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="train a model and write the model file")
    _common(p, train=True)
    p.add_argument("--kind", choices=METHODS, help="model kind (default hybrid)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="per-class DR/FP/precision/recall of a model file")
    _common(p, test=True, model=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("rank", help="rank attributes by information gain")
    _common(p, train=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("benchmark", help="hybrid vs naive Bayes vs ID3 DR/FP grid")
    _common(p, train=True, test=True)
    p.add_argument("--methods", help="comma-separated subset of hybrid,nb,id3")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
