"""Subcommand CLI: split, train, mine, predict, eval, elements.

Every command is deterministic given its config and input files; artifacts
embed the content hashes of their upstream artifacts and predict refuses a
mismatched chain. Exit codes: 0 success, 1 runtime failure, 2 usage/config
error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import classifier, corpus, distinguish, features, metrics, refine, report, syntax
from .config import parse_ratios, resolve_config
from .errors import ConfigError, VultypeError
from .persist import dump_json, dump_jsonl, file_sha256, load_json


def _require_file(path: Path, what: str) -> Path:
    if not path.is_file():
        raise ConfigError(f"{what} not found: {path}")
    return path


def _function_ngrams(f: corpus.VulnFunction):
    return features.build_ngrams([t.text for t in syntax.lex(f.source)])


def _elements_for(dataset: corpus.Dataset) -> dict[str, syntax.SyntacticElements]:
    return {f.id: syntax.extract_from_source(f.source) for f in dataset.functions}


def _load_types_file(path: Path) -> tuple[str, ...]:
    data = load_json(_require_file(path, "types file"))
    if isinstance(data, dict):
        data = data.get("types")
    if not isinstance(data, list) or not all(isinstance(t, str) for t in data):
        raise ConfigError(f"types file {path} must hold a JSON list of names "
                          '(or an object with a "types" key)')
    return tuple(data)


def _sidecar(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


# ---------------------------------------------------------------- subcommands

def cmd_split(args) -> int:
    cfg = resolve_config(args.config, {
        "dataset": args.data, "format": args.format, "splits_dir": args.out_dir,
        "seed": args.seed, "ratios": parse_ratios(args.ratios) if args.ratios else None,
        "group_below": args.group_below,
    })
    if cfg.dataset is None:
        raise ConfigError("no dataset given (flag --data or config key dataset)")
    data_path = _require_file(Path(cfg.dataset), "dataset file")

    dataset = corpus.load_dataset(data_path, cfg.format)
    spec = corpus.SplitSpec(ratios=cfg.ratios, seed=cfg.seed)
    train, val, test = corpus.split_dataset(dataset, spec)

    renamed: set[str] = set()
    if cfg.group_below > 0:
        renamed = corpus.rare_types(train, cfg.group_below)
        if renamed:
            train, val, test = (corpus.rename_types(d, renamed) for d in (train, val, test))
    manifest = corpus.write_splits((train, val, test), cfg.splits_dir, spec,
                                   group_below=cfg.group_below, renamed=renamed)
    print(f"[split] N={len(dataset)} -> train={len(train)} validation={len(val)} "
          f"test={len(test)} (seed={spec.seed}) -> {cfg.splits_dir}")
    if renamed:
        print(f"[split] grouped {len(renamed)} rare types into "
              f"{corpus.OTHERS_LABEL!r}: {sorted(renamed)}")
    print(f"[split] types: {manifest['types']}")
    return 0


def _resolve_train_types(train_path: Path, types_flag: str | None,
                         train: corpus.Dataset) -> tuple[str, ...]:
    if types_flag:
        return _load_types_file(Path(types_flag))
    manifest_path = train_path.parent / "split-manifest.json"
    if manifest_path.is_file():
        return tuple(load_json(manifest_path)["types"])
    return train.vocabulary.names


def cmd_train(args) -> int:
    cfg = resolve_config(args.config, {
        "splits_dir": args.splits_dir, "artifacts_dir": args.artifacts_dir,
        "p_threshold": args.p_threshold,
    })
    train_path = _require_file(
        Path(args.train) if args.train else Path(cfg.splits_dir) / "train.jsonl",
        "train file")
    out_dir = Path(cfg.artifacts_dir)

    started = time.perf_counter()
    train = corpus.load_dataset(train_path, cfg.format)
    types = _resolve_train_types(train_path, args.types, train)
    vocabulary = corpus.TypeVocabulary(types)
    train = corpus.load_dataset(train_path, cfg.format, vocabulary=vocabulary)

    docs = [_function_ngrams(f) for f in train.functions]
    tfidf = features.fit_tfidf(docs)
    vectors = [features.transform(doc, tfidf) for doc in docs]
    labels = corpus.label_matrix(train)
    selection = features.chi2_select(vectors, labels, cfg.p_threshold)
    restricted = [features.restrict(v, selection) for v in vectors]
    model = classifier.train_br(restricted, labels, types)

    train_sha = file_sha256(train_path)
    tfidf_path = dump_json(out_dir / "tfidf.json",
                           dict(tfidf.to_json_dict(), train_sha256=train_sha))
    selection_path = dump_json(out_dir / "selection.json",
                               dict(selection.to_json_dict(),
                                    tfidf_sha256=file_sha256(tfidf_path)))
    model_path = dump_json(out_dir / "model.json",
                           dict(model.to_json_dict(),
                                tfidf_sha256=file_sha256(tfidf_path),
                                selection_sha256=file_sha256(selection_path)))
    wall = time.perf_counter() - started
    dump_json(out_dir / "train-manifest.json", {
        "train_file": str(train_path),
        "train_sha256": train_sha,
        "n_functions": len(train),
        "n_terms": len(tfidf),
        "n_kept": len(selection.kept),
        "p_threshold": cfg.p_threshold,
        "types": list(types),
        "wall_seconds": wall,
        "artifacts": {
            "tfidf": file_sha256(tfidf_path),
            "selection": file_sha256(selection_path),
            "model": file_sha256(model_path),
        },
        "warnings": list(selection.warnings),
    })
    print(f"[train] {len(train)} functions, {len(tfidf)} terms, "
          f"{len(selection.kept)} kept (p<{cfg.p_threshold}), {len(types)} types "
          f"in {wall:.2f}s -> {out_dir}")
    return 0


def cmd_mine(args) -> int:
    cfg = resolve_config(args.config, {
        "splits_dir": args.splits_dir, "artifacts_dir": args.artifacts_dir,
        "theta": args.theta, "min_support": args.min_support, "table": args.out,
    })
    train_path = _require_file(
        Path(args.train) if args.train else Path(cfg.splits_dir) / "train.jsonl",
        "train file")
    table_path = Path(cfg.table) if cfg.table else Path(cfg.artifacts_dir) / "table.json"

    train = corpus.load_dataset(train_path, cfg.format)
    elements = _elements_for(train)
    table = distinguish.mine(train, elements, theta=cfg.theta, min_support=cfg.min_support)
    dump_json(table_path, dict(table.to_json_dict(), train_sha256=file_sha256(train_path)))
    n_pos = sum(len(v) for v in table.positive.values())
    n_neg = sum(len(v) for v in table.negative.values())
    print(f"[mine] {n_pos} positive / {n_neg} negative distinguishing tokens "
          f"(theta={cfg.theta}, min_support={cfg.min_support}) -> {table_path}")
    return 0


def _check_chain(model_data: dict, tfidf_path: Path, selection_path: Path) -> None:
    for key, path in (("tfidf_sha256", tfidf_path), ("selection_sha256", selection_path)):
        recorded = model_data.get(key)
        actual = file_sha256(path)
        if recorded is not None and recorded != actual:
            raise VultypeError(
                f"artifact chain mismatch: model records {key}={recorded[:12]}..., "
                f"but {path.name} hashes to {actual[:12]}...")


def cmd_predict(args) -> int:
    cfg = resolve_config(args.config, {
        "splits_dir": args.splits_dir, "artifacts_dir": args.artifacts_dir,
        "table": args.table, "predictions": args.out,
    })
    data_path = _require_file(
        Path(args.data) if args.data else Path(cfg.splits_dir) / "test.jsonl",
        "input dataset")
    out_path = Path(cfg.predictions) if cfg.predictions else Path("predictions.jsonl")
    artifacts = Path(cfg.artifacts_dir)

    model = None
    model_sha = None
    if args.external is None or args.types is None:
        model_path = artifacts / "model.json"
        if args.external is None:
            _require_file(model_path, "model artifact")
        if model_path.is_file():
            model_data = load_json(model_path)
            if args.external is None:
                tfidf_path = _require_file(artifacts / "tfidf.json", "tfidf artifact")
                selection_path = _require_file(artifacts / "selection.json",
                                               "selection artifact")
                _check_chain(model_data, tfidf_path, selection_path)
                tfidf = features.TfIdfVocabulary.from_json_dict(load_json(tfidf_path))
                selection = features.Chi2Selection.from_json_dict(load_json(selection_path))
            model = classifier.BrModel.from_json_dict(model_data)
            model_sha = file_sha256(model_path)

    if args.types:
        types = _load_types_file(Path(args.types))
    elif model is not None:
        types = model.types
    else:
        types = corpus.load_dataset(data_path, cfg.format).vocabulary.names
    vocabulary = corpus.TypeVocabulary(types)
    dataset = corpus.load_dataset(data_path, cfg.format, vocabulary=vocabulary)

    if args.external is not None:
        predictions = refine.load_external_predictions(Path(args.external), vocabulary)
        known = {f.id for f in dataset.functions}
        missing = [fid for fid, _ in predictions if fid not in known]
        if missing:
            raise VultypeError(f"external predictions reference unknown ids: {missing[:5]}")
        source = "external"
    else:
        predictions = []
        for f in dataset.functions:
            vec = features.transform(_function_ngrams(f), tfidf)
            predictions.append((f.id, classifier.predict(model, features.restrict(vec, selection))))
        source = "model"

    table_sha = None
    if args.refine:
        table_path = Path(cfg.table) if cfg.table else artifacts / "table.json"
        _require_file(table_path, "distinguishing-token table")
        table = distinguish.DistinguishingTokenTable.from_json_dict(load_json(table_path))
        table_sha = file_sha256(table_path)
        by_id = {f.id: f for f in dataset.functions}
        elements = {fid: syntax.extract_from_source(by_id[fid].source)
                    for fid, _ in predictions}
        has_truth = any(f.labels for f in dataset.functions)
        truth = ({f.id: corpus.label_vector(f, vocabulary) for f in dataset.functions}
                 if has_truth else None)
        predictions, audit = refine.refine_batch(predictions, elements, table,
                                                 vocabulary, truth=truth)
        dump_json(_sidecar(out_path, "-audit.json"), audit.to_json_dict())
        rate = audit.accuracy_rate
        print(f"[predict] refinement affected {audit.affected} predictions"
              + (f", corrected {audit.corrected} (accuracy rate {rate:.3f})"
                 if rate is not None else ""))

    rows = []
    for fid, pv in predictions:
        row = {"id": fid, "bits": list(pv.bits)}
        if pv.scores is not None:
            row["scores"] = list(pv.scores)
        if args.refine:
            row["refined"] = True
        rows.append(row)
    dump_jsonl(out_path, rows)
    dump_json(_sidecar(out_path, "-manifest.json"), {
        "types": list(types),
        "source": source,
        "refined": bool(args.refine),
        "model_sha256": model_sha,
        "table_sha256": table_sha,
    })
    print(f"[predict] {len(rows)} predictions ({source}"
          + (", refined" if args.refine else "") + f") -> {out_path}")
    return 0


def cmd_eval(args) -> int:
    cfg = resolve_config(args.config, {
        "reports_dir": args.out_dir, "empty_union_score": args.empty_union_score,
        "figures": args.figures,
    })
    predictions_path = _require_file(Path(args.predictions), "predictions file")
    truth_path = _require_file(Path(args.truth), "truth file")

    if args.types:
        types = _load_types_file(Path(args.types))
    else:
        sidecar = _sidecar(predictions_path, "-manifest.json")
        if sidecar.is_file():
            types = tuple(load_json(sidecar)["types"])
        else:
            types = corpus.load_dataset(truth_path, cfg.format).vocabulary.names
    vocabulary = corpus.TypeVocabulary(types)

    truth = corpus.load_dataset(truth_path, cfg.format, vocabulary=vocabulary)
    predictions = refine.load_external_predictions(predictions_path, vocabulary)
    pred_map = dict(predictions)
    truth_ids = set(truth.ids())
    missing = [fid for fid in truth.ids() if fid not in pred_map]
    extra = [fid for fid in pred_map if fid not in truth_ids]
    if missing or extra:
        raise VultypeError(f"id mismatch between predictions and truth "
                           f"(missing={missing[:5]}, extra={extra[:5]})")

    y = corpus.label_matrix(truth)
    z = [pred_map[f.id] for f in truth.functions]
    result = metrics.evaluate(y, z, types, empty_union_score=cfg.empty_union_score)
    written = report.write_report(result, cfg.reports_dir, stem=args.stem,
                                  figures=cfg.figures)
    print(report.render_text_table(result))
    print(f"[eval] report -> {written['json']}")
    return 0


def cmd_elements(args) -> int:
    cfg = resolve_config(args.config, {})
    data_path = _require_file(Path(args.data), "input dataset")
    dataset = corpus.load_dataset(data_path, args.format or cfg.format)
    rows = [{"id": f.id, **syntax.extract_from_source(f.source).as_sorted_dict()}
            for f in dataset.functions]
    if args.out:
        dump_jsonl(args.out, rows)
        print(f"[elements] {len(rows)} functions -> {args.out}")
    else:
        for row in rows:
            print(json.dumps(row, sort_keys=True))
    return 0


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vultype",
        description="Vulnerability type identification: TF-IDF + chi2 + Gaussian NB "
                    "baseline with distinguishing-token prediction refinement.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="key = value config file; flags win")

    p = sub.add_parser("split", help="split a dataset into train/validation/test")
    add_config(p)
    p.add_argument("--data", help="dataset file (JSONL or CSV)")
    p.add_argument("--format", choices=("jsonl", "csv"))
    p.add_argument("--out-dir", help="output directory for the split files")
    p.add_argument("--seed", type=int)
    p.add_argument("--ratios", help="train,validation,test fractions, e.g. 0.8,0.1,0.1")
    p.add_argument("--group-below", type=int, dest="group_below",
                   help="rename types with fewer than K training cases to 'others'")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="fit TF-IDF, chi2 selection, and the BR model")
    add_config(p)
    p.add_argument("--train", help="training split (default: <splits-dir>/train.jsonl)")
    p.add_argument("--types", help="JSON file pinning the type vocabulary")
    p.add_argument("--splits-dir", dest="splits_dir")
    p.add_argument("--artifacts-dir", dest="artifacts_dir")
    p.add_argument("--p-threshold", type=float, dest="p_threshold")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("mine", help="mine the distinguishing-token table")
    add_config(p)
    p.add_argument("--train", help="training split (default: <splits-dir>/train.jsonl)")
    p.add_argument("--splits-dir", dest="splits_dir")
    p.add_argument("--artifacts-dir", dest="artifacts_dir")
    p.add_argument("--out", help="table output path (default: <artifacts-dir>/table.json)")
    p.add_argument("--theta", type=float)
    p.add_argument("--min-support", type=int, dest="min_support")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("predict", help="predict types for a dataset")
    add_config(p)
    p.add_argument("--data", help="input dataset (default: <splits-dir>/test.jsonl)")
    p.add_argument("--splits-dir", dest="splits_dir")
    p.add_argument("--artifacts-dir", dest="artifacts_dir")
    p.add_argument("--out", help="predictions output path (default: predictions.jsonl)")
    p.add_argument("--refine", action="store_true",
                   help="apply distinguishing-token refinement")
    p.add_argument("--table", help="token table path (default: <artifacts-dir>/table.json)")
    p.add_argument("--external", help="refine externally produced predictions "
                                      "(JSONL with id and bits) instead of the model's")
    p.add_argument("--types", help="JSON file pinning the type vocabulary")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    add_config(p)
    p.add_argument("--predictions", required=True)
    p.add_argument("--truth", required=True, help="dataset file with ground-truth labels")
    p.add_argument("--types", help="JSON file pinning the type vocabulary")
    p.add_argument("--out-dir", help="reports directory")
    p.add_argument("--stem", default="report", help="report file stem")
    p.add_argument("--empty-union-score", type=float, dest="empty_union_score")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None,
                   help="render PNG charts next to the report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("elements", help="dump per-function syntactic element buckets")
    add_config(p)
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"))
    p.add_argument("--out", help="output JSONL (default: stdout)")
    p.set_defaults(func=cmd_elements)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VultypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
