"""Command line front end: gen-data, train, eval, sweep, serve.

Every verb exits 0 on success and 1 with a one-line diagnostic on
failure; argparse itself exits 2 on unknown verbs or flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .corpus import Dataset, load_dataset, load_registry
from .datagen import CorpusSpec, describe, generate, write_corpus
from .evaluation import evaluate, make_report, render_report, sweep
from .normalize import NormalizeConfig
from .pipeline import PipelineConfig
from .rerank import HttpRerankerClient, RerankerSettings, ScriptedRerankerClient
from .service import load_service_config
from .shortlist import ShortlistConfig, fit, load_model, save_model


def _normalize_config(args: argparse.Namespace) -> NormalizeConfig:
    return NormalizeConfig(
        lowercase=not args.no_lowercase,
        strip_diacritics=not args.keep_diacritics,
        strip_punctuation=not args.keep_punctuation,
    )


def _add_normalize_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--no-lowercase", action="store_true")
    parser.add_argument("--keep-diacritics", action="store_true")
    parser.add_argument("--keep-punctuation", action="store_true")


def _cmd_gen_data(args: argparse.Namespace) -> int:
    raw: dict = {}
    if args.spec is not None:
        raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    overrides = {
        "seed": args.seed,
        "n_intents": args.n_intents,
        "test_size": args.test_size,
        "oos_size": args.oos_size,
        "typo_rate": args.typo_rate,
        "grammar_path": args.grammar,
    }
    raw.update({k: v for k, v in overrides.items() if v is not None})
    spec = CorpusSpec.from_dict(raw)
    corpus = generate(spec)
    paths = write_corpus(corpus, args.out)
    sys.stdout.write(describe(corpus))
    for name in ("registry", "simple", "generated", "test", "oos"):
        print(f"wrote {paths[name]}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    registry = load_registry(args.registry)
    if args.dataset:
        loaded = [load_dataset(p) for p in args.dataset]
        examples = tuple(ex for ds in loaded for ex in ds.examples)
        train_set = Dataset(name="train", kind=loaded[0].kind, examples=examples)
    else:
        train_set = registry.embedded_examples()
        if not train_set.examples:
            print(
                "error: no --dataset given and the registry embeds no examples",
                file=sys.stderr,
            )
            return 1
    config = ShortlistConfig(
        n_min=args.n_min, n_max=args.n_max, normalize=_normalize_config(args)
    )
    model = fit(train_set, registry, config)
    save_model(model, args.out)
    print(
        f"trained on {len(train_set.examples)} examples: "
        f"{len(model.intent_ids)} intents, {len(model.vocabulary)} grams -> {args.out}"
    )
    return 0


def _build_eval_client(args: argparse.Namespace):
    if args.mode != "rerank":
        return None
    if args.scripted_client is not None:
        return ScriptedRerankerClient.load(args.scripted_client)
    if args.reranker_config is not None:
        raw = json.loads(Path(args.reranker_config).read_text(encoding="utf-8"))
        return HttpRerankerClient(RerankerSettings.from_dict(raw))
    raise ValueError("rerank mode needs --scripted-client or --reranker-config")


def _cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    registry = load_registry(args.registry)
    test_set = load_dataset(args.test)
    oos_set = load_dataset(args.oos)
    config = PipelineConfig(
        mode=args.mode,
        threshold=args.threshold,
        k=args.k,
        normalize=model.config.normalize,
    )
    client = _build_eval_client(args)
    accuracy, fpr = evaluate(config, model, client, registry, test_set, oos_set)
    name = args.name or f"{args.mode} @ t={args.threshold}"
    report = make_report(
        rows=[(name, accuracy * 100.0, fpr * 100.0)],
        config=config,
        dataset_sizes={
            "test": len(test_set.examples),
            "oos": len(oos_set.examples),
        },
    )
    sys.stdout.write(render_report(report, format=args.format))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    test_set = load_dataset(args.test)
    oos_set = load_dataset(args.oos)
    if args.points < 2:
        print("error: --points must be at least 2", file=sys.stderr)
        return 1
    thresholds = [i / (args.points - 1) for i in range(args.points)]
    config = PipelineConfig(mode="vector", normalize=model.config.normalize)
    rows = sweep(model, config, test_set, oos_set, thresholds)
    print("threshold,in_scope_accuracy,oos_fpr")
    for threshold, accuracy, fpr in rows:
        print(f"{threshold:.2f},{accuracy * 100.0:.1f},{fpr * 100.0:.1f}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from . import service

    config = load_service_config(args.config)
    replacements: dict = {}
    for fieldname in ("host", "port", "scripted_client_path"):
        value = getattr(args, fieldname)
        if value is not None:
            replacements[fieldname] = value
    if args.model is not None:
        replacements["model_path"] = args.model
    if args.registry is not None:
        replacements["registry_path"] = args.registry
    pipeline = config.pipeline
    if args.threshold is not None:
        pipeline = dataclasses.replace(pipeline, threshold=args.threshold)
    if args.mode is not None:
        pipeline = dataclasses.replace(pipeline, mode=args.mode)
    if pipeline is not config.pipeline:
        replacements["pipeline"] = pipeline
    if replacements:
        config = dataclasses.replace(config, **replacements)
    service.run(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intentgate",
        description="Shortlist-then-rerank intent gate: data, training, "
        "evaluation and serving.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("gen-data", help="generate a synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--spec", help="JSON file with corpus spec fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-intents", type=int)
    p.add_argument("--test-size", type=int)
    p.add_argument("--oos-size", type=int)
    p.add_argument("--typo-rate", type=float)
    p.add_argument("--grammar", help="path to a custom grammar JSON")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train", help="fit and serialize a shortlist model")
    p.add_argument("--registry", required=True)
    p.add_argument(
        "--dataset",
        action="append",
        default=[],
        help="training dataset (repeatable); falls back to registry examples",
    )
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=5)
    _add_normalize_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="report accuracy and OOS FPR")
    p.add_argument("--model", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--oos", required=True)
    p.add_argument("--threshold", type=float, default=0.4)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--mode", choices=("vector", "rerank"), default="vector")
    p.add_argument("--scripted-client", help="scripted reranker responses file")
    p.add_argument("--reranker-config", help="JSON file with reranker settings")
    p.add_argument("--format", choices=("text-table", "delimited"), default="text-table")
    p.add_argument("--name", help="row label in the report")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="metrics across an ascending threshold sweep")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--oos", required=True)
    p.add_argument("--points", type=int, default=11)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--config", help="service config JSON file")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--model")
    p.add_argument("--registry")
    p.add_argument("--threshold", type=float)
    p.add_argument("--mode", choices=("vector", "rerank"))
    p.add_argument("--scripted-client", dest="scripted_client_path")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # CLI boundary: any failure becomes one line
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
