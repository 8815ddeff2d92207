#!/usr/bin/env python3
"""End-to-end protocol run on the default synthetic corpus.

Generates the corpus, trains the shortlist model on the generated split,
then prints the numbers the whole design hangs on: top-3 recall, the
gated top-1 operating points across a threshold sweep, and the oracle
reranker ceiling (what a perfect reranker over the same shortlists would
score). Finishes with a report table in both output formats.

Usage: python scripts/run_protocol.py [--seed 7] [--out runs/protocol]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from intentgate.corpus import save_dataset, save_registry
from intentgate.datagen import CorpusSpec, describe, generate
from intentgate.evaluation import evaluate, make_report, render_report, sweep
from intentgate.pipeline import PipelineConfig
from intentgate.rerank import OracleRerankerClient
from intentgate.shortlist import ShortlistConfig, fit, save_model, top_k_recall


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default="runs/protocol")
    args = parser.parse_args(argv)

    started = time.perf_counter()
    spec = CorpusSpec(seed=args.seed)
    corpus = generate(spec)
    print(describe(corpus))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_registry(corpus.registry, out / "registry.jsonl")
    for split in ("simple", "generated", "test", "oos"):
        save_dataset(getattr(corpus, split), out / f"{split}.jsonl")

    model = fit(corpus.generated, corpus.registry, ShortlistConfig())
    save_model(model, out / "model.jsonl")
    print(f"model: {len(model.vocabulary)} grams over {len(model.intent_ids)} intents")

    recall = top_k_recall(model, corpus.test, k=3)
    print(f"top-3 recall: {recall:.3f}")

    print("\nthreshold sweep (vector mode):")
    print("threshold  accuracy  oos_fpr")
    config = PipelineConfig(mode="vector", normalize=model.config.normalize)
    thresholds = [i / 10 for i in range(11)]
    for threshold, accuracy, fpr in sweep(
        model, config, corpus.test, corpus.oos, thresholds
    ):
        print(f"{threshold:9.2f}  {accuracy * 100:8.1f}  {fpr * 100:7.1f}")

    oracle = OracleRerankerClient.from_dataset(corpus.test)
    rerank_config = PipelineConfig(mode="rerank", normalize=model.config.normalize)
    oracle_accuracy, oracle_fpr = evaluate(
        rerank_config, model, oracle, corpus.registry, corpus.test, corpus.oos
    )
    print(f"\noracle rerank ceiling: accuracy {oracle_accuracy:.3f} "
          f"(= top-3 recall {recall:.3f}), oos fpr {oracle_fpr:.3f}")

    baseline_config = PipelineConfig(mode="vector", threshold=0.0)
    base_accuracy, base_fpr = evaluate(
        baseline_config, model, None, corpus.registry, corpus.test, corpus.oos
    )
    report = make_report(
        rows=[
            ("shortlist top-1 (t=0.0)", base_accuracy * 100, base_fpr * 100),
            ("oracle rerank ceiling", oracle_accuracy * 100, oracle_fpr * 100),
        ],
        config=config,
        dataset_sizes={"test": len(corpus.test.examples), "oos": len(corpus.oos.examples)},
    )
    print()
    sys.stdout.write(render_report(report, format="text-table"))
    print()
    sys.stdout.write(render_report(report, format="delimited"))
    print(f"\ndone in {time.perf_counter() - started:.1f}s; artifacts in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
