#!/usr/bin/env python3
"""Interactive terminal chat against a trained model, no HTTP involved.

Reads one query per line, prints the predetermined response plus a short
trace (top candidates with scores, gate rule). Useful for eyeballing
gate behaviour at different thresholds.

Usage: python scripts/demo_chat.py --model m.jsonl --registry r.jsonl [--threshold 0.4]
"""

from __future__ import annotations

import argparse
import sys

from intentgate.corpus import load_registry
from intentgate.pipeline import PipelineConfig, classify, respond
from intentgate.service import DEFAULT_FALLBACK
from intentgate.shortlist import load_model


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", required=True)
    parser.add_argument("--registry", required=True)
    parser.add_argument("--threshold", type=float, default=0.4)
    args = parser.parse_args(argv)

    model = load_model(args.model)
    registry = load_registry(args.registry)
    config = PipelineConfig(
        mode="vector", threshold=args.threshold, normalize=model.config.normalize
    )
    print(f"{len(registry)} intents loaded; threshold {config.threshold}; ctrl-d to quit")

    for line in sys.stdin:
        text = line.strip()
        if not text:
            continue
        decision = classify(config, model, None, registry, text)
        print(f"bot> {respond(decision, registry, fallback=DEFAULT_FALLBACK)}")
        top = ", ".join(
            f"{c.intent_id}={c.score:.3f}" for c in decision.trace.shortlist.candidates
        )
        print(f"     [{decision.outcome} | {decision.trace.gate_rule} | {top}]")
    return 0


if __name__ == "__main__":
    sys.exit(main())
