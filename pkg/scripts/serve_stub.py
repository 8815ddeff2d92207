#!/usr/bin/env python3
"""Self-contained stub service for console development and its live tests.

Builds a three-intent Slovak registry in memory, fits the shortlist model
on the embedded examples and serves the JSON API in vector mode with
threshold overrides allowed and traces exposed. No corpus files, no LLM
backend. When the console has been built (frontend/dist exists), the
frontend directory is mounted at / so the page and the API share one
origin and the browser needs no CORS setup.

The registry below is a frozen contract with frontend/tests/live.test.ts:
keep the card_block intent and its first example in sync with that file.

Usage: python scripts/serve_stub.py [--port 8808] [--threshold 0.4]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import uvicorn
from starlette.staticfiles import StaticFiles

from intentgate.corpus import Intent, IntentRegistry
from intentgate.pipeline import PipelineConfig
from intentgate.service import ServiceConfig, create_app
from intentgate.shortlist import ShortlistConfig, fit

REGISTRY = IntentRegistry(
    intents=(
        Intent(
            id="card_block",
            description="blokovanie stratenej alebo ukradnutej karty",
            response="Kartu si zablokujete v mobilnej aplikácii v sekcii Karty, "
            "alebo na linke 0850 111 888.",
            examples=(
                "chcem si zablokovať kartu",
                "zablokujte mi prosím kartu",
                "stratil som kartu, treba ju zablokovať",
                "ako zablokujem kartu",
            ),
        ),
        Intent(
            id="pin_change",
            description="zmena PIN kódu ku karte",
            response="PIN si zmeníte v ktoromkoľvek bankomate našej banky "
            "v menu Zmena PIN.",
            examples=(
                "ako si zmením pin",
                "chcem zmeniť pin kód",
                "zabudol som pin, ako ho zmením",
            ),
        ),
        Intent(
            id="account_balance",
            description="zostatok na účte",
            response="Aktuálny zostatok nájdete na domovskej obrazovke "
            "aplikácie alebo cez *100#.",
            examples=(
                "aký mám zostatok na účte",
                "chcem vidieť zostatok",
                "koľko mám na účte",
            ),
        ),
    )
)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8808)
    parser.add_argument("--threshold", type=float, default=0.4)
    parser.add_argument(
        "--console",
        default=str(Path(__file__).resolve().parent.parent / "frontend"),
        help="console directory to mount at / (needs a built dist/ inside)",
    )
    args = parser.parse_args(argv)

    model = fit(REGISTRY.embedded_examples(), REGISTRY, ShortlistConfig())
    config = ServiceConfig(
        pipeline=PipelineConfig(
            mode="vector", threshold=args.threshold, normalize=model.config.normalize
        ),
        allow_threshold_override=True,
        expose_trace=True,
        host=args.host,
        port=args.port,
    )
    app = create_app(config, model=model, registry=REGISTRY)

    console = Path(args.console)
    if (console / "dist").is_dir():
        # mounted last, so the API routes above keep winning
        app.mount("/", StaticFiles(directory=console, html=True), name="console")
        print(f"console mounted from {console}")
    else:
        print(f"no built console at {console}/dist; serving the API only")

    print(f"stub service on http://{args.host}:{args.port} "
          f"({len(REGISTRY)} intents, vector mode, threshold {args.threshold})")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
