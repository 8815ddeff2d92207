"""HTTP service exposing the pipeline: classify, chat, introspection.

The service is stateless per request. Model and registry are loaded once
at startup and never mutated; the only shared mutable state is a bounded
in-memory ring of recent decisions kept so a debugging client can fetch
the full trace behind a chat reply by id.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import os
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .corpus import IntentRegistry, load_registry
from .pipeline import Decision, PipelineConfig, classify, respond
from .rerank import (
    HttpRerankerClient,
    PromptSpec,
    RerankerSettings,
    ScriptedRerankerClient,
    Verdict,
)
from .shortlist import ShortlistModel, load_model

DEFAULT_FALLBACK = (
    "Prepáčte, tejto požiadavke nerozumiem. Skúste ju prosím preformulovať "
    "alebo kontaktujte našu podporu."
)

ENV_PREFIX = "INTENTGATE_"


class ServiceConfigError(ValueError):
    """Raised when a service configuration cannot be used to start."""


@dataclass(frozen=True)
class ServiceConfig:
    """Everything the service needs to start; validated on construction."""

    model_path: str | None = None
    registry_path: str | None = None
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    reranker: RerankerSettings | None = None
    scripted_client_path: str | None = None
    fallback_response: str = DEFAULT_FALLBACK
    allow_threshold_override: bool = True
    expose_trace: bool = True
    decision_ring_size: int = 512
    max_inflight_reranks: int = 4
    host: str = "127.0.0.1"
    port: int = 8080

    def __post_init__(self) -> None:
        if self.pipeline.mode == "rerank":
            if self.reranker is None and self.scripted_client_path is None:
                raise ServiceConfigError(
                    "rerank mode needs reranker settings or a scripted client path"
                )
        if self.decision_ring_size < 1:
            raise ServiceConfigError("decision_ring_size must be positive")
        if self.max_inflight_reranks < 1:
            raise ServiceConfigError("max_inflight_reranks must be positive")
        if not self.fallback_response:
            raise ServiceConfigError("fallback_response must be non-empty")

    def to_dict(self) -> dict:
        return {
            "model_path": self.model_path,
            "registry_path": self.registry_path,
            "pipeline": self.pipeline.to_dict(),
            "reranker": self.reranker.to_dict() if self.reranker else None,
            "scripted_client_path": self.scripted_client_path,
            "fallback_response": self.fallback_response,
            "allow_threshold_override": self.allow_threshold_override,
            "expose_trace": self.expose_trace,
            "decision_ring_size": self.decision_ring_size,
            "max_inflight_reranks": self.max_inflight_reranks,
            "host": self.host,
            "port": self.port,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ServiceConfig":
        kwargs = dict(raw)
        if "pipeline" in kwargs and kwargs["pipeline"] is not None:
            kwargs["pipeline"] = PipelineConfig.from_dict(kwargs["pipeline"])
        if kwargs.get("reranker") is not None:
            kwargs["reranker"] = RerankerSettings.from_dict(kwargs["reranker"])
        return cls(**kwargs)


def load_service_config(
    path: str | Path | None = None, env: dict[str, str] | None = None
) -> ServiceConfig:
    """Read config from a JSON file, then apply environment overrides.

    Recognized overrides: INTENTGATE_MODEL_PATH, INTENTGATE_REGISTRY_PATH,
    INTENTGATE_HOST, INTENTGATE_PORT, INTENTGATE_THRESHOLD, INTENTGATE_MODE,
    INTENTGATE_FALLBACK, INTENTGATE_ALLOW_OVERRIDE, INTENTGATE_SCRIPTED_CLIENT.
    """
    env = dict(os.environ if env is None else env)
    raw: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ServiceConfigError(f"service config must be a JSON object: {path}")
    config = ServiceConfig.from_dict(raw)

    replacements: dict = {}
    simple = {
        "MODEL_PATH": "model_path",
        "REGISTRY_PATH": "registry_path",
        "HOST": "host",
        "FALLBACK": "fallback_response",
        "SCRIPTED_CLIENT": "scripted_client_path",
    }
    for suffix, fieldname in simple.items():
        value = env.get(ENV_PREFIX + suffix)
        if value is not None:
            replacements[fieldname] = value
    if ENV_PREFIX + "PORT" in env:
        replacements["port"] = int(env[ENV_PREFIX + "PORT"])
    if ENV_PREFIX + "ALLOW_OVERRIDE" in env:
        flag = env[ENV_PREFIX + "ALLOW_OVERRIDE"].strip().lower()
        replacements["allow_threshold_override"] = flag in ("1", "true", "yes")
    pipeline = config.pipeline
    if ENV_PREFIX + "THRESHOLD" in env:
        pipeline = dataclasses.replace(
            pipeline, threshold=float(env[ENV_PREFIX + "THRESHOLD"])
        )
    if ENV_PREFIX + "MODE" in env:
        pipeline = dataclasses.replace(pipeline, mode=env[ENV_PREFIX + "MODE"])
    if pipeline is not config.pipeline:
        replacements["pipeline"] = pipeline
    if replacements:
        config = dataclasses.replace(config, **replacements)
    return config


class DecisionRing:
    """Bounded id -> decision store; oldest entries fall off the end."""

    def __init__(self, capacity: int) -> None:
        self._capacity = capacity
        self._entries: OrderedDict[int, Decision] = OrderedDict()
        self._ids = itertools.count(1)
        self._lock = threading.Lock()

    def append(self, decision: Decision) -> int:
        with self._lock:
            decision_id = next(self._ids)
            self._entries[decision_id] = decision
            while len(self._entries) > self._capacity:
                self._entries.popitem(last=False)
        return decision_id

    def get(self, decision_id: int) -> Decision | None:
        with self._lock:
            return self._entries.get(decision_id)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


def _prompt_payload(prompt: PromptSpec | None) -> dict | None:
    if prompt is None:
        return None
    return {
        "template_id": prompt.template_id,
        "options": [
            {
                "position": opt.position,
                "letter": opt.letter,
                "intent_id": opt.intent_id,
                "label": opt.label,
            }
            for opt in prompt.options
        ],
        "rendered": [
            {"role": msg.role, "content": msg.content} for msg in prompt.rendered
        ],
    }


def _verdict_payload(verdict: Verdict | None) -> dict | None:
    if verdict is None:
        return None
    return {"kind": verdict.kind, "intent_id": verdict.intent_id, "raw": verdict.raw}


def decision_payload(decision: Decision, include_trace: bool) -> dict:
    body = {
        "outcome": decision.outcome,
        "intent_id": decision.intent_id,
        "confidence": decision.confidence,
    }
    if include_trace:
        trace = decision.trace
        body["trace"] = {
            "normalized_text": trace.normalized_text,
            "gate_rule": trace.gate_rule,
            "shortlist": [
                {"intent_id": c.intent_id, "score": c.score}
                for c in trace.shortlist.candidates
            ],
            "prompt": _prompt_payload(trace.prompt),
            "verdict": _verdict_payload(trace.verdict),
        }
    return body


class ClassifyRequest(BaseModel):
    text: str
    threshold_override: float | None = Field(default=None, ge=0.0, le=1.0)


class ChatRequest(BaseModel):
    text: str


def build_client(config: ServiceConfig):
    """Pick the reranker client the config asks for (None in vector mode)."""
    if config.pipeline.mode != "rerank":
        return None
    if config.scripted_client_path is not None:
        return ScriptedRerankerClient.load(config.scripted_client_path)
    return HttpRerankerClient(config.reranker)


def create_app(
    config: ServiceConfig,
    *,
    model: ShortlistModel | None = None,
    registry: IntentRegistry | None = None,
    client=None,
) -> FastAPI:
    """Build the FastAPI app; pass model/registry/client to skip file loads."""
    if model is None and config.model_path is not None:
        model = load_model(config.model_path)
    if registry is None and config.registry_path is not None:
        registry = load_registry(config.registry_path)
    if client is None:
        client = build_client(config)

    app = FastAPI(title="intentgate", version="0.1.0", docs_url=None, redoc_url=None)
    ring = DecisionRing(config.decision_ring_size)
    rerank_slots = threading.Semaphore(config.max_inflight_reranks)
    app.state.config = config
    app.state.ring = ring

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request"})

    def _ready() -> JSONResponse | None:
        if model is None or registry is None:
            return JSONResponse(
                status_code=503, content={"error": "model not loaded"}
            )
        return None

    def _decide(text: str, threshold_override: float | None) -> Decision:
        pipeline = config.pipeline
        if threshold_override is not None:
            pipeline = dataclasses.replace(pipeline, threshold=threshold_override)
        if pipeline.mode == "rerank":
            with rerank_slots:
                return classify(pipeline, model, client, registry, text)
        return classify(pipeline, model, client, registry, text)

    @app.post("/classify")
    def classify_endpoint(body: ClassifyRequest):
        not_ready = _ready()
        if not_ready is not None:
            return not_ready
        if body.threshold_override is not None and not config.allow_threshold_override:
            return JSONResponse(
                status_code=403, content={"error": "threshold override not permitted"}
            )
        decision = _decide(body.text, body.threshold_override)
        return decision_payload(decision, include_trace=config.expose_trace)

    @app.post("/chat")
    def chat_endpoint(body: ChatRequest):
        not_ready = _ready()
        if not_ready is not None:
            return not_ready
        decision = _decide(body.text, None)
        decision_id = ring.append(decision)
        return {
            "response": respond(decision, registry, fallback=config.fallback_response),
            "decision_id": decision_id,
        }

    @app.get("/decisions/{decision_id}")
    def decision_endpoint(decision_id: int):
        decision = ring.get(decision_id)
        if decision is None:
            return JSONResponse(status_code=404, content={"error": "unknown decision"})
        return decision_payload(decision, include_trace=config.expose_trace)

    @app.get("/intents")
    def intents_endpoint(request: Request, include_responses: bool = False):
        unknown = set(request.query_params) - {"include_responses"}
        if unknown:
            return JSONResponse(
                status_code=400,
                content={"error": f"unknown query parameters: {sorted(unknown)}"},
            )
        not_ready = _ready()
        if not_ready is not None:
            return not_ready
        items = []
        for intent in registry:
            item = {"id": intent.id, "description": intent.description}
            if include_responses:
                item["response"] = intent.response
            items.append(item)
        return {"intents": items}

    return app


def run(config: ServiceConfig) -> None:
    """Start the service with uvicorn; blocks until shut down."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
