"""Decision pipeline: normalize, shortlist, optionally rerank, gate.

Two decision modes:

* ``vector``: the top shortlist candidate wins iff its cosine score is
  strictly greater than the configured threshold ("exceeds", read
  literally: threshold 1.0 rejects everything, 0.0 accepts any positive
  match).
* ``rerank``: the top three candidates are offered to a reranker client
  together with the mandatory final invalid option; an intent verdict
  wins, an invalid or unparseable verdict gates to out-of-scope (never
  route on a guess).

Every decision carries a full trace: the normalized text, the shortlist
with scores, the prompt and raw verdict when reranking, and which gate
rule fired. ``classify`` is deterministic given a fixed model, config and
scripted client, and safe for concurrent calls over the shared immutable
model and registry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import IntentRegistry
from .normalize import NormalizeConfig
from .rerank import (
    PromptSpec,
    PromptTemplates,
    RerankerClient,
    Verdict,
    build_prompt,
    rerank,
)
from .shortlist import Shortlist, ShortlistModel, rank

MODES = ("vector", "rerank")

OUT_OF_SCOPE = "out_of_scope"
IN_SCOPE = "in_scope"

# Gate rules recorded in traces.
GATE_EMPTY_INPUT = "empty_input"
GATE_ABOVE_THRESHOLD = "score_above_threshold"
GATE_BELOW_THRESHOLD = "score_not_above_threshold"
GATE_VERDICT_INTENT = "verdict_intent"
GATE_VERDICT_INVALID = "verdict_invalid"
GATE_VERDICT_UNPARSEABLE = "verdict_unparseable"


class PipelineError(ValueError):
    """Raised for pipeline misconfiguration and integrity faults."""


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = "vector"
    threshold: float = 0.4
    k: int = 3
    normalize: NormalizeConfig = field(default_factory=NormalizeConfig)
    template_id: str | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise PipelineError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not 0.0 <= self.threshold <= 1.0:
            raise PipelineError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.k < 1:
            raise PipelineError(f"k must be >= 1, got {self.k}")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "threshold": self.threshold,
            "k": self.k,
            "normalize": self.normalize.to_dict(),
            "template_id": self.template_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> PipelineConfig:
        return cls(
            mode=d.get("mode", "vector"),
            threshold=float(d.get("threshold", 0.4)),
            k=int(d.get("k", 3)),
            normalize=NormalizeConfig.from_dict(d.get("normalize", {})),
            template_id=d.get("template_id"),
        )


@dataclass(frozen=True)
class Trace:
    normalized_text: str
    shortlist: Shortlist
    gate_rule: str
    prompt: PromptSpec | None = None
    verdict: Verdict | None = None


@dataclass(frozen=True)
class Decision:
    """Final pipeline output: an accepted intent or out-of-scope.

    ``confidence`` is the top-1 cosine score in vector mode and None in
    rerank mode (the generative verdict has no score).
    """

    outcome: str
    intent_id: str | None
    confidence: float | None
    trace: Trace

    @property
    def in_scope(self) -> bool:
        return self.outcome == IN_SCOPE


def classify(
    config: PipelineConfig,
    model: ShortlistModel,
    client: RerankerClient | None,
    registry: IntentRegistry,
    text: str,
    templates: PromptTemplates | None = None,
) -> Decision:
    """Run the full pipeline over one input text.

    Never raises on input content; any text, including one that
    normalizes to the empty string, produces a traced decision.
    """
    if config.mode == "rerank" and client is None:
        raise PipelineError("rerank mode requires a reranker client")

    shortlist = rank(model, text, config.k)

    if not shortlist.candidates:
        trace = Trace(
            normalized_text=shortlist.query_text,
            shortlist=shortlist,
            gate_rule=GATE_EMPTY_INPUT,
        )
        confidence = 0.0 if config.mode == "vector" else None
        return Decision(
            outcome=OUT_OF_SCOPE, intent_id=None, confidence=confidence, trace=trace
        )

    if config.mode == "vector":
        top = shortlist.candidates[0]
        accepted = top.score > config.threshold
        trace = Trace(
            normalized_text=shortlist.query_text,
            shortlist=shortlist,
            gate_rule=GATE_ABOVE_THRESHOLD if accepted else GATE_BELOW_THRESHOLD,
        )
        if accepted:
            return Decision(
                outcome=IN_SCOPE, intent_id=top.intent_id, confidence=top.score, trace=trace
            )
        return Decision(outcome=OUT_OF_SCOPE, intent_id=None, confidence=top.score, trace=trace)

    prompt = build_prompt(text, shortlist, registry, config.template_id, templates=templates)
    verdict = rerank(client, prompt)
    if verdict.kind == "intent":
        if verdict.intent_id not in registry:
            raise PipelineError(
                f"verdict names intent {verdict.intent_id!r} absent from the registry"
            )
        gate_rule = GATE_VERDICT_INTENT
        outcome, intent_id = IN_SCOPE, verdict.intent_id
    elif verdict.kind == "invalid":
        gate_rule = GATE_VERDICT_INVALID
        outcome, intent_id = OUT_OF_SCOPE, None
    else:
        gate_rule = GATE_VERDICT_UNPARSEABLE
        outcome, intent_id = OUT_OF_SCOPE, None
    trace = Trace(
        normalized_text=shortlist.query_text,
        shortlist=shortlist,
        gate_rule=gate_rule,
        prompt=prompt,
        verdict=verdict,
    )
    return Decision(outcome=outcome, intent_id=intent_id, confidence=None, trace=trace)


def respond(decision: Decision, registry: IntentRegistry, fallback: str) -> str:
    """The predetermined response for the decision, verbatim, or the fallback."""
    if decision.outcome == IN_SCOPE:
        if decision.intent_id is None or decision.intent_id not in registry:
            raise PipelineError(
                f"in-scope decision references unknown intent {decision.intent_id!r}"
            )
        return registry.get(decision.intent_id).response
    return fallback
