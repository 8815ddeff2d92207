"""Reranker: prompt construction, verdict parsing, chat-completion clients.

The prompt offers the shortlist's top candidates (at most three) plus a
mandatory final option whose meaning is "none of these match"; selecting
it is the out-of-scope path. Prompt wording lives in a versioned JSON
asset (``assets/templates.json``) so phrasing variants are configuration,
not code; the default template places the instruction in the system role
and the question with its options in the user role.

Clients implement a single ``complete(prompt) -> str`` contract. The HTTP
client speaks a chat-completion style JSON interface; the scripted client
replays canned responses keyed by prompt hash and keeps tests fully
deterministic; the oracle client answers the gold option's position
whenever it is present, which turns shortlist recall into an exact upper
bound on pipeline accuracy.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping, Protocol

import httpx

from .corpus import Dataset, IntentRegistry
from .normalize import strip_diacritics, to_lowercase
from .shortlist import Shortlist

TEMPLATES_SCHEMA_VERSION = 1
SCRIPT_SCHEMA_VERSION = 1
MAX_PROMPT_OPTIONS = 3

_LETTERS = "abcdefghijklmnopqrstuvwxyz"
_NUMBER_ANSWER = re.compile(r"^\s*(\d+)\s*[.)]?\s*$")
_LETTER_ANSWER = re.compile(r"^\s*([a-zA-Z])\s*[.)]?\s*$")


class RerankerError(Exception):
    """Base for reranker faults."""


class RerankerConfigError(RerankerError):
    """Bad or missing client configuration; raised at startup, not per call."""


class RerankerTransportError(RerankerError):
    """Transient transport failure; eligible for retry."""


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def to_dict(self) -> dict[str, str]:
        return {"role": self.role, "content": self.content}


@dataclass(frozen=True)
class PromptOption:
    """One selectable option; ``intent_id`` is None for the invalid option."""

    position: int
    intent_id: str | None
    label: str
    description: str

    @property
    def is_invalid(self) -> bool:
        return self.intent_id is None

    @property
    def letter(self) -> str:
        return _LETTERS[self.position - 1]


@dataclass(frozen=True)
class PromptSpec:
    question: str
    options: tuple[PromptOption, ...]
    template_id: str
    rendered: tuple[ChatMessage, ...]

    def intent_options(self) -> tuple[PromptOption, ...]:
        return tuple(o for o in self.options if not o.is_invalid)

    def rendered_text(self) -> str:
        return "\n\n".join(f"[{m.role}]\n{m.content}" for m in self.rendered)


@dataclass(frozen=True)
class Verdict:
    kind: str  # "intent" | "invalid" | "unparseable"
    intent_id: str | None
    raw: str


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    language: str
    system: str | None
    user: str
    option_line: str
    invalid_description: str


@dataclass(frozen=True)
class PromptTemplates:
    by_id: dict[str, PromptTemplate]
    default_id: str

    def get(self, template_id: str | None) -> PromptTemplate:
        key = template_id or self.default_id
        if key not in self.by_id:
            raise RerankerConfigError(
                f"unknown prompt template {key!r}; available: {sorted(self.by_id)}"
            )
        return self.by_id[key]


def load_templates(path: str | Path | None = None) -> PromptTemplates:
    """Load prompt templates from a JSON asset (the packaged one by default)."""
    if path is None:
        payload = json.loads(
            resources.files("intentgate").joinpath("assets/templates.json").read_text("utf-8")
        )
    else:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("v") != TEMPLATES_SCHEMA_VERSION:
        raise RerankerConfigError(
            f"unsupported template schema version {payload.get('v')!r}"
        )
    by_id = {}
    for entry in payload["templates"]:
        template = PromptTemplate(
            id=entry["id"],
            language=entry.get("language", ""),
            system=entry.get("system"),
            user=entry["user"],
            option_line=entry["option_line"],
            invalid_description=entry["invalid_description"],
        )
        by_id[template.id] = template
    default_id = payload.get("default")
    if default_id not in by_id:
        raise RerankerConfigError(f"default template {default_id!r} not among templates")
    return PromptTemplates(by_id=by_id, default_id=default_id)


_PACKAGED_TEMPLATES: PromptTemplates | None = None


def default_templates() -> PromptTemplates:
    global _PACKAGED_TEMPLATES
    if _PACKAGED_TEMPLATES is None:
        _PACKAGED_TEMPLATES = load_templates()
    return _PACKAGED_TEMPLATES


def build_prompt(
    question: str,
    shortlist: Shortlist,
    registry: IntentRegistry,
    template_id: str | None = None,
    templates: PromptTemplates | None = None,
) -> PromptSpec:
    """Assemble the prompt: top shortlist candidates, then the invalid option.

    At most three candidate options are offered, in shortlist rank order,
    each with its registry description; the invalid option is always last
    and positions run contiguously from 1.
    """
    templates = templates or default_templates()
    template = templates.get(template_id)
    options: list[PromptOption] = []
    for candidate in shortlist.candidates[:MAX_PROMPT_OPTIONS]:
        if candidate.intent_id not in registry:
            raise RerankerError(
                f"shortlist references intent {candidate.intent_id!r} absent from the registry"
            )
        intent = registry.get(candidate.intent_id)
        options.append(
            PromptOption(
                position=len(options) + 1,
                intent_id=intent.id,
                label=intent.id,
                description=intent.description,
            )
        )
    options.append(
        PromptOption(
            position=len(options) + 1,
            intent_id=None,
            label=registry.invalid_literal,
            description=template.invalid_description,
        )
    )
    option_lines = "\n".join(
        template.option_line.format(
            number=o.position, letter=o.letter, name=o.label, description=o.description
        )
        for o in options
    )
    user_text = template.user.format(question=question, options=option_lines)
    messages: list[ChatMessage] = []
    if template.system is not None:
        messages.append(ChatMessage(role="system", content=template.system))
    messages.append(ChatMessage(role="user", content=user_text))
    return PromptSpec(
        question=question,
        options=tuple(options),
        template_id=template.id,
        rendered=tuple(messages),
    )


def _fold(text: str) -> str:
    return strip_diacritics(to_lowercase(text))


def parse_verdict(raw: str, prompt: PromptSpec) -> Verdict:
    """Resolve a model answer against the prompt's options.

    Priority: exact option number ("3", "3."), option letter ("c"),
    exact option name, then a case- and diacritic-insensitive substring
    match on option names that is accepted only when exactly one option
    matches. Anything else is unparseable, which is a value, not a fault.
    """
    options = prompt.options

    def verdict_for(option: PromptOption) -> Verdict:
        if option.is_invalid:
            return Verdict(kind="invalid", intent_id=None, raw=raw)
        return Verdict(kind="intent", intent_id=option.intent_id, raw=raw)

    number = _NUMBER_ANSWER.match(raw)
    if number:
        position = int(number.group(1))
        if 1 <= position <= len(options):
            return verdict_for(options[position - 1])
    letter = _LETTER_ANSWER.match(raw)
    if letter:
        position = _LETTERS.index(letter.group(1).lower()) + 1
        if 1 <= position <= len(options):
            return verdict_for(options[position - 1])
    stripped = raw.strip()
    for option in options:
        if stripped == option.label:
            return verdict_for(option)
    folded = _fold(raw)
    matches = [o for o in options if _fold(o.label) and _fold(o.label) in folded]
    if len(matches) == 1:
        return verdict_for(matches[0])
    return Verdict(kind="unparseable", intent_id=None, raw=raw)


class RerankerClient(Protocol):
    """Anything that can turn a rendered prompt into raw model output."""

    def complete(self, prompt: PromptSpec) -> str: ...


def prompt_key(prompt: PromptSpec) -> str:
    """Stable hash of the rendered messages; the scripted client's lookup key."""
    canonical = json.dumps(
        [m.to_dict() for m in prompt.rendered], ensure_ascii=False, sort_keys=True
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ScriptedRerankerClient:
    """Deterministic stub: prompt hash -> canned response, optional default.

    Script files are JSON: {"v": 1, "responses": {"<sha256>": "..."},
    "default": "..."}. Given the same prompt and script the stub always
    answers the same thing.
    """

    def __init__(self, responses: Mapping[str, str] | None = None, default: str | None = None):
        self.responses = dict(responses or {})
        self.default = default

    def complete(self, prompt: PromptSpec) -> str:
        key = prompt_key(prompt)
        if key in self.responses:
            return self.responses[key]
        if self.default is not None:
            return self.default
        raise RerankerError(f"scripted client has no response for prompt {key[:12]}…")

    @classmethod
    def load(cls, path: str | Path) -> ScriptedRerankerClient:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("v") != SCRIPT_SCHEMA_VERSION:
            raise RerankerConfigError(
                f"unsupported script schema version {payload.get('v')!r}"
            )
        return cls(responses=payload.get("responses", {}), default=payload.get("default"))

    def save(self, path: str | Path) -> None:
        payload = {"v": SCRIPT_SCHEMA_VERSION, "responses": self.responses}
        if self.default is not None:
            payload["default"] = self.default
        Path(path).write_text(
            json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )


class OracleRerankerClient:
    """Answers the gold option's position whenever the gold intent is offered.

    Knows the gold intent for each question text; when the gold intent is
    among the options it answers that option's number, otherwise it
    answers the invalid literal. Pipeline accuracy under this client
    equals shortlist top-k recall exactly, which makes the recall ceiling
    executable.
    """

    def __init__(self, gold_by_question: Mapping[str, str]):
        self.gold_by_question = dict(gold_by_question)

    @classmethod
    def from_dataset(cls, dataset: Dataset) -> OracleRerankerClient:
        gold: dict[str, str] = {}
        for ex in dataset.examples:
            if ex.intent_id is None:
                raise RerankerError("oracle client needs gold intents on every example")
            if ex.text in gold and gold[ex.text] != ex.intent_id:
                raise RerankerError(
                    f"conflicting gold intents for duplicate text {ex.text!r}"
                )
            gold[ex.text] = ex.intent_id
        return cls(gold)

    def complete(self, prompt: PromptSpec) -> str:
        gold = self.gold_by_question.get(prompt.question)
        invalid_option = prompt.options[-1]
        if gold is None:
            return invalid_option.label
        for option in prompt.intent_options():
            if option.intent_id == gold:
                return str(option.position)
        return invalid_option.label


@dataclass(frozen=True)
class RerankerSettings:
    """HTTP chat-completion backend configuration.

    The credential is read from the environment variable named by
    ``api_key_env`` (set it to "" for backends that need no key).
    Generation is pinned to temperature 0 with a bounded output length;
    classification wants determinism, not prose.
    """

    base_url: str
    model: str
    api_key_env: str = "RERANKER_API_KEY"
    timeout_seconds: float = 30.0
    max_output_tokens: int = 16
    max_retries: int = 2
    backoff_seconds: float = 0.5

    def to_dict(self) -> dict:
        return {
            "base_url": self.base_url,
            "model": self.model,
            "api_key_env": self.api_key_env,
            "timeout_seconds": self.timeout_seconds,
            "max_output_tokens": self.max_output_tokens,
            "max_retries": self.max_retries,
            "backoff_seconds": self.backoff_seconds,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> RerankerSettings:
        return cls(
            base_url=d["base_url"],
            model=d["model"],
            api_key_env=d.get("api_key_env", "RERANKER_API_KEY"),
            timeout_seconds=float(d.get("timeout_seconds", 30.0)),
            max_output_tokens=int(d.get("max_output_tokens", 16)),
            max_retries=int(d.get("max_retries", 2)),
            backoff_seconds=float(d.get("backoff_seconds", 0.5)),
        )


class HttpRerankerClient:
    """Chat-completion HTTP client.

    Request: POST {base_url}/chat/completions with
    {"model", "messages", "temperature": 0, "max_tokens"}; the reply's
    choices[0].message.content is the raw verdict text. Transport errors
    and 5xx responses raise RerankerTransportError (retryable); anything
    structurally wrong with a 2xx body raises RerankerError.
    """

    def __init__(self, settings: RerankerSettings, transport: httpx.BaseTransport | None = None):
        if not settings.base_url:
            raise RerankerConfigError("reranker base_url is not configured")
        if not settings.model:
            raise RerankerConfigError("reranker model name is not configured")
        self.settings = settings
        api_key = ""
        if settings.api_key_env:
            api_key = os.environ.get(settings.api_key_env, "")
            if not api_key:
                raise RerankerConfigError(
                    f"environment variable {settings.api_key_env} is not set "
                    "(set it, or configure api_key_env: \"\" for keyless backends)"
                )
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._http = httpx.Client(
            base_url=settings.base_url.rstrip("/"),
            headers=headers,
            timeout=settings.timeout_seconds,
            transport=transport,
        )

    def complete(self, prompt: PromptSpec) -> str:
        body = {
            "model": self.settings.model,
            "messages": [m.to_dict() for m in prompt.rendered],
            "temperature": 0,
            "max_tokens": self.settings.max_output_tokens,
        }
        try:
            response = self._http.post("/chat/completions", json=body)
        except httpx.HTTPError as exc:
            raise RerankerTransportError(str(exc)) from exc
        if response.status_code >= 500:
            raise RerankerTransportError(f"backend returned {response.status_code}")
        if response.status_code != 200:
            raise RerankerError(
                f"backend returned {response.status_code}: {response.text[:200]}"
            )
        try:
            payload = response.json()
            content = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise RerankerError(f"malformed completion response: {exc}") from exc
        if not isinstance(content, str):
            raise RerankerError("completion content is not text")
        return content

    def close(self) -> None:
        self._http.close()


def rerank(
    client: RerankerClient,
    prompt: PromptSpec,
    max_retries: int = 2,
    backoff_seconds: float = 0.5,
    sleep: Callable[[float], None] = time.sleep,
) -> Verdict:
    """Send the prompt and parse the answer, retrying transient failures.

    Exponential backoff between attempts; once retries are exhausted the
    failure is folded into an unparseable verdict so the pipeline can
    gate it to out-of-scope instead of crashing a request.
    """
    delay = backoff_seconds
    last_error: RerankerTransportError | None = None
    for attempt in range(max_retries + 1):
        try:
            raw = client.complete(prompt)
        except RerankerTransportError as exc:
            last_error = exc
            if attempt < max_retries and delay > 0:
                sleep(delay)
                delay *= 2
            continue
        return parse_verdict(raw, prompt)
    return Verdict(
        kind="unparseable",
        intent_id=None,
        raw=f"<transport failure after {max_retries + 1} attempts: {last_error}>",
    )
