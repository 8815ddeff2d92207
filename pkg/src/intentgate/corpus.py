"""Intents, utterance examples, datasets and label maps.

The corpus file format is line-delimited JSON (UTF-8). Every file starts
with a header record carrying the schema version and the file kind:

    {"v": 1, "kind": "registry"}
    {"id": "card_block", "description": "...", "response": "...", "examples": ["..."]}

    {"v": 1, "kind": "test", "name": "test"}
    {"text": "ako si zmenim pin", "intent": "pin_change"}

Dataset kinds are "simple", "generated", "test" and "oos"; records in an
"oos" file carry no intent field. Exact field names are part of the
public contract and documented in the README.

Registries and datasets are immutable after load and safe to share across
concurrent readers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

SCHEMA_VERSION = 1
DEFAULT_INVALID_LITERAL = "invalid"

DATASET_KINDS = ("simple", "generated", "test", "oos")

# Per-intent example count ranges the two training-set kinds are expected
# to respect. Violations are reported, not fatal, unless strict mode asks
# for ingestion to fail.
COUNT_RANGES = {"simple": (10, 20), "generated": (20, 500)}


class CorpusError(ValueError):
    """Raised for malformed corpus files and registry integrity faults."""


@dataclass(frozen=True)
class Intent:
    """One intent: a stable id, a prompt description, a canned response.

    ``examples`` holds the training utterances embedded in the registry
    file, if any; datasets are the usual source of training text.
    """

    id: str
    description: str
    response: str
    examples: tuple[str, ...] = ()


@dataclass(frozen=True)
class UtteranceExample:
    """One (text, intent) pair. Out-of-scope examples have intent_id None."""

    text: str
    intent_id: str | None = None


@dataclass(frozen=True)
class Dataset:
    name: str
    kind: str
    examples: tuple[UtteranceExample, ...]

    def __post_init__(self) -> None:
        if self.kind not in DATASET_KINDS:
            raise CorpusError(f"unknown dataset kind {self.kind!r}")

    def texts(self) -> list[str]:
        return [ex.text for ex in self.examples]

    def per_intent_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for ex in self.examples:
            if ex.intent_id is not None:
                counts[ex.intent_id] = counts.get(ex.intent_id, 0) + 1
        return counts


@dataclass(frozen=True)
class IntentRegistry:
    """The full intent set, ordered by id. Lookup by id via ``get``."""

    intents: tuple[Intent, ...]
    invalid_literal: str = DEFAULT_INVALID_LITERAL

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for intent in self.intents:
            if not intent.id or not intent.description or not intent.response:
                raise CorpusError(
                    f"intent {intent.id!r}: id, description and response must be non-empty"
                )
            if intent.id in seen:
                raise CorpusError(f"duplicate intent id {intent.id!r}")
            if intent.id == self.invalid_literal:
                raise CorpusError(
                    f"intent id {intent.id!r} collides with the reserved invalid literal"
                )
            seen.add(intent.id)
        ordered = tuple(sorted(self.intents, key=lambda it: it.id))
        object.__setattr__(self, "intents", ordered)

    def __len__(self) -> int:
        return len(self.intents)

    def __iter__(self) -> Iterator[Intent]:
        return iter(self.intents)

    def ids(self) -> list[str]:
        return [intent.id for intent in self.intents]

    def get(self, intent_id: str) -> Intent:
        for intent in self.intents:
            if intent.id == intent_id:
                return intent
        raise KeyError(intent_id)

    def __contains__(self, intent_id: str) -> bool:
        return any(intent.id == intent_id for intent in self.intents)

    def embedded_examples(self) -> Dataset:
        """Training utterances carried inside the registry file, as a dataset."""
        examples = tuple(
            UtteranceExample(text=text, intent_id=intent.id)
            for intent in self.intents
            for text in intent.examples
        )
        return Dataset(name="registry-embedded", kind="simple", examples=examples)


@dataclass(frozen=True)
class Violation:
    """One validation finding: which rule, where, what was observed."""

    rule: str
    intent_id: str | None
    observed: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        parts = [self.rule]
        if self.intent_id is not None:
            parts.append(f"intent={self.intent_id}")
        if self.observed is not None:
            parts.append(f"observed={self.observed}")
        if self.detail:
            parts.append(self.detail)
        return " ".join(parts)


@dataclass(frozen=True)
class LabelMap:
    """Bijection between intent ids and contiguous integer labels.

    Labels are assigned in sorted-id order starting at 0, so the mapping
    is a pure function of the registry's id set.
    """

    id_to_label: dict[str, int] = field(default_factory=dict)
    label_to_id: dict[int, str] = field(default_factory=dict)

    def label(self, intent_id: str) -> int:
        return self.id_to_label[intent_id]

    def intent_id(self, label: int) -> str:
        return self.label_to_id[label]

    def __len__(self) -> int:
        return len(self.id_to_label)


def _read_records(path: Path) -> list[dict]:
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON record: {exc}") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"{path}:{lineno}: record must be a JSON object")
            records.append(record)
    if not records:
        raise CorpusError(f"{path}: empty corpus file")
    return records


def _check_header(path: Path, header: dict, expected_kind: str | None = None) -> dict:
    version = header.get("v")
    if version != SCHEMA_VERSION:
        raise CorpusError(
            f"{path}:1: header must carry schema version \"v\": {SCHEMA_VERSION}, got {version!r}"
        )
    kind = header.get("kind")
    if expected_kind is not None and kind != expected_kind:
        raise CorpusError(f"{path}:1: expected kind {expected_kind!r}, got {kind!r}")
    return header


def load_registry(
    path: str | Path, invalid_literal: str = DEFAULT_INVALID_LITERAL
) -> IntentRegistry:
    """Load and validate a registry file; intents come back sorted by id.

    Deterministic: the same file bytes always produce the same registry.
    Raises :class:`CorpusError` with the file location for parse errors,
    duplicate ids, empty fields and reserved-literal collisions.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"registry file not found: {path}")
    records = _read_records(path)
    _check_header(path, records[0], expected_kind="registry")
    intents = []
    for offset, record in enumerate(records[1:], start=2):
        for key in ("id", "description", "response"):
            if not record.get(key):
                raise CorpusError(f"{path}:{offset}: missing or empty field {key!r}")
        examples = record.get("examples", [])
        if not isinstance(examples, list) or not all(isinstance(e, str) for e in examples):
            raise CorpusError(f"{path}:{offset}: \"examples\" must be a list of strings")
        intents.append(
            Intent(
                id=record["id"],
                description=record["description"],
                response=record["response"],
                examples=tuple(examples),
            )
        )
    try:
        return IntentRegistry(intents=tuple(intents), invalid_literal=invalid_literal)
    except CorpusError as exc:
        raise CorpusError(f"{path}: {exc}") from exc


def load_dataset(path: str | Path) -> Dataset:
    """Load a dataset file; the header names the split and its kind."""
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"dataset file not found: {path}")
    records = _read_records(path)
    header = _check_header(path, records[0])
    kind = header.get("kind")
    if kind not in DATASET_KINDS:
        raise CorpusError(f"{path}:1: unknown dataset kind {kind!r}")
    name = header.get("name") or kind
    examples = []
    for offset, record in enumerate(records[1:], start=2):
        text = record.get("text")
        if not text or not isinstance(text, str):
            raise CorpusError(f"{path}:{offset}: missing or empty field 'text'")
        intent_id = record.get("intent")
        if kind == "oos":
            if intent_id is not None:
                raise CorpusError(f"{path}:{offset}: oos records must not carry an intent")
        examples.append(UtteranceExample(text=text, intent_id=intent_id))
    return Dataset(name=name, kind=kind, examples=tuple(examples))


def save_registry(registry: IntentRegistry, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"v": SCHEMA_VERSION, "kind": "registry"}, ensure_ascii=False))
        fh.write("\n")
        for intent in registry.intents:
            record = {
                "id": intent.id,
                "description": intent.description,
                "response": intent.response,
                "examples": list(intent.examples),
            }
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        header = {"v": SCHEMA_VERSION, "kind": dataset.kind, "name": dataset.name}
        fh.write(json.dumps(header, ensure_ascii=False))
        fh.write("\n")
        for ex in dataset.examples:
            record: dict[str, str] = {"text": ex.text}
            if ex.intent_id is not None:
                record["intent"] = ex.intent_id
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def validate_dataset(dataset: Dataset, registry: IntentRegistry) -> list[Violation]:
    """Check a dataset against its kind's invariants.

    Returns an empty list iff everything holds; violations are data, not
    faults. Checked: dangling intent references, per-intent count ranges
    for simple/generated kinds, intent presence on labeled kinds, intent
    absence on oos.
    """
    violations: list[Violation] = []
    known = set(registry.ids())
    for ex in dataset.examples:
        if dataset.kind == "oos":
            if ex.intent_id is not None:
                violations.append(
                    Violation(rule="oos-example-with-intent", intent_id=ex.intent_id)
                )
        elif ex.intent_id is None:
            violations.append(
                Violation(rule="missing-intent", intent_id=None, detail=f"text={ex.text!r}")
            )
        elif ex.intent_id not in known:
            violations.append(Violation(rule="dangling-reference", intent_id=ex.intent_id))
    if dataset.kind in COUNT_RANGES:
        lo, hi = COUNT_RANGES[dataset.kind]
        counts = dataset.per_intent_counts()
        for intent_id in sorted(counts):
            n = counts[intent_id]
            if not lo <= n <= hi:
                violations.append(
                    Violation(
                        rule=f"{dataset.kind}-count-range",
                        intent_id=intent_id,
                        observed=n,
                        detail=f"expected [{lo}, {hi}]",
                    )
                )
    return violations


def label_map(registry: IntentRegistry) -> LabelMap:
    """Map sorted intent ids to labels 0..N-1; id -> label -> id round-trips."""
    if len(registry) == 0:
        raise CorpusError("cannot build a label map from an empty registry")
    ids = sorted(registry.ids())
    id_to_label = {intent_id: label for label, intent_id in enumerate(ids)}
    label_to_id = {label: intent_id for intent_id, label in id_to_label.items()}
    return LabelMap(id_to_label=id_to_label, label_to_id=label_to_id)


def dataset_from_pairs(
    name: str, kind: str, pairs: Iterable[tuple[str, str | None]]
) -> Dataset:
    """Convenience constructor from (text, intent_id) tuples."""
    return Dataset(
        name=name,
        kind=kind,
        examples=tuple(UtteranceExample(text=t, intent_id=i) for t, i in pairs),
    )
