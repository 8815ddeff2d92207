"""Deterministic synthetic corpus generator.

Builds a banking-flavoured intent corpus from slot grammars: each intent
contributes verb and object phrase pools, realized through a small set of
sentence templates with shared politeness fillers. Filler pools are split
into train-only and test-only halves so held-out test utterances never
repeat a training string verbatim; test and out-of-scope utterances pass
through a noise channel (typos, diacritic loss, caps) to mimic real chat
input. Output is fully determined by the spec's seed.

Utterances are surface-plausible Slovak assembled by concatenation; case
agreement is approximate. That is acceptable here: the corpus exercises
classifier behaviour, it is not a linguistic resource.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .corpus import (
    Dataset,
    Intent,
    IntentRegistry,
    UtteranceExample,
    save_dataset,
    save_registry,
)
from .normalize import strip_diacritics

GRAMMAR_SCHEMA_VERSION = 1

# Fraction of each filler pool reserved for training realizations; the
# remainder is held out for test-time realizations.
TRAIN_FILLER_FRACTION = 0.6


class DatagenError(ValueError):
    """Raised when a corpus spec cannot be satisfied."""


class GrammarCapacityError(DatagenError):
    """Raised when an intent grammar cannot yield enough distinct strings."""


@dataclass(frozen=True)
class IntentGrammar:
    id: str
    description: str
    response: str
    verbs: tuple[str, ...]
    objects: tuple[str, ...]
    # Held-out phrasings used only for test realizations: inflected or
    # synonymous forms that share stems with the training verbs at most,
    # never full phrases. Empty means the test set reuses ``verbs``.
    test_verbs: tuple[str, ...] = ()

    def test_pool_verbs(self) -> tuple[str, ...]:
        return self.test_verbs or self.verbs


@dataclass(frozen=True)
class TopicGrammar:
    id: str
    verbs: tuple[str, ...]
    objects: tuple[str, ...]


@dataclass(frozen=True)
class Grammar:
    prefixes: tuple[str, ...]
    suffixes: tuple[str, ...]
    intents: tuple[IntentGrammar, ...]
    oos_topics: tuple[TopicGrammar, ...]


def load_grammar(path: str | Path | None = None) -> Grammar:
    """Load a slot grammar, defaulting to the packaged banking grammar."""
    if path is None:
        text = (
            resources.files("intentgate") / "assets" / "banking_grammar.json"
        ).read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    raw = json.loads(text)
    if raw.get("v") != GRAMMAR_SCHEMA_VERSION:
        raise DatagenError(f"unsupported grammar schema version: {raw.get('v')!r}")
    intents = tuple(
        IntentGrammar(
            id=item["id"],
            description=item["description"],
            response=item["response"],
            verbs=tuple(item["verbs"]),
            objects=tuple(item["objects"]),
            test_verbs=tuple(item.get("test_verbs", ())),
        )
        for item in raw["intents"]
    )
    topics = tuple(
        TopicGrammar(
            id=item["id"],
            verbs=tuple(item["verbs"]),
            objects=tuple(item["objects"]),
        )
        for item in raw["oos_topics"]
    )
    return Grammar(
        prefixes=tuple(raw["fillers"]["prefixes"]),
        suffixes=tuple(raw["fillers"]["suffixes"]),
        intents=intents,
        oos_topics=topics,
    )


@dataclass(frozen=True)
class CorpusSpec:
    """Parameters of one synthetic corpus. The seed fixes every byte."""

    n_intents: int = 50
    seed: int = 7
    simple_range: tuple[int, int] = (10, 20)
    generated_range: tuple[int, int] = (20, 120)
    test_size: int = 300
    oos_size: int = 300
    typo_rate: float = 0.9
    ascii_rate: float = 0.3
    caps_rate: float = 0.05
    overlap_ceiling: float = 0.05
    grammar_path: str | None = None

    def __post_init__(self) -> None:
        if self.n_intents < 1:
            raise DatagenError("n_intents must be at least 1")
        for name, (lo, hi) in (
            ("simple_range", self.simple_range),
            ("generated_range", self.generated_range),
        ):
            if not (1 <= lo <= hi):
                raise DatagenError(f"{name} must satisfy 1 <= lo <= hi, got {lo}..{hi}")
        if self.test_size < 1 or self.oos_size < 0:
            raise DatagenError("test_size must be positive and oos_size non-negative")
        for name, rate in (
            ("typo_rate", self.typo_rate),
            ("ascii_rate", self.ascii_rate),
            ("caps_rate", self.caps_rate),
            ("overlap_ceiling", self.overlap_ceiling),
        ):
            if not 0.0 <= rate <= 1.0:
                raise DatagenError(f"{name} must lie in [0, 1], got {rate}")

    def to_dict(self) -> dict:
        return {
            "n_intents": self.n_intents,
            "seed": self.seed,
            "simple_range": list(self.simple_range),
            "generated_range": list(self.generated_range),
            "test_size": self.test_size,
            "oos_size": self.oos_size,
            "typo_rate": self.typo_rate,
            "ascii_rate": self.ascii_rate,
            "caps_rate": self.caps_rate,
            "overlap_ceiling": self.overlap_ceiling,
            "grammar_path": self.grammar_path,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "CorpusSpec":
        known = {f: raw[f] for f in raw}
        for key in ("simple_range", "generated_range"):
            if key in known:
                known[key] = tuple(known[key])
        return cls(**known)


@dataclass(frozen=True)
class GeneratedCorpus:
    spec: CorpusSpec
    registry: IntentRegistry
    simple: Dataset
    generated: Dataset
    test: Dataset
    oos: Dataset

    def labeled_datasets(self) -> tuple[Dataset, Dataset, Dataset]:
        return (self.simple, self.generated, self.test)


def _split_fillers(
    pool: tuple[str, ...], rng: random.Random
) -> tuple[list[str], list[str]]:
    shuffled = list(pool)
    rng.shuffle(shuffled)
    cut = max(1, min(len(shuffled) - 1, round(len(shuffled) * TRAIN_FILLER_FRACTION)))
    return shuffled[:cut], shuffled[cut:]


def _train_realizations(
    verbs: tuple[str, ...],
    objects: tuple[str, ...],
    prefixes: list[str],
    suffixes: list[str],
) -> list[str]:
    out: list[str] = []
    for v in verbs:
        for o in objects:
            out.append(f"{v} {o}")
            out.append(f"{o} {v}")
            for s in suffixes:
                out.append(f"{v} {o} {s}")
            for p in prefixes:
                out.append(f"{p} {v} {o}")
                for s in suffixes:
                    out.append(f"{p} {v} {o} {s}")
    return out


def _test_realizations(
    verbs: tuple[str, ...],
    objects: tuple[str, ...],
    prefixes: list[str],
    suffixes: list[str],
) -> list[str]:
    # Every test template includes at least one held-out filler, so a test
    # string can never coincide with a fillerless training realization.
    out: list[str] = []
    for v in verbs:
        for o in objects:
            for s in suffixes:
                out.append(f"{v} {o} {s}")
            for p in prefixes:
                out.append(f"{p} {v} {o}")
                out.append(f"{p} {o} {v}")
                for s in suffixes:
                    out.append(f"{p} {v} {o} {s}")
    return out


def _draw_distinct(
    pool: list[str], count: int, rng: random.Random, owner: str
) -> list[str]:
    distinct = list(dict.fromkeys(pool))
    if count > len(distinct):
        raise GrammarCapacityError(
            f"intent {owner!r}: grammar yields {len(distinct)} distinct "
            f"strings, {count} requested"
        )
    rng.shuffle(distinct)
    return distinct[:count]


_TYPO_OPS = ("drop", "swap", "double")


def _typo(text: str, rng: random.Random) -> str:
    positions = [i for i, ch in enumerate(text) if ch.isalpha()]
    if not positions:
        return text
    idx = rng.choice(positions)
    op = rng.choice(_TYPO_OPS)
    if op == "drop" and len(text) > 1:
        return text[:idx] + text[idx + 1 :]
    if op == "swap" and idx + 1 < len(text):
        return text[:idx] + text[idx + 1] + text[idx] + text[idx + 2 :]
    return text[:idx] + text[idx] + text[idx:]


def _apply_noise(text: str, rng: random.Random, spec: CorpusSpec) -> str:
    if rng.random() < spec.typo_rate:
        for _ in range(rng.choice((1, 2, 2, 3))):
            text = _typo(text, rng)
    if rng.random() < spec.ascii_rate:
        text = strip_diacritics(text)
    if rng.random() < spec.caps_rate:
        text = text.upper()
    return text


def generate(spec: CorpusSpec) -> GeneratedCorpus:
    """Build registry plus simple/generated/test/oos splits for the spec."""
    grammar = load_grammar(spec.grammar_path)
    if spec.n_intents > len(grammar.intents):
        raise DatagenError(
            f"grammar defines {len(grammar.intents)} intents, "
            f"{spec.n_intents} requested"
        )
    rng = random.Random(spec.seed)

    train_prefixes, test_prefixes = _split_fillers(grammar.prefixes, rng)
    train_suffixes, test_suffixes = _split_fillers(grammar.suffixes, rng)

    chosen = sorted(grammar.intents[: spec.n_intents], key=lambda ig: ig.id)
    registry = IntentRegistry(
        intents=tuple(
            Intent(id=ig.id, description=ig.description, response=ig.response)
            for ig in chosen
        )
    )

    simple_examples: list[UtteranceExample] = []
    generated_examples: list[UtteranceExample] = []
    for ig in chosen:
        pool = _train_realizations(ig.verbs, ig.objects, train_prefixes, train_suffixes)
        n_simple = rng.randint(*spec.simple_range)
        for text in _draw_distinct(pool, n_simple, rng, ig.id):
            simple_examples.append(UtteranceExample(text=text, intent_id=ig.id))
        n_generated = rng.randint(*spec.generated_range)
        for text in _draw_distinct(pool, n_generated, rng, ig.id):
            generated_examples.append(UtteranceExample(text=text, intent_id=ig.id))

    # Round-robin over intents so test counts differ by at most one.
    test_examples: list[UtteranceExample] = []
    per_intent_test: dict[str, list[str]] = {}
    for ig in chosen:
        pool = _test_realizations(
            ig.test_pool_verbs(), ig.objects, test_prefixes, test_suffixes
        )
        quota = spec.test_size // len(chosen) + (1 if spec.test_size % len(chosen) else 0)
        per_intent_test[ig.id] = _draw_distinct(pool, min(quota, len(pool)), rng, ig.id)
    cursor = 0
    while len(test_examples) < spec.test_size:
        progressed = False
        for ig in chosen:
            if len(test_examples) >= spec.test_size:
                break
            bucket = per_intent_test[ig.id]
            if cursor < len(bucket):
                noisy = _apply_noise(bucket[cursor], rng, spec)
                test_examples.append(UtteranceExample(text=noisy, intent_id=ig.id))
                progressed = True
        if not progressed:
            raise GrammarCapacityError(
                f"test split exhausted grammar capacity at {len(test_examples)} "
                f"of {spec.test_size} examples"
            )
        cursor += 1
    rng.shuffle(test_examples)

    oos_examples: list[UtteranceExample] = []
    all_prefixes = train_prefixes + test_prefixes
    all_suffixes = train_suffixes + test_suffixes
    topic_quota = spec.oos_size // len(grammar.oos_topics) + 1
    topic_pools: list[list[str]] = []
    for tg in grammar.oos_topics:
        pool = _test_realizations(tg.verbs, tg.objects, all_prefixes, all_suffixes)
        distinct = len(dict.fromkeys(pool))
        topic_pools.append(_draw_distinct(pool, min(topic_quota, distinct), rng, tg.id))
    cursor = 0
    while len(oos_examples) < spec.oos_size:
        progressed = False
        for bucket in topic_pools:
            if len(oos_examples) >= spec.oos_size:
                break
            if cursor < len(bucket):
                noisy = _apply_noise(bucket[cursor], rng, spec)
                oos_examples.append(UtteranceExample(text=noisy, intent_id=None))
                progressed = True
        if not progressed:
            raise GrammarCapacityError(
                f"oos split exhausted grammar capacity at {len(oos_examples)} "
                f"of {spec.oos_size} examples"
            )
        cursor += 1
    rng.shuffle(oos_examples)

    corpus = GeneratedCorpus(
        spec=spec,
        registry=registry,
        simple=Dataset(name="simple", kind="simple", examples=tuple(simple_examples)),
        generated=Dataset(
            name="generated", kind="generated", examples=tuple(generated_examples)
        ),
        test=Dataset(name="test", kind="test", examples=tuple(test_examples)),
        oos=Dataset(name="oos", kind="oos", examples=tuple(oos_examples)),
    )
    overlap = train_test_overlap(corpus)
    if overlap > spec.overlap_ceiling:
        raise DatagenError(
            f"train/test overlap {overlap:.3f} exceeds ceiling {spec.overlap_ceiling}"
        )
    return corpus


def train_test_overlap(corpus: GeneratedCorpus) -> float:
    """Fraction of test strings that appear verbatim in a training split."""
    train = set(corpus.simple.texts()) | set(corpus.generated.texts())
    hits = sum(1 for text in corpus.test.texts() if text in train)
    return hits / len(corpus.test.examples)


def write_corpus(corpus: GeneratedCorpus, out_dir: str | Path) -> dict[str, Path]:
    """Write registry and all four splits as JSONL files under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"registry": out / "registry.jsonl"}
    save_registry(corpus.registry, paths["registry"])
    for split in ("simple", "generated", "test", "oos"):
        paths[split] = out / f"{split}.jsonl"
        save_dataset(getattr(corpus, split), paths[split])
    return paths


def describe(corpus: GeneratedCorpus) -> str:
    """Human-readable per-split summary used by the gen-data CLI verb."""
    lines = [
        f"intents: {len(corpus.registry)}",
        f"seed: {corpus.spec.seed}",
    ]
    for split in ("simple", "generated", "test", "oos"):
        dataset: Dataset = getattr(corpus, split)
        counts = dataset.per_intent_counts()
        if counts:
            spread = f"per-intent {min(counts.values())}..{max(counts.values())}"
        else:
            spread = "unlabeled"
        lines.append(f"{split}: {len(dataset.examples)} examples ({spread})")
    lines.append(f"train/test overlap: {train_test_overlap(corpus):.3f}")
    return "\n".join(lines) + "\n"
