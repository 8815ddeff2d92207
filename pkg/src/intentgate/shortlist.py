"""Baseline-style classifier: char n-gram tf-idf vectors, nearest centroid.

Stands in for a production first-stage classifier whose job is to turn a
user query into a short ranked list of candidate intents. Character
n-grams (3 to 5 by default) over normalized text are language-agnostic
and hold up well on short, diacritics-stripped Slovak queries; each
intent is represented by the unit-length mean of its training example
vectors and candidates are scored by cosine similarity.

A fitted model is immutable and safe for concurrent ``rank`` calls.
Fitting is deterministic: the same data and config produce bit-identical
centroids and a byte-identical serialized file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Dataset, IntentRegistry
from .normalize import NormalizeConfig, normalize

MODEL_SCHEMA_VERSION = 1
UNIT_NORM_TOLERANCE = 1e-9


class ShortlistError(ValueError):
    """Raised for fit/rank misuse and model file faults."""


@dataclass(frozen=True)
class ShortlistConfig:
    """N-gram range plus the normalization snapshot applied at both ends."""

    n_min: int = 3
    n_max: int = 5
    normalize: NormalizeConfig = field(default_factory=NormalizeConfig)

    def __post_init__(self) -> None:
        if not 1 <= self.n_min <= self.n_max:
            raise ShortlistError(f"bad n-gram range [{self.n_min}, {self.n_max}]")


@dataclass(frozen=True)
class Candidate:
    intent_id: str
    score: float


@dataclass(frozen=True)
class Shortlist:
    """Ranked candidates for one query; empty iff the text normalized to ''."""

    candidates: tuple[Candidate, ...]
    query_text: str

    def __len__(self) -> int:
        return len(self.candidates)

    def ids(self) -> list[str]:
        return [c.intent_id for c in self.candidates]

    def top_score(self) -> float:
        """Top-1 score, with 0.0 as the marker for an empty shortlist."""
        return self.candidates[0].score if self.candidates else 0.0


def char_ngrams(text: str, n_min: int, n_max: int) -> list[str]:
    """Sliding-window character n-grams over the space-padded text.

    Padding with one leading and one trailing space gives very short
    inputs at least some grams and marks word boundaries.
    """
    padded = f" {text} "
    length = len(padded)
    grams: list[str] = []
    for n in range(n_min, n_max + 1):
        for i in range(length - n + 1):
            grams.append(padded[i : i + n])
    return grams


def _gram_counts(text: str, n_min: int, n_max: int) -> dict[str, int]:
    counts: dict[str, int] = {}
    for gram in char_ngrams(text, n_min, n_max):
        counts[gram] = counts.get(gram, 0) + 1
    return counts


@dataclass(frozen=True)
class ShortlistModel:
    """Fitted vocabulary, idf weights and per-intent unit centroids.

    ``centroids`` has one row per intent, aligned with ``intent_ids``
    (sorted ascending); every row has unit Euclidean norm.
    """

    vocabulary: dict[str, int]
    idf: np.ndarray
    centroids: np.ndarray
    intent_ids: tuple[str, ...]
    config: ShortlistConfig

    def embed(self, text: str) -> tuple[np.ndarray, np.ndarray]:
        """Sparse tf-idf embedding of an already-normalized text.

        Returns (indices, values); values are l2-normalized unless the
        text shares no gram with the vocabulary, in which case they are
        all zero.
        """
        counts = _gram_counts(text, self.config.n_min, self.config.n_max)
        idx = []
        raw = []
        for gram, count in counts.items():
            j = self.vocabulary.get(gram)
            if j is not None:
                idx.append(j)
                raw.append(count)
        if not idx:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
        indices = np.asarray(idx, dtype=np.int64)
        values = np.asarray(raw, dtype=np.float64) * self.idf[indices]
        norm = float(np.linalg.norm(values))
        if norm > 0.0:
            values = values / norm
        return indices, values


def fit(train: Dataset, registry: IntentRegistry, config: ShortlistConfig) -> ShortlistModel:
    """Fit tf-idf statistics and one unit centroid per registry intent.

    idf uses the smoothed form ln((1+N)/(1+df)) + 1 so unseen grams can
    never divide by zero. Raises when an intent has no usable training
    example or when every text normalizes to the empty string.
    """
    known = set(registry.ids())
    docs: list[tuple[str, dict[str, int]]] = []
    for ex in train.examples:
        if ex.intent_id is None:
            raise ShortlistError("training dataset contains an example without an intent")
        if ex.intent_id not in known:
            raise ShortlistError(f"training example references unknown intent {ex.intent_id!r}")
        text = normalize(ex.text, config.normalize)
        if not text:
            continue
        docs.append((ex.intent_id, _gram_counts(text, config.n_min, config.n_max)))

    usable = {intent_id for intent_id, _ in docs}
    missing = sorted(known - usable)
    if missing:
        raise ShortlistError(f"intents with no usable training examples: {', '.join(missing)}")

    df: dict[str, int] = {}
    for _, counts in docs:
        for gram in counts:
            df[gram] = df.get(gram, 0) + 1
    if not df:
        raise ShortlistError("empty vocabulary: every training text normalized to ''")

    vocabulary = {gram: j for j, gram in enumerate(sorted(df))}
    n_docs = len(docs)
    idf = np.empty(len(vocabulary), dtype=np.float64)
    for gram, j in vocabulary.items():
        idf[j] = math.log((1.0 + n_docs) / (1.0 + df[gram])) + 1.0

    intent_ids = tuple(sorted(known))
    row_of = {intent_id: row for row, intent_id in enumerate(intent_ids)}
    sums = np.zeros((len(intent_ids), len(vocabulary)), dtype=np.float64)
    doc_counts = np.zeros(len(intent_ids), dtype=np.float64)
    for intent_id, counts in docs:
        indices = np.asarray([vocabulary[g] for g in counts], dtype=np.int64)
        values = np.asarray([counts[g] for g in counts], dtype=np.float64) * idf[indices]
        values /= np.linalg.norm(values)
        row = row_of[intent_id]
        sums[row, indices] += values
        doc_counts[row] += 1.0

    centroids = sums / doc_counts[:, None]
    norms = np.linalg.norm(centroids, axis=1, keepdims=True)
    centroids = centroids / norms
    if not np.all(np.abs(np.linalg.norm(centroids, axis=1) - 1.0) <= UNIT_NORM_TOLERANCE):
        raise ShortlistError("centroid normalization failed")

    return ShortlistModel(
        vocabulary=vocabulary,
        idf=idf,
        centroids=centroids,
        intent_ids=intent_ids,
        config=config,
    )


def rank(model: ShortlistModel, text: str, k: int) -> Shortlist:
    """Top-k intents by cosine similarity against every centroid.

    Scores are non-increasing; ties break by ascending intent id. An
    input that normalizes to the empty string yields an empty shortlist
    (score marker 0.0), which is a value, not a fault.
    """
    if k < 1:
        raise ShortlistError(f"k must be >= 1, got {k}")
    query = normalize(text, model.config.normalize)
    if not query:
        return Shortlist(candidates=(), query_text="")
    indices, values = model.embed(query)
    if len(indices) == 0:
        scores = np.zeros(len(model.intent_ids), dtype=np.float64)
    else:
        scores = model.centroids[:, indices] @ values
    order = sorted(
        range(len(model.intent_ids)), key=lambda row: (-scores[row], model.intent_ids[row])
    )
    top = order[: min(k, len(order))]
    candidates = tuple(
        Candidate(intent_id=model.intent_ids[row], score=min(max(float(scores[row]), 0.0), 1.0))
        for row in top
    )
    return Shortlist(candidates=candidates, query_text=query)


def top_k_recall(model: ShortlistModel, eval_set: Dataset, k: int) -> float:
    """Fraction of examples whose gold intent appears in the top-k shortlist."""
    if not eval_set.examples:
        raise ShortlistError("cannot compute recall on an empty dataset")
    hits = 0
    for ex in eval_set.examples:
        if ex.intent_id is None:
            raise ShortlistError("recall needs gold intent ids on every example")
        if ex.intent_id in rank(model, ex.text, k).ids():
            hits += 1
    return hits / len(eval_set.examples)


def save_model(model: ShortlistModel, path: str | Path) -> None:
    """Write the model as versioned line-delimited JSON.

    Layout: one header record, one record per vocabulary gram in index
    order, one sparse centroid record per intent in id order. Floats are
    serialized at full round-trip precision, so save/load is exact and
    refitting on identical data yields byte-identical files.
    """
    path = Path(path)
    grams = sorted(model.vocabulary, key=model.vocabulary.__getitem__)
    with path.open("w", encoding="utf-8") as fh:
        header = {
            "v": MODEL_SCHEMA_VERSION,
            "kind": "shortlist_model",
            "n_min": model.config.n_min,
            "n_max": model.config.n_max,
            "normalize": model.config.normalize.to_dict(),
            "intents": list(model.intent_ids),
            "vocab_size": len(grams),
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for gram in grams:
            fh.write(
                json.dumps({"g": gram, "idf": float(model.idf[model.vocabulary[gram]])},
                           ensure_ascii=False)
                + "\n"
            )
        for row, intent_id in enumerate(model.intent_ids):
            nonzero = np.nonzero(model.centroids[row])[0]
            weights = [[int(j), float(model.centroids[row, j])] for j in nonzero]
            fh.write(json.dumps({"c": intent_id, "w": weights}, ensure_ascii=False) + "\n")


def load_model(path: str | Path) -> ShortlistModel:
    """Load a model file; a mismatched schema version fails loudly."""
    path = Path(path)
    if not path.exists():
        raise ShortlistError(f"model file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise ShortlistError(f"{path}: empty model file")
    header = json.loads(lines[0])
    if header.get("v") != MODEL_SCHEMA_VERSION or header.get("kind") != "shortlist_model":
        raise ShortlistError(
            f"{path}: unsupported model schema "
            f"(v={header.get('v')!r}, kind={header.get('kind')!r}); "
            f"expected v={MODEL_SCHEMA_VERSION}, kind='shortlist_model'"
        )
    config = ShortlistConfig(
        n_min=header["n_min"],
        n_max=header["n_max"],
        normalize=NormalizeConfig.from_dict(header["normalize"]),
    )
    intent_ids = tuple(header["intents"])
    vocab_size = header["vocab_size"]
    gram_lines = lines[1 : 1 + vocab_size]
    centroid_lines = lines[1 + vocab_size :]
    if len(gram_lines) != vocab_size or len(centroid_lines) != len(intent_ids):
        raise ShortlistError(f"{path}: truncated model file")
    vocabulary: dict[str, int] = {}
    idf = np.empty(vocab_size, dtype=np.float64)
    for j, line in enumerate(gram_lines):
        record = json.loads(line)
        vocabulary[record["g"]] = j
        idf[j] = record["idf"]
    centroids = np.zeros((len(intent_ids), vocab_size), dtype=np.float64)
    for row, line in enumerate(centroid_lines):
        record = json.loads(line)
        if record["c"] != intent_ids[row]:
            raise ShortlistError(f"{path}: centroid order does not match header intents")
        for j, value in record["w"]:
            centroids[row, j] = value
    return ShortlistModel(
        vocabulary=vocabulary,
        idf=idf,
        centroids=centroids,
        intent_ids=intent_ids,
        config=config,
    )
