"""Shared fixtures: a hand-computable toy corpus and the default synthetic one.

The toy corpus uses disjoint character sets per intent so every tf-idf
quantity can be recomputed by hand; the default corpus is the seeded
50-intent set the experiment scripts use. Both are session-scoped because
they are immutable and fitting the big model takes a couple of seconds.
"""

from __future__ import annotations

import pytest

from intentgate.corpus import Intent, IntentRegistry, dataset_from_pairs
from intentgate.datagen import CorpusSpec, GeneratedCorpus, generate
from intentgate.shortlist import ShortlistConfig, ShortlistModel, fit


@pytest.fixture(scope="session")
def toy_registry() -> IntentRegistry:
    return IntentRegistry(
        intents=(
            Intent(id="aa", description="all about a", response="answer a"),
            Intent(id="bb", description="all about b", response="answer b"),
        )
    )


@pytest.fixture(scope="session")
def toy_train():
    # Disjoint character sets: queries about one intent share no gram with
    # the other intent's centroid, so its cosine score is exactly 0.0.
    return dataset_from_pairs(
        "toy-train",
        "simple",
        [
            ("aaaa", "aa"),
            ("aaab", "aa"),
            ("pppp", "bb"),
            ("pppq", "bb"),
        ],
    )


@pytest.fixture(scope="session")
def toy_model(toy_train, toy_registry) -> ShortlistModel:
    return fit(toy_train, toy_registry, ShortlistConfig(n_min=3, n_max=3))


@pytest.fixture(scope="session")
def default_corpus() -> GeneratedCorpus:
    return generate(CorpusSpec())


@pytest.fixture(scope="session")
def default_model(default_corpus) -> ShortlistModel:
    return fit(default_corpus.generated, default_corpus.registry, ShortlistConfig())
