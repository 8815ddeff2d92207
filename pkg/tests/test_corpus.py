"""Registry and dataset loading, validation, label maps, file round-trips."""

from __future__ import annotations

import json

import pytest

from intentgate.corpus import (
    CorpusError,
    Dataset,
    Intent,
    IntentRegistry,
    UtteranceExample,
    Violation,
    dataset_from_pairs,
    label_map,
    load_dataset,
    load_registry,
    save_dataset,
    save_registry,
    validate_dataset,
)


def intent(intent_id: str) -> Intent:
    return Intent(id=intent_id, description=f"about {intent_id}", response=f"re {intent_id}")


def write_lines(path, records):
    path.write_text("\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n",
                    encoding="utf-8")


def registry_records(*ids):
    header = {"v": 1, "kind": "registry"}
    rows = [
        {"id": i, "description": f"about {i}", "response": f"re {i}", "examples": []}
        for i in ids
    ]
    return [header] + rows


class TestRegistry:
    def test_load_sorts_by_id(self, tmp_path):
        path = tmp_path / "registry.jsonl"
        write_lines(path, registry_records("card_block", "account_open", "pin_change"))
        registry = load_registry(path)
        assert registry.ids() == ["account_open", "card_block", "pin_change"]
        assert len(registry) == 3

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "registry.jsonl"
        write_lines(path, registry_records("card_block", "card_block"))
        with pytest.raises(CorpusError, match="duplicate intent id 'card_block'"):
            load_registry(path)

    def test_reserved_invalid_literal_rejected(self):
        with pytest.raises(CorpusError, match="reserved invalid literal"):
            IntentRegistry(intents=(intent("invalid"),))

    def test_custom_invalid_literal_shifts_the_collision(self):
        # "invalid" is fine as an id once the reserved literal is different.
        registry = IntentRegistry(intents=(intent("invalid"),), invalid_literal="none")
        assert "invalid" in registry
        with pytest.raises(CorpusError, match="reserved invalid literal"):
            IntentRegistry(intents=(intent("none"),), invalid_literal="none")

    def test_empty_fields_rejected(self):
        with pytest.raises(CorpusError, match="must be non-empty"):
            IntentRegistry(intents=(Intent(id="a", description="", response="r"),))

    def test_missing_file_names_the_path(self, tmp_path):
        missing = tmp_path / "nope.jsonl"
        with pytest.raises(CorpusError, match="registry file not found"):
            load_registry(missing)

    def test_bad_header_version_rejected(self, tmp_path):
        path = tmp_path / "registry.jsonl"
        write_lines(path, [{"v": 99, "kind": "registry"}])
        with pytest.raises(CorpusError, match="schema version"):
            load_registry(path)

    def test_wrong_kind_rejected(self, tmp_path):
        path = tmp_path / "registry.jsonl"
        write_lines(path, [{"v": 1, "kind": "test", "name": "test"}])
        with pytest.raises(CorpusError, match="expected kind 'registry'"):
            load_registry(path)

    def test_lookup_and_membership(self):
        registry = IntentRegistry(intents=(intent("a"), intent("b")))
        assert registry.get("a").response == "re a"
        assert "b" in registry and "c" not in registry
        with pytest.raises(KeyError):
            registry.get("c")

    def test_embedded_examples_become_a_simple_dataset(self):
        registry = IntentRegistry(
            intents=(
                Intent(id="a", description="d", response="r", examples=("x", "y")),
                Intent(id="b", description="d", response="r", examples=("z",)),
            )
        )
        dataset = registry.embedded_examples()
        assert dataset.kind == "simple"
        assert [(ex.text, ex.intent_id) for ex in dataset.examples] == [
            ("x", "a"), ("y", "a"), ("z", "b"),
        ]

    def test_save_load_round_trip(self, tmp_path):
        registry = IntentRegistry(
            intents=(
                Intent(id="a", description="popis á", response="odpoveď á", examples=("jeden",)),
                Intent(id="b", description="popis b", response="odpoveď b"),
            )
        )
        path = tmp_path / "registry.jsonl"
        save_registry(registry, path)
        assert load_registry(path) == registry


class TestDataset:
    def test_load_test_split(self, tmp_path):
        path = tmp_path / "test.jsonl"
        write_lines(path, [
            {"v": 1, "kind": "test", "name": "test"},
            {"text": "ako si zmenim pin", "intent": "pin_change"},
        ])
        dataset = load_dataset(path)
        assert dataset.kind == "test"
        assert dataset.examples[0] == UtteranceExample("ako si zmenim pin", "pin_change")

    def test_oos_record_with_intent_rejected(self, tmp_path):
        path = tmp_path / "oos.jsonl"
        write_lines(path, [
            {"v": 1, "kind": "oos", "name": "oos"},
            {"text": "objednajte mi pizzu", "intent": "card_block"},
        ])
        with pytest.raises(CorpusError, match="must not carry an intent"):
            load_dataset(path)

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_lines(path, [{"v": 1, "kind": "validation"}, {"text": "x"}])
        with pytest.raises(CorpusError, match="unknown dataset kind"):
            load_dataset(path)

    def test_missing_file_names_the_path(self, tmp_path):
        with pytest.raises(CorpusError, match="dataset file not found"):
            load_dataset(tmp_path / "gone.jsonl")

    def test_invalid_json_line_reports_location(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"v": 1, "kind": "test", "name": "t"}\n{broken\n', encoding="utf-8")
        with pytest.raises(CorpusError, match=":2: invalid JSON"):
            load_dataset(path)

    def test_save_load_round_trip(self, tmp_path):
        dataset = dataset_from_pairs("test", "test", [("zrušiť kartu", "card_block")])
        oos = dataset_from_pairs("oos", "oos", [("aké bude počasie", None)])
        d_path, o_path = tmp_path / "d.jsonl", tmp_path / "o.jsonl"
        save_dataset(dataset, d_path)
        save_dataset(oos, o_path)
        assert load_dataset(d_path) == dataset
        assert load_dataset(o_path) == oos

    def test_oos_file_has_no_intent_field(self, tmp_path):
        oos = dataset_from_pairs("oos", "oos", [("pizza", None)])
        path = tmp_path / "o.jsonl"
        save_dataset(oos, path)
        record = json.loads(path.read_text(encoding="utf-8").splitlines()[1])
        assert record == {"text": "pizza"}


class TestValidateDataset:
    def make_registry(self):
        return IntentRegistry(intents=(intent("a"), intent("b")))

    def test_simple_count_in_range_passes(self):
        dataset = dataset_from_pairs(
            "simple", "simple",
            [(f"text a {i}", "a") for i in range(15)] + [(f"text b {i}", "b") for i in range(10)],
        )
        assert validate_dataset(dataset, self.make_registry()) == []

    def test_simple_count_below_range_reported(self):
        dataset = dataset_from_pairs(
            "simple", "simple",
            [(f"text a {i}", "a") for i in range(7)] + [(f"text b {i}", "b") for i in range(10)],
        )
        violations = validate_dataset(dataset, self.make_registry())
        assert violations == [
            Violation(rule="simple-count-range", intent_id="a", observed=7,
                      detail="expected [10, 20]")
        ]

    def test_dangling_reference_reported(self):
        dataset = dataset_from_pairs("test", "test", [("x", "ghost")])
        violations = validate_dataset(dataset, self.make_registry())
        assert violations == [Violation(rule="dangling-reference", intent_id="ghost")]

    def test_oos_with_intent_reported(self):
        dataset = Dataset(
            name="oos", kind="oos",
            examples=(UtteranceExample(text="x", intent_id="a"),),
        )
        violations = validate_dataset(dataset, self.make_registry())
        assert [v.rule for v in violations] == ["oos-example-with-intent"]

    def test_labeled_kind_missing_intent_reported(self):
        dataset = Dataset(
            name="test", kind="test", examples=(UtteranceExample(text="x", intent_id=None),)
        )
        violations = validate_dataset(dataset, self.make_registry())
        assert [v.rule for v in violations] == ["missing-intent"]

    def test_matches_brute_force_recount(self, default_corpus):
        # Independent recount of the count-range rule over the generated split.
        dataset = default_corpus.generated
        registry = default_corpus.registry
        counts = {}
        for ex in dataset.examples:
            counts[ex.intent_id] = counts.get(ex.intent_id, 0) + 1
        expected = sorted(
            intent_id for intent_id, n in counts.items() if not 20 <= n <= 500
        )
        violations = validate_dataset(dataset, registry)
        observed = sorted(v.intent_id for v in violations if v.rule == "generated-count-range")
        assert observed == expected == []


class TestLabelMap:
    def test_sorted_assignment(self):
        registry = IntentRegistry(intents=(intent("b"), intent("a"), intent("c")))
        mapping = label_map(registry)
        assert mapping.id_to_label == {"a": 0, "b": 1, "c": 2}

    def test_single_intent(self):
        mapping = label_map(IntentRegistry(intents=(intent("only"),)))
        assert mapping.label("only") == 0
        assert mapping.intent_id(0) == "only"

    def test_round_trip_on_default_registry(self, default_corpus):
        mapping = label_map(default_corpus.registry)
        assert len(mapping) == 50
        for intent_id in default_corpus.registry.ids():
            assert mapping.intent_id(mapping.label(intent_id)) == intent_id
        assert sorted(mapping.label_to_id) == list(range(50))

    def test_empty_registry_rejected(self):
        with pytest.raises(CorpusError, match="empty registry"):
            label_map(IntentRegistry(intents=()))
