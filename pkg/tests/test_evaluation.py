"""Metrics, threshold sweeps and report rendering."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intentgate.corpus import dataset_from_pairs
from intentgate.evaluation import (
    EvaluationError,
    ReportRow,
    evaluate,
    in_scope_accuracy,
    make_report,
    oos_fpr,
    render_report,
    sweep,
)
from intentgate.pipeline import IN_SCOPE, OUT_OF_SCOPE, Decision, PipelineConfig, Trace
from intentgate.shortlist import Shortlist


def make_decision(outcome, intent_id=None, confidence=0.5):
    trace = Trace(
        normalized_text="", shortlist=Shortlist(candidates=(), query_text=""), gate_rule="test"
    )
    return Decision(outcome=outcome, intent_id=intent_id, confidence=confidence, trace=trace)


def accepted(intent_id):
    return make_decision(IN_SCOPE, intent_id)


REJECTED = make_decision(OUT_OF_SCOPE)


class TestInScopeAccuracy:
    def test_231_of_300_is_exactly_0_77(self):
        decisions = [accepted("a")] * 231 + [REJECTED] * 40 + [accepted("wrong")] * 29
        gold = ["a"] * 231 + ["a"] * 40 + ["a"] * 29
        assert in_scope_accuracy(decisions, gold) == 0.77

    def test_all_correct_is_one(self):
        decisions = [accepted("a"), accepted("b")]
        assert in_scope_accuracy(decisions, ["a", "b"]) == 1.0

    def test_rejected_in_scope_sample_counts_as_error(self):
        # The denominator is all samples, not just the accepted ones.
        decisions = [accepted("a"), REJECTED]
        assert in_scope_accuracy(decisions, ["a", "a"]) == 0.5

    def test_accepted_wrong_intent_counts_as_error(self):
        decisions = [accepted("b")]
        assert in_scope_accuracy(decisions, ["a"]) == 0.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(EvaluationError, match="differ in length"):
            in_scope_accuracy([accepted("a")], ["a", "b"])

    def test_empty_set_rejected(self):
        with pytest.raises(EvaluationError, match="empty sample set"):
            in_scope_accuracy([], [])

    @given(st.lists(st.booleans(), min_size=1, max_size=60), st.randoms())
    @settings(max_examples=100, deadline=None)
    def test_permutation_invariance(self, correct_flags, rng):
        pairs = [
            (accepted("g") if flag else REJECTED, "g") for flag in correct_flags
        ]
        baseline = in_scope_accuracy([d for d, _ in pairs], [g for _, g in pairs])
        rng.shuffle(pairs)
        shuffled = in_scope_accuracy([d for d, _ in pairs], [g for _, g in pairs])
        assert shuffled == baseline

    @given(st.lists(st.sampled_from(["correct", "wrong", "rejected"]), min_size=1, max_size=80))
    @settings(max_examples=100, deadline=None)
    def test_matches_brute_force_recount(self, kinds):
        decisions = []
        gold = []
        for kind in kinds:
            gold.append("gold")
            if kind == "correct":
                decisions.append(accepted("gold"))
            elif kind == "wrong":
                decisions.append(accepted("other"))
            else:
                decisions.append(REJECTED)
        expected = kinds.count("correct") / len(kinds)
        assert in_scope_accuracy(decisions, gold) == expected


class TestOosFpr:
    def test_zero_when_everything_rejected(self):
        assert oos_fpr([REJECTED, REJECTED]) == 0.0

    def test_one_when_everything_accepted(self):
        assert oos_fpr([accepted("a"), accepted("b")]) == 1.0

    def test_fraction_counts_any_accepted_intent(self):
        assert oos_fpr([accepted("a"), REJECTED, REJECTED, REJECTED]) == 0.25

    def test_empty_set_rejected(self):
        with pytest.raises(EvaluationError, match="empty OOS set"):
            oos_fpr([])


class TestEvaluate:
    def test_threshold_one_has_zero_fpr(self, toy_model, toy_registry, toy_train):
        oos = dataset_from_pairs("oos", "oos", [("zzz yyy", None), ("qqq www", None)])
        config = PipelineConfig(mode="vector", threshold=1.0)
        accuracy, fpr = evaluate(config, toy_model, None, toy_registry, toy_train, oos)
        assert fpr == 0.0
        assert accuracy == 0.0

    def test_threshold_zero_on_training_texts(self, toy_model, toy_registry, toy_train):
        oos = dataset_from_pairs("oos", "oos", [("aaaa", None)])
        config = PipelineConfig(mode="vector", threshold=0.0)
        accuracy, fpr = evaluate(config, toy_model, None, toy_registry, toy_train, oos)
        assert accuracy == 1.0
        assert fpr == 1.0


class TestSweep:
    def thresholds(self):
        return [round(0.1 * i, 1) for i in range(11)]

    def test_rows_match_direct_evaluation_bit_for_bit(self, toy_model, toy_registry, toy_train):
        oos = dataset_from_pairs("oos", "oos", [("aaaa", None), ("zzzz", None)])
        config = PipelineConfig(mode="vector", threshold=0.4)
        rows = sweep(toy_model, config, toy_train, oos, self.thresholds())
        assert [t for t, _, _ in rows] == self.thresholds()
        for threshold, accuracy, fpr in rows:
            step = PipelineConfig(mode="vector", threshold=threshold)
            direct = evaluate(step, toy_model, None, toy_registry, toy_train, oos)
            assert (accuracy, fpr) == direct

    def test_last_row_at_threshold_one_is_all_zero(self, toy_model, toy_train):
        oos = dataset_from_pairs("oos", "oos", [("aaaa", None)])
        rows = sweep(toy_model, PipelineConfig(), toy_train, oos, self.thresholds())
        assert rows[-1] == (1.0, 0.0, 0.0)

    def test_both_metrics_monotone_non_increasing(self, default_corpus, default_model):
        rows = sweep(
            default_model, PipelineConfig(), default_corpus.test, default_corpus.oos,
            self.thresholds(),
        )
        for (_, prev_acc, prev_fpr), (_, acc, fpr) in zip(rows, rows[1:]):
            assert acc <= prev_acc
            assert fpr <= prev_fpr

    def test_single_threshold_equals_direct_call(self, toy_model, toy_registry, toy_train):
        oos = dataset_from_pairs("oos", "oos", [("aaaa", None)])
        config = PipelineConfig(mode="vector", threshold=0.3)
        [row] = sweep(toy_model, config, toy_train, oos, [0.3])
        assert row[1:] == evaluate(config, toy_model, None, toy_registry, toy_train, oos)

    def test_unsorted_thresholds_rejected(self, toy_model, toy_train):
        oos = dataset_from_pairs("oos", "oos", [("aaaa", None)])
        with pytest.raises(EvaluationError, match="sorted ascending"):
            sweep(toy_model, PipelineConfig(), toy_train, oos, [0.5, 0.1])

    def test_rerank_mode_rejected(self, toy_model, toy_train):
        oos = dataset_from_pairs("oos", "oos", [("aaaa", None)])
        config = PipelineConfig(mode="rerank", threshold=0.4)
        with pytest.raises(EvaluationError, match="vector mode only"):
            sweep(toy_model, config, toy_train, oos, [0.0, 1.0])


TABLE_ROWS = [
    ("Baseline proprietary model", 67.6, 22.5),
    ("SlovakBERT fine-tuned", 77.2, 6.3),
]

EXPECTED_TABLE = (
    "Model Name                  In-scope Accuracy  Out-of-scope FPR\n"
    "---------------------------------------------------------------\n"
    "Baseline proprietary model               67.6              22.5\n"
    "SlovakBERT fine-tuned                    77.2               6.3\n"
)

EXPECTED_DELIMITED = (
    "model,in_scope_accuracy,oos_fpr\n"
    "Baseline proprietary model,67.6,22.5\n"
    "SlovakBERT fine-tuned,77.2,6.3\n"
)


class TestReports:
    def test_text_table_bytes(self):
        report = make_report(TABLE_ROWS)
        assert render_report(report, "text-table") == EXPECTED_TABLE

    def test_delimited_bytes(self):
        report = make_report(TABLE_ROWS)
        assert render_report(report, "delimited") == EXPECTED_DELIMITED

    def test_one_decimal_rounding(self):
        report = make_report([("m", 76.66, 4.04)])
        rendered = render_report(report, "delimited")
        assert rendered == "model,in_scope_accuracy,oos_fpr\nm,76.7,4.0\n"

    def test_empty_rows_render_header_only(self):
        report = make_report([])
        assert render_report(report, "text-table") == (
            "Model Name  In-scope Accuracy  Out-of-scope FPR\n"
            "-----------------------------------------------\n"
        )
        assert render_report(report, "delimited") == "model,in_scope_accuracy,oos_fpr\n"

    def test_rows_render_in_input_order(self):
        report = make_report([("z", 1.0, 1.0), ("a", 2.0, 2.0)])
        lines = render_report(report, "delimited").splitlines()
        assert lines[1].startswith("z,") and lines[2].startswith("a,")

    def test_metadata_has_timestamp_but_renders_without_it(self):
        report = make_report(TABLE_ROWS, config=PipelineConfig(), dataset_sizes={"test": 300})
        assert "timestamp" in report.metadata
        assert report.metadata["dataset_sizes"] == {"test": 300}
        assert "config_hash" in report.metadata
        again = make_report(TABLE_ROWS, config=PipelineConfig(), dataset_sizes={"test": 300})
        for fmt in ("text-table", "delimited"):
            rendered = render_report(report, fmt)
            assert rendered == render_report(again, fmt)
            assert report.metadata["timestamp"] not in rendered

    def test_unknown_format_rejected(self):
        with pytest.raises(EvaluationError, match="unknown report format"):
            render_report(make_report(TABLE_ROWS), "html")

    def test_row_percentages_validated(self):
        with pytest.raises(EvaluationError, match="percentage"):
            ReportRow(model_name="m", in_scope_accuracy=101.0, oos_fpr=0.0)
        with pytest.raises(EvaluationError, match="percentage"):
            ReportRow(model_name="m", in_scope_accuracy=50.0, oos_fpr=-0.1)


def test_randomized_decision_sets_match_brute_force():
    # Smaller cousin of the acceptance recount: synthesized decision sets
    # with a seeded RNG, metrics recomputed by definition.
    rng = random.Random(99)
    for _ in range(200):
        n = rng.randint(1, 50)
        gold = [f"intent_{rng.randint(0, 5)}" for _ in range(n)]
        decisions = []
        for g in gold:
            roll = rng.random()
            if roll < 0.4:
                decisions.append(accepted(g))
            elif roll < 0.7:
                decisions.append(accepted(f"intent_{rng.randint(0, 5)}"))
            else:
                decisions.append(REJECTED)
        expected_acc = sum(
            d.in_scope and d.intent_id == g for d, g in zip(decisions, gold)
        ) / n
        assert in_scope_accuracy(decisions, gold) == expected_acc
        oos_decisions = [
            accepted("x") if rng.random() < 0.3 else REJECTED for _ in range(rng.randint(1, 50))
        ]
        expected_fpr = sum(d.in_scope for d in oos_decisions) / len(oos_decisions)
        assert oos_fpr(oos_decisions) == expected_fpr
