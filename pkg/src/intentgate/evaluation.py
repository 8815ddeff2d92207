"""Evaluation: in-scope accuracy, out-of-scope false positive rate, sweeps.

In-scope accuracy counts a sample as correct only when the pipeline both
picks the gold intent and accepts it; an in-scope sample rejected by the
gate counts as an error (the denominator is all samples). The OOS false
positive rate is the fraction of out-of-scope utterances the system
wrongly accepts as some intent, any intent, over the OOS set size.

Reports render to a fixed-width text table or comma-delimited text with
one decimal place, byte-deterministically: metadata (sizes, config hash)
is deterministic too, but the timestamp is kept out of the rendered
formats on purpose so repeated runs produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

from .corpus import Dataset, IntentRegistry
from .pipeline import Decision, PipelineConfig, classify
from .shortlist import ShortlistModel

REPORT_FORMATS = ("text-table", "delimited")


class EvaluationError(ValueError):
    """Raised for metric misuse (length mismatch, empty sets, bad format)."""


@dataclass(frozen=True)
class ReportRow:
    model_name: str
    in_scope_accuracy: float  # percent, [0, 100]
    oos_fpr: float  # percent, [0, 100]

    def __post_init__(self) -> None:
        for label, value in (
            ("in_scope_accuracy", self.in_scope_accuracy),
            ("oos_fpr", self.oos_fpr),
        ):
            if not 0.0 <= value <= 100.0:
                raise EvaluationError(f"{label} must be a percentage in [0, 100], got {value}")


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[ReportRow, ...]
    metadata: dict = field(default_factory=dict)


def in_scope_accuracy(decisions: list[Decision], gold: list[str]) -> float:
    """Fraction of samples decided in-scope with the gold intent."""
    if len(decisions) != len(gold):
        raise EvaluationError(
            f"decisions and gold labels differ in length ({len(decisions)} vs {len(gold)})"
        )
    if not decisions:
        raise EvaluationError("cannot score an empty sample set")
    correct = sum(
        1 for d, g in zip(decisions, gold) if d.in_scope and d.intent_id == g
    )
    return correct / len(decisions)


def oos_fpr(decisions: list[Decision]) -> float:
    """Fraction of OOS decisions wrongly accepted as some intent."""
    if not decisions:
        raise EvaluationError("cannot score an empty OOS set")
    accepted = sum(1 for d in decisions if d.in_scope)
    return accepted / len(decisions)


def evaluate(
    config: PipelineConfig,
    model: ShortlistModel,
    client,
    registry: IntentRegistry,
    labeled: Dataset,
    oos: Dataset,
) -> tuple[float, float]:
    """Run the pipeline over both sets and return (accuracy, fpr) fractions."""
    decisions = [classify(config, model, client, registry, ex.text) for ex in labeled.examples]
    gold = [ex.intent_id or "" for ex in labeled.examples]
    oos_decisions = [classify(config, model, client, registry, ex.text) for ex in oos.examples]
    return in_scope_accuracy(decisions, gold), oos_fpr(oos_decisions)


def sweep(
    model: ShortlistModel,
    config: PipelineConfig,
    labeled: Dataset,
    oos: Dataset,
    thresholds: list[float],
) -> list[tuple[float, float, float]]:
    """(threshold, accuracy, fpr) rows for an ascending threshold sweep.

    Each row is computed by a direct metric invocation at that threshold,
    so rows are interchangeable with standalone calls. With the strict
    gate both metrics are monotone non-increasing in the threshold; that
    is asserted, not assumed.
    """
    if sorted(thresholds) != list(thresholds):
        raise EvaluationError("thresholds must be sorted ascending")
    if config.mode != "vector":
        raise EvaluationError("threshold sweeps apply to vector mode only")
    rows: list[tuple[float, float, float]] = []
    for threshold in thresholds:
        step = PipelineConfig(
            mode=config.mode,
            threshold=threshold,
            k=config.k,
            normalize=config.normalize,
            template_id=config.template_id,
        )
        accuracy, fpr = evaluate(step, model, None, None, labeled, oos)
        rows.append((threshold, accuracy, fpr))
    for (_, prev_acc, prev_fpr), (t, acc, fpr) in zip(rows, rows[1:]):
        if acc > prev_acc or fpr > prev_fpr:
            raise EvaluationError(
                f"monotonicity violated at threshold {t}: "
                f"accuracy {prev_acc} -> {acc}, fpr {prev_fpr} -> {fpr}"
            )
    return rows


def config_hash(config: PipelineConfig) -> str:
    canonical = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def make_report(
    rows: list[tuple[str, float, float]],
    config: PipelineConfig | None = None,
    dataset_sizes: dict[str, int] | None = None,
) -> EvalReport:
    """Build a report from (model_name, accuracy%, fpr%) rows."""
    metadata: dict = {"dataset_sizes": dataset_sizes or {}}
    if config is not None:
        metadata["config_hash"] = config_hash(config)
    metadata["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return EvalReport(
        rows=tuple(ReportRow(name, acc, fpr) for name, acc, fpr in rows),
        metadata=metadata,
    )


def render_report(report: EvalReport, format: str = "text-table") -> str:
    """Render rows in input order, one decimal place, deterministic bytes."""
    if format not in REPORT_FORMATS:
        raise EvaluationError(f"unknown report format {format!r}; expected {REPORT_FORMATS}")
    if format == "delimited":
        lines = ["model,in_scope_accuracy,oos_fpr"]
        for row in report.rows:
            lines.append(f"{row.model_name},{row.in_scope_accuracy:.1f},{row.oos_fpr:.1f}")
        return "\n".join(lines) + "\n"
    name_width = max([len("Model Name")] + [len(row.model_name) for row in report.rows])
    header = f"{'Model Name':<{name_width}}  {'In-scope Accuracy':>17}  {'Out-of-scope FPR':>16}"
    lines = [header, "-" * len(header)]
    for row in report.rows:
        lines.append(
            f"{row.model_name:<{name_width}}  "
            f"{row.in_scope_accuracy:>17.1f}  "
            f"{row.oos_fpr:>16.1f}"
        )
    return "\n".join(lines) + "\n"
