"""Turn model-output rankings into scores and correlate metrics with humans.

A ranking lists model ids best-first; with ``m`` models the top rank is
worth ``m`` points and the bottom rank 1 point, so each case hands out the
score multiset ``{1..m}``.  Agreement between an automatic metric and the
human scores is measured with Kendall's tau-b (tie-corrected), computed
over pooled ``(case, model)`` points and optionally per language, since
metric scores can tie even when human rankings cannot.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from scipy import stats as _scipy_stats

from .errors import DataFormatError
from .pipeline import read_jsonl

RANKING_MODES = ("human", "judge_model", "metric")


@dataclass(frozen=True)
class RankingRecord:
    """One annotator's ordering of model ids for one case, best first."""

    case_id: str
    annotator: str
    ordering: tuple[str, ...]
    mode: str = "human"
    ties: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.mode not in RANKING_MODES:
            raise DataFormatError(f"unknown ranking mode {self.mode!r}")
        if len(set(self.ordering)) != len(self.ordering):
            raise DataFormatError(
                f"case {self.case_id}: ordering contains duplicates: {self.ordering}")

    def to_json(self) -> dict:
        out = {"case_id": self.case_id, "annotator": self.annotator,
               "mode": self.mode, "ordering": list(self.ordering)}
        if self.ties:
            out["ties"] = [list(group) for group in self.ties]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "RankingRecord":
        try:
            return cls(case_id=str(obj["case_id"]), annotator=str(obj["annotator"]),
                       ordering=tuple(obj["ordering"]), mode=str(obj.get("mode", "human")),
                       ties=tuple(tuple(g) for g in obj.get("ties", [])))
        except KeyError as exc:
            raise DataFormatError(f"ranking record missing field {exc}") from exc


def ranks_to_scores(record: RankingRecord, m: int) -> dict[str, int]:
    """Position p (1-based, best first) scores ``m - p + 1`` points."""
    if len(record.ordering) != m:
        raise DataFormatError(
            f"case {record.case_id}: expected {m} models, got {len(record.ordering)}")
    return {model: m - p for p, model in enumerate(record.ordering)}


def metric_ranking(
    scores: dict[str, float],
    case_id: str = "",
    annotator: str = "metric",
    models: Sequence[str] | None = None,
) -> RankingRecord:
    """Rank models by a metric, descending; ties break by model id.

    Tied groups are recorded on the returned record so downstream analysis
    can see where the ordering was arbitrary.
    """
    if models is not None:
        missing = sorted(set(models) - set(scores))
        if missing:
            raise DataFormatError(f"case {case_id}: missing metric scores for {missing}")
        scores = {model: scores[model] for model in models}
    ordering = sorted(scores, key=lambda model: (-scores[model], model))
    by_score: dict[float, list[str]] = defaultdict(list)
    for model in ordering:
        by_score[scores[model]].append(model)
    ties = tuple(tuple(group) for group in by_score.values() if len(group) > 1)
    return RankingRecord(case_id=case_id, annotator=annotator,
                         ordering=tuple(ordering), mode="metric", ties=ties)


def kendall_tau(scores_a: Sequence[float], scores_b: Sequence[float]) -> float:
    """Kendall's tau-b between two aligned score sequences.

    Tie-corrected: tau-b = (C - D) / sqrt((C + D + Ta)(C + D + Tb)) with
    Ta/Tb the pairs tied only in a / only in b; equals the textbook tau
    when there are no ties.  Undefined (and an error) when either side is
    entirely tied.
    """
    if len(scores_a) != len(scores_b):
        raise DataFormatError(
            f"score sequences differ in length: {len(scores_a)} vs {len(scores_b)}")
    if len(scores_a) < 2:
        raise DataFormatError("need at least 2 aligned scores")
    result = _scipy_stats.kendalltau(scores_a, scores_b, variant="b")
    tau = float(result.statistic)
    if math.isnan(tau):
        raise DataFormatError("tau undefined: one side is entirely tied")
    return tau


@dataclass
class ScoreMatrix:
    """Per-case rank scores plus (model, language) means."""

    case_scores: dict[tuple[str, str], dict[str, int]] = field(default_factory=dict)
    case_language: dict[str, str] = field(default_factory=dict)
    model_count: int = 0

    def mean_by_model_language(self) -> dict[str, dict[str, float]]:
        sums: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
        counts: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
        for (case_id, _annotator), scores in self.case_scores.items():
            lang = self.case_language.get(case_id, "unknown")
            for model, score in scores.items():
                sums[model][lang] += score
                counts[model][lang] += 1
        return {model: {lang: sums[model][lang] / counts[model][lang]
                        for lang in sums[model]}
                for model in sums}

    def mean_by_model(self) -> dict[str, float]:
        sums: dict[str, float] = defaultdict(float)
        counts: dict[str, int] = defaultdict(int)
        for scores in self.case_scores.values():
            for model, score in scores.items():
                sums[model] += score
                counts[model] += 1
        return {model: sums[model] / counts[model] for model in sums}

    def case_count(self) -> int:
        return len({case_id for case_id, _ in self.case_scores})

    def mean_scores_per_point(self) -> dict[tuple[str, str], float]:
        """(case, model) -> human score, averaged over annotators."""
        sums: dict[tuple[str, str], float] = defaultdict(float)
        counts: dict[tuple[str, str], int] = defaultdict(int)
        for (case_id, _annotator), scores in self.case_scores.items():
            for model, score in scores.items():
                sums[(case_id, model)] += score
                counts[(case_id, model)] += 1
        return {point: sums[point] / counts[point] for point in sums}

    def to_json(self) -> dict:
        return {
            "model_count": self.model_count,
            "cases": self.case_count(),
            "records": len(self.case_scores),
            "mean_by_model": dict(sorted(self.mean_by_model().items())),
            "mean_by_model_language": {
                model: dict(sorted(langs.items()))
                for model, langs in sorted(self.mean_by_model_language().items())
            },
        }


def aggregate_ratings(
    records: Iterable[RankingRecord],
    languages: dict[str, str] | None = None,
) -> ScoreMatrix:
    """Convert ranking records into per-case scores and per-model means."""
    matrix = ScoreMatrix(case_language=dict(languages or {}))
    m = 0
    for record in records:
        if m == 0:
            m = len(record.ordering)
        elif len(record.ordering) != m:
            raise DataFormatError(
                f"case {record.case_id}: inconsistent model count "
                f"({len(record.ordering)} vs {m})")
        key = (record.case_id, record.annotator)
        if key in matrix.case_scores:
            raise DataFormatError(f"duplicate ranking for case/annotator {key}")
        matrix.case_scores[key] = ranks_to_scores(record, m)
    matrix.model_count = m
    return matrix


def correlate_metrics(
    machine: dict[str, dict[tuple[str, str], float]],
    human: ScoreMatrix,
    per_language: bool = False,
) -> dict:
    """Kendall tau-b between each metric and the human scores.

    ``machine`` maps metric name -> (case_id, model) -> score.  Every
    metric must cover exactly the human (case, model) points; anything
    missing on either side aborts with the offending points listed.
    """
    human_points = human.mean_scores_per_point()
    point_order = sorted(human_points)
    pooled: dict[str, dict] = {}
    for metric, scores in machine.items():
        missing = [point for point in point_order if point not in scores]
        extra = [point for point in scores if point not in human_points]
        if missing or extra:
            raise DataFormatError(
                f"metric {metric!r} coverage mismatch; "
                f"missing={missing[:5]} extra={sorted(extra)[:5]}")
        a = [scores[point] for point in point_order]
        b = [human_points[point] for point in point_order]
        pooled[metric] = {"tau": kendall_tau(a, b), "n_points": len(point_order)}
    report: dict = {"pooled": dict(
        sorted(pooled.items(), key=lambda kv: -kv[1]["tau"]))}
    if per_language:
        by_lang: dict[str, dict] = {}
        langs = sorted({human.case_language.get(case_id, "unknown")
                        for case_id, _ in point_order})
        for lang in langs:
            points = [p for p in point_order
                      if human.case_language.get(p[0], "unknown") == lang]
            lang_report = {}
            for metric, scores in machine.items():
                a = [scores[p] for p in points]
                b = [human_points[p] for p in points]
                try:
                    lang_report[metric] = {"tau": kendall_tau(a, b),
                                           "n_points": len(points)}
                except DataFormatError:
                    lang_report[metric] = {"tau": None, "n_points": len(points)}
            by_lang[lang] = dict(sorted(lang_report.items(),
                                        key=lambda kv: -(kv[1]["tau"] or -2.0)))
        report["per_language"] = by_lang
    return report


def load_rankings(path: str | Path, modes: tuple[str, ...] = RANKING_MODES) -> list[RankingRecord]:
    """Read ranking records from JSON lines, skipping non-ranking entries."""
    records = []
    for obj in read_jsonl(path):
        if obj.get("mode") not in modes:
            continue
        records.append(RankingRecord.from_json(obj))
    return records
