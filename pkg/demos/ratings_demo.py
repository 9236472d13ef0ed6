"""From rankings to scores to metric/human correlation.

Builds a synthetic study: 12 cases, 6 models, 2 annotators whose rankings
follow a noisy shared preference, and three automatic metrics of varying
quality.  Prints per-model means and the Kendall tau-b of each metric
against the human scores.
"""

import random

from medcorpus import (RankingRecord, aggregate_ratings, correlate_metrics,
                       metric_ranking, ranks_to_scores)

MODELS = ["atlas", "borei", "corvus", "darter", "egret", "fulmar"]
# latent "true" quality, best first
TRUE_ORDER = ["egret", "corvus", "atlas", "fulmar", "borei", "darter"]


def noisy_ranking(rng: random.Random) -> list[str]:
    order = TRUE_ORDER[:]
    # a couple of adjacent swaps per annotator pass
    for _ in range(2):
        i = rng.randrange(len(order) - 1)
        order[i], order[i + 1] = order[i + 1], order[i]
    return order


def main() -> None:
    rng = random.Random(2024)
    langs = ["en", "es", "fr", "ru", "zh", "ja"]
    records, case_langs = [], {}
    for i in range(12):
        case_id = f"case{i:02d}"
        case_langs[case_id] = langs[i % 6]
        for annotator in ("ann1", "ann2"):
            records.append(RankingRecord(case_id=case_id, annotator=annotator,
                                         ordering=tuple(noisy_ranking(rng))))

    print("== one case, scores from ranks ==")
    scores = ranks_to_scores(records[0], 6)
    for model, score in sorted(scores.items(), key=lambda kv: -kv[1]):
        print(f"  {model:8s} {score}")
    print(f"  sum = {sum(scores.values())}")

    matrix = aggregate_ratings(records, case_langs)
    print("\n== mean human score per model ==")
    for model, mean in sorted(matrix.mean_by_model().items(), key=lambda kv: -kv[1]):
        print(f"  {model:8s} {mean:.3f}")

    # automatic metrics: one faithful, one noisy, one anti-correlated
    human_points = matrix.mean_scores_per_point()
    machine = {
        "faithful": {p: v + 0.01 * rng.random() for p, v in human_points.items()},
        "noisy": {p: v + 2.5 * rng.random() for p, v in human_points.items()},
        "contrarian": {p: -v for p, v in human_points.items()},
    }
    report = correlate_metrics(machine, matrix, per_language=True)
    print("\n== kendall tau-b vs human scores (pooled) ==")
    for metric, entry in report["pooled"].items():
        print(f"  {metric:10s} tau={entry['tau']: .3f} n={entry['n_points']}")

    print("\n== a metric-induced ranking with a tie ==")
    tied = metric_ranking({"atlas": 0.4, "borei": 0.4, "corvus": 0.9},
                          case_id="case00")
    print(f"  ordering={list(tied.ordering)} ties={[list(g) for g in tied.ties]}")


if __name__ == "__main__":
    main()
