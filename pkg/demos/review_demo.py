"""Drive the review service in-process: serve, rank, export, correlate.

Two annotators rank six anonymized model outputs for three cases through
the HTTP API (via the in-process test client), then the export is
de-anonymized and fed straight into the correlation step.
"""

import random
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from medcorpus.bench import QAItem
from medcorpus.ratings import aggregate_ratings, load_rankings
from medcorpus.review import ReviewStore, build_review_cases, create_app

TOKEN = "demo-token"
MODELS = ["atlas", "borei", "corvus", "darter", "egret", "fulmar"]


def make_cases():
    items = [QAItem(id=f"case{i}", lang="en", question=f"Clinical question {i}?",
                    options={"A": "first option", "B": "second option"},
                    answers=frozenset("A"), rationale=f"verified reference {i}")
             for i in range(3)]
    outputs = {item.id: {m: f"{len(m)}-word analysis of {item.id}" for m in MODELS}
               for item in items}
    return items, outputs


def main() -> None:
    items, outputs = make_cases()
    with tempfile.TemporaryDirectory() as tmp:
        store = ReviewStore(build_review_cases(items, outputs, seed=42),
                            Path(tmp) / "log.jsonl")
        client = TestClient(create_app(store, token=TOKEN))
        headers = {"X-Review-Token": TOKEN}
        rng = random.Random(5)

        for annotator in ("ann1", "ann2"):
            while True:
                task = client.get("/api/tasks/next", headers=headers,
                                  params={"annotator": annotator, "kind": "ranking"})
                if task.status_code == 204:
                    break
                case = task.json()
                labels = [c["label"] for c in case["candidates"]]
                rng.shuffle(labels)
                response = client.post("/api/submissions", headers=headers, json={
                    "case_id": case["case_id"], "annotator": annotator,
                    "kind": "ranking", "ranking": labels})
                print(f"{annotator} ranked {case['case_id']}: {labels} "
                      f"-> {response.status_code}")

        print("\nprogress:", client.get("/api/progress", headers=headers).json())

        export_path = Path(tmp) / "export.jsonl"
        export_path.write_text(client.get("/api/export", headers=headers).text,
                               encoding="utf-8")
        records = load_rankings(export_path)
        print("\nde-anonymized orderings:")
        for record in records:
            print(f"  {record.case_id} {record.annotator}: {list(record.ordering)}")

        matrix = aggregate_ratings(records, {item.id: item.lang for item in items})
        print("\nmean score per model:")
        for model, mean in sorted(matrix.mean_by_model().items(),
                                  key=lambda kv: -kv[1]):
            print(f"  {model:8s} {mean:.2f}")


if __name__ == "__main__":
    main()
