"""Walk a tiny corpus through the keyword filter, end to end.

Loads the shipped English and Chinese test lexicons and the default
threshold table, classifies a handful of documents, and prints the
per-document verdicts plus the run statistics.
"""

import json
from pathlib import Path

from medcorpus import FilterStats, filter_stream, load_lexicon_dir, load_match_configs

ROOT = Path(__file__).resolve().parents[1]

RECORDS = [
    {"id": "web-001", "lang": "en", "source": "filtered_web", "meta": {},
     "text": ("Patients with diabetes often require insulin therapy, and "
              "untreated hypertension raises the risk of stroke, kidney "
              "failure and heart attack.")},
    {"id": "web-002", "lang": "en", "source": "filtered_web", "meta": {},
     "text": "The football match was delayed by rain for two hours."},
    {"id": "web-003", "lang": "en", "source": "filtered_web", "meta": {},
     "text": ("The clinic offers chemotherapy, cardiology consults, vaccine "
              "programs, surgery, anesthesia and pneumonia care on site.")},
    {"id": "web-004", "lang": "zh", "source": "filtered_web", "meta": {},
     "text": "糖尿病患者需要胰岛素治疗，高血压会增加中风和心脏病的风险。"},
    {"id": "web-005", "lang": "zh", "source": "filtered_web", "meta": {},
     "text": "今天的天气很好，我们去公园散步吧。"},
    {"id": "web-006", "lang": "xx", "source": "filtered_web", "meta": {},
     "text": "No configuration exists for this language."},
]


def main() -> None:
    lexicons = load_lexicon_dir(ROOT / "lexicons")
    configs = load_match_configs()
    stats = FilterStats()
    rejected = []

    print("== per-document verdicts ==")
    annotated = filter_stream(RECORDS, lexicons, configs, stats,
                              rejects=lambda obj, why: rejected.append((obj["id"], why)))
    for record in annotated:
        flag = "KEEP" if record["keep"] else "drop"
        print(f"  {record['id']} [{record['lang']}] {flag}  "
              f"mkc={record['mkc']} dens={record['dens']:.3f}")

    print("\n== rejected ==")
    for doc_id, why in rejected:
        print(f"  {doc_id}: {why}")

    print("\n== run statistics ==")
    print(json.dumps(stats.to_json(), indent=2, ensure_ascii=False))


if __name__ == "__main__":
    main()
