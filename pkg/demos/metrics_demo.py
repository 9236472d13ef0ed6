"""Score a few candidate/reference rationale pairs with every metric.

Includes the idf-weighted embedding score on toy 2-d unit vectors, the
answer-letter parser, and multi-choice accuracy.
"""

import numpy as np

from medcorpus import (TokenizedPair, bleu, bleu_n, choice_accuracy,
                       compute_idf, embed_score, parse_answer, rouge_l,
                       rouge_n)

PAIRS = [
    ("perfect match", "the tumor is benign and needs no treatment",
     "the tumor is benign and needs no treatment"),
    ("close paraphrase", "the tumor is benign and needs no treatment",
     "the tumor is benign and requires no treatment"),
    ("off-topic", "see a doctor about the persistent cough",
     "the tumor is benign and needs no treatment"),
]


def main() -> None:
    print("== n-gram metrics ==")
    for name, cand, ref in PAIRS:
        pair = TokenizedPair.of(cand.split(), ref.split())
        print(f"  {name}:")
        print(f"    bleu1={bleu_n(pair, 1):.4f} bleu={bleu(pair):.4f} "
              f"rouge1={rouge_n(pair, 1)['f1']:.4f} "
              f"rougeL={rouge_l(pair)['f1']:.4f}")

    print("\n== idf-weighted embedding score (toy vectors) ==")
    idf = compute_idf([["tumor", "benign"], ["cough", "doctor"],
                       ["tumor", "treatment"]])

    def unit(v):
        arr = np.asarray(v, dtype=float)
        return arr / np.linalg.norm(arr)

    cand_tokens = ["tumor", "benign"]
    ref_tokens = ["tumor", "harmless"]
    cand_vecs = np.stack([unit([1.0, 0.1]), unit([0.2, 1.0])])
    ref_vecs = np.stack([unit([1.0, 0.05]), unit([0.3, 1.0])])
    scores = embed_score(cand_tokens, cand_vecs, ref_tokens, ref_vecs, idf)
    print(f"  recall={scores['recall']:.4f} precision={scores['precision']:.4f} "
          f"f1={scores['f1']:.4f}")

    print("\n== answer parsing and accuracy ==")
    outputs = ["A", "Answer: A,B", "Reason: ... [End] Answer: C",
               "The patient likely has diabetes."]
    parsed = [parse_answer(text) for text in outputs]
    for text, letters in zip(outputs, parsed):
        print(f"  {text!r} -> {sorted(letters) or '(unparseable)'}")
    gold = [{"A"}, {"A", "B"}, {"C"}, {"D"}]
    print(f"  accuracy vs gold {gold}: {choice_accuracy(parsed, gold):.2f}")


if __name__ == "__main__":
    main()
