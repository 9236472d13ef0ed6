"""Similarity metrics for generated rationales and multi-choice accuracy.

BLEU uses clipped (modified) n-gram precision with the standard
exponential brevity penalty and no smoothing by default: any zero n-gram
precision zeroes the composite score.  ROUGE-N reports clipped-overlap
precision/recall/F1; ROUGE-L does the same over the longest common
subsequence.  The embedding score is an idf-weighted greedy-max cosine
match between candidate and reference token embeddings, with no baseline
rescaling; embeddings are supplied externally, nothing here runs a model.

Every pair holds a single reference.  Scores are per-pair; corpus-level
numbers are macro averages.
"""

from __future__ import annotations

import math
import re
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DataFormatError

BLEU_WEIGHTS = (0.25, 0.25, 0.25, 0.25)


@dataclass(frozen=True)
class TokenizedPair:
    """Candidate/reference token sequences from the same tokenizer."""

    candidate: tuple[str, ...]
    reference: tuple[str, ...]
    lang: str = ""

    @classmethod
    def of(cls, candidate: Sequence[str], reference: Sequence[str], lang: str = "") -> "TokenizedPair":
        return cls(tuple(candidate), tuple(reference), lang)


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _clipped_overlap(cand: Sequence[str], ref: Sequence[str], n: int) -> tuple[int, int, int]:
    """(clipped overlap, candidate n-gram count, reference n-gram count)."""
    cand_counts = _ngram_counts(cand, n)
    ref_counts = _ngram_counts(ref, n)
    overlap = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
    return overlap, sum(cand_counts.values()), sum(ref_counts.values())


def brevity_penalty(candidate_len: int, reference_len: int) -> float:
    """1 when the candidate is at least as long as the reference, else
    exp(1 - r/c)."""
    if candidate_len == 0:
        return 0.0
    if candidate_len >= reference_len:
        return 1.0
    return math.exp(1.0 - reference_len / candidate_len)


def _precision(pair: TokenizedPair, n: int, smoothing: str) -> float:
    overlap, total, _ = _clipped_overlap(pair.candidate, pair.reference, n)
    if total == 0:
        # no n-grams of this order at all; still epsilon under smoothing
        return 1e-9 if smoothing == "add-epsilon" else 0.0
    if overlap == 0 and smoothing == "add-epsilon":
        return 1e-9 / total
    return overlap / total


def bleu_n(pair: TokenizedPair, n: int, smoothing: str = "none") -> float:
    """Single-order BLEU: clipped n-gram precision times the brevity penalty."""
    if n < 1:
        raise DataFormatError(f"n-gram order must be >= 1, got {n}")
    if not pair.candidate:
        return 0.0
    bp = brevity_penalty(len(pair.candidate), len(pair.reference))
    return bp * _precision(pair, n, smoothing)


def bleu(pair: TokenizedPair, smoothing: str = "none") -> float:
    """Composite BLEU over orders 1-4 with equal weights.

    With no smoothing, a candidate shorter than 4 tokens scores 0 because
    it has no 4-grams.
    """
    if smoothing not in ("none", "add-epsilon"):
        raise DataFormatError(f"unknown smoothing {smoothing!r}")
    if not pair.candidate:
        return 0.0
    log_sum = 0.0
    for weight, n in zip(BLEU_WEIGHTS, range(1, 5)):
        p = _precision(pair, n, smoothing)
        if p == 0.0:
            return 0.0
        log_sum += weight * math.log(p)
    return brevity_penalty(len(pair.candidate), len(pair.reference)) * math.exp(log_sum)


def _prf(overlap: float, cand_total: float, ref_total: float) -> dict[str, float]:
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}


def rouge_n(pair: TokenizedPair, n: int) -> dict[str, float]:
    """Clipped n-gram overlap precision/recall/F1."""
    if n < 1:
        raise DataFormatError(f"n-gram order must be >= 1, got {n}")
    overlap, cand_total, ref_total = _clipped_overlap(pair.candidate, pair.reference, n)
    return _prf(overlap, cand_total, ref_total)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(pair: TokenizedPair) -> dict[str, float]:
    """Longest-common-subsequence precision/recall/F1."""
    lcs = _lcs_length(pair.candidate, pair.reference)
    return _prf(lcs, len(pair.candidate), len(pair.reference))


@dataclass(frozen=True)
class IdfTable:
    """Inverse document frequency weights over a reference corpus.

    ``idf(t) = ln((N + 1) / (df(t) + 1))``; a token absent from the corpus
    gets ``ln(N + 1)``, the df = 0 case of the same formula.
    """

    weights: dict[str, float]
    doc_count: int

    def get(self, token: str) -> float:
        return self.weights.get(token, math.log(self.doc_count + 1))


def compute_idf(reference_corpus: Iterable[Sequence[str]]) -> IdfTable:
    """Document-frequency based idf weights from tokenized reference docs."""
    doc_freq: Counter[str] = Counter()
    doc_count = 0
    for doc in reference_corpus:
        doc_count += 1
        doc_freq.update(set(doc))
    if doc_count == 0:
        raise DataFormatError("idf reference corpus is empty")
    weights = {token: math.log((doc_count + 1) / (df + 1))
               for token, df in doc_freq.items()}
    return IdfTable(weights=weights, doc_count=doc_count)


def _weighted_greedy_max(
    side_tokens: Sequence[str],
    similarity: np.ndarray,
    idf: IdfTable,
    axis: int,
) -> float:
    """idf-weighted mean of each token's best cosine along ``axis``."""
    best = similarity.max(axis=axis)
    weights = np.array([idf.get(token) for token in side_tokens], dtype=float)
    total = weights.sum()
    if total <= 0.0:
        warnings.warn("all idf weights are zero; falling back to unweighted mean",
                      stacklevel=3)
        return float(best.mean())
    return float((weights * best).sum() / total)


def embed_score(
    cand_tokens: Sequence[str],
    cand_vectors: np.ndarray,
    ref_tokens: Sequence[str],
    ref_vectors: np.ndarray,
    idf: IdfTable,
    recall_side: str = "candidate",
) -> dict[str, float]:
    """Greedy-max cosine similarity between token embedding sets.

    Vectors must be pre-normalized to unit length.  By default the recall
    sum runs over *candidate* tokens (each weighted by idf and matched
    against its best reference token) and precision is the mirror image;
    ``recall_side="reference"`` swaps the two labels, which is the other
    common convention.  No baseline rescaling is applied.
    """
    if recall_side not in ("candidate", "reference"):
        raise DataFormatError(f"unknown recall_side {recall_side!r}")
    cand_vectors = np.asarray(cand_vectors, dtype=float)
    ref_vectors = np.asarray(ref_vectors, dtype=float)
    if len(cand_tokens) != len(cand_vectors) or len(ref_tokens) != len(ref_vectors):
        raise DataFormatError("token/vector count mismatch")
    if len(cand_tokens) == 0 or len(ref_tokens) == 0:
        return {"recall": 0.0, "precision": 0.0, "f1": 0.0}
    if cand_vectors.shape[1] != ref_vectors.shape[1]:
        raise DataFormatError(
            f"embedding dimension mismatch: {cand_vectors.shape[1]} vs {ref_vectors.shape[1]}")
    similarity = cand_vectors @ ref_vectors.T
    over_candidate = _weighted_greedy_max(cand_tokens, similarity, idf, axis=1)
    over_reference = _weighted_greedy_max(ref_tokens, similarity.T, idf, axis=1)
    if recall_side == "candidate":
        recall, precision = over_candidate, over_reference
    else:
        recall, precision = over_reference, over_candidate
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"recall": recall, "precision": precision, "f1": f1}


_ANSWER_TRAILER_RE = re.compile(r"answer\s*[:：]", re.IGNORECASE)
_OPTION_LETTER_RE = re.compile(r"\b([A-Ea-e])\b")


def parse_answer(model_output: str) -> set[str]:
    """Extract the chosen option letters from free-form model output.

    Prefers the segment after the last ``Answer:`` trailer; otherwise scans
    the whole string for standalone letters A-E (any case).  An empty set
    means the output was unparseable.
    """
    segment = model_output
    last = None
    for match in _ANSWER_TRAILER_RE.finditer(model_output):
        last = match
    if last is not None:
        segment = model_output[last.end():]
    return {m.group(1).upper() for m in _OPTION_LETTER_RE.finditer(segment)}


def choice_accuracy(predictions: list[set[str]], gold: list[set[str]]) -> float:
    """Fraction of items where the predicted letter set equals gold exactly."""
    if len(predictions) != len(gold):
        raise DataFormatError(
            f"prediction/gold length mismatch: {len(predictions)} vs {len(gold)}")
    if not gold:
        return 0.0
    correct = sum(1 for pred, ans in zip(predictions, gold) if pred == set(ans))
    return correct / len(gold)
