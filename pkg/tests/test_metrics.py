import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medcorpus.errors import DataFormatError
from medcorpus.metrics import (IdfTable, TokenizedPair, bleu, bleu_n,
                               choice_accuracy, compute_idf, embed_score,
                               parse_answer, rouge_l, rouge_n)

from oracles import (naive_bleu, naive_bleu_n, naive_embed_recall,
                     naive_rouge_l, naive_rouge_n)

TOL = 1e-12


def pair(cand, ref):
    return TokenizedPair.of(cand, ref)


class TestBleuN:
    def test_identity(self):
        p = pair(["a", "b", "c"], ["a", "b", "c"])
        for n in (1, 2, 3):
            assert bleu_n(p, n) == pytest.approx(1.0, abs=TOL)

    def test_clipping_worked_example(self):
        # "the" appears twice in the reference at most once... clipped to 1 of 3
        p = pair(["the", "the", "the"], ["the", "cat"])
        assert bleu_n(p, 1) == pytest.approx(1 / 3, abs=TOL)

    def test_no_overlap(self):
        assert bleu_n(pair(["x", "y"], ["a", "b"]), 1) == 0.0

    def test_empty_candidate(self):
        assert bleu_n(pair([], ["a"]), 1) == 0.0

    def test_brevity_penalty(self):
        p = pair(["a", "b", "c"], ["a", "b", "c", "d", "e"])
        assert bleu_n(p, 1) == pytest.approx(math.exp(1 - 5 / 3), abs=TOL)

    def test_candidate_shorter_than_n(self):
        assert bleu_n(pair(["a"], ["a", "b"]), 2) == 0.0


class TestBleuComposite:
    def test_identity_length_four_plus(self):
        p = pair(list("abcd"), list("abcd"))
        assert bleu(p) == pytest.approx(1.0, abs=TOL)

    def test_short_identical_pair_scores_zero(self):
        p = pair(["a", "b", "c"], ["a", "b", "c"])
        assert bleu(p) == 0.0

    def test_worked_six_token_example(self):
        p = pair(["the", "cat", "sat", "on", "the", "mat"],
                 ["the", "cat", "sat", "on", "a", "mat"])
        # P1..P4 = 5/6, 3/5, 2/4, 1/3 and BP = 1, so the geometric mean is
        # (5/6 * 3/5 * 1/2 * 1/3) ** 0.25 = (1/12) ** 0.25
        assert bleu(p) == pytest.approx((1 / 12) ** 0.25, abs=TOL)
        assert bleu(p) == pytest.approx(0.537284965911771, abs=TOL)

    def test_epsilon_smoothing_keeps_score_positive(self):
        p = pair(["a", "b", "c"], ["a", "b", "c"])
        assert bleu(p, smoothing="add-epsilon") > 0.0
        with pytest.raises(DataFormatError):
            bleu(p, smoothing="laplace")


class TestRouge:
    def test_identity(self):
        p = pair(["a", "b"], ["a", "b"])
        assert rouge_n(p, 1)["f1"] == pytest.approx(1.0, abs=TOL)
        assert rouge_l(p)["f1"] == pytest.approx(1.0, abs=TOL)

    def test_hand_counted_unigrams(self):
        scores = rouge_n(pair(["a", "b"], ["b", "c"]), 1)
        assert scores == pytest.approx(
            {"precision": 0.5, "recall": 0.5, "f1": 0.5}, abs=TOL)

    def test_disjoint(self):
        assert rouge_n(pair(["a"], ["b"]), 1)["f1"] == 0.0
        assert rouge_l(pair(["a"], ["b"]))["f1"] == 0.0

    def test_both_empty(self):
        scores = rouge_n(pair([], []), 1)
        assert scores == {"precision": 0.0, "recall": 0.0, "f1": 0.0}

    def test_lcs_dp_table_by_hand(self):
        scores = rouge_l(pair(["a", "x", "b"], ["a", "b", "y"]))
        assert scores["precision"] == pytest.approx(2 / 3, abs=TOL)
        assert scores["recall"] == pytest.approx(2 / 3, abs=TOL)
        assert scores["f1"] == pytest.approx(2 / 3, abs=TOL)

    def test_f1_symmetric_under_swap(self):
        rng = random.Random(0)
        for _ in range(50):
            cand = [rng.choice("abcde") for _ in range(rng.randrange(0, 8))]
            ref = [rng.choice("abcde") for _ in range(rng.randrange(0, 8))]
            fwd = rouge_n(pair(cand, ref), 1)
            rev = rouge_n(pair(ref, cand), 1)
            assert fwd["f1"] == pytest.approx(rev["f1"], abs=TOL)
            assert fwd["precision"] == pytest.approx(rev["recall"], abs=TOL)


FIXED_CASES = [
    (["the", "cat", "sat", "on", "the", "mat"], ["the", "cat", "sat", "on", "a", "mat"]),
    (["the", "the", "the"], ["the", "cat"]),
    (["a", "b", "c", "d"], ["a", "b", "c", "d"]),
    (["a", "b"], ["b", "c"]),
    (["a", "x", "b"], ["a", "b", "y"]),
    (["q"], ["q"]),
    ([], ["a", "b"]),
    (["a", "b"], []),
    ([], []),
    (["x", "y", "z"], ["a", "b", "c"]),
    (["a"] * 10, ["a"] * 3),
    (["a", "a", "b", "b"], ["a", "b", "a", "b"]),
    (["one", "two", "three", "four", "five"], ["one", "three", "five"]),
    (["z", "a", "b", "c", "d"], ["a", "b", "c", "d", "z"]),
    (["a", "b", "c", "d", "e", "f", "g"], ["a", "b", "c", "x", "e", "f", "g"]),
    (["m"] * 4, ["m"] * 8),
    (["p", "q", "p", "q", "p"], ["q", "p", "q"]),
    (["s1", "s2"], ["s1", "s2", "s3", "s4", "s5", "s6"]),
    (["t1", "t2", "t3", "t4", "t5", "t6"], ["t1", "t2"]),
    (["u", "v", "w", "u", "v"], ["u", "v", "u", "v", "w"]),
    (["0", "1", "0", "1"], ["1", "0", "1", "0"]),
]


@pytest.mark.parametrize("cand,ref", FIXED_CASES)
def test_fixed_cases_match_oracles(cand, ref):
    p = pair(cand, ref)
    for n in (1, 2, 3, 4):
        assert bleu_n(p, n) == pytest.approx(naive_bleu_n(cand, ref, n), abs=TOL)
    assert bleu(p) == pytest.approx(naive_bleu(cand, ref), abs=TOL)
    for n in (1, 2):
        got = rouge_n(p, n)
        want = naive_rouge_n(cand, ref, n)
        for key in ("precision", "recall", "f1"):
            assert got[key] == pytest.approx(want[key], abs=TOL)
    got_l = rouge_l(p)
    want_l = naive_rouge_l(cand, ref)
    for key in ("precision", "recall", "f1"):
        assert got_l[key] == pytest.approx(want_l[key], abs=TOL)


def test_randomized_cases_match_oracles():
    rng = random.Random(99)
    vocab = ["a", "b", "c", "d", "e"]
    for _ in range(500):
        cand = [rng.choice(vocab) for _ in range(rng.randrange(0, 10))]
        ref = [rng.choice(vocab) for _ in range(rng.randrange(0, 10))]
        p = pair(cand, ref)
        n = rng.randrange(1, 5)
        assert bleu_n(p, n) == pytest.approx(naive_bleu_n(cand, ref, n), abs=TOL)
        assert bleu(p) == pytest.approx(naive_bleu(cand, ref), abs=TOL)
        got = rouge_n(p, min(n, 2))
        want = naive_rouge_n(cand, ref, min(n, 2))
        assert got["f1"] == pytest.approx(want["f1"], abs=TOL)
        got_l = rouge_l(p)
        want_l = naive_rouge_l(cand, ref)
        assert got_l["f1"] == pytest.approx(want_l["f1"], abs=TOL)
        # an LCS is itself a common token multiset, so unigram overlap
        # can only be larger
        assert got_l["f1"] <= got["f1"] + TOL if min(n, 2) == 1 else True


@settings(max_examples=200)
@given(st.lists(st.sampled_from("abcd"), max_size=12),
       st.lists(st.sampled_from("abcd"), max_size=12))
def test_rouge_l_bounded_by_rouge_1(cand, ref):
    p = pair(cand, ref)
    assert rouge_l(p)["f1"] <= rouge_n(p, 1)["f1"] + TOL


@settings(max_examples=200)
@given(st.lists(st.sampled_from("abcde"), max_size=10),
       st.lists(st.sampled_from("abcde"), max_size=10))
def test_scores_in_unit_interval(cand, ref):
    p = pair(cand, ref)
    for value in (bleu_n(p, 1), bleu_n(p, 3), bleu(p),
                  rouge_n(p, 1)["f1"], rouge_l(p)["f1"]):
        assert 0.0 <= value <= 1.0 + TOL


class TestIdf:
    def test_token_in_all_docs(self):
        table = compute_idf([["a", "b"], ["a"], ["a", "c"]])
        assert table.get("a") == pytest.approx(0.0, abs=TOL)

    def test_smoothing_formula(self):
        docs = [["rare"] if i == 0 else ["common"] for i in range(9)]
        table = compute_idf(docs)
        assert table.get("rare") == pytest.approx(math.log(10 / 2), abs=TOL)

    def test_single_doc(self):
        table = compute_idf([["tok"]])
        assert table.get("tok") == pytest.approx(0.0, abs=TOL)

    def test_unseen_token_default(self):
        table = compute_idf([["a"]] * 4)
        assert table.get("never") == pytest.approx(math.log(5), abs=TOL)

    def test_empty_corpus(self):
        with pytest.raises(DataFormatError):
            compute_idf([])


def unit(v):
    arr = np.asarray(v, dtype=float)
    return arr / np.linalg.norm(arr)


class TestEmbedScore:
    def test_identical_uniform(self):
        vecs = np.stack([unit([1, 0]), unit([0, 1])])
        idf = IdfTable(weights={"a": 1.0, "b": 1.0}, doc_count=1)
        scores = embed_score(["a", "b"], vecs, ["a", "b"], vecs, idf)
        assert scores["recall"] == pytest.approx(1.0, abs=TOL)
        assert scores["precision"] == pytest.approx(1.0, abs=TOL)
        assert scores["f1"] == pytest.approx(1.0, abs=TOL)

    def test_orthogonal(self):
        idf = IdfTable(weights={}, doc_count=2)
        scores = embed_score(["x"], np.array([[1.0, 0.0]]),
                             ["y"], np.array([[0.0, 1.0]]), idf)
        assert scores["recall"] == pytest.approx(0.0, abs=TOL)

    def test_three_by_two_toy_against_hand_formula(self):
        cand_tokens = ["t1", "t2", "t3"]
        ref_tokens = ["r1", "r2"]
        cand_vecs = np.stack([unit([1, 0]), unit([1, 1]), unit([0, 1])])
        ref_vecs = np.stack([unit([1, 0]), unit([-1, 1])])
        weights = {"t1": 0.5, "t2": 2.0, "t3": 1.0, "r1": 1.5, "r2": 0.25}
        idf = IdfTable(weights=weights, doc_count=9)
        scores = embed_score(cand_tokens, cand_vecs, ref_tokens, ref_vecs, idf)
        want_recall = naive_embed_recall(cand_tokens, cand_vecs.tolist(),
                                         ref_vecs.tolist(), weights)
        want_precision = naive_embed_recall(ref_tokens, ref_vecs.tolist(),
                                            cand_vecs.tolist(), weights)
        assert scores["recall"] == pytest.approx(want_recall, abs=TOL)
        assert scores["precision"] == pytest.approx(want_precision, abs=TOL)

    def test_recall_side_swap(self):
        cand_vecs = np.array([[1.0, 0.0]])
        ref_vecs = np.stack([unit([1, 1]), unit([0, 1])])
        idf = IdfTable(weights={"c": 1.0, "r1": 3.0, "r2": 1.0}, doc_count=4)
        default = embed_score(["c"], cand_vecs, ["r1", "r2"], ref_vecs, idf)
        swapped = embed_score(["c"], cand_vecs, ["r1", "r2"], ref_vecs, idf,
                              recall_side="reference")
        assert default["recall"] == pytest.approx(swapped["precision"], abs=TOL)
        assert default["precision"] == pytest.approx(swapped["recall"], abs=TOL)

    def test_permutation_invariance(self):
        rng = random.Random(4)
        cand_tokens = ["a", "b", "c"]
        cand_vecs = np.stack([unit([rng.random(), rng.random()]) for _ in range(3)])
        ref_tokens = ["x", "y", "z", "w"]
        ref_vecs = np.stack([unit([rng.random(), rng.random()]) for _ in range(4)])
        idf = IdfTable(weights={t: 1.0 + i for i, t in
                                enumerate(cand_tokens + ref_tokens)}, doc_count=8)
        base = embed_score(cand_tokens, cand_vecs, ref_tokens, ref_vecs, idf)
        ref_perm = [2, 0, 3, 1]
        shuffled_ref = embed_score(cand_tokens, cand_vecs,
                                   [ref_tokens[i] for i in ref_perm],
                                   ref_vecs[ref_perm], idf)
        assert shuffled_ref["recall"] == pytest.approx(base["recall"], abs=TOL)
        cand_perm = [1, 2, 0]
        shuffled_cand = embed_score([cand_tokens[i] for i in cand_perm],
                                    cand_vecs[cand_perm],
                                    ref_tokens, ref_vecs, idf)
        assert shuffled_cand["recall"] == pytest.approx(base["recall"], abs=TOL)

    def test_zero_idf_falls_back_with_warning(self):
        vecs = np.array([[1.0, 0.0]])
        idf = IdfTable(weights={"a": 0.0}, doc_count=0)
        with pytest.warns(UserWarning):
            scores = embed_score(["a"], vecs, ["a"], vecs, idf)
        assert scores["recall"] == pytest.approx(1.0, abs=TOL)

    def test_dimension_mismatch(self):
        idf = IdfTable(weights={}, doc_count=1)
        with pytest.raises(DataFormatError):
            embed_score(["a"], np.array([[1.0, 0.0]]),
                        ["b"], np.array([[1.0, 0.0, 0.0]]), idf)


class TestParseAnswer:
    def test_single_letter(self):
        assert parse_answer("A") == {"A"}

    def test_trailer_form(self):
        assert parse_answer("Answer: A,B") == {"A", "B"}

    def test_unparseable(self):
        assert parse_answer("The patient likely has diabetes.") == set()

    def test_reason_trailer(self):
        out = "Reason: B is wrong because of E. [End] Answer: C, D"
        assert parse_answer(out) == {"C", "D"}

    def test_case_insensitive(self):
        assert parse_answer("answer: c") == {"C"}

    def test_standalone_scan(self):
        assert parse_answer("I pick B and D") == {"B", "D"}

    def test_letters_beyond_e_ignored(self):
        assert parse_answer("F") == set()


class TestChoiceAccuracy:
    def test_all_correct(self):
        preds = [{"A"}, {"B", "C"}]
        assert choice_accuracy(preds, [{"A"}, {"B", "C"}]) == 1.0

    def test_subset_is_wrong(self):
        assert choice_accuracy([{"A"}], [{"A", "B"}]) == 0.0

    def test_three_of_four(self):
        preds = [{"A"}, {"B"}, {"C"}, set()]
        gold = [{"A"}, {"B"}, {"C"}, {"D"}]
        assert choice_accuracy(preds, gold) == 0.75

    def test_length_mismatch(self):
        with pytest.raises(DataFormatError):
            choice_accuracy([{"A"}], [])
