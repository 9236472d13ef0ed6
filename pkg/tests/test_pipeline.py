import json
import random
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from medcorpus.errors import ConfigError, DataFormatError
from medcorpus.filtering import MatchConfig, SegmentationMode, classify
from medcorpus.pipeline import (CorpusRecord, FilterStats, chunk_document,
                                default_tokenize, filter_stream, get_tokenizer,
                                read_jsonl, sample_for_review, tokenize,
                                write_jsonl)

from conftest import make_lexicon

SPACE = SegmentationMode.SPACE_DELIMITED


def en_setup(t_c=1, t_d=0.01):
    lex = make_lexicon("en", ["flu", "shot", "virus", "vaccine"])
    config = MatchConfig(lang="en", mode=SPACE, t_c=t_c, t_d=t_d)
    return {"en": lex}, {"en": config}


def record(i, text, lang="en", source="filtered_web"):
    return {"id": f"doc-{i}", "lang": lang, "text": text, "source": source, "meta": {}}


class TestFilterStream:
    def test_counts(self):
        lexicons, configs = en_setup(t_c=0, t_d=0.0)
        records = [record(0, "flu season flu"), record(1, "nothing here"),
                   record(2, "virus shot"), record(3, "plain text"),
                   record(4, "more noise"), record(5, "vaccine talk"),
                   record(6, "none"), record(7, "nope"), record(8, "zip"),
                   record(9, "zilch")]
        stats = FilterStats()
        out = list(filter_stream(records, lexicons, configs, stats))
        assert len(out) == 10
        report = stats.to_json()
        assert report["per_language"]["en"]["documents_in"] == 10
        assert report["per_language"]["en"]["documents_kept"] == 3
        assert report["per_language"]["en"]["remain_ratio"] == pytest.approx(0.3)

    def test_empty_stream(self):
        lexicons, configs = en_setup()
        stats = FilterStats()
        assert list(filter_stream([], lexicons, configs, stats)) == []
        assert stats.to_json()["total"]["documents_in"] == 0

    def test_matches_sequential_classify(self):
        lexicons, configs = en_setup(t_c=1, t_d=0.05)
        rng = random.Random(7)
        words = ["flu", "shot", "virus", "vaccine", "noise", "other", "words"]
        records = [record(i, " ".join(rng.choice(words)
                                      for _ in range(rng.randrange(1, 20))))
                   for i in range(1000)]
        stats = FilterStats()
        out = list(filter_stream(records, lexicons, configs, stats))
        assert [o["id"] for o in out] == [r["id"] for r in records]
        for src, annotated in zip(records, out):
            verdict = classify(src["text"], lexicons["en"], configs["en"])
            assert annotated["keep"] == verdict.keep
            assert annotated["mkc"] == verdict.mkc
            assert annotated["dens"] == verdict.dens
        kept = sum(1 for o in out if o["keep"])
        assert stats.to_json()["per_language"]["en"]["documents_kept"] == kept

    def test_threaded_matches_sequential(self):
        lexicons, configs = en_setup(t_c=0, t_d=0.0)
        records = [record(i, f"flu number {i}") for i in range(200)]
        seq = list(filter_stream(records, lexicons, configs, FilterStats()))
        par = list(filter_stream(records, lexicons, configs, FilterStats(),
                                 threads=4))
        assert seq == par

    def test_unknown_lang_rejected_not_dropped(self):
        lexicons, configs = en_setup()
        rejected = []
        records = [record(0, "flu"), record(1, "texto", lang="pt")]
        out = list(filter_stream(records, lexicons, configs, FilterStats(),
                                 rejects=lambda o, r: rejected.append((o, r))))
        assert len(out) == 1
        assert len(rejected) == 1
        assert "pt" in rejected[0][1]

    def test_malformed_and_duplicate_rejected(self):
        lexicons, configs = en_setup()
        rejected = []
        records = [record(0, "flu"), {"id": "doc-0", "lang": "en",
                                      "text": "dup", "source": "filtered_web"},
                   {"lang": "en", "text": "no id"},
                   {"id": "x", "lang": "en", "text": "bad source", "source": "??"}]
        out = list(filter_stream(records, lexicons, configs, FilterStats(),
                                 rejects=lambda o, r: rejected.append(r)))
        assert len(out) == 1
        assert len(rejected) == 3

    def test_throughput_scales_roughly_linearly(self):
        lexicons, configs = en_setup(t_c=1, t_d=0.02)
        rng = random.Random(3)
        words = ["flu", "shot", "virus", "plain", "words", "noise"]

        def corpus(n_records):
            return [record(i, " ".join(rng.choice(words) for _ in range(80)))
                    for i in range(n_records)]

        small, big = corpus(300), corpus(600)

        def measure(records):
            best = float("inf")
            for _ in range(3):
                start = time.perf_counter()
                for _ in filter_stream(records, lexicons, configs, FilterStats()):
                    pass
                best = min(best, time.perf_counter() - start)
            return best

        ratio = measure(big) / measure(small)
        # linear algorithm; generous bound absorbs timer noise at this size
        assert ratio < 3.0


class TestCorpusRecord:
    def test_round_trip(self):
        rec = CorpusRecord.from_json(record(1, "text"))
        assert CorpusRecord.from_json(rec.to_json()) == rec

    def test_validation(self):
        with pytest.raises(DataFormatError):
            CorpusRecord.from_json({"id": "", "lang": "en", "text": "x"})
        with pytest.raises(DataFormatError):
            CorpusRecord.from_json({"id": "a", "lang": "en"})
        with pytest.raises(DataFormatError):
            CorpusRecord.from_json(["not", "an", "object"])


class TestSample:
    def make_kept(self, n, lang="en"):
        return [{"id": f"r{i}", "lang": lang, "keep": True} for i in range(n)]

    def test_fewer_than_requested(self):
        out = sample_for_review(self.make_kept(50), n=100, seed=1)
        assert len(out["en"]) == 50

    def test_exact_reservoir_size(self):
        out = sample_for_review(self.make_kept(500), n=100, seed=1)
        assert len(out["en"]) == 100

    def test_deterministic(self):
        records = self.make_kept(1000)
        a = sample_for_review(iter(records), n=20, seed=42)
        b = sample_for_review(iter(records), n=20, seed=42)
        assert a == b

    def test_respects_keep_flag(self):
        records = [{"id": "a", "lang": "en", "keep": False},
                   {"id": "b", "lang": "en", "keep": True}]
        out = sample_for_review(records, n=10, seed=0)
        assert [r["id"] for r in out["en"]] == ["b"]

    def test_per_language_reservoirs(self):
        records = self.make_kept(30, "en") + self.make_kept(40, "fr")
        out = sample_for_review(records, n=25, seed=9)
        assert len(out["en"]) == 25 and len(out["fr"]) == 25

    def test_inclusion_is_uniform_chi_square(self):
        # fixed seeds make this fully deterministic
        n_records, sample_n, trials = 400, 40, 300
        records = self.make_kept(n_records)
        hits = {r["id"]: 0 for r in records}
        for seed in range(trials):
            for rec in sample_for_review(records, n=sample_n, seed=seed)["en"]:
                hits[rec["id"]] += 1
        expected = trials * sample_n / n_records
        statistic = sum((count - expected) ** 2 / expected for count in hits.values())
        cutoff = scipy_stats.chi2.ppf(0.999, df=n_records - 1)
        assert statistic < cutoff

    def test_bad_n(self):
        with pytest.raises(DataFormatError):
            sample_for_review([], n=0, seed=1)


class TestTokenize:
    def test_whitespace_words(self):
        assert tokenize("a b c") == ["a", "b", "c"]

    def test_cjk_per_character(self):
        assert tokenize("糖尿病薬") == ["糖", "尿", "病", "薬"]

    def test_mixed(self):
        assert tokenize("insulin注射") == ["insulin", "注", "射"]

    def test_unknown_tokenizer(self):
        with pytest.raises(ConfigError):
            get_tokenizer("bert-something")

    def test_vocab_tokenizer(self, tmp_path):
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("in\nsulin\ninsulin\nshot\n", encoding="utf-8")
        tok = get_tokenizer(f"vocab:{vocab}")
        assert tok("insulin shot") == ["insulin", "shot"]
        assert tok("insulinx") == ["insulin", "x"]

    def test_empty_vocab_err(self, tmp_path):
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            get_tokenizer(f"vocab:{vocab}")


class TestChunk:
    def test_long_document_offsets(self):
        tokens = [f"t{i}" for i in range(5000)]
        chunks = chunk_document(tokens, size=2048, overlap=512)
        assert [(c.start_offset, len(c.tokens)) for c in chunks] == [
            (0, 2048), (1536, 2048), (3072, 1928)]

    def test_short_document_single_chunk(self):
        chunks = chunk_document(["x"] * 100)
        assert len(chunks) == 1 and len(chunks[0].tokens) == 100

    def test_exact_size_single_chunk(self):
        chunks = chunk_document(["x"] * 2048)
        assert len(chunks) == 1

    def test_covered_tail_suppressed(self):
        # 2000 tokens: a window at 1536 would add nothing new
        chunks = chunk_document(["x"] * 2000)
        assert len(chunks) == 1 and len(chunks[0].tokens) == 2000

    def test_empty_document(self):
        assert chunk_document([]) == []

    def test_bad_geometry(self):
        with pytest.raises(DataFormatError):
            chunk_document(["x"], size=512, overlap=512)

    @settings(max_examples=80)
    @given(st.integers(min_value=1, max_value=12000))
    def test_coverage_and_overlap_properties(self, n):
        tokens = list(range(n))
        chunks = chunk_document(tokens, size=2048, overlap=512)
        # full coverage, in order, reconstructible
        covered = set()
        for c in chunks:
            assert len(c.tokens) <= 2048
            covered.update(range(c.start_offset, c.start_offset + len(c.tokens)))
            assert list(c.tokens) == tokens[c.start_offset:c.start_offset + len(c.tokens)]
        assert covered == set(range(n))
        # consecutive step is exactly size - overlap
        for a, b in zip(chunks, chunks[1:]):
            assert b.start_offset - a.start_offset == 1536
        assert chunks[-1].start_offset + len(chunks[-1].tokens) == n
        # shared region between consecutive full chunks is the overlap
        for a, b in zip(chunks, chunks[1:]):
            if len(a.tokens) == 2048 and len(b.tokens) == 2048:
                assert a.start_offset + 2048 - b.start_offset == 512


class TestJsonl:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "data.jsonl"
        rows = [{"id": "a", "n": 1}, {"id": "b", "n": 2}]
        assert write_jsonl(path, rows) == 2
        assert list(read_jsonl(path)) == rows

    def test_bad_json_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"ok": 1}\nnot json\n', encoding="utf-8")
        with pytest.raises(DataFormatError):
            list(read_jsonl(path))
