"""Keyword matching and the medical-relatedness decision for one document.

A document is classified by two numbers computed from lexicon matches:

* ``mkc`` — how many distinct keywords occur in the text, and
* ``dens`` — the fraction of the text's characters covered by keyword
  occurrences.

The document is kept when *both* exceed their per-language thresholds
(strictly).  Two segmentation modes exist: languages with whitespace word
separation are matched token-by-token, languages without (Chinese,
Japanese) are matched as substrings of the raw character stream.

Occurrence counting is non-overlapping and leftmost-longest in both modes:
scanning left to right, the longest keyword starting at the current
position wins and the scan resumes after it.  This guarantees that matched
characters never exceed the text's characters, so ``dens <= 1`` always
holds.
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter, deque
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import ConfigError, MedcorpusError
from .lexicon import Lexicon, normalize_text


class SegmentationMode(str, Enum):
    SPACE_DELIMITED = "space_delimited"
    CONTIGUOUS = "contiguous"


#: Languages whose mode is pinned; other language codes may use either mode.
_PINNED_MODES = {
    "en": SegmentationMode.SPACE_DELIMITED,
    "es": SegmentationMode.SPACE_DELIMITED,
    "fr": SegmentationMode.SPACE_DELIMITED,
    "ru": SegmentationMode.SPACE_DELIMITED,
    "zh": SegmentationMode.CONTIGUOUS,
    "ja": SegmentationMode.CONTIGUOUS,
}


@dataclass(frozen=True)
class MatchConfig:
    """Per-language segmentation mode and keep thresholds.

    ``t_c`` is the unique-keyword-count threshold, ``t_d`` the density
    threshold; both comparisons are strict.
    """

    lang: str
    mode: SegmentationMode
    t_c: int
    t_d: float

    def __post_init__(self) -> None:
        if self.t_c < 0:
            raise ConfigError(f"{self.lang}: t_c must be >= 0, got {self.t_c}")
        if not 0.0 <= self.t_d <= 1.0:
            raise ConfigError(f"{self.lang}: t_d must be in [0, 1], got {self.t_d}")
        pinned = _PINNED_MODES.get(self.lang)
        if pinned is not None and self.mode is not pinned:
            raise ConfigError(f"{self.lang}: segmentation mode must be {pinned.value}")


@dataclass(frozen=True)
class FilterVerdict:
    """Classification result for one document."""

    mkc: int
    dens: float
    keep: bool
    matched: tuple[tuple[str, int], ...]
    text_len: int


def _strip_edge_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def segment(text: str, mode: SegmentationMode) -> list[str] | str:
    """Split a document into match units.

    Space-delimited mode returns normalized tokens (maximal non-whitespace
    runs with edge punctuation stripped, empties dropped).  Contiguous mode
    returns the normalized text unsplit; matching downstream is
    substring-based.
    """
    normalized = normalize_text(text)
    if mode is SegmentationMode.CONTIGUOUS:
        return normalized
    tokens = []
    for raw in normalized.split():
        token = _strip_edge_punctuation(raw)
        if token:
            tokens.append(token)
    return tokens


class _AcNode:
    __slots__ = ("children", "fail", "term_lens")

    def __init__(self) -> None:
        self.children: dict[str, _AcNode] = {}
        self.fail: _AcNode | None = None
        self.term_lens: tuple[int, ...] = ()


class KeywordAutomaton:
    """Aho-Corasick automaton over characters, for contiguous-script matching.

    One pass over the text reports every keyword occurrence (as spans);
    :meth:`leftmost_longest` then reduces those to the non-overlapping
    convention used for counting.
    """

    def __init__(self, terms: frozenset[str] | set[str]) -> None:
        self._root = _AcNode()
        for term in terms:
            node = self._root
            for ch in term:
                node = node.children.setdefault(ch, _AcNode())
            node.term_lens = node.term_lens + (len(term),)
        self._build_failure_links()

    def _build_failure_links(self) -> None:
        root = self._root
        root.fail = root
        queue: deque[_AcNode] = deque()
        for child in root.children.values():
            child.fail = root
            queue.append(child)
        while queue:
            current = queue.popleft()
            for ch, child in current.children.items():
                fallback = current.fail
                while fallback is not root and ch not in fallback.children:
                    fallback = fallback.fail
                child.fail = fallback.children.get(ch, root)
                if child.fail is child:
                    child.fail = root
                # A keyword ending here may have shorter keywords as
                # suffixes; pull their lengths in through the failure link.
                child.term_lens = child.term_lens + child.fail.term_lens
                queue.append(child)

    def scan(self, text: str) -> dict[int, int]:
        """Map each match start position to the longest match end there."""
        root = self._root
        node = root
        best_end: dict[int, int] = {}
        for i, ch in enumerate(text):
            while node is not root and ch not in node.children:
                node = node.fail
            node = node.children.get(ch, root)
            for term_len in node.term_lens:
                start = i - term_len + 1
                end = i + 1
                if best_end.get(start, 0) < end:
                    best_end[start] = end
        return best_end

    def leftmost_longest(self, text: str) -> list[tuple[int, int]]:
        """Non-overlapping occurrence spans under the leftmost-longest rule."""
        best_end = self.scan(text)
        spans: list[tuple[int, int]] = []
        cursor = 0
        for start in sorted(best_end):
            if start < cursor:
                continue
            end = best_end[start]
            spans.append((start, end))
            cursor = end
        return spans


class _TokenMatcher:
    """Leftmost-longest matching of keyword token tuples over a token list.

    A keyword is split on whitespace into its token tuple; multi-word
    keywords match contiguous token runs.  Keywords whose tokens carry edge
    punctuation can never match, because document tokens have it stripped.
    """

    def __init__(self, terms: frozenset[str] | set[str]) -> None:
        self._by_first: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        for term in terms:
            parts = tuple(term.split())
            if not parts:
                continue
            self._by_first.setdefault(parts[0], []).append((parts, term))
        for candidates in self._by_first.values():
            candidates.sort(key=lambda item: len(item[0]), reverse=True)

    def count(self, tokens: list[str]) -> Counter[str]:
        counts: Counter[str] = Counter()
        i = 0
        n = len(tokens)
        while i < n:
            matched = False
            for parts, term in self._by_first.get(tokens[i], ()):
                k = len(parts)
                if i + k <= n and tuple(tokens[i:i + k]) == parts:
                    counts[term] += 1
                    i += k
                    matched = True
                    break
            if not matched:
                i += 1
        return counts


def match_keywords(
    text: str, lex: Lexicon, mode: SegmentationMode
) -> list[tuple[str, int]]:
    """Count non-overlapping keyword occurrences in one document.

    Returns ``(term, occurrence_count)`` pairs for every keyword with at
    least one occurrence, sorted lexicographically.
    """
    if not lex.terms:
        raise MedcorpusError("cannot match against an empty lexicon")
    if mode is SegmentationMode.CONTIGUOUS:
        normalized = segment(text, mode)
        automaton = KeywordAutomaton(lex.terms)
        counts: Counter[str] = Counter()
        for start, end in automaton.leftmost_longest(normalized):
            counts[normalized[start:end]] += 1
    else:
        tokens = segment(text, mode)
        counts = _TokenMatcher(lex.terms).count(tokens)
    return sorted(counts.items())


def compute_mkc(matched: list[tuple[str, int]]) -> int:
    """Number of distinct matched keywords."""
    return len({term for term, _ in matched})


def compute_dens(matched: list[tuple[str, int]], text_len: int) -> float:
    """Fraction of the text's characters covered by keyword occurrences."""
    if text_len < 0:
        raise MedcorpusError(f"text_len must be >= 0, got {text_len}")
    if text_len == 0:
        return 0.0
    covered = sum(len(term) * count for term, count in matched)
    return covered / text_len


def classify(text: str, lex: Lexicon, cfg: MatchConfig) -> FilterVerdict:
    """Decide whether one document is medical-related.

    Composes segmentation, keyword matching, and the two metrics; the
    document is kept iff ``mkc > t_c`` and ``dens > t_d`` (both strict).
    ``text_len`` is the character count of the normalized text.
    """
    if cfg.lang != lex.lang:
        raise MedcorpusError(
            f"config language {cfg.lang!r} does not match lexicon language {lex.lang!r}"
        )
    matched = match_keywords(text, lex, cfg.mode)
    text_len = len(normalize_text(text))
    mkc = compute_mkc(matched)
    dens = compute_dens(matched, text_len)
    keep = mkc > cfg.t_c and dens > cfg.t_d
    return FilterVerdict(
        mkc=mkc, dens=dens, keep=keep, matched=tuple(matched), text_len=text_len
    )


class DocumentClassifier:
    """Reusable classifier for one language: builds the matcher once.

    :func:`classify` rebuilds the keyword automaton per call, which is fine
    for single documents; streams should use this class.
    """

    def __init__(self, lex: Lexicon, cfg: MatchConfig) -> None:
        if cfg.lang != lex.lang:
            raise MedcorpusError(
                f"config language {cfg.lang!r} does not match lexicon language {lex.lang!r}"
            )
        self.lex = lex
        self.cfg = cfg
        if cfg.mode is SegmentationMode.CONTIGUOUS:
            self._automaton = KeywordAutomaton(lex.terms)
            self._token_matcher = None
        else:
            self._automaton = None
            self._token_matcher = _TokenMatcher(lex.terms)

    def classify(self, text: str) -> FilterVerdict:
        if self._automaton is not None:
            normalized = normalize_text(text)
            counts: Counter[str] = Counter()
            for start, end in self._automaton.leftmost_longest(normalized):
                counts[normalized[start:end]] += 1
            text_len = len(normalized)
        else:
            tokens = segment(text, SegmentationMode.SPACE_DELIMITED)
            counts = self._token_matcher.count(tokens)
            text_len = len(normalize_text(text))
        matched = sorted(counts.items())
        mkc = compute_mkc(matched)
        dens = compute_dens(matched, text_len)
        keep = mkc > self.cfg.t_c and dens > self.cfg.t_d
        return FilterVerdict(
            mkc=mkc, dens=dens, keep=keep, matched=tuple(matched), text_len=text_len
        )


def load_match_configs(path: str | Path | None = None) -> dict[str, MatchConfig]:
    """Load per-language thresholds from JSON (packaged defaults if no path).

    File format: ``{"en": {"mode": "space_delimited", "t_c": 5, "t_d": 0.04}, ...}``
    """
    if path is None:
        data = json.loads(
            resources.files("medcorpus.data").joinpath("filter_config.json").read_text("utf-8")
        )
    else:
        try:
            data = json.loads(Path(path).read_text("utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read filter config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"filter config {path} is not valid JSON: {exc}") from exc
    configs: dict[str, MatchConfig] = {}
    for lang, entry in data.items():
        try:
            configs[lang] = MatchConfig(
                lang=lang,
                mode=SegmentationMode(entry["mode"]),
                t_c=int(entry["t_c"]),
                t_d=float(entry["t_d"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad filter config entry for {lang!r}: {exc}") from exc
    return configs


def match_configs_to_json(configs: dict[str, MatchConfig]) -> dict:
    """Inverse of :func:`load_match_configs`, for round-trip checks."""
    return {
        lang: {"mode": cfg.mode.value, "t_c": cfg.t_c, "t_d": cfg.t_d}
        for lang, cfg in configs.items()
    }
