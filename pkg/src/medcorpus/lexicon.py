"""Per-language keyword lists and the text normalization used for matching.

A lexicon is a UTF-8 file with one keyword per line; blank lines and lines
starting with ``#`` are ignored.  Keywords and document text are pushed
through the same normalization (Unicode case-fold + NFC) so matching is
case- and composition-insensitive.  Matching case-insensitively is a fixed
package-wide convention, not a per-run option.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .errors import LexiconError

log = logging.getLogger(__name__)

#: Matching is case-insensitive everywhere; kept as a named constant so the
#: convention is visible in one place.
CASE_INSENSITIVE = True


def normalize_text(text: str) -> str:
    """Normalize document text: Unicode case-fold, then NFC.

    Positions are preserved apart from the usual fold/compose length
    changes; whitespace is left alone so substring matching stays aligned
    with the text.
    """
    return unicodedata.normalize("NFC", text.casefold())


def normalize_term(term: str) -> str:
    """Normalize a lexicon keyword.

    Case-fold + NFC like :func:`normalize_text`, plus edge whitespace is
    stripped and internal whitespace runs collapse to a single space so a
    multi-word keyword has one canonical spelling.
    """
    folded = normalize_text(term)
    return " ".join(folded.split())


def _has_non_punctuation(term: str) -> bool:
    return any(not unicodedata.category(ch).startswith("P") and not ch.isspace()
               for ch in term)


@dataclass(frozen=True)
class Lexicon:
    """An immutable, normalized keyword set for one language.

    ``raw_count`` is the number of usable keyword lines before
    deduplication, so ``raw_count - len(terms)`` is exactly the number of
    duplicates that were collapsed.
    """

    lang: str
    terms: frozenset[str]
    raw_count: int

    def __post_init__(self) -> None:
        for term in self.terms:
            if not term or term != normalize_term(term):
                raise LexiconError(f"lexicon {self.lang!r}: term {term!r} is not normalized")
            if not _has_non_punctuation(term):
                raise LexiconError(f"lexicon {self.lang!r}: term {term!r} is punctuation-only")
        if len(self.terms) > self.raw_count:
            raise LexiconError(f"lexicon {self.lang!r}: more terms than input lines")


@dataclass(frozen=True)
class ValidationReport:
    """Deterministic summary of a loaded lexicon."""

    lang: str
    count: int
    duplicates_removed: int
    min_len: int
    max_len: int


def load_lexicon(path: str | Path, lang: str) -> Lexicon:
    """Load and normalize one keyword file.

    Raises :class:`LexiconError` for an unreadable file, invalid UTF-8, or
    when no usable terms remain after normalization (an empty lexicon can
    never push the unique-keyword count over a threshold, so it is always
    a configuration mistake).
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon file {path}: {exc}") from exc
    try:
        content = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise LexiconError(f"lexicon file {path} is not valid UTF-8: {exc}") from exc

    terms: set[str] = set()
    raw_count = 0
    duplicates = 0
    unusable = 0
    for line in content.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        term = normalize_term(stripped)
        if not term or not _has_non_punctuation(term):
            unusable += 1
            continue
        raw_count += 1
        if term in terms:
            duplicates += 1
        else:
            terms.add(term)

    if duplicates:
        log.warning("lexicon %s: collapsed %d duplicate terms", path, duplicates)
    if unusable:
        log.warning("lexicon %s: skipped %d unusable lines", path, unusable)
    if not terms:
        raise LexiconError(f"lexicon file {path} has zero usable terms")
    return Lexicon(lang=lang, terms=frozenset(terms), raw_count=raw_count)


def validate_lexicon(lex: Lexicon) -> ValidationReport:
    """Summarize a lexicon: term count, dedup losses, term length range."""
    lengths = sorted(len(t) for t in lex.terms)
    return ValidationReport(
        lang=lex.lang,
        count=len(lex.terms),
        duplicates_removed=lex.raw_count - len(lex.terms),
        min_len=lengths[0],
        max_len=lengths[-1],
    )


def load_lexicon_dir(directory: str | Path, langs: list[str] | None = None) -> dict[str, Lexicon]:
    """Load ``<lang>.txt`` files from a directory, keyed by language code."""
    directory = Path(directory)
    if langs is None:
        paths = sorted(directory.glob("*.txt"))
        if not paths:
            raise LexiconError(f"no *.txt lexicon files in {directory}")
        return {p.stem: load_lexicon(p, p.stem) for p in paths}
    return {lang: load_lexicon(directory / f"{lang}.txt", lang) for lang in langs}
