"""Stream documents through the filter, sample kept ones, cut token chunks.

Records travel as JSON lines ``{"id","lang","text","source","meta"}``;
annotated output adds ``{"mkc","dens","keep"}``.  Records that cannot be
classified (unknown language, malformed fields, duplicate id) go to a
rejects sink with a reason instead of being dropped.
"""

from __future__ import annotations

import json
import random
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .errors import ConfigError, DataFormatError
from .filtering import DocumentClassifier, MatchConfig
from .lexicon import Lexicon

RECORD_SOURCES = frozenset({"filtered_web", "textbook", "website", "open_dataset"})


@dataclass(frozen=True)
class CorpusRecord:
    """One raw document with language tag and source metadata."""

    id: str
    lang: str
    text: str
    source: str
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj: dict) -> "CorpusRecord":
        if not isinstance(obj, dict):
            raise DataFormatError(f"record must be a JSON object, got {type(obj).__name__}")
        for name in ("id", "lang", "text"):
            if not isinstance(obj.get(name), str):
                raise DataFormatError(f"record field {name!r} missing or not a string")
        if not obj["id"]:
            raise DataFormatError("record id is empty")
        source = obj.get("source", "filtered_web")
        if source not in RECORD_SOURCES:
            raise DataFormatError(f"unknown record source {source!r}")
        meta = obj.get("meta", {})
        if not isinstance(meta, dict):
            raise DataFormatError("record field 'meta' must be an object")
        return cls(id=obj["id"], lang=obj["lang"], text=obj["text"], source=source, meta=meta)

    def to_json(self) -> dict:
        return {"id": self.id, "lang": self.lang, "text": self.text,
                "source": self.source, "meta": self.meta}


# Hiragana, katakana, CJK unified (+ext A) and compatibility ideographs:
# scripts the default tokenizer splits per character.
_CJK = "぀-ヿ㐀-䶿一-鿿豈-﫿"
_DEFAULT_TOKEN_RE = re.compile(f"[{_CJK}]|[^\\s{_CJK}]+")


def default_tokenize(text: str) -> list[str]:
    """Whitespace words, except CJK characters become one token each."""
    return _DEFAULT_TOKEN_RE.findall(text)


class VocabTokenizer:
    """Greedy longest-match tokenizer over a vocabulary file.

    The vocabulary is one token per line.  At each position the longest
    vocabulary entry wins; characters not covered by the vocabulary become
    single-character tokens.  Whitespace separates greedy runs and is never
    emitted.
    """

    def __init__(self, path: str | Path) -> None:
        path = Path(path)
        try:
            lines = path.read_text("utf-8").splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read vocabulary file {path}: {exc}") from exc
        self.vocab = {line for line in (l.strip() for l in lines) if line}
        if not self.vocab:
            raise ConfigError(f"vocabulary file {path} is empty")
        self.max_len = max(len(tok) for tok in self.vocab)

    def __call__(self, text: str) -> list[str]:
        tokens: list[str] = []
        for piece in text.split():
            i = 0
            while i < len(piece):
                for k in range(min(self.max_len, len(piece) - i), 0, -1):
                    if piece[i:i + k] in self.vocab:
                        tokens.append(piece[i:i + k])
                        i += k
                        break
                else:
                    tokens.append(piece[i])
                    i += 1
        return tokens


def get_tokenizer(spec: str) -> Callable[[str], list[str]]:
    """Resolve a tokenizer handle: ``default`` or ``vocab:<path>``."""
    if spec == "default":
        return default_tokenize
    if spec.startswith("vocab:"):
        return VocabTokenizer(spec[len("vocab:"):])
    raise ConfigError(f"unknown tokenizer {spec!r}")


def tokenize(text: str, tokenizer: str | Callable[[str], list[str]] = "default") -> list[str]:
    if callable(tokenizer):
        return tokenizer(text)
    return get_tokenizer(tokenizer)(text)


class FilterStats:
    """Per-language counters for one filter run.

    Counters only ever increase while a run is active.  The remain ratio is
    reported over documents, characters, and tokens alike, since "how much
    survived" is ambiguous otherwise.
    """

    _FIELDS = ("documents_in", "documents_kept", "characters_in",
               "characters_kept", "tokens_in", "tokens_kept")

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.per_language: dict[str, dict[str, int]] = {}

    def record(self, lang: str, kept: bool, characters: int, tokens: int) -> None:
        with self._lock:
            bucket = self.per_language.setdefault(
                lang, {name: 0 for name in self._FIELDS})
            bucket["documents_in"] += 1
            bucket["characters_in"] += characters
            bucket["tokens_in"] += tokens
            if kept:
                bucket["documents_kept"] += 1
                bucket["characters_kept"] += characters
                bucket["tokens_kept"] += tokens

    @staticmethod
    def _ratios(bucket: dict[str, int]) -> dict:
        out: dict = dict(bucket)
        for unit in ("documents", "characters", "tokens"):
            total = bucket[f"{unit}_in"]
            kept = bucket[f"{unit}_kept"]
            out[f"remain_ratio_{unit}"] = kept / total if total else 0.0
        out["remain_ratio"] = out["remain_ratio_documents"]
        return out

    def to_json(self) -> dict:
        with self._lock:
            per_lang = {lang: self._ratios(bucket)
                        for lang, bucket in sorted(self.per_language.items())}
            total = {name: 0 for name in self._FIELDS}
            for bucket in self.per_language.values():
                for name in self._FIELDS:
                    total[name] += bucket[name]
        return {"per_language": per_lang, "total": self._ratios(total)}


def filter_stream(
    records: Iterable[dict],
    lexicons: dict[str, Lexicon],
    configs: dict[str, MatchConfig],
    stats: FilterStats,
    rejects: Callable[[dict, str], None] | None = None,
    tokenizer: str | Callable[[str], list[str]] = "default",
    threads: int = 1,
) -> Iterator[dict]:
    """Classify a stream of record dicts, yielding annotated copies.

    Output order matches input order.  ``stats`` is filled in as records
    pass through and is complete once the iterator is exhausted.  Rejected
    records are passed to ``rejects(record_dict, reason)``.
    """
    tok = get_tokenizer(tokenizer) if isinstance(tokenizer, str) else tokenizer
    classifiers: dict[str, DocumentClassifier] = {}
    for lang in configs:
        if lang in lexicons:
            classifiers[lang] = DocumentClassifier(lexicons[lang], configs[lang])

    def reject(obj: dict, reason: str) -> None:
        if rejects is not None:
            rejects(obj, reason)

    seen_ids: set[str] = set()

    def parse(obj: dict) -> CorpusRecord | None:
        try:
            record = CorpusRecord.from_json(obj)
        except DataFormatError as exc:
            reject(obj, str(exc))
            return None
        if record.id in seen_ids:
            reject(obj, f"duplicate record id {record.id!r}")
            return None
        seen_ids.add(record.id)
        if record.lang not in classifiers:
            reject(obj, f"no lexicon/config for language {record.lang!r}")
            return None
        return record

    def process(record: CorpusRecord) -> dict:
        verdict = classifiers[record.lang].classify(record.text)
        stats.record(record.lang, verdict.keep, len(record.text),
                     len(tok(record.text)))
        out = record.to_json()
        out.update(mkc=verdict.mkc, dens=verdict.dens, keep=verdict.keep)
        return out

    parsed = (record for obj in records if (record := parse(obj)) is not None)
    if threads <= 1:
        for record in parsed:
            yield process(record)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(process, parsed, chunksize=16)


def sample_for_review(
    records: Iterable[dict],
    n: int = 100,
    seed: int = 42,
) -> dict[str, list[dict]]:
    """Uniform per-language reservoir sample of kept records.

    Returns ``min(n, kept_count)`` records per language.  Records carrying a
    ``keep`` field are sampled only when it is true; records without one are
    all considered kept.  Deterministic for a fixed seed regardless of how
    languages interleave, because each language gets its own generator.
    """
    if n < 1:
        raise DataFormatError(f"sample size must be >= 1, got {n}")
    reservoirs: dict[str, list[dict]] = {}
    counts: dict[str, int] = {}
    rngs: dict[str, random.Random] = {}
    for obj in records:
        if not obj.get("keep", True):
            continue
        lang = obj.get("lang", "unknown")
        if lang not in reservoirs:
            reservoirs[lang] = []
            counts[lang] = 0
            rngs[lang] = random.Random(f"{seed}:{lang}")
        counts[lang] += 1
        reservoir = reservoirs[lang]
        if len(reservoir) < n:
            reservoir.append(obj)
        else:
            j = rngs[lang].randrange(counts[lang])
            if j < n:
                reservoir[j] = obj
    return reservoirs


@dataclass(frozen=True)
class TextChunk:
    """A fixed-size token window of one document."""

    doc_id: str
    index: int
    tokens: tuple[str, ...]
    start_offset: int

    def to_json(self) -> dict:
        return {"doc_id": self.doc_id, "index": self.index,
                "start_offset": self.start_offset, "tokens": list(self.tokens)}


def chunk_document(
    tokens: list[str],
    size: int = 2048,
    overlap: int = 512,
    doc_id: str = "",
) -> list[TextChunk]:
    """Cut a token sequence into overlapping windows.

    Chunk ``i`` starts at ``i * (size - overlap)``.  Every chunk has
    ``size`` tokens except the last, which ends exactly at the final token.
    A tail already covered by the previous chunk produces no extra chunk,
    so full chunks share exactly ``overlap`` tokens with their successor
    and every token is covered exactly once or twice.
    """
    if size <= overlap or overlap < 0:
        raise DataFormatError(f"need size > overlap >= 0, got size={size} overlap={overlap}")
    chunks: list[TextChunk] = []
    if not tokens:
        return chunks
    step = size - overlap
    start = 0
    while True:
        end = min(start + size, len(tokens))
        chunks.append(TextChunk(doc_id=doc_id, index=len(chunks),
                                tokens=tuple(tokens[start:end]), start_offset=start))
        if end >= len(tokens):
            return chunks
        start += step


def read_jsonl(path: str | Path) -> Iterator[dict]:
    """Parse a JSON-lines file, skipping blank lines."""
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc


def write_jsonl(path: str | Path, objects: Iterable[dict]) -> int:
    """Write objects as canonical JSON lines; returns the line count."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for obj in objects:
            handle.write(dumps_canonical(obj))
            handle.write("\n")
            count += 1
    return count


def dumps_canonical(obj: dict) -> str:
    """Serialize with sorted keys so identical data gives identical bytes."""
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
