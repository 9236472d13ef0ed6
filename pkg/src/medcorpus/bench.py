"""Multi-choice QA items: splitting, statistics, prompt building, and the
LLM-assisted rationale/topic workflows.

Items travel as JSON lines
``{"id","lang","question","options":{"A":...},"answers":["A"],"rationale",
"human_verified","topic"}``.  The train/val/test split shuffles by a hash
of ``(seed, item id)``, so the partition is a pure function of ids and
seed: reordering the input file cannot move an item between splits.
"""

from __future__ import annotations

import hashlib
import json
import string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from .errors import ConfigError, DataFormatError
from .llm import LlmClient
from .pipeline import tokenize

LANGUAGE_NAMES = {"en": "English", "es": "Spanish", "fr": "French",
                  "ru": "Russian", "zh": "Chinese", "ja": "Japanese"}


@dataclass(frozen=True)
class QAItem:
    """One multiple-choice question; option letters are contiguous from A."""

    id: str
    lang: str
    question: str
    options: dict[str, str]
    answers: frozenset[str]
    rationale: str | None = None
    human_verified: bool = False
    topic: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise DataFormatError("QA item id is empty")
        letters = sorted(self.options)
        expected = list(string.ascii_uppercase[:len(letters)])
        if len(letters) < 2:
            raise DataFormatError(f"item {self.id}: needs at least 2 options")
        if letters != expected:
            raise DataFormatError(
                f"item {self.id}: option letters {letters} are not contiguous from A")
        if not self.answers:
            raise DataFormatError(f"item {self.id}: no gold answers")
        if not self.answers <= set(letters):
            raise DataFormatError(
                f"item {self.id}: answers {sorted(self.answers)} outside options {letters}")

    @classmethod
    def from_json(cls, obj: dict) -> "QAItem":
        try:
            return cls(
                id=str(obj["id"]), lang=str(obj["lang"]), question=str(obj["question"]),
                options=dict(obj["options"]), answers=frozenset(obj["answers"]),
                rationale=obj.get("rationale"),
                human_verified=bool(obj.get("human_verified", False)),
                topic=obj.get("topic"),
            )
        except KeyError as exc:
            raise DataFormatError(f"QA item missing field {exc}") from exc

    def to_json(self) -> dict:
        return {"id": self.id, "lang": self.lang, "question": self.question,
                "options": dict(self.options), "answers": sorted(self.answers),
                "rationale": self.rationale, "human_verified": self.human_verified,
                "topic": self.topic}


@dataclass(frozen=True)
class SplitSpec:
    """Deterministic train/val/test ratios with a shuffle seed."""

    ratios: tuple[int, int, int] = (8, 1, 1)
    seed: int = 42

    def __post_init__(self) -> None:
        if len(self.ratios) != 3 or any(r <= 0 for r in self.ratios):
            raise ConfigError(f"ratios must be three positive integers, got {self.ratios}")


def _shuffle_key(seed: int, item_id: str) -> str:
    return hashlib.sha256(f"{seed}:{item_id}".encode("utf-8")).hexdigest()


def split_dataset(
    items: Sequence[QAItem],
    spec: SplitSpec = SplitSpec(),
) -> tuple[list[QAItem], list[QAItem], list[QAItem]]:
    """Partition items into (train, val, test) by seeded shuffle + floor cuts.

    Cut points are ``floor(n * a / total)`` and ``floor(n * (a + b) / total)``
    over the hash-shuffled order.  Every item lands in exactly one split.
    """
    if not items:
        raise DataFormatError("cannot split an empty item list")
    ids = [item.id for item in items]
    if len(set(ids)) != len(ids):
        raise DataFormatError("duplicate item ids in split input")
    ordered = sorted(items, key=lambda item: (_shuffle_key(spec.seed, item.id), item.id))
    n = len(ordered)
    a, b, _ = spec.ratios
    total = sum(spec.ratios)
    cut1 = n * a // total
    cut2 = n * (a + b) // total
    return list(ordered[:cut1]), list(ordered[cut1:cut2]), list(ordered[cut2:])


def dataset_stats(
    items: Sequence[QAItem],
    tokenizer: str | Callable[[str], list[str]] = "default",
) -> dict:
    """Counts, single/multi-answer proportions, and average token lengths."""
    def bucket_stats(subset: Sequence[QAItem]) -> dict:
        n = len(subset)
        single = sum(1 for item in subset if len(item.answers) == 1)
        q_tokens = [len(tokenize(item.question, tokenizer)) for item in subset]
        o_tokens = [sum(len(tokenize(text, tokenizer)) for text in item.options.values())
                    for item in subset]
        r_tokens = [len(tokenize(item.rationale, tokenizer))
                    for item in subset if item.rationale]
        def avg(xs: list[int]) -> float:
            return sum(xs) / len(xs) if xs else 0.0
        return {
            "qa_pairs": n,
            "prop_single_answer": single / n if n else 0.0,
            "prop_multi_answer": (n - single) / n if n else 0.0,
            "avg_question_tokens": avg(q_tokens),
            "avg_option_tokens": avg(o_tokens),
            "avg_rationale_tokens": avg(r_tokens),
            "items_with_rationale": len(r_tokens),
        }

    report = bucket_stats(items)
    by_lang: dict[str, list[QAItem]] = {}
    for item in items:
        by_lang.setdefault(item.lang, []).append(item)
    report["per_language"] = {lang: bucket_stats(subset)
                              for lang, subset in sorted(by_lang.items())}
    return report


PROMPT_TEMPLATES: dict[str, str] = {
    "zero_shot_choice": (
        "You're a {language} doctor, make a choice based on the question and options. "
        "You need to answer the letter of the option instead of answering the entire "
        "option or anything else. Options may not be unique."
    ),
    "zero_shot_rationale": (
        "You're a {language} doctor, make a choice based on the question and options "
        "in {language}. You should solve this step-by-step. You must first give the "
        "reason in {language} for your choice ends with '[End]'. Then you must give "
        "the answer's letter directly again. The template is like "
        "'Reason:... [End] Answer: A, B'"
    ),
    "ft_choice": (
        "You're a {language} doctor, kindly address the medical queries according to "
        "the patient's account. Answer with the best option directly."
    ),
    "ft_rationale": (
        "You're a {language} doctor, kindly address the medical queries according to "
        "the patient's account in {language}. Let’s solve this step-by-step.  You "
        "should first give the reason in {language} for your choice. Then you should "
        "give the right answer index of the question."
    ),
    "rationale_gen": (
        "You're a {language} doctor. Analyze the reasons behind choosing this "
        "particular option in 100 words for the following question in {language}."
    ),
    "topic_classify": (
        "You're a {language} doctor, choose one subject out of "
        "{medical_subjects_string}, which is most relevant to the following question. "
    ),
    "judge_ranking": (
        "Please act as an impartial judge and evaluate the quality of the responses "
        "provided by six\nAI assistants to the user question displayed below. You "
        "should choose the assistant that\nfollows the user’s instructions and "
        "answers the user’s questions better. Your evaluation\nshould consider "
        "factors such as the helpfulness, relevance, accuracy, depth, creativity,"
        "\nand level of detail of their responses. Begin your evaluation by comparing "
        "the six\nresponses. Avoid any position biases and ensure that the\norder in "
        "which the responses were presented does not influence your decision. Do not "
        "allow\nthe length of the responses to influence your evaluation. Do not "
        "favor certain names of\nthe assistants. Be as objective as possible. Your "
        "output is the ordering of these six models from high to low. Output your\n"
        "final verdict from high to low by strictly following this format: Model A, "
        "Model B, Model C, Model D, Model E, and Model F."
    ),
}

PROMPT_KINDS = tuple(PROMPT_TEMPLATES)


def _qa_block(item: QAItem) -> str:
    lines = ["Question:", item.question, "Options:"]
    lines.extend(f"{letter}. {item.options[letter]}" for letter in sorted(item.options))
    return "\n".join(lines)


def build_prompt(
    kind: str,
    lang: str,
    item: QAItem,
    extras: dict[str, str] | None = None,
) -> str:
    """Render one instruction template plus the question/options block.

    ``lang`` is a language *name* ("French"), substituted into the
    template verbatim.  ``topic_classify`` requires ``extras["subjects"]``;
    ``judge_ranking`` requires ``extras["responses"]`` (the pre-rendered,
    anonymized model outputs).  ``rationale_gen`` appends the gold answer,
    since the rationale must justify the known correct option.
    """
    extras = extras or {}
    if kind not in PROMPT_TEMPLATES:
        raise DataFormatError(f"unknown prompt kind {kind!r}")
    template = PROMPT_TEMPLATES[kind]
    if kind == "topic_classify":
        if "subjects" not in extras:
            raise DataFormatError("topic_classify needs extras['subjects']")
        template = template.replace("{medical_subjects_string}", extras["subjects"])
    instruction = template.replace("{language}", lang)
    parts = [instruction, _qa_block(item)]
    if kind == "rationale_gen":
        parts.append("Answer: " + ", ".join(sorted(item.answers)))
    if kind == "judge_ranking":
        if "responses" not in extras:
            raise DataFormatError("judge_ranking needs extras['responses']")
        parts.append(extras["responses"])
    return "\n\n".join(parts)


@dataclass(frozen=True)
class TopicList:
    """Closed set of topic names plus the fallback used when classification
    fails."""

    names: tuple[str, ...]
    fallback: str = "None"

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ConfigError("topic names are not unique")
        if not self.fallback:
            raise ConfigError("fallback topic name is empty")

    def subjects_string(self) -> str:
        return ", ".join(self.names)


def default_topic_list() -> TopicList:
    data = json.loads(
        resources.files("medcorpus.data").joinpath("topics.json").read_text("utf-8"))
    return TopicList(names=tuple(data["topics"]), fallback=data["fallback"])


def load_topic_list(path: str | Path) -> TopicList:
    try:
        data = json.loads(Path(path).read_text("utf-8"))
        return TopicList(names=tuple(data["topics"]), fallback=data.get("fallback", "None"))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad topic list file {path}: {exc}") from exc


def classify_topic(
    item: QAItem,
    client: LlmClient,
    topics: TopicList,
    max_attempts: int = 4,
) -> str:
    """Ask the client for the item's topic; fall back after repeated misses.

    Only exact members of the topic list are accepted.  After
    ``max_attempts`` non-member answers the fallback name is returned.
    Transport failures raise and are therefore distinguishable from the
    fallback, which is a valid outcome.
    """
    language = LANGUAGE_NAMES.get(item.lang, item.lang)
    prompt = build_prompt("topic_classify", language, item,
                          extras={"subjects": topics.subjects_string()})
    valid = set(topics.names)
    for _ in range(max_attempts):
        answer = client.complete(prompt).strip()
        if answer in valid:
            return answer
    return topics.fallback


def generate_rationale(item: QAItem, client: LlmClient) -> QAItem:
    """Generate an (unverified) rationale for the item's gold answer.

    Returns a copy with ``rationale`` set and ``human_verified`` False;
    verification is a separate human step.
    """
    if not item.answers:
        raise DataFormatError(f"item {item.id}: cannot explain without gold answers")
    language = LANGUAGE_NAMES.get(item.lang, item.lang)
    prompt = build_prompt("rationale_gen", language, item)
    text = client.complete(prompt)
    return replace(item, rationale=text, human_verified=False)


def generate_rationales(
    items: Sequence[QAItem],
    client: LlmClient,
    max_workers: int = 1,
) -> list[QAItem]:
    """Order-preserving batch rationale generation with an in-flight cap."""
    if max_workers <= 1:
        return [generate_rationale(item, client) for item in items]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda item: generate_rationale(item, client), items))


def load_qa_items(path: str | Path) -> list[QAItem]:
    from .pipeline import read_jsonl
    return [QAItem.from_json(obj) for obj in read_jsonl(path)]
