import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from medcorpus.lexicon import Lexicon, normalize_term

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def en_lexicon() -> Lexicon:
    terms = ["flu", "shot", "insulin", "diabetes", "heart attack", "vaccine",
             "tumor", "therapy", "kidney", "stroke"]
    return Lexicon(lang="en",
                   terms=frozenset(normalize_term(t) for t in terms),
                   raw_count=len(terms))


@pytest.fixture
def zh_lexicon() -> Lexicon:
    terms = ["糖尿病", "胰岛素", "高血压", "手术", "药", "治疗"]
    return Lexicon(lang="zh",
                   terms=frozenset(normalize_term(t) for t in terms),
                   raw_count=len(terms))


@pytest.fixture
def lexicon_dir() -> Path:
    return REPO_ROOT / "lexicons"


def make_lexicon(lang: str, terms: list[str]) -> Lexicon:
    return Lexicon(lang=lang,
                   terms=frozenset(normalize_term(t) for t in terms),
                   raw_count=len(terms))
