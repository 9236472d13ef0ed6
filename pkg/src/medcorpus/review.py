"""Annotation review service: serves ranking/verification tasks over HTTP
and collects submissions into an append-only log.

Model outputs are anonymized per case with a seeded shuffle, so every
annotator (human or judge model) sees the same label assignment for a
given case and exports stay comparable.  The log is one JSON line per
submission; restarting the service replays it, so accepted work survives
crashes.  A task that was fetched but never submitted becomes available
again after a restart.

All endpoints require the shared ``X-Review-Token`` header:

* ``GET  /api/tasks/next?annotator=<id>&kind=ranking|verification``
* ``POST /api/submissions``
* ``GET  /api/progress``
* ``GET  /api/export``
"""

from __future__ import annotations

import datetime as _dt
import random
import string
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from pydantic import BaseModel

from .bench import QAItem, load_qa_items
from .errors import DataFormatError
from .pipeline import dumps_canonical, read_jsonl
from .ratings import RankingRecord

SUBMISSION_KINDS = ("ranking", "verification")
VERDICTS = ("qualified", "unqualified")


class SubmissionIn(BaseModel):
    """Request body for ``POST /api/submissions``."""

    case_id: str
    annotator: str
    kind: str
    ranking: list[str] | None = None
    verdict: str | None = None


@dataclass(frozen=True)
class ReviewCase:
    """One annotation task: the question plus anonymized model outputs."""

    case_id: str
    lang: str
    question: str
    options: dict[str, str]
    answers: tuple[str, ...]
    rationale: str | None
    candidates: tuple[tuple[str, str], ...]
    permutation: dict[str, str]

    def public_json(self, kind: str) -> dict:
        """What the annotator may see: labels only, never model ids."""
        payload = {
            "case_id": self.case_id,
            "kind": kind,
            "lang": self.lang,
            "question": self.question,
            "options": dict(self.options),
            "answers": list(self.answers),
            "reference_rationale": self.rationale,
        }
        if kind == "ranking":
            payload["candidates"] = [{"label": label, "text": text}
                                     for label, text in self.candidates]
        return payload


@dataclass(frozen=True)
class Submission:
    case_id: str
    annotator: str
    kind: str
    ranking: tuple[str, ...] | None
    verdict: str | None
    timestamp: str

    def to_json(self) -> dict:
        return {"case_id": self.case_id, "annotator": self.annotator,
                "kind": self.kind,
                "ranking": list(self.ranking) if self.ranking else None,
                "verdict": self.verdict, "timestamp": self.timestamp}

    @classmethod
    def from_json(cls, obj: dict) -> "Submission":
        return cls(case_id=str(obj["case_id"]), annotator=str(obj["annotator"]),
                   kind=str(obj["kind"]),
                   ranking=tuple(obj["ranking"]) if obj.get("ranking") else None,
                   verdict=obj.get("verdict"), timestamp=str(obj.get("timestamp", "")))


def _anon_labels(count: int) -> list[str]:
    if count > 26:
        raise DataFormatError(f"too many models to label: {count}")
    return list(string.ascii_uppercase[:count])


def build_review_cases(
    items: list[QAItem],
    outputs: dict[str, dict[str, str]],
    seed: int,
) -> list[ReviewCase]:
    """Pair QA items with model outputs, anonymizing with a per-case shuffle.

    ``outputs`` maps case id -> model id -> generated text.  Every case
    must cover the same model set; the label permutation depends only on
    (seed, case id).
    """
    model_set: set[str] | None = None
    for case_id, per_model in outputs.items():
        if model_set is None:
            model_set = set(per_model)
        elif set(per_model) != model_set:
            raise DataFormatError(
                f"case {case_id}: model set {sorted(per_model)} differs from "
                f"{sorted(model_set)}")
    cases = []
    for item in items:
        per_model = outputs.get(item.id)
        if per_model is None:
            raise DataFormatError(f"no model outputs for case {item.id}")
        models = sorted(per_model)
        rng = random.Random(f"{seed}:{item.id}")
        rng.shuffle(models)
        labels = _anon_labels(len(models))
        cases.append(ReviewCase(
            case_id=item.id, lang=item.lang, question=item.question,
            options=dict(item.options), answers=tuple(sorted(item.answers)),
            rationale=item.rationale,
            candidates=tuple((label, per_model[model])
                             for label, model in zip(labels, models)),
            permutation={label: model for label, model in zip(labels, models)},
        ))
    return cases


def load_model_outputs(path: str | Path) -> dict[str, dict[str, str]]:
    """Read ``{"case_id","model","text"}`` JSON lines."""
    outputs: dict[str, dict[str, str]] = {}
    for obj in read_jsonl(path):
        try:
            case_id, model, text = str(obj["case_id"]), str(obj["model"]), str(obj["text"])
        except KeyError as exc:
            raise DataFormatError(f"model output record missing field {exc}") from exc
        if model in outputs.setdefault(case_id, {}):
            raise DataFormatError(f"duplicate output for case {case_id}, model {model}")
        outputs[case_id][model] = text
    return outputs


class ReviewStore:
    """Task assignment plus the append-only submission log."""

    def __init__(self, cases: list[ReviewCase], log_path: str | Path) -> None:
        self.cases = {case.case_id: case for case in cases}
        if len(self.cases) != len(cases):
            raise DataFormatError("duplicate case ids in review cases")
        self.case_order = [case.case_id for case in cases]
        self.log_path = Path(log_path)
        self.submissions: list[Submission] = []
        self._done: set[tuple[str, str, str]] = set()
        self._served: set[tuple[str, str, str]] = set()
        self._lock = threading.Lock()
        if self.log_path.exists():
            self._replay()

    @classmethod
    def from_files(cls, cases_file: str | Path, outputs_file: str | Path,
                   log_path: str | Path, seed: int) -> "ReviewStore":
        items = load_qa_items(cases_file)
        outputs = load_model_outputs(outputs_file)
        return cls(build_review_cases(items, outputs, seed), log_path)

    def _replay(self) -> None:
        for obj in read_jsonl(self.log_path):
            submission = Submission.from_json(obj)
            self._validate(submission)
            self._remember(submission)

    def _remember(self, submission: Submission) -> None:
        key = (submission.annotator, submission.kind, submission.case_id)
        self.submissions.append(submission)
        self._done.add(key)
        self._served.add(key)

    def _validate(self, submission: Submission) -> None:
        case = self.cases.get(submission.case_id)
        if case is None:
            raise DataFormatError(f"submission references unknown case {submission.case_id!r}")
        if submission.kind not in SUBMISSION_KINDS:
            raise DataFormatError(f"unknown submission kind {submission.kind!r}")
        if not submission.annotator:
            raise DataFormatError("submission has no annotator")
        if submission.kind == "ranking":
            labels = sorted(label for label, _ in case.candidates)
            if submission.ranking is None or sorted(submission.ranking) != labels:
                raise DataFormatError(
                    f"ranking must be a permutation of labels {labels}, "
                    f"got {submission.ranking}")
            if submission.verdict is not None:
                raise DataFormatError("ranking submissions carry no verdict")
        else:
            if submission.verdict not in VERDICTS:
                raise DataFormatError(
                    f"verification verdict must be one of {VERDICTS}, "
                    f"got {submission.verdict!r}")
            if submission.ranking is not None:
                raise DataFormatError("verification submissions carry no ranking")

    def next_task(self, annotator: str, kind: str) -> ReviewCase | None:
        """Hand out the first case this annotator has not seen for ``kind``."""
        if kind not in SUBMISSION_KINDS:
            raise DataFormatError(f"unknown task kind {kind!r}")
        if not annotator:
            raise DataFormatError("annotator id is empty")
        with self._lock:
            for case_id in self.case_order:
                key = (annotator, kind, case_id)
                if key in self._served:
                    continue
                self._served.add(key)
                return self.cases[case_id]
        return None

    def submit(self, submission: Submission) -> None:
        self._validate(submission)
        key = (submission.annotator, submission.kind, submission.case_id)
        with self._lock:
            if key in self._done:
                raise DataFormatError(
                    f"duplicate submission for case {submission.case_id!r} "
                    f"by {submission.annotator!r}")
            with open(self.log_path, "a", encoding="utf-8") as handle:
                handle.write(dumps_canonical(submission.to_json()))
                handle.write("\n")
            self._remember(submission)

    def progress(self) -> dict:
        counts: dict[str, dict[str, int]] = {}
        with self._lock:
            for submission in self.submissions:
                per = counts.setdefault(submission.annotator,
                                        {kind: 0 for kind in SUBMISSION_KINDS})
                per[submission.kind] += 1
        return {"total_cases": len(self.cases), "annotators": counts}

    def export(self) -> Iterator[dict]:
        """De-anonymize submissions, in log order.

        Ranking submissions come out as ranking records (mode ``human``)
        with the anonymous labels mapped back to model ids; verification
        submissions keep their verdict and use mode ``verification`` so
        ranking consumers can skip them.
        """
        with self._lock:
            submissions = list(self.submissions)
        for submission in submissions:
            case = self.cases[submission.case_id]
            if submission.kind == "ranking":
                record = RankingRecord(
                    case_id=submission.case_id, annotator=submission.annotator,
                    ordering=tuple(case.permutation[label] for label in submission.ranking),
                    mode="human")
                out = record.to_json()
                out["lang"] = case.lang
                yield out
            else:
                yield {"case_id": submission.case_id, "annotator": submission.annotator,
                       "mode": "verification", "verdict": submission.verdict,
                       "lang": case.lang}


def _utc_now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def create_app(store: ReviewStore, token: str):
    """FastAPI app exposing the review API.

    The shared token is enforced in middleware, before any routing or body
    validation, so an unauthenticated request never reaches a handler.
    """
    from fastapi import FastAPI, HTTPException, Response
    from fastapi.responses import JSONResponse, PlainTextResponse

    app = FastAPI(title="medcorpus review service")

    @app.middleware("http")
    async def require_token(request, call_next):
        if request.url.path.startswith("/api/"):
            if request.headers.get("X-Review-Token") != token:
                return JSONResponse({"detail": "missing or bad X-Review-Token"},
                                    status_code=401)
        return await call_next(request)

    @app.get("/api/tasks/next")
    def tasks_next(annotator: str, kind: str):
        try:
            case = store.next_task(annotator, kind)
        except DataFormatError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if case is None:
            return Response(status_code=204)
        return case.public_json(kind)

    @app.post("/api/submissions", status_code=201)
    def submissions(body: SubmissionIn):
        submission = Submission(
            case_id=body.case_id, annotator=body.annotator, kind=body.kind,
            ranking=tuple(body.ranking) if body.ranking else None,
            verdict=body.verdict, timestamp=_utc_now())
        try:
            store.submit(submission)
        except DataFormatError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"status": "accepted", "case_id": submission.case_id}

    @app.get("/api/progress")
    def progress():
        return store.progress()

    @app.get("/api/export", response_class=PlainTextResponse)
    def export():
        lines = [dumps_canonical(obj) for obj in store.export()]
        return "\n".join(lines) + ("\n" if lines else "")

    return app
