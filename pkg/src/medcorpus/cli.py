"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error.  Subcommands:
``filter``, ``chunk``, ``sample``, ``stats``, ``ocr-order``, ``split``,
``prompts``, ``score``, ``correlate``, ``review-serve``, ``review-export``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench, metrics, ocr, pipeline, ratings, review
from .errors import MedcorpusError
from .filtering import load_match_configs
from .lexicon import load_lexicon_dir

log = logging.getLogger("medcorpus")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for data errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="medcorpus", description=__doc__)
    parser.add_argument("--quiet", action="store_true", help="suppress progress logging")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--config", default=None,
                        help="threshold config JSON (default: packaged table)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="classify a JSONL record stream")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--config", dest="sub_config", default=None)
    p.add_argument("--lexicons", required=True, help="directory of <lang>.txt files")
    p.add_argument("--ordered", action="store_true",
                   help="emit results in input order (always true here)")
    p.add_argument("--rejects", default=None, help="path for rejected records")
    p.add_argument("--stats", dest="stats_out", default=None,
                   help="also write the stats JSON here (stdout regardless)")
    p.add_argument("--threads", dest="sub_threads", type=int, default=None)
    p.add_argument("--tokenizer", default="default")

    p = sub.add_parser("chunk", help="cut documents into overlapping token chunks")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--size", type=int, default=2048)
    p.add_argument("--overlap", type=int, default=512)
    p.add_argument("--tokenizer", default="default")

    p = sub.add_parser("sample", help="per-language reservoir sample of kept records")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", dest="sub_seed", type=int, default=None)
    p.add_argument("--out", dest="output", default=None, help="default: stdout")

    p = sub.add_parser("stats", help="QA dataset statistics")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--tokenizer", default="default")

    p = sub.add_parser("ocr-order", help="reading order for OCR box lists")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--exclude", default="", help='page ranges, e.g. "1-3,250-260"')

    p = sub.add_parser("split", help="deterministic train/val/test split")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--seed", dest="sub_seed", type=int, default=None)
    p.add_argument("--ratios", default="8:1:1")
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("prompts", help="render instruction prompts for QA items")
    p.add_argument("--kind", required=True, choices=bench.PROMPT_KINDS)
    p.add_argument("--lang", required=True, help='language name, e.g. "French"')
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--subjects-file", default=None,
                   help="topic list JSON for topic_classify (default: packaged)")
    p.add_argument("--outputs", default=None,
                   help="model outputs JSONL, required for judge_ranking")
    p.add_argument("--seed", dest="sub_seed", type=int, default=None)
    p.add_argument("--out", dest="output", default=None, help="default: stdout")

    p = sub.add_parser("score", help="similarity metrics for candidate/reference pairs")
    p.add_argument("--cand", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--metrics", default="bleu1,bleu,rouge1,rouge2,rougeL",
                   help="comma list: bleu1..bleu4,bleu,rouge1,rouge2,rougeL,embed")
    p.add_argument("--idf-corpus", default=None, help="JSONL reference docs for idf")
    p.add_argument("--embeddings", default=None, help="JSONL token embeddings by id")
    p.add_argument("--smoothing", choices=["none", "add-epsilon"], default="none")
    p.add_argument("--recall-side", choices=["candidate", "reference"],
                   default="candidate")
    p.add_argument("--tokenizer", default="default")
    p.add_argument("--per-pair", action="store_true", help="include per-pair scores")

    p = sub.add_parser("correlate", help="Kendall tau between metrics and human ratings")
    p.add_argument("--rankings", required=True)
    p.add_argument("--metric-scores", required=True,
                   help='JSONL {"case_id","model","metric","score"}')
    p.add_argument("--per-language", action="store_true")

    p = sub.add_parser("review-serve", help="run the annotation review service")
    p.add_argument("--cases", required=True, help="QA items JSONL")
    p.add_argument("--outputs", required=True, help="model outputs JSONL")
    p.add_argument("--port", type=int, default=841)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--seed", dest="sub_seed", type=int, default=None)
    p.add_argument("--store", default="review_log.jsonl")
    p.add_argument("--token", required=True, help="shared X-Review-Token value")

    p = sub.add_parser("review-export", help="de-anonymize the submission log")
    p.add_argument("--cases", required=True)
    p.add_argument("--outputs", required=True)
    p.add_argument("--seed", dest="sub_seed", type=int, default=None)
    p.add_argument("--store", default="review_log.jsonl")
    p.add_argument("--out", dest="output", default=None, help="default: stdout")

    return parser


def _emit(lines: list[str], output: str | None) -> None:
    text = "\n".join(lines) + ("\n" if lines else "")
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _cmd_filter(args) -> int:
    configs = load_match_configs(args.sub_config or args.config)
    lexicons = load_lexicon_dir(args.lexicons)
    stats = pipeline.FilterStats()
    rejects_handle = open(args.rejects, "w", encoding="utf-8") if args.rejects else None
    rejected = 0

    def reject(obj: dict, reason: str) -> None:
        nonlocal rejected
        rejected += 1
        log.warning("rejected record: %s", reason)
        if rejects_handle is not None:
            rejects_handle.write(pipeline.dumps_canonical(
                {"record": obj, "reason": reason}) + "\n")

    threads = args.sub_threads if args.sub_threads is not None else args.threads
    try:
        annotated = pipeline.filter_stream(
            pipeline.read_jsonl(args.input), lexicons, configs, stats,
            rejects=reject, tokenizer=args.tokenizer, threads=threads)
        written = pipeline.write_jsonl(args.output, annotated)
    finally:
        if rejects_handle is not None:
            rejects_handle.close()
    report = stats.to_json()
    report["rejected"] = rejected
    text = json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True)
    if args.stats_out:
        Path(args.stats_out).write_text(text + "\n", encoding="utf-8")
    print(text)
    log.info("filtered %d records (%d rejected)", written, rejected)
    return 0


def _cmd_chunk(args) -> int:
    tokenizer = pipeline.get_tokenizer(args.tokenizer)

    def chunk_all():
        for obj in pipeline.read_jsonl(args.input):
            doc_id = str(obj.get("id", ""))
            tokens = tokenizer(str(obj.get("text", "")))
            for chunk in pipeline.chunk_document(tokens, size=args.size,
                                                 overlap=args.overlap, doc_id=doc_id):
                yield chunk.to_json()

    written = pipeline.write_jsonl(args.output, chunk_all())
    log.info("wrote %d chunks", written)
    return 0


def _cmd_sample(args) -> int:
    seed = args.sub_seed if args.sub_seed is not None else args.seed
    reservoirs = pipeline.sample_for_review(
        pipeline.read_jsonl(args.input), n=args.n, seed=seed)
    lines = [pipeline.dumps_canonical(obj)
             for lang in sorted(reservoirs) for obj in reservoirs[lang]]
    _emit(lines, args.output)
    return 0


def _cmd_stats(args) -> int:
    items = bench.load_qa_items(args.input)
    report = bench.dataset_stats(items, tokenizer=args.tokenizer)
    print(json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True))
    return 0


def _cmd_ocr_order(args) -> int:
    boxes = [ocr.TextBox.from_json(obj) for obj in pipeline.read_jsonl(args.input)]
    pages = ocr.exclude_pages(ocr.group_boxes_by_page(boxes), args.exclude)
    lines = []
    for page in sorted(pages):
        text = " ".join(ocr.reading_order(pages[page]))
        lines.append(pipeline.dumps_canonical({"page": page, "text": text}))
    _emit(lines, args.output)
    return 0


def _cmd_split(args) -> int:
    try:
        ratios = tuple(int(part) for part in args.ratios.split(":"))
    except ValueError:
        raise MedcorpusError(f"bad ratios {args.ratios!r}; expected like 8:1:1")
    seed = args.sub_seed if args.sub_seed is not None else args.seed
    items = bench.load_qa_items(args.input)
    spec = bench.SplitSpec(ratios=ratios, seed=seed)
    train, val, test = bench.split_dataset(items, spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, subset in (("train", train), ("val", val), ("test", test)):
        pipeline.write_jsonl(out_dir / f"{name}.jsonl",
                             (item.to_json() for item in subset))
    print(json.dumps({"train": len(train), "val": len(val), "test": len(test)}))
    return 0


def _cmd_prompts(args) -> int:
    items = bench.load_qa_items(args.input)
    extras: dict[str, str] = {}
    if args.kind == "topic_classify":
        topics = (bench.load_topic_list(args.subjects_file)
                  if args.subjects_file else bench.default_topic_list())
        extras["subjects"] = topics.subjects_string()
    responses_by_case: dict[str, str] = {}
    if args.kind == "judge_ranking":
        if not args.outputs:
            raise MedcorpusError("judge_ranking prompts need --outputs")
        seed = args.sub_seed if args.sub_seed is not None else args.seed
        outputs = review.load_model_outputs(args.outputs)
        for case in review.build_review_cases(items, outputs, seed):
            responses_by_case[case.case_id] = "\n\n".join(
                f"Model {label}: {text}" for label, text in case.candidates)
    lines = []
    for item in items:
        if args.kind == "judge_ranking":
            extras = {"responses": responses_by_case[item.id]}
        prompt = bench.build_prompt(args.kind, args.lang, item, extras)
        lines.append(pipeline.dumps_canonical({"id": item.id, "prompt": prompt}))
    _emit(lines, args.output)
    return 0


def _load_scored_texts(path: str, tokenizer: str) -> list[dict]:
    rows = []
    for obj in pipeline.read_jsonl(path):
        tokens = (list(obj["tokens"]) if "tokens" in obj
                  else pipeline.tokenize(str(obj.get("text", "")), tokenizer))
        rows.append({"id": str(obj.get("id", len(rows))),
                     "lang": str(obj.get("lang", "unknown")), "tokens": tokens})
    return rows


def _load_embeddings(path: str) -> dict[str, tuple[list[str], np.ndarray]]:
    table = {}
    for obj in pipeline.read_jsonl(path):
        table[str(obj["id"])] = (list(obj["tokens"]),
                                 np.asarray(obj["vectors"], dtype=float))
    return table


def _cmd_score(args) -> int:
    wanted = [name.strip() for name in args.metrics.split(",") if name.strip()]
    known = {"bleu1", "bleu2", "bleu3", "bleu4", "bleu",
             "rouge1", "rouge2", "rougeL", "embed"}
    unknown = sorted(set(wanted) - known)
    if unknown:
        raise MedcorpusError(f"unknown metrics: {unknown}")
    cands = _load_scored_texts(args.cand, args.tokenizer)
    refs = _load_scored_texts(args.ref, args.tokenizer)
    if len(cands) != len(refs):
        raise MedcorpusError(
            f"candidate/reference line counts differ: {len(cands)} vs {len(refs)}")
    idf = None
    embeddings = None
    if "embed" in wanted:
        if not args.idf_corpus or not args.embeddings:
            raise MedcorpusError("embed metric needs --idf-corpus and --embeddings")
        idf = metrics.compute_idf(
            row["tokens"] for row in _load_scored_texts(args.idf_corpus, args.tokenizer))
        embeddings = _load_embeddings(args.embeddings)

    def one(name: str, cand: dict, ref: dict) -> float:
        pair = metrics.TokenizedPair.of(cand["tokens"], ref["tokens"], cand["lang"])
        if name.startswith("bleu") and name != "bleu":
            return metrics.bleu_n(pair, int(name[4:]), smoothing=args.smoothing)
        if name == "bleu":
            return metrics.bleu(pair, smoothing=args.smoothing)
        if name == "rouge1":
            return metrics.rouge_n(pair, 1)["f1"]
        if name == "rouge2":
            return metrics.rouge_n(pair, 2)["f1"]
        if name == "rougeL":
            return metrics.rouge_l(pair)["f1"]
        cand_tokens, cand_vecs = embeddings[cand["id"]]
        ref_tokens, ref_vecs = embeddings[ref["id"]]
        return metrics.embed_score(cand_tokens, cand_vecs, ref_tokens, ref_vecs,
                                   idf, recall_side=args.recall_side)["f1"]

    per_pair: list[dict] = []
    sums: dict[str, dict[str, float]] = {name: {} for name in wanted}
    counts: dict[str, int] = {}
    for cand, ref in zip(cands, refs):
        lang = cand["lang"]
        counts[lang] = counts.get(lang, 0) + 1
        row = {"id": cand["id"], "lang": lang}
        for name in wanted:
            value = one(name, cand, ref)
            row[name] = value
            sums[name][lang] = sums[name].get(lang, 0.0) + value
        per_pair.append(row)
    report: dict = {"pairs": len(per_pair), "metrics": {}}
    for name in wanted:
        per_language = {lang: sums[name][lang] / counts[lang] for lang in sorted(counts)}
        report["metrics"][name] = {
            "per_language": per_language,
            "average": (sum(per_language.values()) / len(per_language)
                        if per_language else 0.0),
        }
    if args.per_pair:
        report["per_pair"] = per_pair
    print(json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True))
    return 0


def _cmd_correlate(args) -> int:
    records = ratings.load_rankings(args.rankings)
    human = [r for r in records if r.mode == "human"]
    if not human:
        raise MedcorpusError(f"no human ranking records in {args.rankings}")
    languages: dict[str, str] = {}
    for obj in pipeline.read_jsonl(args.rankings):
        if "lang" in obj and "case_id" in obj:
            languages[str(obj["case_id"])] = str(obj["lang"])
    matrix = ratings.aggregate_ratings(human, languages)
    machine: dict[str, dict[tuple[str, str], float]] = {}
    for obj in pipeline.read_jsonl(args.metric_scores):
        try:
            metric = str(obj["metric"])
            point = (str(obj["case_id"]), str(obj["model"]))
            machine.setdefault(metric, {})[point] = float(obj["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MedcorpusError(f"bad metric score record {obj}: {exc}")
    judge = [r for r in records if r.mode == "judge_model"]
    if judge:
        judge_scores: dict[tuple[str, str], float] = {}
        for record in judge:
            for model, score in ratings.ranks_to_scores(
                    record, len(record.ordering)).items():
                key = (record.case_id, model)
                judge_scores[key] = judge_scores.get(key, 0.0) + score
        machine["judge_model"] = judge_scores
    report = ratings.correlate_metrics(machine, matrix,
                                       per_language=args.per_language)
    print(json.dumps(report, ensure_ascii=False, indent=2))
    return 0


def _cmd_review_serve(args) -> int:
    import uvicorn

    seed = args.sub_seed if args.sub_seed is not None else args.seed
    store = review.ReviewStore.from_files(args.cases, args.outputs, args.store, seed)
    app = review.create_app(store, token=args.token)
    log.info("serving %d cases on %s:%d", len(store.cases), args.host, args.port)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_review_export(args) -> int:
    seed = args.sub_seed if args.sub_seed is not None else args.seed
    store = review.ReviewStore.from_files(args.cases, args.outputs, args.store, seed)
    lines = [pipeline.dumps_canonical(obj) for obj in store.export()]
    _emit(lines, args.output)
    return 0


_COMMANDS = {
    "filter": _cmd_filter,
    "chunk": _cmd_chunk,
    "sample": _cmd_sample,
    "stats": _cmd_stats,
    "ocr-order": _cmd_ocr_order,
    "split": _cmd_split,
    "prompts": _cmd_prompts,
    "score": _cmd_score,
    "correlate": _cmd_correlate,
    "review-serve": _cmd_review_serve,
    "review-export": _cmd_review_export,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return _COMMANDS[args.command](args)
    except MedcorpusError as exc:
        print(f"medcorpus: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        print(f"medcorpus: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
