"""Command-line entry point: ``negare detect|eval|ensemble|stats|folds|errors``.

Every subcommand is deterministic: identical inputs and flags produce
byte-identical outputs, including under ``--jobs`` parallelism. Exit codes:
0 success, 1 validation or configuration error, 2 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from negare import context_engine, corpus, evaluation, predictions
from negare.errors import NegareError

DEFAULT_K = 10
DEFAULT_SEED = 42
DEFAULT_MAX_TOKENS = 512
DEFAULT_THRESHOLD = predictions.DEFAULT_THRESHOLD

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTERNAL = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; here those are validation errors."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise NegareError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="negare",
        description="Rule-based negation detection and evaluation for Dutch "
        "clinical text.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser(
        "detect", help="classify every corpus entity with the rule engine"
    )
    detect.add_argument("--corpus", required=True, help="corpus JSONL file")
    detect.add_argument(
        "--lexicon", help="trigger lexicon TSV (default: bundled Dutch lexicon)"
    )
    detect.add_argument("--out", required=True, help="prediction file to write")
    detect.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    detect.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    detect.add_argument("--no-filter", action="store_true",
                        help="skip the exclusion pipeline")
    detect.add_argument("--jobs", type=int, default=1,
                        help="records processed in parallel")
    detect.set_defaults(func=cmd_detect)

    eval_p = sub.add_parser(
        "eval", help="score prediction files against the gold corpus"
    )
    eval_p.add_argument("predictions", nargs="+", help="prediction files")
    eval_p.add_argument("--corpus", required=True)
    eval_p.add_argument("--out", help="output directory (default: print to stdout)")
    eval_p.add_argument("--folds", help="fold file for per-fold metrics")
    eval_p.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    eval_p.add_argument("--no-filter", action="store_true")
    eval_p.add_argument("--window", type=int,
                        help="token-window excerpts in error files instead of "
                        "full sentences")
    eval_p.add_argument("--format", choices=("table", "jsonl"), default="table")
    eval_p.set_defaults(func=cmd_eval)

    ensemble = sub.add_parser(
        "ensemble", help="majority-vote three prediction files"
    )
    ensemble.add_argument("predictions", nargs=3, help="exactly three prediction files")
    ensemble.add_argument("--out", required=True)
    ensemble.set_defaults(func=cmd_ensemble)

    stats = sub.add_parser("stats", help="per-category descriptive statistics")
    stats.add_argument("--corpus", required=True)
    stats.add_argument("--out", help="output file (default: stdout)")
    stats.add_argument("--format", choices=("table", "jsonl"), default="table")
    stats.set_defaults(func=cmd_stats)

    folds = sub.add_parser("folds", help="assign records to cross-validation folds")
    folds.add_argument("--corpus", required=True)
    folds.add_argument("--out", required=True)
    folds.add_argument("--k", type=int, default=DEFAULT_K)
    folds.add_argument("--seed", type=int, default=DEFAULT_SEED)
    folds.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    folds.add_argument("--no-filter", action="store_true")
    folds.set_defaults(func=cmd_folds)

    errors = sub.add_parser(
        "errors", help="extract misclassified entities with their sentences"
    )
    errors.add_argument("predictions", help="prediction file")
    errors.add_argument("--corpus", required=True)
    errors.add_argument("--out", required=True)
    errors.add_argument("--window", type=int,
                        help="token-window excerpts instead of full sentences")
    errors.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    errors.add_argument("--no-filter", action="store_true")
    errors.set_defaults(func=cmd_errors)

    return parser


def _require_file(path: str, role: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise NegareError(f"{role} file not found: {path}")
    return p


def _load_filtered(args) -> corpus.Corpus:
    """Load the corpus and, unless --no-filter, run the exclusion pipeline."""
    path = _require_file(args.corpus, "corpus")
    records, issues = corpus.load_corpus_with_issues(path)
    if getattr(args, "no_filter", False):
        if issues:
            detail = "\n".join(f"  {issue}" for issue in issues)
            raise NegareError(f"{path}: {len(issues)} malformed record(s):\n{detail}")
        return records
    cfg = corpus.FilterConfig(
        max_tokens_per_record=getattr(args, "max_tokens", DEFAULT_MAX_TOKENS)
    )
    kept, report = corpus.filter_corpus(records, cfg, corrupted=issues)
    if not kept:
        raise NegareError(f"{path}: no records left after filtering")
    excluded = report.input_records - report.kept_records
    if excluded:
        print(
            f"filtered corpus: kept {report.kept_records}/{report.input_records} "
            f"records, {report.kept_entities} entities",
            file=sys.stderr,
        )
    return kept


def _load_lexicon(args) -> context_engine.TriggerLexicon:
    if args.lexicon is None:
        return context_engine.default_lexicon()
    return context_engine.load_lexicon(_require_file(args.lexicon, "lexicon"))


def cmd_detect(args) -> int:
    records = _load_filtered(args)
    lexicon = _load_lexicon(args)
    pred_set = context_engine.detect_corpus(
        records, lexicon, threshold=args.threshold, jobs=args.jobs
    )
    predictions.write_predictions(pred_set, args.out)
    print(f"wrote {len(pred_set)} predictions to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    gold = _load_filtered(args)
    expected_manifest = predictions.corpus_manifest(gold)
    sets = []
    for pred_path in args.predictions:
        pred_set = predictions.read_predictions(_require_file(pred_path, "prediction"))
        if pred_set.manifest != expected_manifest:
            raise NegareError(
                f"{pred_path}: prediction manifest {pred_set.manifest} does not "
                f"match corpus manifest {expected_manifest}"
            )
        sets.append(pred_set)

    fold_assignment = None
    if args.folds:
        fold_assignment = corpus.read_folds(_require_file(args.folds, "fold"))

    reports = []
    for pred_set in sets:
        report = evaluation.evaluate_single_pass(pred_set, gold)
        if fold_assignment is not None:
            fold_results = []
            for fold in range(fold_assignment.k):
                ids = fold_assignment.records_in(fold)
                counts = evaluation.confusion(pred_set, gold, record_ids=ids)
                fold_results.append(
                    evaluation.FoldResult(
                        fold=fold, counts=counts, scores=evaluation.metrics(counts)
                    )
                )
            report = evaluation.MethodReport(
                method=report.method,
                pooled=report.pooled,
                categories=report.categories,
                folds=tuple(fold_results),
            )
        reports.append(report)

    if args.format == "jsonl":
        rendered = evaluation.metrics_report_jsonl(reports)
    else:
        rendered = evaluation.render_metrics_table(reports) + "\n"

    if args.out is None:
        sys.stdout.write(rendered)
        if len(sets) >= 3:
            partition = predictions.disagreement_partition(sets, gold)
            sys.stdout.write("\n" + partition.to_table() + "\n")
        return EXIT_OK

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = "jsonl" if args.format == "jsonl" else "txt"
    (out_dir / f"metrics.{suffix}").write_text(rendered, encoding="utf-8")
    for pred_set in sets:
        cases = evaluation.extract_errors(pred_set, gold, window=args.window)
        safe_method = "".join(
            c if c.isalnum() or c in "-_" else "_" for c in pred_set.method
        )
        evaluation.write_error_cases(
            cases, out_dir / f"errors_{safe_method}.jsonl", pred_set.method
        )
    if len(sets) >= 3:
        partition = predictions.disagreement_partition(sets, gold)
        if args.format == "jsonl":
            payload = partition.to_jsonl()
        else:
            payload = partition.to_table() + "\n"
        (out_dir / f"disagreement.{suffix}").write_text(payload, encoding="utf-8")
    print(f"wrote evaluation reports to {out_dir}", file=sys.stderr)
    return EXIT_OK


def cmd_ensemble(args) -> int:
    sets = [
        predictions.read_predictions(_require_file(p, "prediction"))
        for p in args.predictions
    ]
    ensemble = predictions.majority_vote(*sets)
    predictions.write_predictions(ensemble, args.out)
    print(f"wrote {len(ensemble)} ensemble predictions to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_stats(args) -> int:
    records = corpus.load_corpus(_require_file(args.corpus, "corpus"))
    stats = corpus.corpus_stats(records)
    rendered = (
        stats.to_jsonl() if args.format == "jsonl" else stats.to_table() + "\n"
    )
    if args.out is None:
        sys.stdout.write(rendered)
    else:
        Path(args.out).write_text(rendered, encoding="utf-8")
    return EXIT_OK


def cmd_folds(args) -> int:
    records = _load_filtered(args)
    assignment = corpus.split_folds(records, k=args.k, seed=args.seed)
    corpus.write_folds(assignment, args.out)
    print(
        f"assigned {len(assignment.assignment)} records to {assignment.k} folds",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_errors(args) -> int:
    gold = _load_filtered(args)
    pred_set = predictions.read_predictions(
        _require_file(args.predictions, "prediction")
    )
    cases = evaluation.extract_errors(pred_set, gold, window=args.window)
    evaluation.write_error_cases(cases, args.out, pred_set.method)
    print(f"wrote {len(cases)} error cases to {args.out}", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except NegareError as exc:
        print(f"negare: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"negare: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        print("negare: internal error", file=sys.stderr)
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
