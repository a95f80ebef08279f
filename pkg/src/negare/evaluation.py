"""Metrics, cross-validated reporting, agreement, and error analysis.

Negated is the positive class throughout: a false positive is an entity
predicted negated whose gold label is not negated; a false negative is a
missed negation. Cross-validation reports pool (micro-average) confusion
counts over all test folds; per-fold metrics are kept so fold-to-fold
variance stays visible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from negare import textseg
from negare.corpus import (
    ALL_CATEGORIES_NAME,
    CATEGORY_ORDER,
    Corpus,
    FoldAssignment,
    Label,
    Record,
    RecordCategory,
)
from negare.errors import NegareError
from negare.predictions import Key, PredictionSet


class EvaluationError(NegareError):
    """Coverage mismatch or inconsistent evaluation input."""


# ---------------------------------------------------------------------------
# Confusion counts and metrics


@dataclass(frozen=True)
class ConfusionCounts:
    """Binary confusion counts with Negated as the positive class."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise EvaluationError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )


@dataclass(frozen=True)
class Metrics:
    """Precision, recall, F1 for the negated class.

    A zero denominator makes the corresponding value 1.0 and sets its
    "vacuous" flag; F1 is 0.0 whenever precision + recall is 0.
    """

    precision: float
    recall: float
    f1: float
    vacuous_precision: bool = False
    vacuous_recall: bool = False


def metrics(counts: ConfusionCounts) -> Metrics:
    return metrics_from_rates(
        precision=None if counts.tp + counts.fp == 0 else counts.tp / (counts.tp + counts.fp),
        recall=None if counts.tp + counts.fn == 0 else counts.tp / (counts.tp + counts.fn),
    )


def metrics_from_rates(precision: float | None, recall: float | None) -> Metrics:
    """Metrics from already-computed rates; None marks a vacuous value."""
    vac_p = precision is None
    vac_r = recall is None
    p = 1.0 if vac_p else precision
    r = 1.0 if vac_r else recall
    f1 = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return Metrics(
        precision=p, recall=r, f1=f1, vacuous_precision=vac_p, vacuous_recall=vac_r
    )


def confusion(
    pred: PredictionSet,
    gold: Corpus,
    record_ids: Iterable[str] | None = None,
    category: RecordCategory | None = None,
) -> ConfusionCounts:
    """Count the four confusion cells over a gold subset.

    The subset is the gold entities of records passing both filters; every
    one of them must be covered by ``pred``.
    """
    wanted = None if record_ids is None else set(record_ids)
    tp = fp = fn = tn = 0
    for record in gold:
        if wanted is not None and record.id not in wanted:
            continue
        if category is not None and record.category is not category:
            continue
        for entity in record.entities:
            key = (record.id, entity.entity_id)
            if key not in pred.by_key:
                raise EvaluationError(
                    f"prediction set {pred.method!r} does not cover entity "
                    f"{entity.entity_id!r} of record {record.id!r}"
                )
            predicted = pred.by_key[key].label
            if predicted is Label.NEGATED:
                if entity.gold_label is Label.NEGATED:
                    tp += 1
                else:
                    fp += 1
            else:
                if entity.gold_label is Label.NEGATED:
                    fn += 1
                else:
                    tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


# ---------------------------------------------------------------------------
# Cross-validated reporting


@dataclass(frozen=True)
class CategoryResult:
    name: str
    counts: ConfusionCounts
    scores: Metrics


@dataclass(frozen=True)
class FoldResult:
    fold: int
    counts: ConfusionCounts
    scores: Metrics


@dataclass(frozen=True)
class MethodReport:
    """Per-category, pooled, and per-fold results for one method."""

    method: str
    pooled: CategoryResult
    categories: tuple[CategoryResult, ...]
    folds: tuple[FoldResult, ...] = ()


def evaluate_cv(
    preds_per_fold: Mapping[int, PredictionSet],
    gold: Corpus,
    folds: FoldAssignment,
) -> MethodReport:
    """Pool per-fold test predictions into one report.

    Each fold's prediction set must cover exactly the entities of the
    records assigned to that fold: a missing fold, a fold covering foreign
    records, or an entity predicted twice is an error. Pooled counts equal
    the sum of per-fold counts by construction.
    """
    by_id = {record.id: record for record in gold}
    unknown = sorted(set(folds.assignment) - set(by_id))
    if unknown:
        raise EvaluationError(f"fold assignment covers unknown records {unknown[:3]}")
    unassigned = sorted(set(by_id) - set(folds.assignment))
    if unassigned:
        raise EvaluationError(f"records missing a fold: {unassigned[:3]}")
    missing_folds = sorted(set(range(folds.k)) - set(preds_per_fold))
    if missing_folds:
        raise EvaluationError(f"no predictions for folds {missing_folds}")
    extra_folds = sorted(set(preds_per_fold) - set(range(folds.k)))
    if extra_folds:
        raise EvaluationError(f"predictions for unknown folds {extra_folds}")

    methods = {ps.method for ps in preds_per_fold.values()}
    if len(methods) != 1:
        raise EvaluationError(f"mixed methods across folds: {sorted(methods)}")
    method = methods.pop()

    seen: dict[Key, int] = {}
    fold_results = []
    pooled_counts = ConfusionCounts()
    category_counts: dict[RecordCategory, ConfusionCounts] = {}
    for fold in range(folds.k):
        pred = preds_per_fold[fold]
        fold_record_ids = set(folds.records_in(fold))
        expected_keys = {
            (rid, e.entity_id) for rid in fold_record_ids for e in by_id[rid].entities
        }
        if pred.keys != expected_keys:
            missing = sorted(expected_keys - pred.keys)[:3]
            extra = sorted(pred.keys - expected_keys)[:3]
            raise EvaluationError(
                f"fold {fold} coverage mismatch: missing {missing}, extra {extra}"
            )
        for key in pred.keys:
            if key in seen:
                raise EvaluationError(
                    f"entity {key} predicted in folds {seen[key]} and {fold}"
                )
            seen[key] = fold
        fold_counts = confusion(pred, gold, record_ids=fold_record_ids)
        fold_results.append(
            FoldResult(fold=fold, counts=fold_counts, scores=metrics(fold_counts))
        )
        pooled_counts = pooled_counts + fold_counts
        for cat in RecordCategory:
            cat_counts = confusion(
                pred, gold, record_ids=fold_record_ids, category=cat
            )
            if cat_counts.total:
                category_counts[cat] = (
                    category_counts.get(cat, ConfusionCounts()) + cat_counts
                )

    categories = tuple(
        CategoryResult(
            name=cat.display_name,
            counts=category_counts[cat],
            scores=metrics(category_counts[cat]),
        )
        for cat in CATEGORY_ORDER
        if cat in category_counts
    )
    pooled = CategoryResult(
        name=ALL_CATEGORIES_NAME, counts=pooled_counts, scores=metrics(pooled_counts)
    )
    return MethodReport(
        method=method,
        pooled=pooled,
        categories=categories,
        folds=tuple(fold_results),
    )


def evaluate_single_pass(pred: PredictionSet, gold: Corpus) -> MethodReport:
    """Per-category and pooled results for one full-coverage prediction set."""
    category_results = []
    for cat in CATEGORY_ORDER:
        counts = confusion(pred, gold, category=cat)
        if counts.total:
            category_results.append(
                CategoryResult(
                    name=cat.display_name, counts=counts, scores=metrics(counts)
                )
            )
    pooled_counts = confusion(pred, gold)
    pooled = CategoryResult(
        name=ALL_CATEGORIES_NAME, counts=pooled_counts, scores=metrics(pooled_counts)
    )
    return MethodReport(
        method=pred.method, pooled=pooled, categories=tuple(category_results)
    )


def render_metrics_table(reports: Sequence[MethodReport]) -> str:
    """Aligned text table: one row per category and method, P/R/F1 columns."""
    lines = [
        f"{'Data source':<32}{'Method':<44}{'Precision':>10}{'Recall':>10}{'F1':>10}"
    ]
    names: list[str] = []
    for report in reports:
        for result in report.categories:
            if result.name not in names:
                names.append(result.name)
    names.append(ALL_CATEGORIES_NAME)
    for name in names:
        for report in reports:
            rows = [r for r in [report.pooled, *report.categories] if r.name == name]
            for result in rows:
                flag = ""
                if result.scores.vacuous_precision or result.scores.vacuous_recall:
                    flag = " (vacuous)"
                lines.append(
                    f"{name:<32}{report.method:<44}"
                    f"{result.scores.precision:>10.3f}"
                    f"{result.scores.recall:>10.3f}"
                    f"{result.scores.f1:>10.3f}{flag}"
                )
    return "\n".join(lines)


def metrics_report_jsonl(reports: Sequence[MethodReport]) -> str:
    rows = []
    for report in reports:
        for result in [*report.categories, report.pooled]:
            rows.append(
                json.dumps(
                    {
                        "method": report.method,
                        "data_source": result.name,
                        "precision": round(result.scores.precision, 6),
                        "recall": round(result.scores.recall, 6),
                        "f1": round(result.scores.f1, 6),
                        "tp": result.counts.tp,
                        "fp": result.counts.fp,
                        "fn": result.counts.fn,
                        "tn": result.counts.tn,
                        "vacuous": result.scores.vacuous_precision
                        or result.scores.vacuous_recall,
                    },
                    ensure_ascii=False,
                )
            )
        for fold_result in report.folds:
            rows.append(
                json.dumps(
                    {
                        "method": report.method,
                        "fold": fold_result.fold,
                        "precision": round(fold_result.scores.precision, 6),
                        "recall": round(fold_result.scores.recall, 6),
                        "f1": round(fold_result.scores.f1, 6),
                    },
                    ensure_ascii=False,
                )
            )
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# Cohen's kappa


@dataclass(frozen=True)
class AgreementResult:
    """Cohen's kappa with its observed and expected agreement."""

    kappa: float
    observed: float
    expected: float
    degenerate: bool = False


def cohens_kappa(labels_a: Sequence, labels_b: Sequence) -> AgreementResult:
    """Chance-corrected agreement between two equal-length label lists.

    When both annotators are constant and identical, expected agreement is
    1 and kappa is reported as 1.0 with the degenerate flag set.
    """
    if len(labels_a) != len(labels_b):
        raise EvaluationError(
            f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    n = len(labels_a)
    if n == 0:
        raise EvaluationError("kappa requires at least one item")
    observed = Fraction(sum(1 for a, b in zip(labels_a, labels_b) if a == b), n)
    classes = set(labels_a) | set(labels_b)
    expected = Fraction(0)
    for cls in classes:
        pa = Fraction(sum(1 for a in labels_a if a == cls), n)
        pb = Fraction(sum(1 for b in labels_b if b == cls), n)
        expected += pa * pb
    if expected == 1:
        return AgreementResult(
            kappa=1.0, observed=float(observed), expected=1.0, degenerate=True
        )
    kappa = (observed - expected) / (1 - expected)
    return AgreementResult(
        kappa=float(kappa), observed=float(observed), expected=float(expected)
    )


# ---------------------------------------------------------------------------
# Error analysis


class ErrorKind(Enum):
    FALSE_POSITIVE = "false_positive"
    FALSE_NEGATIVE = "false_negative"


class ErrorCategory(Enum):
    UNCOMMON_NEGATION = "uncommon_negation"
    MINUS = "minus"
    SCOPE = "scope"
    PUNCTUATION = "punctuation"
    NEGATION_OF_DIFFERENT_TERM = "negation_of_different_term"
    WRONG_MODALITY = "wrong_modality"
    SPECULATION = "speculation"
    AMBIGUITY = "ambiguity"
    OTHER = "other"
    ANNOTATION_ERROR = "annotation_error"


@dataclass(frozen=True)
class ErrorCase:
    """One misclassified entity with the sentence it occurred in."""

    record_id: str
    entity_id: str
    kind: ErrorKind
    method: str
    excerpt: str
    category: ErrorCategory | None = None
    annotator: str | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.record_id, self.entity_id, self.method)


def _entity_excerpt(record: Record, entity, window: int | None) -> str:
    tokens = textseg.tokenize(record.text)
    if window is None:
        i, _ = textseg.entity_token_range(tokens, entity.start, entity.end)
        sentences = textseg.split_sentences(tokens, record.text)
        sentence = textseg.sentence_of_token(sentences, i)
        return record.text[sentence.start : sentence.end]
    token_window = textseg.extract_window(record, entity, window, tokens=tokens)
    first = tokens[token_window.token_start]
    last = tokens[token_window.token_end - 1]
    return record.text[first.start : last.end]


def extract_errors(
    pred: PredictionSet, gold: Corpus, window: int | None = None
) -> list[ErrorCase]:
    """One ErrorCase per misclassified entity, in corpus order.

    The excerpt is the full sentence containing the entity's first token;
    passing ``window`` swaps it for a centered token window of that size.
    Categories start unset: they are human judgments applied later from a
    tag file.
    """
    cases: list[ErrorCase] = []
    for record in gold:
        for entity in record.entities:
            key = (record.id, entity.entity_id)
            if key not in pred.by_key:
                raise EvaluationError(
                    f"prediction set {pred.method!r} does not cover entity "
                    f"{entity.entity_id!r} of record {record.id!r}"
                )
            predicted = pred.by_key[key].label
            if predicted is entity.gold_label:
                continue
            kind = (
                ErrorKind.FALSE_POSITIVE
                if predicted is Label.NEGATED
                else ErrorKind.FALSE_NEGATIVE
            )
            cases.append(
                ErrorCase(
                    record_id=record.id,
                    entity_id=entity.entity_id,
                    kind=kind,
                    method=pred.method,
                    excerpt=_entity_excerpt(record, entity, window),
                )
            )
    return cases


def write_error_cases(cases: Sequence[ErrorCase], path: str | Path, method: str) -> None:
    """Write error cases as JSONL under a header comment (kept when empty)."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"#errors: method={method} count={len(cases)}\n")
        for case in cases:
            handle.write(
                json.dumps(
                    {
                        "record_id": case.record_id,
                        "entity_id": case.entity_id,
                        "kind": case.kind.value,
                        "method": case.method,
                        "excerpt": case.excerpt,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_error_cases(path: str | Path) -> list[ErrorCase]:
    cases = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
                cases.append(
                    ErrorCase(
                        record_id=obj["record_id"],
                        entity_id=obj["entity_id"],
                        kind=ErrorKind(obj["kind"]),
                        method=obj["method"],
                        excerpt=obj["excerpt"],
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise EvaluationError(
                    f"{path}: line {line_number}: bad error case: {exc}"
                ) from None
    return cases


@dataclass(frozen=True)
class ErrorTag:
    """One human category judgment for one error case."""

    record_id: str
    entity_id: str
    method: str
    category: ErrorCategory
    annotator: str


def write_tags(tags: Sequence[ErrorTag], path: str | Path, append: bool = True) -> None:
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8", newline="\n") as handle:
        for tag in tags:
            handle.write(
                f"{tag.record_id}\t{tag.entity_id}\t{tag.method}\t"
                f"{tag.category.value}\t{tag.annotator}\n"
            )


def read_tags(path: str | Path) -> list[ErrorTag]:
    """Read tag lines ``record_id<TAB>entity_id<TAB>method<TAB>category<TAB>annotator``."""
    tags = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise EvaluationError(
                    f"{path}: line {line_number}: expected 5 tab-separated fields"
                )
            try:
                category = ErrorCategory(parts[3])
            except ValueError:
                raise EvaluationError(
                    f"{path}: line {line_number}: unknown category {parts[3]!r}"
                ) from None
            tags.append(
                ErrorTag(
                    record_id=parts[0],
                    entity_id=parts[1],
                    method=parts[2],
                    category=category,
                    annotator=parts[4],
                )
            )
    return tags


def apply_tags(
    cases: Sequence[ErrorCase],
    tags: Sequence[ErrorTag],
    annotator: str | None = None,
) -> list[ErrorCase]:
    """Attach categories to cases from a tag list.

    With ``annotator`` set, only that annotator's tags apply. Otherwise the
    tag from the lexicographically smallest annotator id wins per case, so
    the result is deterministic however the file accumulated. Within one
    annotator the file is append-only and the last tag wins.
    """
    chosen: dict[tuple[str, str, str], ErrorTag] = {}
    for tag in tags:
        if annotator is not None and tag.annotator != annotator:
            continue
        key = (tag.record_id, tag.entity_id, tag.method)
        current = chosen.get(key)
        if current is None or tag.annotator <= current.annotator:
            chosen[key] = tag
    out = []
    for case in cases:
        tag = chosen.get(case.key)
        if tag is None:
            out.append(case)
        else:
            out.append(replace(case, category=tag.category, annotator=tag.annotator))
    return out


def kappa_between_annotators(
    tags: Sequence[ErrorTag], annotator_a: str, annotator_b: str
) -> AgreementResult:
    """Kappa over the cases both annotators tagged (last tag wins each)."""
    a_tags: dict[tuple[str, str, str], ErrorCategory] = {}
    b_tags: dict[tuple[str, str, str], ErrorCategory] = {}
    for tag in tags:
        key = (tag.record_id, tag.entity_id, tag.method)
        if tag.annotator == annotator_a:
            a_tags[key] = tag.category
        elif tag.annotator == annotator_b:
            b_tags[key] = tag.category
    shared = sorted(a_tags.keys() & b_tags.keys())
    if not shared:
        raise EvaluationError(
            f"no cases tagged by both {annotator_a!r} and {annotator_b!r}"
        )
    return cohens_kappa([a_tags[k] for k in shared], [b_tags[k] for k in shared])


# ---------------------------------------------------------------------------
# Error aggregation (counts and column percentages)


@dataclass(frozen=True)
class ErrorColumn:
    method: str
    kind: ErrorKind
    counts: Mapping[ErrorCategory, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class ErrorTable:
    """Category-by-column error counts with integer percentages.

    Percentages are per column, of categorized errors, rounded half away
    from zero.
    """

    columns: tuple[ErrorColumn, ...]

    def count(self, category: ErrorCategory, method: str, kind: ErrorKind) -> int:
        for col in self.columns:
            if col.method == method and col.kind is kind:
                return col.counts.get(category, 0)
        return 0

    def percentage(self, category: ErrorCategory, method: str, kind: ErrorKind) -> int:
        for col in self.columns:
            if col.method == method and col.kind is kind:
                return _column_percentage(col.counts.get(category, 0), col.total)
        return 0

    def to_table(self) -> str:
        header = f"{'Category':<28}"
        for col in self.columns:
            kind_short = "FP" if col.kind is ErrorKind.FALSE_POSITIVE else "FN"
            header += f"{col.method + ' ' + kind_short:>24}"
        lines = [header]
        for category in ErrorCategory:
            row = f"{category.value:<28}"
            for col in self.columns:
                count = col.counts.get(category, 0)
                pct = _column_percentage(count, col.total)
                row += f"{f'{count} ({pct}%)':>24}"
            lines.append(row)
        total_row = f"{'total':<28}"
        for col in self.columns:
            total_row += f"{col.total:>24}"
        lines.append(total_row)
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        rows = []
        for col in self.columns:
            for category in ErrorCategory:
                count = col.counts.get(category, 0)
                rows.append(
                    json.dumps(
                        {
                            "method": col.method,
                            "kind": col.kind.value,
                            "category": category.value,
                            "count": count,
                            "percent": _column_percentage(count, col.total),
                        }
                    )
                )
            rows.append(
                json.dumps(
                    {"method": col.method, "kind": col.kind.value, "total": col.total}
                )
            )
        return "\n".join(rows) + "\n"


def _column_percentage(count: int, total: int) -> int:
    if total == 0:
        return 0
    share = Fraction(count * 100, total)
    whole = share.numerator // share.denominator
    remainder = share - whole
    return int(whole) + (1 if remainder >= Fraction(1, 2) else 0)


def aggregate_errors(cases: Sequence[ErrorCase]) -> ErrorTable:
    """Build the per-(method, kind) count/percentage table from tagged cases."""
    untagged = [case for case in cases if case.category is None]
    if untagged:
        first = untagged[0]
        raise EvaluationError(
            f"{len(untagged)} untagged case(s), e.g. record {first.record_id!r} "
            f"entity {first.entity_id!r} method {first.method!r}"
        )
    methods: list[str] = []
    for case in cases:
        if case.method not in methods:
            methods.append(case.method)
    columns = []
    for method in methods:
        for kind in (ErrorKind.FALSE_POSITIVE, ErrorKind.FALSE_NEGATIVE):
            counts: dict[ErrorCategory, int] = {}
            for case in cases:
                if case.method == method and case.kind is kind:
                    counts[case.category] = counts.get(case.category, 0) + 1
            columns.append(ErrorColumn(method=method, kind=kind, counts=counts))
    return ErrorTable(columns=tuple(columns))
