"""Annotated clinical corpus: data model, loading, filtering, folds, stats.

A corpus is a plain ``list[Record]``. The on-disk form is UTF-8 JSONL, one
flat record object per line::

    {"id": "...", "category": "gp|specialist|radiology|discharge",
     "text": "...",
     "entities": [{"entity_id", "start", "end", "surface", "gold_label"}]}

with ``gold_label`` one of ``negated`` / ``not_negated``. Records are
immutable after load and safe to share across threads.
"""

from __future__ import annotations

import hashlib
import json
import statistics
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from negare import textseg
from negare.errors import NegareError


class CorpusError(NegareError):
    """Malformed corpus file or a record violating its invariants."""


class Label(Enum):
    NEGATED = "negated"
    NOT_NEGATED = "not_negated"


class RecordCategory(Enum):
    GENERAL_PRACTITIONER = "gp"
    SPECIALIST_LETTER = "specialist"
    RADIOLOGY_REPORT = "radiology"
    DISCHARGE_LETTER = "discharge"

    @property
    def display_name(self) -> str:
        return _CATEGORY_DISPLAY[self]


_CATEGORY_DISPLAY = {
    RecordCategory.GENERAL_PRACTITIONER: "General Practitioner entries",
    RecordCategory.SPECIALIST_LETTER: "Specialist letters",
    RecordCategory.RADIOLOGY_REPORT: "Radiology reports",
    RecordCategory.DISCHARGE_LETTER: "Discharge letters",
}

# Report row order: alphabetical by display name, pooled row last.
CATEGORY_ORDER = (
    RecordCategory.DISCHARGE_LETTER,
    RecordCategory.GENERAL_PRACTITIONER,
    RecordCategory.RADIOLOGY_REPORT,
    RecordCategory.SPECIALIST_LETTER,
)
ALL_CATEGORIES_NAME = "All letters"


@dataclass(frozen=True)
class EntityAnnotation:
    """An annotated medical-term span with its gold negation label."""

    entity_id: str
    start: int
    end: int
    surface: str
    gold_label: Label


@dataclass(frozen=True)
class Record:
    """One clinical note with its category and annotated entities."""

    id: str
    category: RecordCategory
    text: str
    entities: tuple[EntityAnnotation, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("record id must be non-empty")
        seen: set[str] = set()
        for entity in self.entities:
            if not entity.entity_id:
                raise CorpusError(f"record {self.id!r}: entity id must be non-empty")
            if entity.entity_id in seen:
                raise CorpusError(
                    f"record {self.id!r}: duplicate entity id {entity.entity_id!r}"
                )
            seen.add(entity.entity_id)
            if not (0 <= entity.start < entity.end <= len(self.text)):
                raise CorpusError(
                    f"record {self.id!r}: entity {entity.entity_id!r} span "
                    f"[{entity.start}, {entity.end}) out of bounds for text of "
                    f"length {len(self.text)}"
                )
            if entity.surface != self.text[entity.start : entity.end]:
                raise CorpusError(
                    f"record {self.id!r}: entity {entity.entity_id!r} surface "
                    f"mismatch: annotation says {entity.surface!r}, text slice "
                    f"[{entity.start}, {entity.end}) is "
                    f"{self.text[entity.start:entity.end]!r}"
                )


Corpus = list[Record]


@dataclass(frozen=True)
class LoadIssue:
    """One rejected input line: where it was and why it failed."""

    line_number: int
    record_id: str | None
    message: str

    def __str__(self) -> str:
        who = f" (record {self.record_id!r})" if self.record_id else ""
        return f"line {self.line_number}{who}: {self.message}"


def _parse_record(obj: dict) -> Record:
    if not isinstance(obj, dict):
        raise CorpusError("record must be a JSON object")
    try:
        record_id = obj["id"]
        category_raw = obj["category"]
        text = obj["text"]
        entities_raw = obj["entities"]
    except KeyError as exc:
        raise CorpusError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(record_id, str) or not isinstance(text, str):
        raise CorpusError("'id' and 'text' must be strings")
    try:
        category = RecordCategory(category_raw)
    except ValueError:
        raise CorpusError(f"unknown category {category_raw!r}") from None
    if not isinstance(entities_raw, list):
        raise CorpusError("'entities' must be a list")

    entities = []
    for ent in entities_raw:
        try:
            label = Label(ent["gold_label"])
            entities.append(
                EntityAnnotation(
                    entity_id=ent["entity_id"],
                    start=int(ent["start"]),
                    end=int(ent["end"]),
                    surface=ent["surface"],
                    gold_label=label,
                )
            )
        except KeyError as exc:
            raise CorpusError(f"entity missing field {exc.args[0]!r}") from None
        except ValueError as exc:
            if isinstance(exc, CorpusError):
                raise
            raise CorpusError(f"bad entity field: {exc}") from None
    return Record(id=record_id, category=category, text=text, entities=tuple(entities))


def load_corpus_with_issues(path: str | Path) -> tuple[Corpus, list[LoadIssue]]:
    """Load every parseable record; collect one issue per rejected line.

    Rejected lines are never repaired: a record with a bad span or a surface
    mismatch is dropped whole and reported, which is how "corrupted source"
    inputs enter the exclusion accounting.
    """
    records: Corpus = []
    issues: list[LoadIssue] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            record_id = None
            try:
                obj = json.loads(line)
                if isinstance(obj, dict):
                    raw_id = obj.get("id")
                    record_id = raw_id if isinstance(raw_id, str) else None
                record = _parse_record(obj)
            except json.JSONDecodeError as exc:
                issues.append(LoadIssue(line_number, record_id, f"invalid JSON: {exc.msg}"))
                continue
            except CorpusError as exc:
                issues.append(LoadIssue(line_number, record_id, str(exc)))
                continue
            if record.id in seen_ids:
                issues.append(
                    LoadIssue(line_number, record.id, f"duplicate record id {record.id!r}")
                )
                continue
            seen_ids.add(record.id)
            records.append(record)
    return records, issues


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus file, raising on the first batch of malformed lines."""
    records, issues = load_corpus_with_issues(path)
    if issues:
        detail = "\n".join(f"  {issue}" for issue in issues)
        raise CorpusError(f"{path}: {len(issues)} malformed record(s):\n{detail}")
    return records


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write records as canonical JSONL (insertion order, LF line endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in corpus:
            obj = {
                "id": record.id,
                "category": record.category.value,
                "text": record.text,
                "entities": [
                    {
                        "entity_id": e.entity_id,
                        "start": e.start,
                        "end": e.end,
                        "surface": e.surface,
                        "gold_label": e.gold_label.value,
                    }
                    for e in record.entities
                ],
            }
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Exclusion pipeline


class ExclusionReason(Enum):
    NO_ANNOTATION = "no_annotation"
    CORRUPTED_SOURCE = "corrupted_source"
    NOT_SINGLE_TERM = "not_single_term"
    OVER_LENGTH = "over_length"


@dataclass(frozen=True)
class FilterConfig:
    """Knobs of the exclusion pipeline; defaults follow the source study."""

    max_tokens_per_record: int = 512
    require_annotation: bool = True
    require_single_term: bool = True

    def __post_init__(self) -> None:
        if self.max_tokens_per_record < 1:
            raise NegareError("max_tokens_per_record must be >= 1")


@dataclass
class ExclusionReport:
    """Per-reason exclusion accounting for records and entities."""

    input_records: int
    input_entities: int
    kept_records: int
    kept_entities: int
    excluded_records: dict[ExclusionReason, list[str]] = field(default_factory=dict)
    excluded_entities: dict[ExclusionReason, list[tuple[str, str]]] = field(
        default_factory=dict
    )

    def record_count(self, reason: ExclusionReason) -> int:
        return len(self.excluded_records.get(reason, []))

    def entity_count(self, reason: ExclusionReason) -> int:
        return len(self.excluded_entities.get(reason, []))

    def verify(self) -> None:
        """Check that exclusions plus retained reconcile with the input."""
        record_total = self.kept_records + sum(
            len(ids) for ids in self.excluded_records.values()
        )
        entity_total = self.kept_entities + sum(
            len(keys) for keys in self.excluded_entities.values()
        )
        if record_total != self.input_records:
            raise NegareError(
                f"exclusion report does not reconcile: {self.input_records} input "
                f"records vs {record_total} accounted"
            )
        if entity_total != self.input_entities:
            raise NegareError(
                f"exclusion report does not reconcile: {self.input_entities} input "
                f"entities vs {entity_total} accounted"
            )

    def to_table(self) -> str:
        lines = [
            f"{'Reason':<18}{'Records':>10}{'Entities':>10}",
        ]
        for reason in ExclusionReason:
            lines.append(
                f"{reason.value:<18}{self.record_count(reason):>10}"
                f"{self.entity_count(reason):>10}"
            )
        lines.append(f"{'kept':<18}{self.kept_records:>10}{self.kept_entities:>10}")
        lines.append(f"{'input':<18}{self.input_records:>10}{self.input_entities:>10}")
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        rows = []
        for reason in ExclusionReason:
            rows.append(
                json.dumps(
                    {
                        "reason": reason.value,
                        "records": self.record_count(reason),
                        "entities": self.entity_count(reason),
                        "record_ids": sorted(self.excluded_records.get(reason, [])),
                    },
                    ensure_ascii=False,
                )
            )
        rows.append(
            json.dumps(
                {
                    "reason": "kept",
                    "records": self.kept_records,
                    "entities": self.kept_entities,
                }
            )
        )
        return "\n".join(rows) + "\n"


def _is_single_term(surface: str) -> bool:
    # Proxy for "annotation corresponds to one medical term": long enough to
    # be a term, not a multi-line span, not a whole stretch of text.
    if len(surface.strip()) < 2 or "\n" in surface:
        return False
    return len(textseg.tokenize(surface)) <= 8


def filter_corpus(
    raw: Corpus,
    cfg: FilterConfig | None = None,
    corrupted: Sequence[LoadIssue] = (),
) -> tuple[Corpus, ExclusionReport]:
    """Apply the exclusion pipeline and account for every drop.

    Order per record: no-annotation, then the single-term check (any failing
    entity drops the whole record), then the token-length limit (an
    over-length record loses all entities and, being left empty, is itself
    excluded as over-length so that filtering is idempotent). ``corrupted``
    carries loader rejections into the report.
    """
    if cfg is None:
        cfg = FilterConfig()

    kept: Corpus = []
    excluded_records: dict[ExclusionReason, list[str]] = {r: [] for r in ExclusionReason}
    excluded_entities: dict[ExclusionReason, list[tuple[str, str]]] = {
        r: [] for r in ExclusionReason
    }

    for issue in corrupted:
        name = issue.record_id or f"<line {issue.line_number}>"
        excluded_records[ExclusionReason.CORRUPTED_SOURCE].append(name)

    for record in raw:
        def drop(reason: ExclusionReason) -> None:
            excluded_records[reason].append(record.id)
            excluded_entities[reason].extend(
                (record.id, e.entity_id) for e in record.entities
            )

        if cfg.require_annotation and not record.entities:
            drop(ExclusionReason.NO_ANNOTATION)
            continue
        if cfg.require_single_term and any(
            not _is_single_term(e.surface) for e in record.entities
        ):
            drop(ExclusionReason.NOT_SINGLE_TERM)
            continue
        if len(textseg.tokenize(record.text)) > cfg.max_tokens_per_record:
            drop(ExclusionReason.OVER_LENGTH)
            continue
        kept.append(record)

    report = ExclusionReport(
        input_records=len(raw) + len(corrupted),
        input_entities=sum(len(r.entities) for r in raw),
        kept_records=len(kept),
        kept_entities=sum(len(r.entities) for r in kept),
        excluded_records={k: v for k, v in excluded_records.items() if v},
        excluded_entities={k: v for k, v in excluded_entities.items() if v},
    )
    report.verify()
    return kept, report


# ---------------------------------------------------------------------------
# Descriptive statistics


@dataclass(frozen=True)
class MeasureStats:
    """Mean and quartile bounds of one per-record measure, plus its total."""

    mean: float
    q1: float
    q3: float
    total: int | None = None


@dataclass(frozen=True)
class CategoryStats:
    category: RecordCategory
    records: int
    sentences: MeasureStats
    words: MeasureStats
    unique_words: MeasureStats
    word_length: MeasureStats


@dataclass(frozen=True)
class TextStats:
    categories: tuple[CategoryStats, ...]

    def to_table(self) -> str:
        header = (
            f"{'Letter category':<30}{'# sentences':>18}{'# words':>18}"
            f"{'# unique words':>18}{'word length':>18}"
        )
        lines = [header]
        for cat in self.categories:
            lines.append(
                f"{cat.category.display_name:<30}"
                f"{_fmt_measure(cat.sentences):>18}"
                f"{_fmt_measure(cat.words):>18}"
                f"{_fmt_measure(cat.unique_words):>18}"
                f"{_fmt_measure(cat.word_length):>18}"
            )
            lines.append(
                f"{'  (' + str(cat.records) + ' records)':<30}"
                f"{cat.sentences.total:>18}{cat.words.total:>18}"
                f"{cat.unique_words.total:>18}{'':>18}"
            )
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        rows = []
        for cat in self.categories:
            rows.append(
                json.dumps(
                    {
                        "category": cat.category.value,
                        "records": cat.records,
                        "sentences": _measure_obj(cat.sentences),
                        "words": _measure_obj(cat.words),
                        "unique_words": _measure_obj(cat.unique_words),
                        "word_length": _measure_obj(cat.word_length),
                    },
                    ensure_ascii=False,
                )
            )
        return "\n".join(rows) + "\n"


def _fmt_measure(m: MeasureStats) -> str:
    def q(value: float) -> str:
        return f"{value:g}" if float(value).is_integer() else f"{value:.1f}"

    return f"{m.mean:.1f} ({q(m.q1)}, {q(m.q3)})"


def _measure_obj(m: MeasureStats) -> dict:
    obj = {"mean": round(m.mean, 4), "q1": round(m.q1, 4), "q3": round(m.q3, 4)}
    if m.total is not None:
        obj["total"] = m.total
    return obj


def _quartiles(values: Sequence[float]) -> tuple[float, float]:
    # Linear interpolation between closest ranks; a single observation is
    # its own quartile.
    if len(values) == 1:
        return float(values[0]), float(values[0])
    qs = statistics.quantiles(values, n=4, method="inclusive")
    return qs[0], qs[2]


def _is_word(token_text: str) -> bool:
    return any(ch.isalnum() for ch in token_text)


def corpus_stats(corpus: Corpus) -> TextStats:
    """Per-category sentence/word statistics.

    A word is a token containing at least one alphanumeric character
    (punctuation tokens are not words); unique-word counts are case-folded.
    Totals are sums of the per-record values, so they are additive across
    disjoint corpora.
    """
    if not corpus:
        raise NegareError("corpus_stats requires a non-empty corpus")

    per_category: dict[RecordCategory, list[tuple[int, int, int, float | None]]] = {}
    for record in corpus:
        tokens = textseg.tokenize(record.text)
        sentences = textseg.split_sentences(tokens, record.text)
        words = [t.text for t in tokens if _is_word(t.text)]
        mean_len = (
            sum(len(w) for w in words) / len(words) if words else None
        )
        per_category.setdefault(record.category, []).append(
            (len(sentences), len(words), len({w.casefold() for w in words}), mean_len)
        )

    categories = []
    for category in CATEGORY_ORDER:
        rows = per_category.get(category)
        if not rows:
            continue
        sent_counts = [r[0] for r in rows]
        word_counts = [r[1] for r in rows]
        uniq_counts = [r[2] for r in rows]
        word_lens = [r[3] for r in rows if r[3] is not None]
        categories.append(
            CategoryStats(
                category=category,
                records=len(rows),
                sentences=_measure(sent_counts, total=True),
                words=_measure(word_counts, total=True),
                unique_words=_measure(uniq_counts, total=True),
                word_length=_measure(word_lens or [0.0], total=False),
            )
        )
    return TextStats(categories=tuple(categories))


def _measure(values: Sequence[float], total: bool) -> MeasureStats:
    q1, q3 = _quartiles(values)
    return MeasureStats(
        mean=sum(values) / len(values),
        q1=q1,
        q3=q3,
        total=int(sum(values)) if total else None,
    )


# ---------------------------------------------------------------------------
# Fold assignment


@dataclass(frozen=True)
class FoldAssignment:
    """Record-level fold assignment keyed on record id."""

    k: int
    seed: int
    assignment: Mapping[str, int]

    def fold_of(self, record_id: str) -> int:
        return self.assignment[record_id]

    def records_in(self, fold: int) -> list[str]:
        return sorted(rid for rid, f in self.assignment.items() if f == fold)

    def fold_sizes(self) -> list[int]:
        sizes = [0] * self.k
        for fold in self.assignment.values():
            sizes[fold] += 1
        return sizes


def split_folds(corpus: Corpus, k: int, seed: int) -> FoldAssignment:
    """Assign records to ``k`` balanced folds, deterministically.

    Each record id is hashed with the seed to a provisional fold; folds are
    then rebalanced by moving the smallest id from the largest fold to the
    smallest until sizes differ by at most one. Keying on the id makes the
    assignment independent of record order in the input file.
    """
    if k < 2:
        raise NegareError(f"k must be >= 2, got {k}")
    ids = sorted({record.id for record in corpus})
    if len(ids) != len(corpus):
        raise NegareError("duplicate record ids in corpus")
    if k > len(ids):
        raise NegareError(f"k={k} exceeds record count {len(ids)}")

    assignment: dict[str, int] = {}
    for rid in ids:
        digest = hashlib.sha256(f"{seed}:{rid}".encode("utf-8")).digest()
        assignment[rid] = int.from_bytes(digest[:8], "big") % k

    folds: list[list[str]] = [[] for _ in range(k)]
    for rid in ids:
        folds[assignment[rid]].append(rid)

    while True:
        sizes = [len(f) for f in folds]
        largest = max(range(k), key=lambda i: (sizes[i], -i))
        smallest = min(range(k), key=lambda i: (sizes[i], i))
        if sizes[largest] - sizes[smallest] <= 1:
            break
        moved = folds[largest].pop(0)
        folds[smallest].append(moved)
        assignment[moved] = smallest

    return FoldAssignment(k=k, seed=seed, assignment=assignment)


def write_folds(folds: FoldAssignment, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"#k: {folds.k}\n#seed: {folds.seed}\n")
        for rid in sorted(folds.assignment):
            handle.write(f"{rid}\t{folds.assignment[rid]}\n")


def read_folds(path: str | Path) -> FoldAssignment:
    k: int | None = None
    seed: int | None = None
    assignment: dict[str, int] = {}
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#k:"):
                k = int(line.split(":", 1)[1])
            elif line.startswith("#seed:"):
                seed = int(line.split(":", 1)[1])
            elif line.startswith("#"):
                continue
            else:
                parts = line.split("\t")
                if len(parts) != 2:
                    raise NegareError(f"{path}: line {line_number}: expected record_id<TAB>fold")
                rid, fold_str = parts
                if rid in assignment:
                    raise NegareError(f"{path}: line {line_number}: duplicate record id {rid!r}")
                assignment[rid] = int(fold_str)
    if k is None or seed is None:
        raise NegareError(f"{path}: missing #k/#seed header")
    bad = [rid for rid, fold in assignment.items() if not 0 <= fold < k]
    if bad:
        raise NegareError(f"{path}: fold index out of range for records {bad[:3]}")
    return FoldAssignment(k=k, seed=seed, assignment=assignment)


def index_by_id(corpus: Corpus) -> dict[str, Record]:
    index = {record.id: record for record in corpus}
    if len(index) != len(corpus):
        raise NegareError("duplicate record ids in corpus")
    return index


def iter_entities(corpus: Iterable[Record]):
    """Yield (record, entity) pairs in corpus order."""
    for record in corpus:
        for entity in record.entities:
            yield record, entity
