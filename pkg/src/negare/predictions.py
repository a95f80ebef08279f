"""Prediction interchange format and majority-vote ensembling.

Every method (the rule engine, the biLSTM baseline, externally produced
model outputs) exchanges per-entity labels through one line-delimited
format::

    #method: rule_based
    #threshold: 0.5
    #manifest: <sha256 hex of the covered entity keys>
    record_id<TAB>entity_id<TAB>label[<TAB>score]

UTF-8, LF line endings, body sorted by (record_id, entity_id). The manifest
is the sha256 hex digest of ``"\\n".join(f"{record_id}\\t{entity_id}")``
over the sorted keys, so two files covering the same entities always carry
the same manifest and coverage mismatches are detected up front.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from negare.corpus import Corpus, Label
from negare.errors import NegareError

DEFAULT_THRESHOLD = 0.5

Key = tuple[str, str]


class PredictionError(NegareError):
    """Malformed prediction file or inconsistent prediction set."""


@dataclass(frozen=True)
class Prediction:
    """One entity's predicted label, optionally with the model score."""

    record_id: str
    entity_id: str
    label: Label
    score: float | None = None

    @property
    def key(self) -> Key:
        return (self.record_id, self.entity_id)


@dataclass(frozen=True)
class PredictionSet:
    """All predictions of one method at one threshold.

    Immutable and internally consistent: keys are unique, predictions are
    held sorted by (record_id, entity_id), and any score agrees with its
    label under the threshold.
    """

    method: str
    threshold: float
    predictions: tuple[Prediction, ...]

    def __post_init__(self) -> None:
        if not self.method or any(c in self.method for c in "\t\n"):
            raise PredictionError(f"bad method name {self.method!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise PredictionError(f"threshold {self.threshold} outside [0, 1]")
        # Normalize ordering so equality and serialization are canonical.
        ordered = tuple(sorted(self.predictions, key=lambda p: p.key))
        object.__setattr__(self, "predictions", ordered)
        seen: set[Key] = set()
        for pred in ordered:
            if pred.key in seen:
                raise PredictionError(
                    f"duplicate prediction for record {pred.record_id!r} "
                    f"entity {pred.entity_id!r}"
                )
            seen.add(pred.key)
            if pred.score is not None:
                if not 0.0 <= pred.score <= 1.0:
                    raise PredictionError(
                        f"{pred.record_id}/{pred.entity_id}: score {pred.score} "
                        f"outside [0, 1]"
                    )
                implied = Label.NEGATED if pred.score >= self.threshold else Label.NOT_NEGATED
                if pred.label is not implied:
                    raise PredictionError(
                        f"{pred.record_id}/{pred.entity_id}: label "
                        f"{pred.label.value} contradicts score {pred.score} at "
                        f"threshold {self.threshold}"
                    )

    @cached_property
    def by_key(self) -> dict[Key, Prediction]:
        return {pred.key: pred for pred in self.predictions}

    @cached_property
    def keys(self) -> frozenset[Key]:
        return frozenset(pred.key for pred in self.predictions)

    @cached_property
    def manifest(self) -> str:
        return entity_manifest(self.keys)

    def label_of(self, record_id: str, entity_id: str) -> Label:
        return self.by_key[(record_id, entity_id)].label

    def __len__(self) -> int:
        return len(self.predictions)


def entity_manifest(keys: Iterable[Key]) -> str:
    """Order-independent fingerprint of a set of (record_id, entity_id) keys."""
    payload = "\n".join(f"{rid}\t{eid}" for rid, eid in sorted(keys))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def corpus_manifest(corpus: Corpus) -> str:
    """Manifest of every entity key in a corpus."""
    return entity_manifest(
        (record.id, entity.entity_id)
        for record in corpus
        for entity in record.entities
    )


def write_predictions(pred_set: PredictionSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"#method: {pred_set.method}\n")
        handle.write(f"#threshold: {pred_set.threshold!r}\n")
        handle.write(f"#manifest: {pred_set.manifest}\n")
        for pred in pred_set.predictions:
            line = f"{pred.record_id}\t{pred.entity_id}\t{pred.label.value}"
            if pred.score is not None:
                line += f"\t{pred.score!r}"
            handle.write(line + "\n")


def read_predictions(path: str | Path) -> PredictionSet:
    """Read and fully validate one prediction file.

    Raises on duplicate keys, label/score/threshold contradictions, and a
    stored manifest that does not match the hash of the keys actually read.
    """
    method: str | None = None
    threshold: float | None = None
    stored_manifest: str | None = None
    predictions: list[Prediction] = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#method:"):
                method = line.split(":", 1)[1].strip()
            elif line.startswith("#threshold:"):
                try:
                    threshold = float(line.split(":", 1)[1])
                except ValueError:
                    raise PredictionError(
                        f"{path}: line {line_number}: bad threshold"
                    ) from None
            elif line.startswith("#manifest:"):
                stored_manifest = line.split(":", 1)[1].strip()
            elif line.startswith("#"):
                continue
            else:
                parts = line.split("\t")
                if len(parts) not in (3, 4):
                    raise PredictionError(
                        f"{path}: line {line_number}: expected "
                        f"record_id<TAB>entity_id<TAB>label[<TAB>score]"
                    )
                try:
                    label = Label(parts[2])
                except ValueError:
                    raise PredictionError(
                        f"{path}: line {line_number}: unknown label {parts[2]!r}"
                    ) from None
                score = None
                if len(parts) == 4:
                    try:
                        score = float(parts[3])
                    except ValueError:
                        raise PredictionError(
                            f"{path}: line {line_number}: bad score {parts[3]!r}"
                        ) from None
                predictions.append(
                    Prediction(
                        record_id=parts[0], entity_id=parts[1], label=label, score=score
                    )
                )
    if method is None or threshold is None:
        raise PredictionError(f"{path}: missing #method/#threshold header")
    try:
        pred_set = PredictionSet(
            method=method, threshold=threshold, predictions=tuple(predictions)
        )
    except PredictionError as exc:
        raise PredictionError(f"{path}: {exc}") from None
    if stored_manifest is not None and stored_manifest != pred_set.manifest:
        raise PredictionError(
            f"{path}: manifest mismatch: header says {stored_manifest}, "
            f"entity keys hash to {pred_set.manifest}"
        )
    return pred_set


def _require_identical_coverage(sets: Sequence[PredictionSet]) -> frozenset[Key]:
    base = sets[0].keys
    for other in sets[1:]:
        if other.keys != base:
            missing = sorted(base - other.keys)[:3]
            extra = sorted(other.keys - base)[:3]
            raise PredictionError(
                f"coverage mismatch between {sets[0].method!r} and "
                f"{other.method!r}: missing {missing}, extra {extra}"
            )
    return base


def majority_vote(
    a: PredictionSet, b: PredictionSet, c: PredictionSet
) -> PredictionSet:
    """Per-entity majority label over three prediction sets.

    All three inputs must cover exactly the same entity keys. The output
    carries no scores; its method name records the member methods.
    """
    members = (a, b, c)
    keys = _require_identical_coverage(members)
    out = []
    for rid, eid in sorted(keys):
        votes = sum(1 for m in members if m.label_of(rid, eid) is Label.NEGATED)
        label = Label.NEGATED if votes >= 2 else Label.NOT_NEGATED
        out.append(Prediction(record_id=rid, entity_id=eid, label=label))
    method = f"voting_ensemble({a.method}+{b.method}+{c.method})"
    return PredictionSet(
        method=method, threshold=DEFAULT_THRESHOLD, predictions=tuple(out)
    )


@dataclass(frozen=True)
class DisagreementPartition:
    """Exclusive misclassification counts per non-empty method subset.

    For methods (A, B, C) there are seven cells: entities only A got wrong,
    only B, only C, exactly A and B, and so on up to all three. Cells are
    disjoint by construction and sum to the number of entities at least one
    method misclassified.
    """

    methods: tuple[str, ...]
    cells: dict[frozenset[str], int]

    def cell(self, *methods: str) -> int:
        return self.cells.get(frozenset(methods), 0)

    def total(self) -> int:
        return sum(self.cells.values())

    def to_table(self) -> str:
        lines = [f"{'Methods in error':<48}{'Entities':>10}"]
        ordered = sorted(
            self.cells,
            key=lambda s: (len(s), tuple(sorted(self.methods.index(m) for m in s))),
        )
        for subset in ordered:
            name = " + ".join(m for m in self.methods if m in subset)
            lines.append(f"{name:<48}{self.cells[subset]:>10}")
        lines.append(f"{'total misclassified by at least one':<48}{self.total():>10}")
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        rows = []
        ordered = sorted(
            self.cells,
            key=lambda s: (len(s), tuple(sorted(self.methods.index(m) for m in s))),
        )
        for subset in ordered:
            rows.append(
                json.dumps(
                    {
                        "methods": [m for m in self.methods if m in subset],
                        "entities": self.cells[subset],
                    },
                    ensure_ascii=False,
                )
            )
        rows.append(json.dumps({"methods": "any", "entities": self.total()}))
        return "\n".join(rows) + "\n"


def disagreement_partition(
    sets: Sequence[PredictionSet], gold: Corpus
) -> DisagreementPartition:
    """Partition misclassified entities by exactly which methods erred."""
    if not sets:
        raise PredictionError("disagreement_partition requires at least one set")
    methods = tuple(s.method for s in sets)
    if len(set(methods)) != len(methods):
        raise PredictionError(f"duplicate method names: {methods}")
    keys = _require_identical_coverage(sets)

    gold_labels: dict[Key, Label] = {}
    for record in gold:
        for entity in record.entities:
            gold_labels[(record.id, entity.entity_id)] = entity.gold_label
    missing = sorted(keys - gold_labels.keys())[:3]
    if missing:
        raise PredictionError(f"entities absent from gold corpus: {missing}")

    cells: dict[frozenset[str], int] = {}
    for key in keys:
        wrong = frozenset(
            s.method for s in sets if s.by_key[key].label is not gold_labels[key]
        )
        if wrong:
            cells[wrong] = cells.get(wrong, 0) + 1
    return DisagreementPartition(methods=methods, cells=cells)
