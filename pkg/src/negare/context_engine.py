"""Rule-based negation detection over trigger lexicons.

The engine works on token sequences, one sentence at a time. Triggers come
in four kinds:

* ``neg_forward``: negates entities after it, to the end of the sentence
  ("geen aanwijzing voor ...").
* ``neg_backward``: negates entities before it ("... werd uitgesloten").
* ``pseudo``: a longer phrase that contains negation words but does not
  negate ("niet alleen"); it suppresses any negation or termination match
  fully contained in it.
* ``termination``: cuts a negation scope short ("maar", "echter").

Matching is leftmost-longest per kind; a matched phrase consumes its token
positions for that kind. Scopes never cross sentence boundaries and never
include the trigger's own tokens. An entity is negated when any of its
tokens lies inside any scope.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from negare import textseg
from negare.corpus import Corpus, Label, Record
from negare.errors import NegareError
from negare.predictions import DEFAULT_THRESHOLD, Prediction, PredictionSet

METHOD_RULE_BASED = "rule_based"

WILDCARD = "*"


class LexiconError(NegareError):
    """Malformed lexicon file or duplicate/invalid trigger."""


class TriggerKind(Enum):
    NEG_FORWARD = "neg_forward"
    NEG_BACKWARD = "neg_backward"
    PSEUDO = "pseudo"
    TERMINATION = "termination"


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class Trigger:
    """One lexicon entry: a token-sequence pattern with a kind.

    Pattern elements are casefolded literal tokens, except ``*`` which
    matches exactly one arbitrary token. ``max_scope_tokens`` optionally
    caps how far the scope extends from the trigger.
    """

    id: str
    pattern: tuple[str, ...]
    kind: TriggerKind
    max_scope_tokens: int | None = None

    def __post_init__(self) -> None:
        if not self.pattern or any(not el for el in self.pattern):
            raise LexiconError(f"trigger {self.id!r}: empty pattern")
        if self.max_scope_tokens is not None and self.max_scope_tokens < 0:
            raise LexiconError(f"trigger {self.id!r}: negative max_scope_tokens")

    @property
    def length(self) -> int:
        return len(self.pattern)


@dataclass(frozen=True)
class TriggerLexicon:
    triggers: tuple[Trigger, ...]
    source: str = ""
    version: str = ""

    def __post_init__(self) -> None:
        seen: set[tuple[tuple[str, ...], TriggerKind]] = set()
        for trigger in self.triggers:
            key = (trigger.pattern, trigger.kind)
            if key in seen:
                raise LexiconError(
                    f"duplicate trigger {' '.join(trigger.pattern)!r} "
                    f"of kind {trigger.kind.value}"
                )
            seen.add(key)

    def of_kind(self, kind: TriggerKind) -> tuple[Trigger, ...]:
        return tuple(t for t in self.triggers if t.kind is kind)

    def __len__(self) -> int:
        return len(self.triggers)


def make_trigger(
    pattern: str, kind: TriggerKind, max_scope_tokens: int | None = None
) -> Trigger:
    """Build a trigger from a whitespace-separated pattern string."""
    elements = tuple(
        el if el == WILDCARD else el.casefold() for el in pattern.split()
    )
    trigger_id = f"{kind.value}:{' '.join(elements)}"
    return Trigger(
        id=trigger_id, pattern=elements, kind=kind, max_scope_tokens=max_scope_tokens
    )


def load_lexicon(path: str | Path) -> TriggerLexicon:
    """Load a TSV lexicon: ``pattern<TAB>kind[<TAB>max_scope_tokens]``.

    ``#`` starts a comment line; a ``#version:`` comment is captured as the
    lexicon version. Unknown kinds, empty patterns, and duplicate
    (pattern, kind) pairs are rejected with their line number.
    """
    triggers: list[Trigger] = []
    version = ""
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if line.startswith("#version:"):
                version = line.split(":", 1)[1].strip()
                continue
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise LexiconError(
                    f"{path}: line {line_number}: expected "
                    f"pattern<TAB>kind[<TAB>max_scope_tokens]"
                )
            pattern_str = parts[0].strip()
            if not pattern_str:
                raise LexiconError(f"{path}: line {line_number}: empty pattern")
            try:
                kind = TriggerKind(parts[1].strip())
            except ValueError:
                raise LexiconError(
                    f"{path}: line {line_number}: unknown kind {parts[1].strip()!r}"
                ) from None
            max_scope = None
            if len(parts) == 3 and parts[2].strip():
                try:
                    max_scope = int(parts[2])
                except ValueError:
                    raise LexiconError(
                        f"{path}: line {line_number}: bad max_scope_tokens "
                        f"{parts[2]!r}"
                    ) from None
            triggers.append(make_trigger(pattern_str, kind, max_scope))
    try:
        return TriggerLexicon(
            triggers=tuple(triggers), source=str(path), version=version
        )
    except LexiconError as exc:
        raise LexiconError(f"{path}: {exc}") from None


_DEFAULT_LEXICON_FILE = Path(__file__).parent / "data" / "lexicon_nl.tsv"


def default_lexicon() -> TriggerLexicon:
    """The bundled Dutch starter lexicon."""
    return load_lexicon(_DEFAULT_LEXICON_FILE)


# ---------------------------------------------------------------------------
# Matching


@dataclass(frozen=True)
class TriggerMatch:
    """A trigger occurrence at a token index range within one sentence."""

    trigger: Trigger
    start: int
    end: int

    @property
    def kind(self) -> TriggerKind:
        return self.trigger.kind


def _match_at(tokens: Sequence[str], position: int, trigger: Trigger) -> bool:
    if position + trigger.length > len(tokens):
        return False
    for offset, element in enumerate(trigger.pattern):
        if element != WILDCARD and tokens[position + offset] != element:
            return False
    return True


def match_triggers(
    sentence_tokens: Sequence[str], lexicon: TriggerLexicon
) -> list[TriggerMatch]:
    """All surviving trigger matches in one sentence, in position order.

    Per kind, the scan is leftmost-longest with positional consumption: at
    each token the longest matching pattern of that kind wins and the scan
    resumes after it. Negation and termination matches fully contained in a
    pseudo match are then suppressed; pseudo matches themselves survive.
    """
    tokens = [t.casefold() for t in sentence_tokens]
    matches: list[TriggerMatch] = []
    for kind in TriggerKind:
        candidates = lexicon.of_kind(kind)
        if not candidates:
            continue
        position = 0
        while position < len(tokens):
            best: Trigger | None = None
            for trigger in candidates:
                if _match_at(tokens, position, trigger):
                    if best is None or trigger.length > best.length:
                        best = trigger
            if best is None:
                position += 1
            else:
                matches.append(
                    TriggerMatch(trigger=best, start=position, end=position + best.length)
                )
                position += best.length

    pseudo_spans = [
        (m.start, m.end) for m in matches if m.kind is TriggerKind.PSEUDO
    ]
    surviving = [
        m
        for m in matches
        if m.kind is TriggerKind.PSEUDO
        or not any(ps <= m.start and m.end <= pe for ps, pe in pseudo_spans)
    ]
    surviving.sort(key=lambda m: (m.start, m.end, m.trigger.kind.value))
    return surviving


# ---------------------------------------------------------------------------
# Scope resolution


@dataclass(frozen=True)
class Scope:
    """A directed token range governed by one negation trigger match."""

    trigger_id: str
    direction: Direction
    start: int
    end: int

    @property
    def scope_id(self) -> str:
        return f"{self.trigger_id}[{self.start},{self.end})"

    def covers_any(self, token_start: int, token_end: int) -> bool:
        # max/min form so empty ranges on either side never overlap.
        return max(self.start, token_start) < min(self.end, token_end)


def resolve_scopes(
    matches: Sequence[TriggerMatch], sentence_tokens: Sequence[str]
) -> list[Scope]:
    """Directional scopes for every negation match, cut by terminations.

    A forward scope runs from the trigger's end to the start of the next
    termination match (or the sentence end); a backward scope runs from the
    end of the previous termination match (or the sentence start) to the
    trigger's start. A trigger's ``max_scope_tokens`` caps the range.
    Empty scopes are kept as empty ranges.
    """
    sentence_len = len(sentence_tokens)
    terminations = [m for m in matches if m.kind is TriggerKind.TERMINATION]
    scopes: list[Scope] = []
    for match in matches:
        if match.kind is TriggerKind.NEG_FORWARD:
            end = sentence_len
            for term in terminations:
                if term.start >= match.end:
                    end = min(end, term.start)
            if match.trigger.max_scope_tokens is not None:
                end = min(end, match.end + match.trigger.max_scope_tokens)
            start = match.end
            scopes.append(
                Scope(
                    trigger_id=match.trigger.id,
                    direction=Direction.FORWARD,
                    start=start,
                    end=max(start, end),
                )
            )
        elif match.kind is TriggerKind.NEG_BACKWARD:
            start = 0
            for term in terminations:
                if term.end <= match.start:
                    start = max(start, term.end)
            if match.trigger.max_scope_tokens is not None:
                start = max(start, match.start - match.trigger.max_scope_tokens)
            end = match.start
            scopes.append(
                Scope(
                    trigger_id=match.trigger.id,
                    direction=Direction.BACKWARD,
                    start=min(start, end),
                    end=end,
                )
            )
    return scopes


@dataclass(frozen=True)
class NegationLabel:
    """Engine verdict for one entity, with the scopes that caused it."""

    label: Label
    provenance: tuple[str, ...]

    def __post_init__(self) -> None:
        if (self.label is Label.NEGATED) != bool(self.provenance):
            raise NegareError(
                "NegationLabel invariant: negated iff provenance non-empty"
            )


def classify_entity(
    entity_range: tuple[int, int], scopes: Sequence[Scope]
) -> NegationLabel:
    """Negated iff any entity token lies within any scope (any overlap)."""
    token_start, token_end = entity_range
    governing = tuple(
        scope.scope_id for scope in scopes if scope.covers_any(token_start, token_end)
    )
    label = Label.NEGATED if governing else Label.NOT_NEGATED
    return NegationLabel(label=label, provenance=governing)


# ---------------------------------------------------------------------------
# End-to-end detection


def analyze_sentence(
    sentence_tokens: Sequence[str], lexicon: TriggerLexicon
) -> list[Scope]:
    """Match triggers and resolve scopes for one tokenized sentence."""
    return resolve_scopes(match_triggers(sentence_tokens, lexicon), sentence_tokens)


def label_entity_tokens(
    tokens: Sequence[str], entity_range: tuple[int, int], lexicon: TriggerLexicon
) -> NegationLabel:
    """Classify an entity within a single pre-tokenized sentence."""
    return classify_entity(entity_range, analyze_sentence(tokens, lexicon))


def detect(
    record: Record,
    lexicon: TriggerLexicon,
    threshold: float = DEFAULT_THRESHOLD,
    method: str = METHOD_RULE_BASED,
) -> PredictionSet:
    """Classify every entity of one record.

    Tokenizes, splits sentences, matches and resolves once per sentence,
    then classifies each entity against the scopes of the sentence holding
    its first token (an entity straddling a boundary counts only the tokens
    in that sentence). The rule engine emits labels without scores.
    """
    tokens = textseg.tokenize(record.text)
    sentences = textseg.split_sentences(tokens, record.text)
    scopes_cache: dict[int, list[Scope]] = {}

    predictions = []
    for entity in sorted(record.entities, key=lambda e: e.entity_id):
        i, j = textseg.entity_token_range(tokens, entity.start, entity.end)
        sentence = textseg.sentence_of_token(sentences, i)
        if sentence.token_start not in scopes_cache:
            sentence_tokens = [
                t.text for t in tokens[sentence.token_start : sentence.token_end]
            ]
            scopes_cache[sentence.token_start] = analyze_sentence(
                sentence_tokens, lexicon
            )
        local_range = (
            i - sentence.token_start,
            min(j, sentence.token_end) - sentence.token_start,
        )
        verdict = classify_entity(local_range, scopes_cache[sentence.token_start])
        predictions.append(
            Prediction(
                record_id=record.id, entity_id=entity.entity_id, label=verdict.label
            )
        )
    return PredictionSet(
        method=method, threshold=threshold, predictions=tuple(predictions)
    )


def detect_corpus(
    corpus: Corpus | Iterable[Record],
    lexicon: TriggerLexicon,
    threshold: float = DEFAULT_THRESHOLD,
    method: str = METHOD_RULE_BASED,
    jobs: int = 1,
) -> PredictionSet:
    """Run detect over a whole corpus, optionally in parallel.

    Records are independent, so they may be processed concurrently; the
    merged output is ordered by (record_id, entity_id) either way and is
    byte-identical across serial and parallel runs.
    """
    records = list(corpus)

    def run(record: Record) -> PredictionSet:
        return detect(record, lexicon, threshold=threshold, method=method)

    if jobs > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_record = list(pool.map(run, records))
    else:
        per_record = [run(record) for record in records]

    merged = tuple(pred for ps in per_record for pred in ps.predictions)
    return PredictionSet(method=method, threshold=threshold, predictions=merged)
