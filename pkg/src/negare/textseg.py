"""Deterministic tokenization, sentence splitting and token-window extraction.

Everything downstream (trigger matching, record statistics, the length
filter, window-based baselines) works on the token stream produced here, so
the rules are deliberately small and fixed:

* split on whitespace, then peel leading/trailing punctuation into
  one-character tokens;
* a hyphen or plus attached to a word's end is peeled too ("klam+" ->
  "klam", "+"), but mid-word hyphens stay ("infection-induced" is one token);
* known abbreviations ("evt.", "o.a.") keep their trailing period, which is
  also what stops the sentence splitter from breaking after them.

Offsets are character offsets into the original text; concatenating token
texts with the original gaps reconstructs the input exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from negare.errors import NegareError

# Peeled from either end of a whitespace chunk.
_PEEL_CHARS = frozenset('()[]{}:;,.?!"')
# Peeled from the end only: a trailing minus is clinical shorthand for
# negation and must become its own token.
_TRAILING_ONLY = frozenset("-+")

_SENTENCE_TERMINATORS = frozenset({".", "!", "?", ";"})

_DATA_DIR = Path(__file__).parent / "data"
_DEFAULT_ABBREV_FILE = _DATA_DIR / "abbreviations_nl.txt"

_default_abbreviations: frozenset[str] | None = None


class AlignmentError(NegareError):
    """An annotated span does not overlap any token of its record."""


@dataclass(frozen=True)
class Token:
    """One token: its text, character span and ordinal within the record."""

    text: str
    start: int
    end: int
    index: int


@dataclass(frozen=True)
class SentenceSpan:
    """A sentence as a character span plus the token index range it covers."""

    start: int
    end: int
    token_start: int
    token_end: int


@dataclass(frozen=True)
class TokenWindow:
    """A token index range around one center entity.

    ``entity_flags`` lists every entity whose token span intersects the
    window, in token order, flagging which one is the center. Evaluation
    consumers must score only the center entity.
    """

    center_entity_id: str
    token_start: int
    token_end: int
    entity_flags: tuple[tuple[str, bool], ...] = field(default_factory=tuple)


def load_abbreviations(path: str | Path) -> frozenset[str]:
    """Read an abbreviation list: one per line, ``#`` comments, UTF-8."""
    abbrevs = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.strip()
        if entry and not entry.startswith("#"):
            abbrevs.add(entry.lower())
    return frozenset(abbrevs)


def default_abbreviations() -> frozenset[str]:
    """The bundled Dutch clinical seed list, loaded once."""
    global _default_abbreviations
    if _default_abbreviations is None:
        _default_abbreviations = load_abbreviations(_DEFAULT_ABBREV_FILE)
    return _default_abbreviations


def tokenize(text: str, abbreviations: frozenset[str] | None = None) -> list[Token]:
    """Split ``text`` into tokens with exact character spans.

    ``abbreviations`` defaults to the bundled list; entries keep their
    trailing period as part of the token.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()

    spans: list[tuple[int, int]] = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        end = pos
        while end < n and not text[end].isspace():
            end += 1
        _peel_chunk(text, pos, end, abbreviations, spans)
        pos = end

    return [
        Token(text=text[s:e], start=s, end=e, index=i)
        for i, (s, e) in enumerate(spans)
    ]


def _peel_chunk(
    text: str,
    start: int,
    end: int,
    abbreviations: frozenset[str],
    out: list[tuple[int, int]],
) -> None:
    s, e = start, end
    leading: list[tuple[int, int]] = []
    while s < e and text[s] in _PEEL_CHARS:
        leading.append((s, s + 1))
        s += 1
    trailing: list[tuple[int, int]] = []
    while e > s:
        ch = text[e - 1]
        if ch not in _PEEL_CHARS and ch not in _TRAILING_ONLY:
            break
        if text[s:e].lower() in abbreviations:
            break
        trailing.append((e - 1, e))
        e -= 1
    out.extend(leading)
    if s < e:
        out.append((s, e))
    out.extend(reversed(trailing))


def split_sentences(tokens: list[Token], text: str) -> list[SentenceSpan]:
    """Group ``tokens`` (from :func:`tokenize` on ``text``) into sentences.

    A boundary falls after ``.``, ``!``, ``?`` or ``;`` tokens and wherever
    the gap between two tokens contains a newline. Abbreviation periods
    never split because they are part of their token; neither do decimal
    points ("38.2" is one token). The final partial sentence is closed at
    end of text.
    """
    sentences: list[SentenceSpan] = []
    if not tokens:
        return sentences

    first = 0
    for i, token in enumerate(tokens):
        boundary = token.text in _SENTENCE_TERMINATORS
        if not boundary and i + 1 < len(tokens):
            boundary = "\n" in text[token.end : tokens[i + 1].start]
        if boundary or i == len(tokens) - 1:
            sentences.append(
                SentenceSpan(
                    start=tokens[first].start,
                    end=token.end,
                    token_start=first,
                    token_end=i + 1,
                )
            )
            first = i + 1
    return sentences


def sentence_of_token(sentences: list[SentenceSpan], token_index: int) -> SentenceSpan:
    """The sentence containing ``token_index``; sentences partition the tokens."""
    for sentence in sentences:
        if sentence.token_start <= token_index < sentence.token_end:
            return sentence
    raise AlignmentError(f"token index {token_index} outside all sentences")


def entity_token_range(
    tokens: list[Token], char_start: int, char_end: int
) -> tuple[int, int]:
    """Token index range [i, j) of tokens overlapping the character span."""
    first = None
    last = None
    for token in tokens:
        if token.end > char_start and token.start < char_end:
            if first is None:
                first = token.index
            last = token.index
    if first is None or last is None:
        raise AlignmentError(
            f"char span [{char_start}, {char_end}) overlaps no token"
        )
    return first, last + 1


def _window_entity_flags(record, tokens, start, end, center_entity_id):
    flags: list[tuple[int, str, bool]] = []
    for entity in record.entities:
        try:
            e_start, e_end = entity_token_range(tokens, entity.start, entity.end)
        except AlignmentError:
            continue
        if e_end > start and e_start < end:
            flags.append((e_start, entity.entity_id, entity.entity_id == center_entity_id))
    flags.sort()
    return tuple((eid, is_center) for _, eid, is_center in flags)


def extract_window(record, entity, window_size: int, tokens: list[Token] | None = None) -> TokenWindow:
    """A window of ``window_size`` tokens centered on ``entity``.

    Clamped at record edges with the deficit pushed to the other side when
    possible; with an even split the left side gets the extra token.
    """
    if window_size < 1:
        raise ValueError("window_size must be >= 1")
    if tokens is None:
        tokens = tokenize(record.text)
    n = len(tokens)
    e_start, e_end = entity_token_range(tokens, entity.start, entity.end)

    pad = window_size - (e_end - e_start)
    left = (pad + 1) // 2 if pad > 0 else 0
    right = pad // 2 if pad > 0 else 0

    start = e_start - left
    end = e_end + right
    if start < 0:
        end = min(n, end - start)
        start = 0
    if end > n:
        start = max(0, start - (end - n))
        end = n

    return TokenWindow(
        center_entity_id=entity.entity_id,
        token_start=start,
        token_end=end,
        entity_flags=_window_entity_flags(record, tokens, start, end, entity.entity_id),
    )


def asymmetric_context(
    record, entity, left: int, right: int, tokens: list[Token] | None = None
) -> TokenWindow:
    """Up to ``left`` tokens before the entity and ``right`` after, clamped.

    Unlike :func:`extract_window` a shortfall on one side is not moved to
    the other; the entity tokens are always included.
    """
    if left < 0 or right < 0:
        raise ValueError("left and right must be >= 0")
    if tokens is None:
        tokens = tokenize(record.text)
    n = len(tokens)
    e_start, e_end = entity_token_range(tokens, entity.start, entity.end)

    start = max(0, e_start - left)
    end = min(n, e_end + right)
    return TokenWindow(
        center_entity_id=entity.entity_id,
        token_start=start,
        token_end=end,
        entity_flags=_window_entity_flags(record, tokens, start, end, entity.entity_id),
    )
