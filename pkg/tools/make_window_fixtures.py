"""Regenerate the shared context-window fixtures.

Each case is ``(name, markup)`` where the markup marks exactly one entity
span with square brackets. For every case the script tokenizes the text,
takes the asymmetric context window (15 tokens left, 10 right, clamped at
record edges) around the entity, and records both the raw window tokens
and the preprocessed form: tokens casefolded, with the entity tokens
collapsed into a single ``[TERM]`` placeholder.

The fixture file is the contract between this package and any downstream
consumer that re-implements the windowing (for example the baseline
trainer, which lives in another language): both sides must reproduce
``collapsed_tokens`` bit-exactly. A test replays every case through
``negare.textseg`` and fails if the checked-in file drifts.

Usage: python tools/make_window_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
OUT = REPO / "fixtures" / "windows_golden.jsonl"

LEFT = 15
RIGHT = 10
PLACEHOLDER = "[TERM]"

# One bracketed span per case. Coverage: clamping at both record edges,
# full-width windows in long text, multi-token entities, punctuation
# peeling (leading and trailing), trailing - and + markers, abbreviation
# periods, decimal points, windows crossing sentence boundaries, newline
# whitespace, casefolding, and entity spans that cover only part of a
# token (the whole token joins the entity range).
CASES: list[tuple[str, str]] = [
    ("canonical_short", "Geen tekenen van [diabetes mellitus]."),
    ("entity_at_record_start", "[Koorts] sinds gisteren afwezig volgens de familie."),
    ("entity_at_record_end", "De patient heeft al drie dagen last van [hoofdpijn]"),
    (
        "long_both_sides",
        "De dienstdoende arts zag de patient gisteravond laat op de afdeling "
        "en noteerde na uitgebreid lichamelijk onderzoek geen aanwijzingen "
        "voor [pneumonie] hoewel de zuurstofsaturatie eerder die avond kort "
        "gedaald was en de familie zich grote zorgen bleef maken over het "
        "beloop van de opname.",
    ),
    (
        "multi_token_entity",
        "Controle in verband met [diabetes mellitus type 2] bij bekende "
        "hypertensie.",
    ),
    ("trailing_minus_plus", "Oedeem-, [pijn]+ bij palpatie."),
    ("abbreviation_period", "Pat. heeft geen [koorts] bij controle."),
    ("decimal_number", "Temperatuur 38.2 graden, geen [koorts] gemeten."),
    ("cross_sentence_window", "Geen koorts. [Hoest] houdt aan bij inspanning."),
    ("parenthesized_entity", "Uitslag ([cardiomyopathie]) niet bevestigd."),
    ("casefolded_context", "GEEN [Diabetes] aangetoond."),
    ("newline_whitespace", "geen koorts\n[keelpijn] bij slikken aanwezig"),
    ("partial_token_span", "Patiente is al dagen [koorts]vrij en mobiliseert."),
]


def parse_markup(markup: str) -> tuple[str, int, int]:
    open_at = markup.index("[")
    close_at = markup.index("]")
    text = markup[:open_at] + markup[open_at + 1 : close_at] + markup[close_at + 1 :]
    return text, open_at, close_at - 1


def build_case(name: str, markup: str) -> dict:
    from negare import textseg
    from negare.corpus import EntityAnnotation, Label, Record, RecordCategory

    text, start, end = parse_markup(markup)
    record = Record(
        id=name,
        category=RecordCategory.GENERAL_PRACTITIONER,
        text=text,
        entities=(
            EntityAnnotation(
                entity_id="e1",
                start=start,
                end=end,
                surface=text[start:end],
                gold_label=Label.NOT_NEGATED,
            ),
        ),
    )
    entity = record.entities[0]
    tokens = textseg.tokenize(text)
    e_start, e_end = textseg.entity_token_range(tokens, start, end)
    window = textseg.asymmetric_context(record, entity, LEFT, RIGHT, tokens=tokens)

    raw = [t.text for t in tokens[window.token_start : window.token_end]]
    collapsed: list[str] = []
    for i in range(window.token_start, window.token_end):
        if e_start <= i < e_end:
            if i == e_start:
                collapsed.append(PLACEHOLDER)
            continue
        collapsed.append(tokens[i].text.casefold())

    return {
        "case": name,
        "text": text,
        "entity": {"start": start, "end": end},
        "left": LEFT,
        "right": RIGHT,
        "placeholder": PLACEHOLDER,
        "token_start": window.token_start,
        "token_end": window.token_end,
        "entity_token_start": e_start,
        "entity_token_end": e_end,
        "window_tokens": raw,
        "collapsed_tokens": collapsed,
    }


def main() -> int:
    rows = [build_case(name, markup) for name, markup in CASES]
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"wrote {len(rows)} window fixtures to {OUT}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
