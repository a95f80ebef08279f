"""Regenerate the bundled synthetic mini corpus.

Each source row is ``(category, markup, labels)``: the markup marks entity
spans with square brackets and ``labels`` gives one letter per bracket in
order, ``n`` (negated) or ``p`` (not negated). Labels are hand-assigned by
applying the engine's documented rule semantics to the sentence, so the
corpus doubles as a regression suite: the engine must reproduce every label
exactly.

The script writes ``src/negare/data/mini_corpus.jsonl`` and then replays
the engine over the result, exiting nonzero on any label it disagrees
with (which means either the hand label or the engine is wrong; decide by
re-deriving from the documented semantics, never by copying the engine's
answer).

Usage: python tools/make_mini_corpus.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
OUT = REPO / "src" / "negare" / "data" / "mini_corpus.jsonl"

GP = [
    ("Geen [koorts].", "n"),
    ("Er is geen [koorts] of [hoest].", "nn"),
    ("Patiënt heeft [keelpijn] en geen [koorts].", "pn"),
    ("Geen tekenen van [infectie], maar [hoest] persisteert.", "np"),
    ("Niet alleen [koorts], ook [hoofdpijn].", "pp"),
    ("Pat. ontkent [alcoholgebruik].", "n"),
    ("[Hoest] aanwezig, geen [koorts].", "pn"),
    ("Mogelijk geen [infectie].", "n"),
    ("Het is niet zeker of [bronchitis] speelt.", "p"),
    ("Geen toename van [hoofdpijn].", "p"),
    ("[Koorts] is niet aanwezig.", "p"),
    ("[Koorts] ontbreekt.", "p"),
    ("Geen koorts. [Hoest] sinds drie dagen.", "p"),
    ("geen koorts\n[Keelpijn] bij slikken", "p"),
    ("Geen koorts [hoest] aanwezig", "n"),
    ("Tractus: geen [misselijkheid], geen [braken]; wel [diarree].", "nnp"),
    ("Patiënt heeft [koorts] en [hoest].", "pp"),
    ("Geen klachten van [duizeligheid].", "n"),
    ("[Misselijkheid] -, [braken] -.", "pp"),
    ("Zonder [klachten] naar huis.", "n"),
    ("Nooit [migraine] gehad.", "n"),
    ("Geen [dyspnoe], echter wel [orthopnoe].", "np"),
    ("Anamnese zonder twijfel; geen [alarmsymptomen].", "n"),
    ("Patiënt rookt niet, maar drinkt [alcohol].", "p"),
    ("Geen [pijn], geen [koorts], geen [zweten].", "nnn"),
]

SPECIALIST = [
    ("Geen aanwijzing voor [endocarditis].", "n"),
    ("Geen aanwijzingen voor [recidief].", "n"),
    ("Echocardiografie: geen [klepvitium].", "n"),
    ("[Diabetes mellitus] en [hypertensie] in de voorgeschiedenis.", "pp"),
    ("Bij aanhoudende koorts moet [meningitis] worden uitgesloten.", "n"),
    ("[Maligniteit] is niet uitgesloten.", "p"),
    ("Een maligniteit is niet uit te sluiten, [metastase] mogelijk.", "p"),
    ("[Pneumonie] werd uitgesloten.", "n"),
    ("[Hartfalen] is uitgesloten.", "n"),
    ("Wel [koorts], maar [hoest] is afwezig.", "pn"),
    ("[Souffle] niet gevonden.", "n"),
    ("Labwaarden negatief voor [hepatitis].", "n"),
    ("Familieanamnese negatief voor [diabetes].", "n"),
    ("Patiënt ontkende [pijn] op de borst.", "n"),
    ("Geen sprake van [decompensatie].", "n"),
    ("Afwezigheid van [oedeem] aan de enkels.", "n"),
    ("Uitsluiting van [lymfoom] is nog niet mogelijk.", "n"),
    ("Geen [angina], hoewel [dyspnoe] bij inspanning.", "np"),
    ("Controle vervroegd i.v.m. [koorts].", "p"),
    ("Geen [bijwerkingen] o.b.v. de anamnese.", "n"),
    ("[Anemie] niet aantoonbaar.", "n"),
    ("Noch [koorts] noch [rillingen] gemeld.", "nn"),
    ("Klachten zijn met uitzondering van [vermoeidheid] verdwenen.", "p"),
    ("Geen [trombose]; wel [flebitis] links.", "np"),
    ("Bloeddruk goed; niets wijst op [feochromocytoom].", "n"),
]

RADIOLOGY = [
    ("Een [aneurysma] is niet aangetoond.", "n"),
    ("Geen aanwijzingen voor [bloeding].", "n"),
    ("CT zonder aanwijzingen voor [bloeding].", "n"),
    ("[Pneumothorax] uitgesloten.", "n"),
    ("[Fracturen] niet gezien, maar [contusie] aanwezig.", "np"),
    ("Geen [infiltraat] of [atelectase].", "nn"),
    ("Geen teken van [herniatie].", "n"),
    ("Oude [fractuur] bekend, geen nieuwe [fractuurlijn].", "pn"),
    ("Longvelden schoon, geen [consolidatie].", "n"),
    ("Geen [vocht], wel [verkalkingen] aanwezig.", "nn"),
    ("Geen [vocht], doch wel [verkalkingen].", "np"),
    ("Degeneratieve veranderingen zonder [wervelinzakking].", "n"),
    ("[Massa] niet waargenomen in het mediastinum.", "n"),
    ("Echo: [galstenen] zijn afwezig.", "n"),
    ("X-thorax: geen [afwijkingen].", "n"),
    ("Vergelijk met eerdere opname: [infiltraat] -.", "p"),
    ("Beeld: [maligniteit] kan niet worden uitgesloten.", "p"),
    ("Geen [stenose]. [Occlusie] rechts onderzocht.", "np"),
    ("geen [densiteiten]\nBeoordeling: [artrose] beiderzijds", "np"),
    ("Geen evidentie voor [lymfekliermetastasen] of [ossale metastasen].", "nn"),
    ("Niet eerder beschreven [noduli] links.", "n"),
    ("Geen argumenten voor [appendicitis].", "n"),
    ("Lever vrij van [laesies].", "n"),
    ("Conclusie: geen [bijzonderheden], behalve [atelectase] basaal.", "np"),
    ("Twijfelachtige [verdichting], niet zeker pathologisch.", "p"),
]

DISCHARGE = [
    ("Postoperatief geen [complicaties].", "n"),
    ("Geen tekenen van [infectie], maar [pneumonie] persisteert.", "np"),
    ("Patiënt werd zonder [pijnklachten] ontslagen.", "n"),
    ("Wond rustig, geen [roodheid] of [zwelling].", "nn"),
    ("Bij ontslag geen [koorts]; wel lichte [hoest].", "np"),
    ("[Nabloeding] werd uitgesloten.", "n"),
    ("Geen [wondinfectie], echter [hematoom] aanwezig.", "np"),
    ("Controle niet nodig, tenzij [koorts] optreedt.", "n"),
    ("Pijnstilling gestaakt; patiënt heeft geen [pijn] meer.", "n"),
    ("Geen [misselijkheid] na stoppen van de medicatie.", "n"),
    ("[Trombose] is uitgesloten middels echografie.", "n"),
    ("Bij twijfel moet [recidief] worden uitgesloten.", "n"),
    ("Niet alleen [wondpijn], ook [hoofdpijn] gemeld.", "pp"),
    ("Eetlust hersteld, geen toename van [misselijkheid].", "p"),
    ("O.a. [diabetes] in voorgeschiedenis, geen [insulinegebruik].", "pn"),
    ("[Koorts] afwezig bij ontslag.", "n"),
    ("Mobiliseert zonder [duizeligheid], maar met [hulpmiddel].", "np"),
    ("Heropname i.v.m. [pneumonie], nu geen [zuurstofbehoefte].", "pn"),
    ("Geen [decubitus]. Huid intact. [Oedeem] enkels beiderzijds.", "np"),
    ("Antibiotica gestopt: [infectie] niet aangetoond.", "n"),
    ("Dieetadvies gegeven; [gewichtsverlies] niet waargenomen.", "n"),
    ("Bloedkweken negatief voor [bacteriemie].", "n"),
    ("[Wondlekkage] -, hechtingen verwijderd.", "p"),
    ("Vervolgafspraak niet nodig gezien ontbreken van [klachten].", "n"),
    ("Uitgebreide uitleg gegeven over [alarmsymptomen].", "p"),
]

SOURCES = [
    ("gp", "gp", GP),
    ("specialist", "sp", SPECIALIST),
    ("radiology", "rx", RADIOLOGY),
    ("discharge", "dc", DISCHARGE),
]


def parse_markup(markup: str, labels: str) -> tuple[str, list[dict]]:
    text = []
    entities = []
    pos = 0
    i = 0
    while i < len(markup):
        ch = markup[i]
        if ch == "[":
            close = markup.index("]", i)
            surface = markup[i + 1 : close]
            entities.append(
                {
                    "entity_id": f"e{len(entities) + 1}",
                    "start": pos,
                    "end": pos + len(surface),
                    "surface": surface,
                    "gold_label": None,
                }
            )
            text.append(surface)
            pos += len(surface)
            i = close + 1
        else:
            text.append(ch)
            pos += 1
            i += 1
    if len(entities) != len(labels):
        raise SystemExit(f"label count mismatch for {markup!r}")
    for entity, letter in zip(entities, labels):
        entity["gold_label"] = {"n": "negated", "p": "not_negated"}[letter]
    return "".join(text), entities


def main() -> int:
    rows = []
    for category, prefix, source in SOURCES:
        for index, (markup, labels) in enumerate(source, start=1):
            text, entities = parse_markup(markup, labels)
            rows.append(
                {
                    "id": f"{prefix}-{index:03d}",
                    "category": category,
                    "text": text,
                    "entities": entities,
                }
            )
    OUT.write_text(
        "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in rows),
        encoding="utf-8",
    )
    print(f"wrote {len(rows)} records to {OUT}")

    from negare import context_engine, corpus

    records = corpus.load_corpus(OUT)
    lexicon = context_engine.default_lexicon()
    mismatches = 0
    for record in records:
        pred = context_engine.detect(record, lexicon)
        for entity in record.entities:
            got = pred.label_of(record.id, entity.entity_id)
            if got is not entity.gold_label:
                mismatches += 1
                print(
                    f"MISMATCH {record.id}/{entity.entity_id} "
                    f"({entity.surface!r}): hand={entity.gold_label.value} "
                    f"engine={got.value} :: {record.text!r}"
                )
    if mismatches:
        print(f"{mismatches} mismatch(es); reconcile by hand before shipping")
        return 1
    print("engine agrees with every hand label")
    return 0


if __name__ == "__main__":
    sys.exit(main())
