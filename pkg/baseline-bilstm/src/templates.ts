/**
 * Synthetic template corpus: thirty Dutch sentence templates (half
 * negating their slot, half affirming it, including a pseudo-negation
 * and a termination pattern) crossed with a pool of findings. Because
 * the entity is collapsed to a placeholder during preprocessing, the
 * learning problem is exactly "which template is this" — a clean test
 * that the sequence model picks up negation cues rather than term
 * identity.
 */

import { CATEGORIES, type CorpusRecord, type GoldLabel } from "./corpus.js";
import type { FoldAssignment } from "./folds.js";
import { BaselineError } from "./errors.js";
import { Rng } from "./rng.js";

interface Template {
  readonly text: string; // contains exactly one "{}" slot
  readonly label: GoldLabel;
}

const NEGATED: readonly string[] = [
  "Geen {} vastgesteld.",
  "Geen aanwijzingen voor {}.",
  "Geen tekenen van {} bij onderzoek.",
  "Er is geen sprake van {}.",
  "Patient ontkent {}.",
  "Zonder {} ontslagen naar huis.",
  "{} werd uitgesloten.",
  "Screening was negatief voor {}.",
  "Nooit {} gehad.",
  "Anamnese zonder {}.",
  "Lab toont geen {}.",
  "Beeldvorming sluit {} uit.",
  "Geen recidief van {} gezien.",
  "Bij controle geen {} meer.",
  "Noch {} noch koorts aanwezig.",
];

const AFFIRMED: readonly string[] = [
  "{} aanwezig bij opname.",
  "Patient heeft {} sinds gisteren.",
  "Toename van {} in de nacht.",
  "Bekende {} in de voorgeschiedenis.",
  "{} persisteert ondanks behandeling.",
  "Opnieuw {} op de foto.",
  "Klaagt over {} bij inspanning.",
  "Behandeling gestart voor {}.",
  "{} bevestigd met aanvullend onderzoek.",
  "Verwezen in verband met {}.",
  "Niet alleen {} maar ook koorts.",
  "Geen koorts, maar {} persisteert.",
  "Mogelijk {} bij deze klachten.",
  "Beeld past bij {}.",
  "Sinds drie dagen {} en malaise.",
];

export const TEMPLATES: readonly Template[] = [
  ...NEGATED.map((text) => ({ text, label: "negated" as const })),
  ...AFFIRMED.map((text) => ({ text, label: "not_negated" as const })),
];

export const TERMS: readonly string[] = [
  "koorts",
  "hoest",
  "pijn",
  "dyspnoe",
  "misselijkheid",
  "braken",
  "diarree",
  "hoofdpijn",
  "keelpijn",
  "duizeligheid",
  "moeheid",
  "oedeem",
  "icterus",
  "anemie",
  "pneumonie",
  "bronchitis",
  "sinusitis",
  "cystitis",
  "otitis media",
  "diabetes mellitus",
  "atriumfibrilleren",
  "hypertensie",
  "decompensatio cordis",
  "ulcus pepticum",
];

export function instantiate(template: Template, term: string, id: string, rng: Rng): CorpusRecord {
  const slot = template.text.indexOf("{}");
  if (slot < 0 || template.text.indexOf("{}", slot + 1) >= 0) {
    throw new BaselineError(`template must contain exactly one slot: ${template.text}`);
  }
  const text = template.text.slice(0, slot) + term + template.text.slice(slot + 2);
  return {
    id,
    category: rng.choice(CATEGORIES),
    text,
    entities: [
      {
        entityId: "e1",
        start: slot,
        end: slot + term.length,
        surface: term,
        goldLabel: template.label,
      },
    ],
  };
}

export function generateTemplateCorpus(count: number, seed: number): CorpusRecord[] {
  if (count < 1) {
    throw new BaselineError(`count must be >= 1, got ${count}`);
  }
  const rng = new Rng(seed);
  const width = String(count).length;
  const records: CorpusRecord[] = [];
  for (let i = 0; i < count; i++) {
    const id = `tpl-${String(i + 1).padStart(width, "0")}`;
    records.push(instantiate(rng.choice(TEMPLATES), rng.choice(TERMS), id, rng));
  }
  return records;
}

/**
 * Balanced seeded k-way split written in the fold-file format; using
 * one fold as the holdout gives the fixed (k-1)/k : 1/k partition.
 */
export function splitRecords(
  records: readonly CorpusRecord[],
  k: number,
  seed: number,
): FoldAssignment {
  if (k < 2 || k > records.length) {
    throw new BaselineError(`k must lie in [2, ${records.length}], got ${k}`);
  }
  const ids = records.map((record) => record.id);
  const rng = new Rng(seed);
  rng.shuffle(ids);
  const assignment = new Map<string, number>();
  ids.forEach((id, position) => assignment.set(id, position % k));
  return { k, seed, assignment };
}
