/**
 * Canonical corpus interchange: JSON-lines records with character-level
 * entity annotations. The reader is strict — a malformed record is an
 * error, never silently skipped — because every downstream artifact
 * (vocabulary, predictions, manifests) is keyed off these files.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { BaselineError } from "./errors.js";

export type GoldLabel = "negated" | "not_negated";

export const CATEGORIES = ["gp", "specialist", "radiology", "discharge"] as const;
export type Category = (typeof CATEGORIES)[number];

export interface EntityAnnotation {
  readonly entityId: string;
  readonly start: number;
  readonly end: number;
  readonly surface: string;
  readonly goldLabel: GoldLabel;
}

export interface CorpusRecord {
  readonly id: string;
  readonly category: Category;
  readonly text: string;
  readonly entities: readonly EntityAnnotation[];
}

function fail(path: string, lineNo: number, message: string): never {
  throw new BaselineError(`${path}:${lineNo}: ${message}`);
}

function parseEntity(
  path: string,
  lineNo: number,
  text: string,
  raw: unknown,
): EntityAnnotation {
  if (typeof raw !== "object" || raw === null) {
    fail(path, lineNo, "entity must be an object");
  }
  const obj = raw as Record<string, unknown>;
  const { entity_id, start, end, surface, gold_label } = obj;
  if (typeof entity_id !== "string" || entity_id.length === 0) {
    fail(path, lineNo, "entity_id must be a non-empty string");
  }
  if (!Number.isInteger(start) || !Number.isInteger(end)) {
    fail(path, lineNo, `entity ${entity_id}: start/end must be integers`);
  }
  const s = start as number;
  const e = end as number;
  if (!(0 <= s && s < e && e <= text.length)) {
    fail(path, lineNo, `entity ${entity_id}: span [${s}, ${e}) out of bounds`);
  }
  if (typeof surface !== "string" || surface !== text.slice(s, e)) {
    fail(path, lineNo, `entity ${entity_id}: surface does not match text slice`);
  }
  if (gold_label !== "negated" && gold_label !== "not_negated") {
    fail(path, lineNo, `entity ${entity_id}: unknown gold_label ${JSON.stringify(gold_label)}`);
  }
  return { entityId: entity_id, start: s, end: e, surface, goldLabel: gold_label };
}

export function readCorpus(path: string): CorpusRecord[] {
  const records: CorpusRecord[] = [];
  const seen = new Set<string>();
  const lines = readFileSync(path, "utf-8").split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim();
    if (line.length === 0) continue;
    const lineNo = i + 1;
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(line) as Record<string, unknown>;
    } catch {
      fail(path, lineNo, "not valid JSON");
    }
    const { id, category, text, entities } = obj;
    if (typeof id !== "string" || id.length === 0) {
      fail(path, lineNo, "record id must be a non-empty string");
    }
    if (seen.has(id)) {
      fail(path, lineNo, `duplicate record id ${JSON.stringify(id)}`);
    }
    seen.add(id);
    if (typeof category !== "string" || !(CATEGORIES as readonly string[]).includes(category)) {
      fail(path, lineNo, `unknown category ${JSON.stringify(category)}`);
    }
    if (typeof text !== "string") {
      fail(path, lineNo, "text must be a string");
    }
    if (!Array.isArray(entities)) {
      fail(path, lineNo, "entities must be an array");
    }
    const parsed = entities.map((raw) => parseEntity(path, lineNo, text, raw));
    const entityIds = new Set<string>();
    for (const entity of parsed) {
      if (entityIds.has(entity.entityId)) {
        fail(path, lineNo, `duplicate entity id ${JSON.stringify(entity.entityId)}`);
      }
      entityIds.add(entity.entityId);
    }
    records.push({ id, category: category as Category, text, entities: parsed });
  }
  return records;
}

export function writeCorpus(records: readonly CorpusRecord[], path: string): void {
  const lines = records.map((record) =>
    JSON.stringify({
      id: record.id,
      category: record.category,
      text: record.text,
      entities: record.entities.map((entity) => ({
        entity_id: entity.entityId,
        start: entity.start,
        end: entity.end,
        surface: entity.surface,
        gold_label: entity.goldLabel,
      })),
    }),
  );
  writeFileSync(path, lines.map((line) => line + "\n").join(""), "utf-8");
}
