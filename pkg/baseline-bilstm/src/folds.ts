/**
 * Fold files: the cross-validation assignment interchange format.
 *
 *     #k: 5
 *     #seed: 42
 *     <record_id>\t<fold>
 */

import { readFileSync, writeFileSync } from "node:fs";
import { BaselineError } from "./errors.js";

export interface FoldAssignment {
  readonly k: number;
  readonly seed: number;
  readonly assignment: ReadonlyMap<string, number>;
}

export function readFolds(path: string): FoldAssignment {
  const lines = readFileSync(path, "utf-8").split("\n");
  let k: number | undefined;
  let seed: number | undefined;
  const assignment = new Map<string, number>();
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trimEnd();
    if (line.length === 0) continue;
    const lineNo = i + 1;
    if (line.startsWith("#k:")) {
      k = Number(line.slice(3).trim());
      continue;
    }
    if (line.startsWith("#seed:")) {
      seed = Number(line.slice(6).trim());
      continue;
    }
    if (line.startsWith("#")) continue;
    const parts = line.split("\t");
    if (parts.length !== 2) {
      throw new BaselineError(`${path}:${lineNo}: expected record_id<TAB>fold`);
    }
    const fold = Number(parts[1]);
    if (!Number.isInteger(fold) || fold < 0) {
      throw new BaselineError(`${path}:${lineNo}: bad fold ${JSON.stringify(parts[1])}`);
    }
    if (assignment.has(parts[0]!)) {
      throw new BaselineError(`${path}:${lineNo}: duplicate record id ${JSON.stringify(parts[0])}`);
    }
    assignment.set(parts[0]!, fold);
  }
  if (k === undefined || !Number.isInteger(k) || k < 2) {
    throw new BaselineError(`${path}: missing or bad #k header`);
  }
  if (seed === undefined || !Number.isInteger(seed)) {
    throw new BaselineError(`${path}: missing or bad #seed header`);
  }
  for (const [rid, fold] of assignment) {
    if (fold >= k) {
      throw new BaselineError(`${path}: record ${rid} assigned to fold ${fold} >= k=${k}`);
    }
  }
  return { k, seed, assignment };
}

export function writeFolds(folds: FoldAssignment, path: string): void {
  const rows = [...folds.assignment.entries()].sort(([a], [b]) =>
    a < b ? -1 : a > b ? 1 : 0,
  );
  const body = rows.map(([rid, fold]) => `${rid}\t${fold}\n`).join("");
  writeFileSync(path, `#k: ${folds.k}\n#seed: ${folds.seed}\n` + body, "utf-8");
}

/** Record ids assigned to `fold`, sorted. */
export function recordsInFold(folds: FoldAssignment, fold: number): string[] {
  return [...folds.assignment.entries()]
    .filter(([, f]) => f === fold)
    .map(([rid]) => rid)
    .sort();
}
