/**
 * Prediction interchange files:
 *
 *     #method: bilstm_baseline
 *     #threshold: 0.5
 *     #manifest: <sha256 hex of the covered entity keys>
 *     <record_id>\t<entity_id>\t<label>[\t<score>]
 *
 * The manifest is the sha256 hex digest of `"\n".join(record_id + "\t" +
 * entity_id)` over the sorted key set, so an evaluator can verify a
 * prediction file covers exactly the corpus it claims to. The label
 * column is always consistent with the score: negated iff score >=
 * threshold.
 */

import { createHash } from "node:crypto";
import { writeFileSync } from "node:fs";
import { BaselineError } from "./errors.js";
import type { GoldLabel } from "./corpus.js";

export interface Prediction {
  readonly recordId: string;
  readonly entityId: string;
  readonly score: number;
}

export function entityManifest(keys: Iterable<readonly [string, string]>): string {
  const rows = [...keys].map(([rid, eid]) => `${rid}\t${eid}`);
  rows.sort((a, b) => (a < b ? -1 : a > b ? 1 : 0));
  return createHash("sha256").update(rows.join("\n"), "utf-8").digest("hex");
}

export function labelFor(score: number, threshold: number): GoldLabel {
  return score >= threshold ? "negated" : "not_negated";
}

export function writePredictions(
  method: string,
  threshold: number,
  predictions: readonly Prediction[],
  path: string,
): void {
  if (method.length === 0 || /[\t\n]/.test(method)) {
    throw new BaselineError(`bad method name ${JSON.stringify(method)}`);
  }
  const seen = new Set<string>();
  for (const pred of predictions) {
    const key = `${pred.recordId}\t${pred.entityId}`;
    if (seen.has(key)) {
      throw new BaselineError(`duplicate prediction for ${pred.recordId}/${pred.entityId}`);
    }
    seen.add(key);
    if (!(pred.score >= 0 && pred.score <= 1)) {
      throw new BaselineError(
        `${pred.recordId}/${pred.entityId}: score ${pred.score} outside [0, 1]`,
      );
    }
  }
  const ordered = [...predictions].sort((a, b) => {
    if (a.recordId !== b.recordId) return a.recordId < b.recordId ? -1 : 1;
    return a.entityId < b.entityId ? -1 : a.entityId > b.entityId ? 1 : 0;
  });
  const manifest = entityManifest(ordered.map((p) => [p.recordId, p.entityId] as const));
  let out = `#method: ${method}\n#threshold: ${threshold}\n#manifest: ${manifest}\n`;
  for (const pred of ordered) {
    const label = labelFor(pred.score, threshold);
    out += `${pred.recordId}\t${pred.entityId}\t${label}\t${pred.score}\n`;
  }
  writeFileSync(path, out, "utf-8");
}
