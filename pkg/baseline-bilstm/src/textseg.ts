/**
 * Tokenization and context windows.
 *
 * This is a line-for-line port of the reference tokenizer the corpus
 * annotations were aligned with: whitespace-delimited chunks, bracket
 * and sentence punctuation peeled off both ends one character at a
 * time, trailing `-`/`+` markers split off, and listed abbreviations
 * keeping their final period. Windows produced here must match the
 * golden fixture file shared with the reference implementation
 * bit-for-bit; the fixture test enforces that.
 */

import { readFileSync } from "node:fs";
import { BaselineError } from "./errors.js";

export interface Token {
  readonly text: string;
  readonly start: number;
  readonly end: number;
  readonly index: number;
}

const PEEL_CHARS = new Set('()[]{}:;,.?!"');
const TRAILING_ONLY = new Set("-+");

let defaultAbbreviations: Set<string> | undefined;

export function loadAbbreviations(path: string | URL): Set<string> {
  const out = new Set<string>();
  for (const raw of readFileSync(path, "utf-8").split("\n")) {
    const line = raw.trim();
    if (line.length === 0 || line.startsWith("#")) continue;
    out.add(line.toLowerCase());
  }
  return out;
}

function bundledAbbreviations(): Set<string> {
  if (defaultAbbreviations === undefined) {
    defaultAbbreviations = loadAbbreviations(
      new URL("../data/abbreviations_nl.txt", import.meta.url),
    );
  }
  return defaultAbbreviations;
}

function peelChunk(
  text: string,
  start: number,
  end: number,
  abbreviations: Set<string>,
  out: Array<[number, number]>,
): void {
  let s = start;
  let e = end;
  const leading: Array<[number, number]> = [];
  while (s < e && PEEL_CHARS.has(text[s]!)) {
    leading.push([s, s + 1]);
    s += 1;
  }
  const trailing: Array<[number, number]> = [];
  while (e > s) {
    const ch = text[e - 1]!;
    if (!PEEL_CHARS.has(ch) && !TRAILING_ONLY.has(ch)) break;
    if (abbreviations.has(text.slice(s, e).toLowerCase())) break;
    trailing.push([e - 1, e]);
    e -= 1;
  }
  out.push(...leading);
  if (s < e) out.push([s, e]);
  out.push(...trailing.reverse());
}

export function tokenize(text: string, abbreviations?: Set<string>): Token[] {
  const abbr = abbreviations ?? bundledAbbreviations();
  const spans: Array<[number, number]> = [];
  const n = text.length;
  let pos = 0;
  while (pos < n) {
    if (/\s/.test(text[pos]!)) {
      pos += 1;
      continue;
    }
    let end = pos;
    while (end < n && !/\s/.test(text[end]!)) end += 1;
    peelChunk(text, pos, end, abbr, spans);
    pos = end;
  }
  return spans.map(([s, e], i) => ({ text: text.slice(s, e), start: s, end: e, index: i }));
}

/** Token index range [i, j) of tokens overlapping the character span. */
export function entityTokenRange(
  tokens: readonly Token[],
  charStart: number,
  charEnd: number,
): [number, number] {
  let first = -1;
  let last = -1;
  for (const token of tokens) {
    if (token.end > charStart && token.start < charEnd) {
      if (first < 0) first = token.index;
      last = token.index;
    }
  }
  if (first < 0) {
    throw new BaselineError(`char span [${charStart}, ${charEnd}) overlaps no token`);
  }
  return [first, last + 1];
}

export interface ContextWindow {
  readonly tokenStart: number;
  readonly tokenEnd: number;
  readonly entityTokenStart: number;
  readonly entityTokenEnd: number;
}

/**
 * Up to `left` tokens before the entity and `right` after, clamped at
 * the record edges. A shortfall on one side is never moved to the
 * other; the entity tokens are always included.
 */
export function asymmetricContext(
  tokens: readonly Token[],
  charStart: number,
  charEnd: number,
  left: number,
  right: number,
): ContextWindow {
  if (left < 0 || right < 0) {
    throw new BaselineError("left and right must be >= 0");
  }
  const [eStart, eEnd] = entityTokenRange(tokens, charStart, charEnd);
  return {
    tokenStart: Math.max(0, eStart - left),
    tokenEnd: Math.min(tokens.length, eEnd + right),
    entityTokenStart: eStart,
    entityTokenEnd: eEnd,
  };
}
