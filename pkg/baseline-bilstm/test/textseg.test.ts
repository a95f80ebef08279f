import { readFileSync, existsSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { makeConfig } from "../src/config.js";
import { windowTokens } from "../src/preprocess.js";
import { asymmetricContext, entityTokenRange, tokenize } from "../src/textseg.js";

const FIXTURES = fileURLToPath(new URL("../../fixtures/windows_golden.jsonl", import.meta.url));
const PRIMARY_ABBREVIATIONS = fileURLToPath(
  new URL("../../src/negare/data/abbreviations_nl.txt", import.meta.url),
);
const BUNDLED_ABBREVIATIONS = fileURLToPath(
  new URL("../data/abbreviations_nl.txt", import.meta.url),
);

interface FixtureRow {
  case: string;
  text: string;
  entity: { start: number; end: number };
  left: number;
  right: number;
  placeholder: string;
  token_start: number;
  token_end: number;
  entity_token_start: number;
  entity_token_end: number;
  window_tokens: string[];
  collapsed_tokens: string[];
}

function loadFixtures(): FixtureRow[] {
  return readFileSync(FIXTURES, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as FixtureRow);
}

describe("tokenize", () => {
  it("splits on whitespace and peels punctuation from both ends", () => {
    const texts = tokenize('Uitslag (cardiomyopathie) "negatief":').map((t) => t.text);
    expect(texts).toEqual(["Uitslag", "(", "cardiomyopathie", ")", '"', "negatief", '"', ":"]);
  });

  it("keeps exact character spans", () => {
    const tokens = tokenize("Geen koorts.");
    expect(tokens.map((t) => [t.text, t.start, t.end])).toEqual([
      ["Geen", 0, 4],
      ["koorts", 5, 11],
      [".", 11, 12],
    ]);
  });

  it("splits trailing minus and plus markers off", () => {
    expect(tokenize("Oedeem-, pijn+").map((t) => t.text)).toEqual([
      "Oedeem",
      "-",
      ",",
      "pijn",
      "+",
    ]);
  });

  it("keeps abbreviation periods attached", () => {
    expect(tokenize("Pat. heeft o.a. koorts.").map((t) => t.text)).toEqual([
      "Pat.",
      "heeft",
      "o.a.",
      "koorts",
      ".",
    ]);
  });

  it("keeps decimal numbers as one token", () => {
    expect(tokenize("Temp 38.2 graden").map((t) => t.text)).toEqual(["Temp", "38.2", "graden"]);
  });

  it("treats newlines as plain whitespace", () => {
    expect(tokenize("geen\nkoorts").map((t) => t.text)).toEqual(["geen", "koorts"]);
  });
});

describe("entityTokenRange", () => {
  it("covers all overlapping tokens", () => {
    const tokens = tokenize("diabetes mellitus type 2 aanwezig");
    expect(entityTokenRange(tokens, 0, 24)).toEqual([0, 4]);
  });

  it("extends a partial overlap to the whole token", () => {
    const tokens = tokenize("al dagen koortsvrij");
    expect(entityTokenRange(tokens, 9, 15)).toEqual([2, 3]);
  });

  it("rejects spans that overlap no token", () => {
    const tokens = tokenize("a  b");
    expect(() => entityTokenRange(tokens, 1, 2)).toThrow(/overlaps no token/);
  });
});

describe("asymmetricContext", () => {
  it("clamps at the record start without borrowing from the right", () => {
    const tokens = tokenize("Koorts sinds gisteren");
    const window = asymmetricContext(tokens, 0, 6, 15, 1);
    expect(window).toEqual({ tokenStart: 0, tokenEnd: 2, entityTokenStart: 0, entityTokenEnd: 1 });
  });

  it("takes exactly left and right tokens when available", () => {
    const tokens = tokenize("a b c d e f g h");
    const window = asymmetricContext(tokens, 6, 7, 2, 3);
    expect(window).toEqual({ tokenStart: 1, tokenEnd: 7, entityTokenStart: 3, entityTokenEnd: 4 });
  });

  it("rejects negative context sizes", () => {
    expect(() => asymmetricContext(tokenize("a"), 0, 1, -1, 0)).toThrow(/>= 0/);
  });
});

describe("golden window fixtures", () => {
  it("ships at least a dozen cases", () => {
    expect(loadFixtures().length).toBeGreaterThanOrEqual(12);
  });

  it("reproduces every fixture bit-exactly", () => {
    for (const row of loadFixtures()) {
      const cfg = makeConfig({
        leftContext: row.left,
        rightContext: row.right,
        placeholder: row.placeholder,
      });
      const tokens = tokenize(row.text);
      const [eStart, eEnd] = entityTokenRange(tokens, row.entity.start, row.entity.end);
      const window = asymmetricContext(tokens, row.entity.start, row.entity.end, row.left, row.right);
      expect.soft(window.tokenStart, `${row.case}: token_start`).toBe(row.token_start);
      expect.soft(window.tokenEnd, `${row.case}: token_end`).toBe(row.token_end);
      expect.soft(eStart, `${row.case}: entity_token_start`).toBe(row.entity_token_start);
      expect.soft(eEnd, `${row.case}: entity_token_end`).toBe(row.entity_token_end);
      expect
        .soft(
          tokens.slice(window.tokenStart, window.tokenEnd).map((t) => t.text),
          `${row.case}: window_tokens`,
        )
        .toEqual(row.window_tokens);
      expect
        .soft(
          windowTokens(tokens, row.entity.start, row.entity.end, cfg),
          `${row.case}: collapsed_tokens`,
        )
        .toEqual(row.collapsed_tokens);
    }
  });
});

describe("bundled abbreviation list", () => {
  it.skipIf(!existsSync(PRIMARY_ABBREVIATIONS))(
    "is byte-identical to the reference implementation's list",
    () => {
      expect(readFileSync(BUNDLED_ABBREVIATIONS, "utf-8")).toBe(
        readFileSync(PRIMARY_ABBREVIATIONS, "utf-8"),
      );
    },
  );
});
