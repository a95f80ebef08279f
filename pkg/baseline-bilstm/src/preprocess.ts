/**
 * Turning annotated records into classifier inputs.
 *
 * Per entity: take the asymmetric context window around it, lowercase
 * every token, and collapse the entity's own tokens into a single
 * abstract placeholder, so the model learns the context pattern rather
 * than the term ("geen tekenen van [TERM]" looks the same no matter
 * which disease fills the slot). The vocabulary is built from training
 * examples only; anything unseen maps to the UNK id at prediction time.
 */

import type { BaselineConfig } from "./config.js";
import type { CorpusRecord } from "./corpus.js";
import { BaselineError } from "./errors.js";
import { asymmetricContext, tokenize, type Token } from "./textseg.js";

export const UNK_TOKEN = "<unk>";
export const UNK_ID = 0;

export interface WindowedEntity {
  readonly recordId: string;
  readonly entityId: string;
  /** Lowercased window tokens with the entity collapsed to the placeholder. */
  readonly tokens: readonly string[];
  readonly label: 0 | 1; // 1 = negated
}

export interface TrainingExample {
  readonly tokenIds: readonly number[];
  readonly placeholderPosition: number;
  readonly label: 0 | 1;
}

export interface Vocabulary {
  readonly tokens: readonly string[];
  readonly ids: ReadonlyMap<string, number>;
}

/** Collapse one entity's window into placeholder-form token strings. */
export function windowTokens(
  tokens: readonly Token[],
  charStart: number,
  charEnd: number,
  cfg: BaselineConfig,
): string[] {
  const window = asymmetricContext(tokens, charStart, charEnd, cfg.leftContext, cfg.rightContext);
  const out: string[] = [];
  for (let i = window.tokenStart; i < window.tokenEnd; i++) {
    if (i >= window.entityTokenStart && i < window.entityTokenEnd) {
      if (i === window.entityTokenStart) out.push(cfg.placeholder);
      continue;
    }
    out.push(tokens[i]!.text.toLowerCase());
  }
  return out;
}

/** Every entity of every record, windowed and collapsed. */
export function windowCorpus(
  records: readonly CorpusRecord[],
  cfg: BaselineConfig,
): WindowedEntity[] {
  const out: WindowedEntity[] = [];
  for (const record of records) {
    const tokens = tokenize(record.text);
    for (const entity of record.entities) {
      out.push({
        recordId: record.id,
        entityId: entity.entityId,
        tokens: windowTokens(tokens, entity.start, entity.end, cfg),
        label: entity.goldLabel === "negated" ? 1 : 0,
      });
    }
  }
  return out;
}

/**
 * Vocabulary over training windows only: UNK first, then the
 * placeholder, then every other token in first-seen order.
 */
export function buildVocabulary(
  windows: readonly WindowedEntity[],
  cfg: BaselineConfig,
): Vocabulary {
  const tokens: string[] = [UNK_TOKEN, cfg.placeholder];
  const ids = new Map<string, number>([
    [UNK_TOKEN, 0],
    [cfg.placeholder, 1],
  ]);
  for (const window of windows) {
    for (const token of window.tokens) {
      if (!ids.has(token)) {
        ids.set(token, tokens.length);
        tokens.push(token);
      }
    }
  }
  return { tokens, ids };
}

export function encodeWindow(
  window: WindowedEntity,
  vocab: Vocabulary,
  cfg: BaselineConfig,
): TrainingExample {
  const maxLen = cfg.leftContext + cfg.rightContext + 1;
  if (window.tokens.length > maxLen) {
    throw new BaselineError(
      `${window.recordId}/${window.entityId}: window of ${window.tokens.length} tokens ` +
        `exceeds ${maxLen}`,
    );
  }
  const placeholderAt = window.tokens.indexOf(cfg.placeholder);
  if (placeholderAt < 0 || window.tokens.lastIndexOf(cfg.placeholder) !== placeholderAt) {
    throw new BaselineError(
      `${window.recordId}/${window.entityId}: window must contain the placeholder exactly once`,
    );
  }
  const tokenIds = window.tokens.map((token) => vocab.ids.get(token) ?? UNK_ID);
  return { tokenIds, placeholderPosition: placeholderAt, label: window.label };
}

/** Convenience: window + encode a whole training corpus with its own vocabulary. */
export function preprocess(
  records: readonly CorpusRecord[],
  cfg: BaselineConfig,
): { examples: TrainingExample[]; vocab: Vocabulary; windows: WindowedEntity[] } {
  const windows = windowCorpus(records, cfg);
  const vocab = buildVocabulary(windows, cfg);
  const examples = windows.map((window) => encodeWindow(window, vocab, cfg));
  return { examples, vocab, windows };
}
