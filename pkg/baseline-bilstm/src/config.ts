import { BaselineError } from "./errors.js";

/**
 * Hyperparameters and windowing settings for the baseline.
 *
 * The context sizes and placeholder are the published operating point
 * (15 tokens left, 10 right, one abstract placeholder over the entity);
 * network dimensions and the optimizer schedule are desk-scale defaults
 * and are recorded in the saved artifact's fingerprint, so a model can
 * never be silently reused under different settings.
 */
export interface BaselineConfig {
  readonly leftContext: number;
  readonly rightContext: number;
  readonly placeholder: string;
  readonly embeddingDim: number;
  readonly hiddenDim: number;
  readonly epochs: number;
  readonly batchSize: number;
  readonly threshold: number;
  readonly seed: number;
  readonly learningRate: number;
  /** Optional word-vector file ("token v1 .. vD" lines) to initialize embeddings. */
  readonly embeddingsFile?: string;
}

export const DEFAULT_CONFIG: BaselineConfig = {
  leftContext: 15,
  rightContext: 10,
  placeholder: "[TERM]",
  embeddingDim: 32,
  hiddenDim: 32,
  epochs: 10,
  batchSize: 1,
  threshold: 0.5,
  seed: 7,
  learningRate: 0.2,
};

export function makeConfig(overrides: Partial<BaselineConfig> = {}): BaselineConfig {
  const cfg = { ...DEFAULT_CONFIG, ...overrides };
  validateConfig(cfg);
  return cfg;
}

export function validateConfig(cfg: BaselineConfig): void {
  if (!Number.isInteger(cfg.leftContext) || cfg.leftContext < 0) {
    throw new BaselineError(`leftContext must be >= 0, got ${cfg.leftContext}`);
  }
  if (!Number.isInteger(cfg.rightContext) || cfg.rightContext < 0) {
    throw new BaselineError(`rightContext must be >= 0, got ${cfg.rightContext}`);
  }
  if (cfg.placeholder.length === 0 || /\s/.test(cfg.placeholder)) {
    throw new BaselineError(`placeholder must be a non-empty token, got ${JSON.stringify(cfg.placeholder)}`);
  }
  if (!(cfg.threshold > 0 && cfg.threshold < 1)) {
    throw new BaselineError(`threshold must lie in (0, 1), got ${cfg.threshold}`);
  }
  for (const key of ["embeddingDim", "hiddenDim", "epochs", "batchSize"] as const) {
    if (!Number.isInteger(cfg[key]) || cfg[key] < 1) {
      throw new BaselineError(`${key} must be a positive integer, got ${cfg[key]}`);
    }
  }
  if (!Number.isInteger(cfg.seed)) {
    throw new BaselineError(`seed must be an integer, got ${cfg.seed}`);
  }
  if (!(cfg.learningRate > 0)) {
    throw new BaselineError(`learningRate must be > 0, got ${cfg.learningRate}`);
  }
}

/** The exact config subset a saved artifact is fingerprinted under. */
export function canonicalConfig(cfg: BaselineConfig): Record<string, unknown> {
  return {
    leftContext: cfg.leftContext,
    rightContext: cfg.rightContext,
    placeholder: cfg.placeholder,
    embeddingDim: cfg.embeddingDim,
    hiddenDim: cfg.hiddenDim,
    epochs: cfg.epochs,
    batchSize: cfg.batchSize,
    threshold: cfg.threshold,
    seed: cfg.seed,
    learningRate: cfg.learningRate,
    embeddingsFile: cfg.embeddingsFile ?? null,
  };
}
