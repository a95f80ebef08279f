/**
 * The biLSTM negation classifier.
 *
 * Embedding lookup, one LSTM pass over the window left-to-right and one
 * right-to-left, and a dense head over the two final hidden states
 * producing a single logit; sigmoid of the logit is the negation score.
 * Training is plain SGD on binary cross-entropy, fully seeded: the same
 * seed, data, and config reproduce the same weights bit-for-bit, which
 * is what the saved artifact's fingerprint attests.
 */

import { createHash } from "node:crypto";
import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { BaselineError } from "./errors.js";
import { canonicalConfig, makeConfig, type BaselineConfig } from "./config.js";
import { Mat, Tape } from "./matrix.js";
import { Rng } from "./rng.js";
import type { TrainingExample, Vocabulary } from "./preprocess.js";

const INIT_SCALE = 0.08;
// The dense head starts wider than the recurrent weights: with a tiny
// head every initial logit is ~0 and binary cross-entropy sits on its
// ln(2) plateau for a few epochs before gradients pick up a direction.
const HEAD_INIT_SCALE = 0.5;
const GRAD_CLIP = 5;
const GATES = ["i", "f", "o", "c"] as const;
const DIRECTIONS = ["fwd", "bwd"] as const;

export type Params = Map<string, Mat>;

export interface Model {
  readonly config: BaselineConfig;
  readonly vocab: Vocabulary;
  readonly params: Params;
}

export interface TrainResult extends Model {
  readonly epochLosses: readonly number[];
}

/** Parameter names in their canonical (creation and serialization) order. */
function paramNames(): string[] {
  const names = ["embedding"];
  for (const dir of DIRECTIONS) {
    for (const gate of GATES) {
      names.push(`${dir}.W${gate}x`, `${dir}.W${gate}h`, `${dir}.b${gate}`);
    }
  }
  names.push("head.Wf", "head.Wb", "head.b");
  return names;
}

export function initParams(cfg: BaselineConfig, vocabSize: number, rng: Rng): Params {
  const { embeddingDim: D, hiddenDim: H } = cfg;
  const params: Params = new Map();
  for (const name of paramNames()) {
    if (name === "embedding") {
      params.set(name, Mat.uniform(vocabSize, D, INIT_SCALE, rng));
    } else if (name.endsWith("x")) {
      params.set(name, Mat.uniform(H, D, INIT_SCALE, rng));
    } else if (name.endsWith("h")) {
      params.set(name, Mat.uniform(H, H, INIT_SCALE, rng));
    } else if (name === "head.Wf" || name === "head.Wb") {
      params.set(name, Mat.uniform(1, H, HEAD_INIT_SCALE, rng));
    } else if (name === "head.b") {
      params.set(name, new Mat(1, 1));
    } else {
      const bias = new Mat(H, 1);
      // Forget-gate bias starts at 1 so early training retains memory.
      if (name.endsWith("bf")) bias.w.fill(1);
      params.set(name, bias);
    }
  }
  return params;
}

/** Initialize embedding rows from a "token v1 .. vD" word-vector file. */
function applyExternalEmbeddings(params: Params, vocab: Vocabulary, cfg: BaselineConfig): void {
  if (cfg.embeddingsFile === undefined) return;
  const embedding = params.get("embedding")!;
  for (const raw of readFileSync(cfg.embeddingsFile, "utf-8").split("\n")) {
    const line = raw.trim();
    if (line.length === 0 || line.startsWith("#")) continue;
    const parts = line.split(/\s+/);
    const id = vocab.ids.get(parts[0]!);
    if (id === undefined) continue;
    const values = parts.slice(1).map(Number);
    if (values.length !== cfg.embeddingDim || values.some(Number.isNaN)) {
      throw new BaselineError(
        `${cfg.embeddingsFile}: vector for ${JSON.stringify(parts[0])} must have ` +
          `${cfg.embeddingDim} numeric components`,
      );
    }
    embedding.w.set(values, id * cfg.embeddingDim);
  }
}

function lstmStep(
  tape: Tape,
  params: Params,
  dir: (typeof DIRECTIONS)[number],
  x: Mat,
  hPrev: Mat,
  cPrev: Mat,
): { h: Mat; c: Mat } {
  const gate = (g: (typeof GATES)[number]): Mat =>
    tape.add(
      tape.add(tape.mul(params.get(`${dir}.W${g}x`)!, x), tape.mul(params.get(`${dir}.W${g}h`)!, hPrev)),
      params.get(`${dir}.b${g}`)!,
    );
  const input = tape.sigmoid(gate("i"));
  const forget = tape.sigmoid(gate("f"));
  const output = tape.sigmoid(gate("o"));
  const write = tape.tanh(gate("c"));
  const c = tape.add(tape.eltmul(forget, cPrev), tape.eltmul(input, write));
  const h = tape.eltmul(output, tape.tanh(c));
  return { h, c };
}

function runDirection(
  tape: Tape,
  params: Params,
  dir: (typeof DIRECTIONS)[number],
  inputs: readonly Mat[],
  hiddenDim: number,
): Mat {
  let h = new Mat(hiddenDim, 1);
  let c = new Mat(hiddenDim, 1);
  for (const x of inputs) {
    ({ h, c } = lstmStep(tape, params, dir, x, h, c));
  }
  return h;
}

/** The pre-sigmoid score for one token-id sequence. */
export function forwardLogit(
  tape: Tape,
  params: Params,
  cfg: BaselineConfig,
  tokenIds: readonly number[],
): Mat {
  if (tokenIds.length === 0) {
    throw new BaselineError("cannot score an empty token sequence");
  }
  const embedding = params.get("embedding")!;
  const inputs = tokenIds.map((id) => tape.rowPluck(embedding, id));
  const hFwd = runDirection(tape, params, "fwd", inputs, cfg.hiddenDim);
  const hBwd = runDirection(tape, params, "bwd", [...inputs].reverse(), cfg.hiddenDim);
  return tape.add(
    tape.add(tape.mul(params.get("head.Wf")!, hFwd), tape.mul(params.get("head.Wb")!, hBwd)),
    params.get("head.b")!,
  );
}

export function scoreExample(model: Model, tokenIds: readonly number[]): number {
  const logit = forwardLogit(new Tape(false), model.params, model.config, tokenIds);
  return 1 / (1 + Math.exp(-logit.w[0]!));
}

function sgdStep(params: Params, learningRate: number): void {
  for (const mat of params.values()) {
    for (let i = 0; i < mat.w.length; i++) {
      let g = mat.dw[i]!;
      if (g > GRAD_CLIP) g = GRAD_CLIP;
      if (g < -GRAD_CLIP) g = -GRAD_CLIP;
      mat.w[i]! -= learningRate * g;
      mat.dw[i] = 0;
    }
  }
}

export function train(
  examples: readonly TrainingExample[],
  vocab: Vocabulary,
  cfg: BaselineConfig,
): TrainResult {
  if (examples.length === 0) {
    throw new BaselineError("no training examples");
  }
  const labels = new Set(examples.map((ex) => ex.label));
  if (labels.size < 2) {
    throw new BaselineError(
      "training data contains a single class; need both negated and not-negated examples",
    );
  }
  for (const ex of examples) {
    for (const id of ex.tokenIds) {
      if (id < 0 || id >= vocab.tokens.length) {
        throw new BaselineError(`token id ${id} outside vocabulary of ${vocab.tokens.length}`);
      }
    }
  }

  const rng = new Rng(cfg.seed);
  const params = initParams(cfg, vocab.tokens.length, rng);
  applyExternalEmbeddings(params, vocab, cfg);

  const epochLosses: number[] = [];
  const order = examples.map((_, i) => i);
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    rng.shuffle(order);
    let total = 0;
    let sinceStep = 0;
    for (const index of order) {
      const example = examples[index]!;
      const tape = new Tape();
      const logit = forwardLogit(tape, params, cfg, example.tokenIds);
      const p = 1 / (1 + Math.exp(-logit.w[0]!));
      const clamped = Math.min(1 - 1e-12, Math.max(1e-12, p));
      total -= example.label === 1 ? Math.log(clamped) : Math.log(1 - clamped);
      logit.dw[0] = p - example.label;
      tape.backward();
      sinceStep += 1;
      if (sinceStep === cfg.batchSize) {
        sgdStep(params, cfg.learningRate);
        sinceStep = 0;
      }
    }
    if (sinceStep > 0) sgdStep(params, cfg.learningRate);
    epochLosses.push(total / examples.length);
  }
  return { config: cfg, vocab, params, epochLosses };
}

// ---------------------------------------------------------------------------
// Artifact serialization

interface SerializedMat {
  rows: number;
  cols: number;
  w: number[];
}

function serializePayload(model: Model): string {
  const weights: Record<string, SerializedMat> = {};
  for (const name of paramNames()) {
    const mat = model.params.get(name);
    if (mat === undefined) {
      throw new BaselineError(`model is missing parameter ${name}`);
    }
    weights[name] = { rows: mat.rows, cols: mat.cols, w: Array.from(mat.w) };
  }
  return JSON.stringify({
    config: canonicalConfig(model.config),
    vocab: model.vocab.tokens,
    weights,
  });
}

export function fingerprint(model: Model): string {
  return createHash("sha256").update(serializePayload(model), "utf-8").digest("hex");
}

export function saveModel(model: Model, dir: string): string {
  mkdirSync(dir, { recursive: true });
  const weights: Record<string, SerializedMat> = {};
  for (const name of paramNames()) {
    const mat = model.params.get(name)!;
    weights[name] = { rows: mat.rows, cols: mat.cols, w: Array.from(mat.w) };
  }
  writeFileSync(
    join(dir, "model.json"),
    JSON.stringify({ config: canonicalConfig(model.config), weights }),
    "utf-8",
  );
  writeFileSync(join(dir, "vocab.json"), JSON.stringify({ tokens: model.vocab.tokens }), "utf-8");
  const print = fingerprint(model);
  writeFileSync(join(dir, "fingerprint.txt"), print + "\n", "utf-8");
  return print;
}

export function loadModel(dir: string): Model {
  const modelRaw = JSON.parse(readFileSync(join(dir, "model.json"), "utf-8")) as {
    config: Record<string, unknown>;
    weights: Record<string, SerializedMat>;
  };
  const vocabRaw = JSON.parse(readFileSync(join(dir, "vocab.json"), "utf-8")) as {
    tokens: string[];
  };
  const stored = readFileSync(join(dir, "fingerprint.txt"), "utf-8").trim();

  const rawConfig = modelRaw.config;
  const config = makeConfig({
    leftContext: rawConfig.leftContext as number,
    rightContext: rawConfig.rightContext as number,
    placeholder: rawConfig.placeholder as string,
    embeddingDim: rawConfig.embeddingDim as number,
    hiddenDim: rawConfig.hiddenDim as number,
    epochs: rawConfig.epochs as number,
    batchSize: rawConfig.batchSize as number,
    threshold: rawConfig.threshold as number,
    seed: rawConfig.seed as number,
    learningRate: rawConfig.learningRate as number,
    ...(rawConfig.embeddingsFile ? { embeddingsFile: rawConfig.embeddingsFile as string } : {}),
  });
  const ids = new Map<string, number>(vocabRaw.tokens.map((token, i) => [token, i]));
  const params: Params = new Map();
  for (const name of paramNames()) {
    const raw = modelRaw.weights[name];
    if (raw === undefined) {
      throw new BaselineError(`${dir}: model.json is missing parameter ${name}`);
    }
    params.set(name, Mat.fromValues(raw.rows, raw.cols, raw.w));
  }
  const model: Model = { config, vocab: { tokens: vocabRaw.tokens, ids }, params };
  const actual = fingerprint(model);
  if (actual !== stored) {
    throw new BaselineError(
      `${dir}: config/vocabulary fingerprint mismatch: artifact says ${stored}, ` +
        `contents hash to ${actual}`,
    );
  }
  return model;
}
