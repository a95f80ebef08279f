#!/usr/bin/env node
/**
 * Command-line front end.
 *
 *   bilstm-baseline generate --out corpus.jsonl --folds folds.tsv
 *   bilstm-baseline train --corpus corpus.jsonl --model-dir model/
 *                         [--folds folds.tsv --holdout-fold 4]
 *   bilstm-baseline predict --model-dir model/ --corpus corpus.jsonl
 *                           --out predictions.tsv [--folds f --only-fold 4]
 */

import { parseArgs } from "node:util";
import { makeConfig, type BaselineConfig } from "./config.js";
import { readCorpus, writeCorpus, type CorpusRecord } from "./corpus.js";
import { BaselineError } from "./errors.js";
import { readFolds, writeFolds } from "./folds.js";
import { loadModel, saveModel, train } from "./model.js";
import { predictToFile, METHOD_BILSTM } from "./predict.js";
import { preprocess } from "./preprocess.js";
import { generateTemplateCorpus, splitRecords } from "./templates.js";

function usageError(message: string): never {
  throw new BaselineError(`${message}\nrun with a subcommand: generate | train | predict`);
}

function requireString(value: string | undefined, flag: string): string {
  if (value === undefined) usageError(`missing required ${flag}`);
  return value;
}

function parseIntFlag(value: string | undefined, flag: string): number | undefined {
  if (value === undefined) return undefined;
  const n = Number(value);
  if (!Number.isInteger(n)) usageError(`${flag} must be an integer, got ${value}`);
  return n;
}

function parseFloatFlag(value: string | undefined, flag: string): number | undefined {
  if (value === undefined) return undefined;
  const n = Number(value);
  if (Number.isNaN(n)) usageError(`${flag} must be a number, got ${value}`);
  return n;
}

function filterByFold(
  records: CorpusRecord[],
  foldsPath: string | undefined,
  fold: number | undefined,
  keep: "only" | "except",
): CorpusRecord[] {
  if (foldsPath === undefined && fold === undefined) return records;
  if (foldsPath === undefined || fold === undefined) {
    usageError("--folds and the fold number must be given together");
  }
  const folds = readFolds(foldsPath);
  if (fold < 0 || fold >= folds.k) {
    usageError(`fold ${fold} outside [0, ${folds.k})`);
  }
  const out = records.filter((record) => {
    const assigned = folds.assignment.get(record.id);
    if (assigned === undefined) {
      throw new BaselineError(`${foldsPath}: no fold for record ${record.id}`);
    }
    return keep === "only" ? assigned === fold : assigned !== fold;
  });
  if (out.length === 0) {
    throw new BaselineError("no records left after fold filtering");
  }
  return out;
}

const CONFIG_OPTIONS = {
  left: { type: "string" },
  right: { type: "string" },
  placeholder: { type: "string" },
  "embedding-dim": { type: "string" },
  "hidden-dim": { type: "string" },
  epochs: { type: "string" },
  "batch-size": { type: "string" },
  threshold: { type: "string" },
  seed: { type: "string" },
  "learning-rate": { type: "string" },
  embeddings: { type: "string" },
} as const;

function configFromFlags(values: Record<string, string | undefined>): BaselineConfig {
  const overrides: Record<string, unknown> = {};
  const assign = (key: string, value: number | string | undefined) => {
    if (value !== undefined) overrides[key] = value;
  };
  assign("leftContext", parseIntFlag(values["left"], "--left"));
  assign("rightContext", parseIntFlag(values["right"], "--right"));
  assign("placeholder", values["placeholder"]);
  assign("embeddingDim", parseIntFlag(values["embedding-dim"], "--embedding-dim"));
  assign("hiddenDim", parseIntFlag(values["hidden-dim"], "--hidden-dim"));
  assign("epochs", parseIntFlag(values["epochs"], "--epochs"));
  assign("batchSize", parseIntFlag(values["batch-size"], "--batch-size"));
  assign("threshold", parseFloatFlag(values["threshold"], "--threshold"));
  assign("seed", parseIntFlag(values["seed"], "--seed"));
  assign("learningRate", parseFloatFlag(values["learning-rate"], "--learning-rate"));
  assign("embeddingsFile", values["embeddings"]);
  return makeConfig(overrides);
}

function cmdGenerate(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      out: { type: "string" },
      folds: { type: "string" },
      count: { type: "string" },
      k: { type: "string" },
      seed: { type: "string" },
    },
  });
  const out = requireString(values.out, "--out");
  const count = parseIntFlag(values.count, "--count") ?? 2000;
  const k = parseIntFlag(values.k, "--k") ?? 5;
  const seed = parseIntFlag(values.seed, "--seed") ?? 7;
  const records = generateTemplateCorpus(count, seed);
  writeCorpus(records, out);
  console.log(`wrote ${records.length} records to ${out}`);
  if (values.folds !== undefined) {
    writeFolds(splitRecords(records, k, seed), values.folds);
    console.log(`wrote ${k}-fold split to ${values.folds}`);
  }
}

function cmdTrain(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      corpus: { type: "string" },
      "model-dir": { type: "string" },
      folds: { type: "string" },
      "holdout-fold": { type: "string" },
      ...CONFIG_OPTIONS,
    },
  });
  const corpusPath = requireString(values.corpus, "--corpus");
  const modelDir = requireString(values["model-dir"], "--model-dir");
  const cfg = configFromFlags(values);
  const records = filterByFold(
    readCorpus(corpusPath),
    values.folds,
    parseIntFlag(values["holdout-fold"], "--holdout-fold"),
    "except",
  );
  const { examples, vocab } = preprocess(records, cfg);
  const result = train(examples, vocab, cfg);
  const print = saveModel(result, modelDir);
  const losses = result.epochLosses.map((loss) => loss.toFixed(4)).join(" ");
  console.log(`trained on ${examples.length} examples (${vocab.tokens.length} vocab)`);
  console.log(`epoch losses: ${losses}`);
  console.log(`saved model to ${modelDir} (fingerprint ${print.slice(0, 12)}...)`);
}

function cmdPredict(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      corpus: { type: "string" },
      "model-dir": { type: "string" },
      out: { type: "string" },
      folds: { type: "string" },
      "only-fold": { type: "string" },
      method: { type: "string" },
    },
  });
  const corpusPath = requireString(values.corpus, "--corpus");
  const modelDir = requireString(values["model-dir"], "--model-dir");
  const out = requireString(values.out, "--out");
  const model = loadModel(modelDir);
  const records = filterByFold(
    readCorpus(corpusPath),
    values.folds,
    parseIntFlag(values["only-fold"], "--only-fold"),
    "only",
  );
  const predictions = predictToFile(model, records, out, values.method ?? METHOD_BILSTM);
  console.log(`wrote ${predictions.length} predictions to ${out}`);
}

export function main(argv: string[]): number {
  try {
    const [command, ...rest] = argv;
    switch (command) {
      case "generate":
        cmdGenerate(rest);
        return 0;
      case "train":
        cmdTrain(rest);
        return 0;
      case "predict":
        cmdPredict(rest);
        return 0;
      default:
        usageError(command === undefined ? "no subcommand given" : `unknown subcommand ${command}`);
    }
  } catch (err) {
    if (err instanceof BaselineError || (err instanceof Error && "code" in err)) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(err);
    return 2;
  }
}

process.exitCode = main(process.argv.slice(2));
