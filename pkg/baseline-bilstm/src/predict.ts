/**
 * Batch prediction: window every entity with the model's own config,
 * encode against its stored vocabulary (unknown tokens become UNK), and
 * score each sequence independently. Output order is canonical (sorted
 * by record and entity id), so identical inputs give byte-identical
 * prediction files.
 */

import type { CorpusRecord } from "./corpus.js";
import { encodeWindow, windowCorpus } from "./preprocess.js";
import { scoreExample, type Model } from "./model.js";
import { writePredictions, type Prediction } from "./predictions.js";

export const METHOD_BILSTM = "bilstm_baseline";

export function predictCorpus(model: Model, records: readonly CorpusRecord[]): Prediction[] {
  const windows = windowCorpus(records, model.config);
  return windows.map((window) => {
    const example = encodeWindow(window, model.vocab, model.config);
    return {
      recordId: window.recordId,
      entityId: window.entityId,
      score: scoreExample(model, example.tokenIds),
    };
  });
}

export function predictToFile(
  model: Model,
  records: readonly CorpusRecord[],
  path: string,
  method: string = METHOD_BILSTM,
): Prediction[] {
  const predictions = predictCorpus(model, records);
  writePredictions(method, model.config.threshold, predictions, path);
  return predictions;
}
