export { BaselineError } from "./errors.js";
export { Rng } from "./rng.js";
export { DEFAULT_CONFIG, makeConfig, validateConfig, canonicalConfig } from "./config.js";
export type { BaselineConfig } from "./config.js";
export { tokenize, entityTokenRange, asymmetricContext, loadAbbreviations } from "./textseg.js";
export type { Token, ContextWindow } from "./textseg.js";
export { readCorpus, writeCorpus, CATEGORIES } from "./corpus.js";
export type { CorpusRecord, EntityAnnotation, GoldLabel, Category } from "./corpus.js";
export { readFolds, writeFolds, recordsInFold } from "./folds.js";
export type { FoldAssignment } from "./folds.js";
export { entityManifest, labelFor, writePredictions } from "./predictions.js";
export type { Prediction } from "./predictions.js";
export {
  UNK_ID,
  UNK_TOKEN,
  buildVocabulary,
  encodeWindow,
  preprocess,
  windowCorpus,
  windowTokens,
} from "./preprocess.js";
export type { TrainingExample, Vocabulary, WindowedEntity } from "./preprocess.js";
export { Mat, Tape } from "./matrix.js";
export {
  fingerprint,
  forwardLogit,
  loadModel,
  saveModel,
  scoreExample,
  train,
} from "./model.js";
export type { Model, Params, TrainResult } from "./model.js";
export { METHOD_BILSTM, predictCorpus, predictToFile } from "./predict.js";
export { TEMPLATES, TERMS, generateTemplateCorpus, instantiate, splitRecords } from "./templates.js";
