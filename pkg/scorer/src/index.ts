/** Public API of the image scorer package. */

export {
  ScorerError,
  MissingImageFile,
  ParticipantNotFound,
  EmptySplit,
  NonFiniteLoss,
  ParseError,
  SchemaError,
  InvalidConfig,
  LeakageError,
} from "./errors.js";
export { Rng, deriveSeed } from "./rng.js";
export {
  makeConfig,
  validateConfig,
  type AugmentationPolicy,
  type ConfigOverrides,
  type ScorerConfig,
  type SplitSpec,
} from "./config.js";
export { decodePpm, encodePpm, readPpm, writePpm, type RawImage } from "./ppm.js";
export {
  OBSERVATION_COLUMNS,
  filterObservationsCsv,
  readFitCsv,
  readLabels,
  readObservations,
  readScoresCsv,
  writeScoresCsv,
  writeTable,
  type FitRow,
  type ObservationRow,
  type ScoreRow,
} from "./csv.js";
export {
  applyAugmentation,
  augmentImage,
  sampleAugmentation,
  type AppliedAugmentation,
} from "./augment.js";
export {
  META_FEATURES,
  assertNoLeakage,
  augmentItem,
  buildDataset,
  loadStudy,
  splitTrainVal,
  toInputPixels,
  type DatasetSplits,
  type StudyData,
  type StudyItem,
} from "./dataset.js";
export {
  buildModel,
  disposeBundle,
  evaluateModel,
  metaStats,
  setBackboneTrainable,
  toTensors,
  trainScorer,
  type MetaStats,
  type TensorBundle,
  type TrainedScorer,
  type TrainingHistory,
} from "./model.js";
export { exportScores, predictScores, type ScoredImage } from "./predict.js";
export { halfSplitSensitivity, type SensitivityResult } from "./sensitivity.js";
export {
  DEFAULT_EFFECTS,
  generateSyntheticStudy,
  renderImage,
  type SyntheticStudyOptions,
  type SyntheticStudySummary,
} from "./synthetic.js";
