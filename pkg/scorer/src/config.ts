/** Scorer configuration: one validated record drives the whole pipeline. */

import { EmptySplit, InvalidConfig } from "./errors.js";

/** Random photometric/geometric perturbations applied to training copies. */
export interface AugmentationPolicy {
  /** Maximum absolute rotation in radians; each copy rotates by uniform(-r, +r). */
  rotationRange: number;
  /** Probability that a copy is mirrored left-right. */
  flipProbability: number;
  /** Maximum absolute brightness shift added to [0,1] pixels. */
  brightnessRange: number;
}

/** How study images are divided into train / validation / held-out test. */
export interface SplitSpec {
  /** Participant whose images are held out of training entirely. */
  testParticipant: string;
  /**
   * Fraction of the non-test images used for training (the rest validate).
   * Train size is floor(trainFraction * n) after a seeded shuffle.
   */
  trainFraction: number;
}

/** Full configuration for building datasets and training the scorer. */
export interface ScorerConfig {
  /** Feature extractor. The compact seeded convolutional net is built in. */
  backbone: "compact-cnn";
  /** Images are resized to inputSize x inputSize RGB before the network. */
  inputSize: number;
  learningRate: number;
  optimizer: "adam";
  loss: "binaryCrossentropy";
  batchSize: number;
  maxEpochs: number;
  /** Early stopping: halt after this many epochs without a validation improvement. */
  patience: number;
  /**
   * Staged fine-tuning: the convolutional backbone stays frozen for this
   * many initial epochs (only the head trains), then unfreezes fully.
   * 0 trains everything from the start; a value >= maxEpochs keeps the
   * backbone frozen throughout (pure feature extraction).
   */
  freezeEpochs: number;
  split: SplitSpec;
  augmentation: AugmentationPolicy;
  /**
   * When true, augmented-only copies of the held-out participant's images
   * join the training set; the original pixels still never enter training.
   */
  includeTestParticipantAugmented: boolean;
  /** Augmented copies generated per source image. */
  augmentedCopies: number;
  /** Master seed for weights, splits, shuffles, and augmentation draws. */
  seed: number;
}

/** Flat override set for {@link makeConfig}; seed and testParticipant are required. */
export interface ConfigOverrides {
  seed: number;
  testParticipant: string;
  inputSize?: number;
  learningRate?: number;
  batchSize?: number;
  maxEpochs?: number;
  patience?: number;
  freezeEpochs?: number;
  trainFraction?: number;
  rotationRange?: number;
  flipProbability?: number;
  brightnessRange?: number;
  includeTestParticipantAugmented?: boolean;
  augmentedCopies?: number;
}

/** Build a validated config from defaults plus overrides. */
export function makeConfig(overrides: ConfigOverrides): ScorerConfig {
  const config: ScorerConfig = {
    backbone: "compact-cnn",
    inputSize: overrides.inputSize ?? 224,
    learningRate: overrides.learningRate ?? 0.001,
    optimizer: "adam",
    loss: "binaryCrossentropy",
    batchSize: overrides.batchSize ?? 32,
    maxEpochs: overrides.maxEpochs ?? 40,
    patience: overrides.patience ?? 5,
    freezeEpochs: overrides.freezeEpochs ?? 2,
    split: {
      testParticipant: overrides.testParticipant,
      trainFraction: overrides.trainFraction ?? 0.8,
    },
    augmentation: {
      rotationRange: overrides.rotationRange ?? 15 * (Math.PI / 180),
      flipProbability: overrides.flipProbability ?? 0.5,
      brightnessRange: overrides.brightnessRange ?? 0.15,
    },
    includeTestParticipantAugmented:
      overrides.includeTestParticipantAugmented ?? false,
    augmentedCopies: overrides.augmentedCopies ?? 2,
    seed: overrides.seed,
  };
  validateConfig(config);
  return config;
}

function requireInt(value: number, minimum: number, what: string): void {
  if (!Number.isInteger(value) || value < minimum) {
    throw new InvalidConfig(`${what} must be an integer >= ${minimum}, got ${value}`);
  }
}

function requireFinite(value: number, what: string): void {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new InvalidConfig(`${what} must be a finite number, got ${value}`);
  }
}

/** Check every field; throws InvalidConfig (or EmptySplit for a degenerate split). */
export function validateConfig(config: ScorerConfig): void {
  requireInt(config.inputSize, 8, "inputSize");
  requireFinite(config.learningRate, "learningRate");
  if (config.learningRate < 0) {
    throw new InvalidConfig(`learningRate must be >= 0, got ${config.learningRate}`);
  }
  requireInt(config.batchSize, 1, "batchSize");
  requireInt(config.maxEpochs, 1, "maxEpochs");
  requireInt(config.patience, 0, "patience");
  requireInt(config.freezeEpochs, 0, "freezeEpochs");
  if (!config.split.testParticipant) {
    throw new InvalidConfig("split.testParticipant must be a non-empty id");
  }
  requireFinite(config.split.trainFraction, "split.trainFraction");
  if (config.split.trainFraction >= 1 || config.split.trainFraction <= 0) {
    // A fraction of 1 (or 0) would leave validation (or training) empty.
    throw new EmptySplit(
      `split.trainFraction must lie strictly between 0 and 1, got ${config.split.trainFraction}`,
    );
  }
  const aug = config.augmentation;
  requireFinite(aug.rotationRange, "augmentation.rotationRange");
  requireFinite(aug.flipProbability, "augmentation.flipProbability");
  requireFinite(aug.brightnessRange, "augmentation.brightnessRange");
  if (aug.rotationRange < 0) {
    throw new InvalidConfig(`rotationRange must be >= 0, got ${aug.rotationRange}`);
  }
  if (aug.flipProbability < 0 || aug.flipProbability > 1) {
    throw new InvalidConfig(
      `flipProbability must lie in [0, 1], got ${aug.flipProbability}`,
    );
  }
  if (aug.brightnessRange < 0) {
    throw new InvalidConfig(`brightnessRange must be >= 0, got ${aug.brightnessRange}`);
  }
  requireInt(config.augmentedCopies, 0, "augmentedCopies");
  if (config.includeTestParticipantAugmented && config.augmentedCopies < 1) {
    throw new InvalidConfig(
      "includeTestParticipantAugmented requires augmentedCopies >= 1",
    );
  }
  if (!Number.isSafeInteger(config.seed)) {
    throw new InvalidConfig(`seed must be an integer, got ${config.seed}`);
  }
}
