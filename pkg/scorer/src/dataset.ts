/** Study loading and train/validation/test dataset assembly.
 *
 * A study is the observations table plus binary per-image labels plus the
 * image files the observations reference. The held-out test participant's
 * original pixels never enter training; optionally, augmented-only copies
 * of their images may join the training set (never validation), which is
 * the knob the downstream sensitivity analysis turns.
 */

import { existsSync } from "node:fs";
import { join } from "node:path";

import * as tf from "@tensorflow/tfjs";

import { augmentImage } from "./augment.js";
import type { ScorerConfig } from "./config.js";
import { readLabels, readObservations } from "./csv.js";
import {
  EmptySplit,
  LeakageError,
  MissingImageFile,
  ParticipantNotFound,
  SchemaError,
} from "./errors.js";
import { readPpm, type RawImage } from "./ppm.js";
import { deriveSeed, Rng } from "./rng.js";

/** Number of metadata features fed to the network beside the image. */
export const META_FEATURES = 3;

/** One labeled, network-ready image with its observation context. */
export interface StudyItem {
  /** Identity of this tensor (augmented copies get a "#augK" suffix). */
  imageId: string;
  /** File identity of the pixels' source; used by the leakage guard. */
  sourceImageId: string;
  participantId: string;
  day: number;
  slot: number;
  treatment: boolean;
  /**
   * Raw [temperature, workout level, lotion flag]; missing values enter
   * as 0. Standardization to training-set statistics happens at training
   * time, not here.
   */
  metadata: Float32Array;
  /** Binary severity label from the rating pipeline. */
  label: 0 | 1;
  /** inputSize*inputSize*3 floats in [0, 1]. */
  pixels: Float32Array;
  /** True for augmentation-generated copies. */
  augmented: boolean;
}

/** A loaded study: items in observation-file order, all one input size. */
export interface StudyData {
  items: StudyItem[];
  inputSize: number;
}

/** The three image sets used by training and evaluation. */
export interface DatasetSplits {
  train: StudyItem[];
  val: StudyItem[];
  test: StudyItem[];
}

/** Convert a raw RGB image to [0,1] floats resized to size x size. */
export function toInputPixels(image: RawImage, size: number): Float32Array {
  return tf.tidy(() => {
    const full = tf
      .tensor3d(image.data, [image.height, image.width, 3], "int32")
      .toFloat()
      .div(255);
    const resized =
      image.height === size && image.width === size
        ? full
        : tf.image.resizeBilinear(full as tf.Tensor3D, [size, size]);
    return resized.dataSync() as Float32Array;
  });
}

function rawMetadata(
  temperature: number | null,
  workoutLevel: number | null,
  lotionOrMakeup: boolean | null,
): Float32Array {
  const meta = new Float32Array(META_FEATURES);
  meta[0] = temperature ?? 0;
  meta[1] = workoutLevel ?? 0;
  meta[2] = lotionOrMakeup === null ? 0 : lotionOrMakeup ? 1 : 0;
  return meta;
}

/**
 * Load a study from disk: observations + labels + referenced image files.
 *
 * Only observations with an image reference become items; each referenced
 * file must exist under imagesDir (MissingImageFile) and carry a label
 * keyed by its image reference (SchemaError).
 */
export function loadStudy(
  observationsPath: string,
  labelsPath: string,
  imagesDir: string,
  inputSize: number,
): StudyData {
  const observations = readObservations(observationsPath);
  const labels = readLabels(labelsPath);
  const items: StudyItem[] = [];
  for (const row of observations) {
    if (row.imageRef === null) continue;
    const imagePath = join(imagesDir, row.imageRef);
    if (!existsSync(imagePath)) {
      throw new MissingImageFile(
        `observation for participant ${row.participantId} day ${row.day} slot ${row.slot} ` +
          `references missing image file ${imagePath}`,
      );
    }
    const label = labels.get(row.imageRef);
    if (label === undefined) {
      throw new SchemaError(`no label for image ${JSON.stringify(row.imageRef)}`);
    }
    items.push({
      imageId: row.imageRef,
      sourceImageId: row.imageRef,
      participantId: row.participantId,
      day: row.day,
      slot: row.slot,
      treatment: row.treatment,
      metadata: rawMetadata(row.temperature, row.workoutLevel, row.lotionOrMakeup),
      label,
      pixels: toInputPixels(readPpm(imagePath), inputSize),
      augmented: false,
    });
  }
  if (items.length === 0) {
    throw new SchemaError(`${observationsPath}: no observation references an image`);
  }
  return { items, inputSize };
}

/** Make one augmented-only training copy of an item. */
export function augmentItem(
  item: StudyItem,
  copyIndex: number,
  inputSize: number,
  config: ScorerConfig,
  rng: Rng,
): StudyItem {
  return {
    ...item,
    imageId: `${item.imageId}#aug${copyIndex + 1}`,
    sourceImageId: item.sourceImageId,
    pixels: augmentImage(item.pixels, inputSize, config.augmentation, rng),
    augmented: true,
  };
}

/** Seeded shuffle + floor(trainFraction * n) split of non-test items. */
export function splitTrainVal(
  rest: StudyItem[],
  config: ScorerConfig,
): { train: StudyItem[]; val: StudyItem[] } {
  if (rest.length === 0) {
    throw new EmptySplit("no images outside the held-out participant");
  }
  const rng = new Rng(deriveSeed(config.seed, 1));
  const order = rng.shuffle([...rest]);
  const nTrain = Math.floor(config.split.trainFraction * order.length);
  const train = order.slice(0, nTrain);
  const val = order.slice(nTrain);
  if (train.length === 0 || val.length === 0) {
    throw new EmptySplit(
      `train/validation split ${train.length}/${val.length} of ${order.length} ` +
        `images leaves one side empty`,
    );
  }
  return { train, val };
}

/**
 * Verify the held-out guarantee on assembled splits.
 *
 * Original test pixels must never appear in train or validation. When
 * augmented copies are allowed, only items flagged `augmented` may share a
 * source file with the test set.
 */
export function assertNoLeakage(splits: DatasetSplits, allowAugmentedCopies: boolean): void {
  const testSources = new Set(splits.test.map((item) => item.sourceImageId));
  for (const [name, part] of [
    ["train", splits.train],
    ["val", splits.val],
  ] as const) {
    for (const item of part) {
      if (!testSources.has(item.sourceImageId)) continue;
      if (!allowAugmentedCopies || !item.augmented) {
        throw new LeakageError(
          `${name} set contains ${item.augmented ? "an augmented copy" : "original pixels"} ` +
            `of held-out image ${item.sourceImageId}`,
        );
      }
    }
  }
}

/**
 * Assemble train/validation/test splits from a loaded study.
 *
 * The test set is every image of `config.split.testParticipant` (which must
 * exist). The remaining images are shuffled with the config seed and split
 * train/validation by `trainFraction`. With
 * `includeTestParticipantAugmented`, `augmentedCopies` augmented-only
 * copies of each test image are appended to the training set. The leakage
 * guard runs on the result unconditionally.
 */
export function buildDataset(study: StudyData, config: ScorerConfig): DatasetSplits {
  const test = study.items.filter(
    (item) => item.participantId === config.split.testParticipant,
  );
  if (test.length === 0) {
    throw new ParticipantNotFound(
      `participant ${JSON.stringify(config.split.testParticipant)} has no images in the study`,
    );
  }
  const rest = study.items.filter(
    (item) => item.participantId !== config.split.testParticipant,
  );
  const { train, val } = splitTrainVal(rest, config);
  if (config.includeTestParticipantAugmented) {
    const augRng = new Rng(deriveSeed(config.seed, 2));
    for (const item of test) {
      for (let k = 0; k < config.augmentedCopies; k++) {
        train.push(augmentItem(item, k, study.inputSize, config, augRng));
      }
    }
  }
  const splits = { train, val, test };
  assertNoLeakage(splits, config.includeTestParticipantAugmented);
  return splits;
}
