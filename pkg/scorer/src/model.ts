/** Model construction and training for the binary severity scorer.
 *
 * The network is a compact seeded convolutional backbone over the image;
 * its pooled features are concatenated with the observation metadata
 * vector (standardized to zero mean / unit variance using training-set
 * statistics) and passed through a small dense head ending in a sigmoid.
 * All weight initializers are seeded from the config and the epoch
 * shuffles come from a seeded generator, so training is bit-reproducible
 * on the deterministic CPU backend.
 *
 * Staged fine-tuning: for the first `freezeEpochs` epochs only the head
 * trains (the backbone is frozen); afterwards the whole network trains.
 * The optimizer restarts at the unfreeze boundary, as is usual for staged
 * schedules.
 *
 * Loss/accuracy history is recorded AFTER each epoch on the full train and
 * validation sets (not as a running average over batches), so history
 * entries are exact functions of the weights at epoch end. Early stopping
 * keeps the weights of the best validation epoch.
 */

import * as tf from "@tensorflow/tfjs";

import type { ScorerConfig } from "./config.js";
import { META_FEATURES, type DatasetSplits, type StudyItem } from "./dataset.js";
import { EmptySplit, NonFiniteLoss } from "./errors.js";
import { deriveSeed, Rng } from "./rng.js";

const BACKBONE_PREFIX = "backbone_";

/** Per-feature standardization constants estimated from the training set. */
export interface MetaStats {
  mean: Float64Array;
  std: Float64Array;
}

/** Per-epoch metrics plus the early-stopping outcome. */
export interface TrainingHistory {
  /** Full-train-set mean binary cross-entropy after each epoch. */
  trainLoss: number[];
  /** Full-validation-set mean binary cross-entropy after each epoch. */
  valLoss: number[];
  /** Full-train-set accuracy (threshold 0.5) after each epoch. */
  trainAccuracy: number[];
  /** Epoch index (0-based) whose weights the returned model carries. */
  bestEpoch: number;
  /** True when training halted before maxEpochs. */
  stoppedEarly: boolean;
}

/** A trained model with its config, history, and metadata normalization. */
export interface TrainedScorer {
  model: tf.LayersModel;
  config: ScorerConfig;
  history: TrainingHistory;
  /** Standardization applied to metadata at train time; reuse on predict. */
  metaStats: MetaStats;
}

/** Stacked tensors for one item set. */
export interface TensorBundle {
  images: tf.Tensor4D;
  meta: tf.Tensor2D;
  labels: tf.Tensor2D;
  n: number;
}

/** Estimate per-feature mean and standard deviation of raw metadata. */
export function metaStats(items: StudyItem[]): MetaStats {
  const mean = new Float64Array(META_FEATURES);
  const std = new Float64Array(META_FEATURES);
  if (items.length === 0) {
    std.fill(1);
    return { mean, std };
  }
  for (const item of items) {
    for (let f = 0; f < META_FEATURES; f++) mean[f] += item.metadata[f];
  }
  for (let f = 0; f < META_FEATURES; f++) mean[f] /= items.length;
  for (const item of items) {
    for (let f = 0; f < META_FEATURES; f++) {
      const d = item.metadata[f] - mean[f];
      std[f] += d * d;
    }
  }
  for (let f = 0; f < META_FEATURES; f++) {
    std[f] = Math.sqrt(std[f] / items.length);
    // a constant feature carries no information; map it to constant 0
    if (std[f] < 1e-12) std[f] = 1;
  }
  return { mean, std };
}

/** Stack items into batched input/label tensors, standardizing metadata. */
export function toTensors(
  items: StudyItem[],
  inputSize: number,
  stats?: MetaStats,
): TensorBundle {
  const n = items.length;
  const pixelsPer = inputSize * inputSize * 3;
  const images = new Float32Array(n * pixelsPer);
  const meta = new Float32Array(n * META_FEATURES);
  const labels = new Float32Array(n);
  items.forEach((item, i) => {
    // center [0,1] pixels to [-0.5, 0.5] so conv features sit around zero
    const base = i * pixelsPer;
    for (let k = 0; k < pixelsPer; k++) images[base + k] = item.pixels[k] - 0.5;
    for (let f = 0; f < META_FEATURES; f++) {
      const raw = item.metadata[f];
      meta[i * META_FEATURES + f] = stats ? (raw - stats.mean[f]) / stats.std[f] : raw;
    }
    labels[i] = item.label;
  });
  return {
    images: tf.tensor4d(images, [n, inputSize, inputSize, 3]),
    meta: tf.tensor2d(meta, [n, META_FEATURES]),
    labels: tf.tensor2d(labels, [n, 1]),
    n,
  };
}

/** Release a bundle's tensors. */
export function disposeBundle(bundle: TensorBundle): void {
  bundle.images.dispose();
  bundle.meta.dispose();
  bundle.labels.dispose();
}

function compileModel(model: tf.LayersModel, config: ScorerConfig): void {
  model.compile({
    optimizer: tf.train.adam(config.learningRate),
    loss: "binaryCrossentropy",
  });
}

/** Freeze or unfreeze every backbone layer (head layers are untouched). */
export function setBackboneTrainable(model: tf.LayersModel, trainable: boolean): void {
  for (const layer of model.layers) {
    if (layer.name.startsWith(BACKBONE_PREFIX)) {
      layer.trainable = trainable;
    }
  }
}

/**
 * Build the compiled two-input model (image + metadata -> score in (0,1)).
 *
 * Backbone layer names start with "backbone_" so the staged fine-tuning
 * schedule can freeze exactly the convolutional feature extractor.
 */
export function buildModel(config: ScorerConfig): tf.LayersModel {
  const size = config.inputSize;
  const init = (k: number) =>
    tf.initializers.glorotUniform({ seed: deriveSeed(config.seed, 100 + k) });

  const imageInput = tf.input({ shape: [size, size, 3], name: "image" });
  const metaInput = tf.input({ shape: [META_FEATURES], name: "metadata" });

  let x = tf.layers
    .conv2d({
      filters: 8,
      kernelSize: 3,
      padding: "same",
      activation: "relu",
      kernelInitializer: init(0),
      name: `${BACKBONE_PREFIX}conv_a`,
    })
    .apply(imageInput);
  x = tf.layers.maxPooling2d({ poolSize: 2, name: `${BACKBONE_PREFIX}pool_a` }).apply(x);
  x = tf.layers
    .conv2d({
      filters: 16,
      kernelSize: 3,
      padding: "same",
      activation: "relu",
      kernelInitializer: init(1),
      name: `${BACKBONE_PREFIX}conv_b`,
    })
    .apply(x);
  x = tf.layers.maxPooling2d({ poolSize: 2, name: `${BACKBONE_PREFIX}pool_b` }).apply(x);
  x = tf.layers
    .conv2d({
      filters: 32,
      kernelSize: 3,
      padding: "same",
      activation: "relu",
      kernelInitializer: init(2),
      name: `${BACKBONE_PREFIX}conv_c`,
    })
    .apply(x);
  x = tf.layers
    .globalAveragePooling2d({ name: `${BACKBONE_PREFIX}pooled` })
    .apply(x);
  // normalize pooled features per sample so the image branch meets the
  // standardized metadata at a comparable scale in the head
  x = tf.layers
    .layerNormalization({ name: `${BACKBONE_PREFIX}features` })
    .apply(x);

  const merged = tf.layers
    .concatenate({ name: "with_metadata" })
    .apply([x as tf.SymbolicTensor, metaInput]);
  const hidden = tf.layers
    .dense({ units: 16, activation: "relu", kernelInitializer: init(3), name: "head" })
    .apply(merged);
  const output = tf.layers
    .dense({ units: 1, activation: "sigmoid", kernelInitializer: init(4), name: "score" })
    .apply(hidden) as tf.SymbolicTensor;

  const model = tf.model({ inputs: [imageInput, metaInput], outputs: output });
  compileModel(model, config);
  return model;
}

const BCE_EPSILON = 1e-7;

/** Exact full-set mean BCE loss and accuracy for the current weights. */
export function evaluateModel(
  model: tf.LayersModel,
  bundle: TensorBundle,
  batchSize: number,
): { loss: number; accuracy: number } {
  const predictions = tf.tidy(() => {
    const out = model.predict([bundle.images, bundle.meta], { batchSize }) as tf.Tensor;
    return out.dataSync() as Float32Array;
  });
  const labels = bundle.labels.dataSync() as Float32Array;
  let lossSum = 0;
  let correct = 0;
  for (let i = 0; i < bundle.n; i++) {
    const label = labels[i];
    let p = predictions[i];
    if (p < BCE_EPSILON) p = BCE_EPSILON;
    if (p > 1 - BCE_EPSILON) p = 1 - BCE_EPSILON;
    lossSum += label > 0.5 ? -Math.log(p) : -Math.log(1 - p);
    if ((predictions[i] >= 0.5 ? 1 : 0) === label) correct++;
  }
  return { loss: lossSum / bundle.n, accuracy: correct / bundle.n };
}

function gatherBatch(bundle: TensorBundle, indices: number[]): [tf.Tensor[], tf.Tensor] {
  const idx = tf.tensor1d(indices, "int32");
  const images = tf.gather(bundle.images, idx);
  const meta = tf.gather(bundle.meta, idx);
  const labels = tf.gather(bundle.labels, idx);
  idx.dispose();
  return [[images, meta], labels];
}

/**
 * Train the scorer on assembled splits.
 *
 * Runs up to maxEpochs of seeded-shuffle minibatch Adam with the staged
 * freeze/unfreeze schedule; after each epoch records exact full-set
 * metrics; stops early once validation loss has not improved for more
 * than `patience` epochs; restores the best-validation weights before
 * returning. Throws NonFiniteLoss the moment any batch or epoch loss is
 * NaN/Inf, and EmptySplit when either split has no items.
 */
export async function trainScorer(
  splits: DatasetSplits,
  config: ScorerConfig,
): Promise<TrainedScorer> {
  if (splits.train.length === 0 || splits.val.length === 0) {
    throw new EmptySplit(
      `training needs non-empty splits, got train=${splits.train.length} val=${splits.val.length}`,
    );
  }
  const model = buildModel(config);
  const stats = metaStats(splits.train);
  const train = toTensors(splits.train, config.inputSize, stats);
  const val = toTensors(splits.val, config.inputSize, stats);
  const shuffleRng = new Rng(deriveSeed(config.seed, 3));

  if (config.freezeEpochs > 0) {
    setBackboneTrainable(model, false);
    compileModel(model, config); // recompile so the frozen set takes effect
  }

  const history: TrainingHistory = {
    trainLoss: [],
    valLoss: [],
    trainAccuracy: [],
    bestEpoch: -1,
    stoppedEarly: false,
  };
  let bestValLoss = Number.POSITIVE_INFINITY;
  let bestWeights: tf.Tensor[] | null = null;
  let epochsSinceBest = 0;

  try {
    for (let epoch = 0; epoch < config.maxEpochs; epoch++) {
      if (epoch === config.freezeEpochs && config.freezeEpochs > 0) {
        setBackboneTrainable(model, true);
        compileModel(model, config); // optimizer state restarts unfrozen
      }
      const order = shuffleRng.shuffle([...Array(train.n).keys()]);
      for (let start = 0; start < order.length; start += config.batchSize) {
        const indices = order.slice(start, start + config.batchSize);
        const [inputs, labels] = gatherBatch(train, indices);
        const batchLoss = (await model.trainOnBatch(inputs, labels)) as number;
        for (const t of inputs) t.dispose();
        labels.dispose();
        if (!Number.isFinite(batchLoss)) {
          throw new NonFiniteLoss(`batch loss became ${batchLoss} at epoch ${epoch + 1}`);
        }
      }

      const trainMetrics = evaluateModel(model, train, config.batchSize);
      const valMetrics = evaluateModel(model, val, config.batchSize);
      if (!Number.isFinite(trainMetrics.loss) || !Number.isFinite(valMetrics.loss)) {
        throw new NonFiniteLoss(
          `epoch ${epoch + 1} loss is not finite ` +
            `(train ${trainMetrics.loss}, validation ${valMetrics.loss})`,
        );
      }
      history.trainLoss.push(trainMetrics.loss);
      history.valLoss.push(valMetrics.loss);
      history.trainAccuracy.push(trainMetrics.accuracy);

      if (valMetrics.loss < bestValLoss) {
        bestValLoss = valMetrics.loss;
        history.bestEpoch = epoch;
        epochsSinceBest = 0;
        if (bestWeights) for (const w of bestWeights) w.dispose();
        bestWeights = model.getWeights().map((w) => w.clone());
      } else {
        epochsSinceBest++;
        if (epochsSinceBest > config.patience) {
          history.stoppedEarly = true;
          break;
        }
      }
    }
    if (bestWeights) {
      model.setWeights(bestWeights);
    }
  } finally {
    disposeBundle(train);
    disposeBundle(val);
    if (bestWeights) for (const w of bestWeights) w.dispose();
  }

  return { model, config, history, metaStats: stats };
}
