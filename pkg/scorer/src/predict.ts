/** Scoring images with a trained model and exporting engine-ready scores. */

import * as tf from "@tensorflow/tfjs";

import { writeScoresCsv } from "./csv.js";
import type { StudyItem } from "./dataset.js";
import { ScorerError } from "./errors.js";
import type { TrainedScorer } from "./model.js";
import { toTensors, disposeBundle } from "./model.js";

/** One scored image, keyed by the id the analysis engine joins on. */
export interface ScoredImage {
  imageId: string;
  participantId: string;
  day: number;
  slot: number;
  score: number;
}

/**
 * Score items with a trained model.
 *
 * Pure forward pass: no randomness, so repeated calls on the same items
 * return bit-identical scores. Every score is checked into [0, 1] (the
 * sigmoid output guarantees it; the check guards regressions).
 */
export function predictScores(scorer: TrainedScorer, items: StudyItem[]): ScoredImage[] {
  if (items.length === 0) return [];
  const bundle = toTensors(items, scorer.config.inputSize, scorer.metaStats);
  const values = tf.tidy(() => {
    const out = scorer.model.predict([bundle.images, bundle.meta], {
      batchSize: scorer.config.batchSize,
    }) as tf.Tensor;
    return out.dataSync() as Float32Array;
  });
  disposeBundle(bundle);
  return items.map((item, i) => {
    const score = values[i];
    if (!Number.isFinite(score) || score < 0 || score > 1) {
      throw new ScorerError(`score for ${item.imageId} is out of range: ${score}`);
    }
    return {
      imageId: item.imageId,
      participantId: item.participantId,
      day: item.day,
      slot: item.slot,
      score,
    };
  });
}

/** Write scored images as the engine's per-image score table. */
export function exportScores(path: string, scored: ScoredImage[]): void {
  writeScoresCsv(
    path,
    scored.map((s) => ({ imageId: s.imageId, score: s.score })),
  );
}
