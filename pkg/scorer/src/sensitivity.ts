/** Half-split sensitivity analysis for the held-out participant.
 *
 * Question: how much does adding augmented copies of a participant's own
 * images to training change the scores their remaining images receive?
 * The participant's days are divided into alternating blocks; one half
 * (chosen by seed) contributes augmented-only copies to training, the
 * other half stays fully unseen and is scored. Original pixels from both
 * halves never enter training.
 */

import type { ScorerConfig } from "./config.js";
import {
  augmentItem,
  assertNoLeakage,
  splitTrainVal,
  type DatasetSplits,
  type StudyData,
  type StudyItem,
} from "./dataset.js";
import { EmptySplit, ParticipantNotFound } from "./errors.js";
import { trainScorer, type TrainingHistory } from "./model.js";
import { predictScores, type ScoredImage } from "./predict.js";
import { deriveSeed, Rng } from "./rng.js";

/** Outcome of a half-split sensitivity run. */
export interface SensitivityResult {
  /** Test items whose augmented copies joined training. */
  augmentedHalf: StudyItem[];
  /** Untouched test items that were scored. */
  heldOutHalf: StudyItem[];
  /** Scores for the held-out half, in (day, slot) order. */
  scores: ScoredImage[];
  history: TrainingHistory;
  /** Day-block length used for the alternation. */
  blockLength: number;
  /** Whether even-indexed blocks were the augmented half. */
  evenBlocksAugmented: boolean;
}

/**
 * Run the half-split analysis for `config.split.testParticipant`.
 *
 * Blocks are `blockLength` consecutive days; block k covers days
 * [k*blockLength+1, (k+1)*blockLength]. A seeded coin decides whether the
 * even- or odd-indexed blocks are the augmented half, so the split is
 * deterministic per seed and balanced for block-structured designs.
 */
export async function halfSplitSensitivity(
  study: StudyData,
  config: ScorerConfig,
  blockLength = 4,
): Promise<SensitivityResult> {
  if (!Number.isInteger(blockLength) || blockLength < 1) {
    throw new EmptySplit(`blockLength must be a positive integer, got ${blockLength}`);
  }
  const test = study.items
    .filter((item) => item.participantId === config.split.testParticipant)
    .sort((a, b) => a.day - b.day || a.slot - b.slot);
  if (test.length === 0) {
    throw new ParticipantNotFound(
      `participant ${JSON.stringify(config.split.testParticipant)} has no images in the study`,
    );
  }

  const coin = new Rng(deriveSeed(config.seed, 4));
  const evenBlocksAugmented = coin.bernoulli(0.5);
  const isAugmentedHalf = (item: StudyItem): boolean => {
    const block = Math.floor((item.day - 1) / blockLength);
    const even = block % 2 === 0;
    return evenBlocksAugmented ? even : !even;
  };
  const augmentedHalf = test.filter(isAugmentedHalf);
  const heldOutHalf = test.filter((item) => !isAugmentedHalf(item));
  if (augmentedHalf.length === 0 || heldOutHalf.length === 0) {
    throw new EmptySplit(
      `day blocks of length ${blockLength} put all ${test.length} images in one half`,
    );
  }

  const rest = study.items.filter(
    (item) => item.participantId !== config.split.testParticipant,
  );
  const { train, val } = splitTrainVal(rest, config);
  const augRng = new Rng(deriveSeed(config.seed, 5));
  for (const item of augmentedHalf) {
    for (let k = 0; k < Math.max(config.augmentedCopies, 1); k++) {
      train.push(augmentItem(item, k, study.inputSize, config, augRng));
    }
  }
  const splits: DatasetSplits = { train, val, test: heldOutHalf };
  // The scored half must be completely unseen: its sources may not appear
  // in training even as augmented copies.
  assertNoLeakage(splits, false);

  const scorer = await trainScorer(splits, config);
  const scores = predictScores(scorer, heldOutHalf);
  scorer.model.dispose();
  return {
    augmentedHalf,
    heldOutHalf,
    scores,
    history: scorer.history,
    blockLength,
    evenBlocksAugmented,
  };
}
