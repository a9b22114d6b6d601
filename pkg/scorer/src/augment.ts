/** Seeded image augmentation: rotation, horizontal flip, brightness shift.
 *
 * Augmentation operates on float pixels in [0, 1] (interleaved RGB). All
 * randomness comes from the caller's Rng, so a fixed seed reproduces the
 * exact pixel output. A policy whose ranges are all zero draws nothing and
 * returns a pixel-identical copy of the input.
 */

import * as tf from "@tensorflow/tfjs";

import type { AugmentationPolicy } from "./config.js";
import type { Rng } from "./rng.js";

/** Concrete perturbation sampled from a policy. */
export interface AppliedAugmentation {
  /** Rotation angle in radians (0 = none). */
  rotation: number;
  /** Whether the image is mirrored left-right. */
  flipped: boolean;
  /** Additive brightness shift on [0,1] pixels (0 = none). */
  brightnessShift: number;
}

/** Draw one perturbation; zero-range components consume no randomness. */
export function sampleAugmentation(policy: AugmentationPolicy, rng: Rng): AppliedAugmentation {
  const rotation =
    policy.rotationRange > 0 ? rng.uniform(-policy.rotationRange, policy.rotationRange) : 0;
  const flipped = policy.flipProbability > 0 ? rng.bernoulli(policy.flipProbability) : false;
  const brightnessShift =
    policy.brightnessRange > 0 ? rng.uniform(-policy.brightnessRange, policy.brightnessRange) : 0;
  return { rotation, flipped, brightnessShift };
}

/**
 * Apply a concrete perturbation to square RGB pixels of side `size`.
 *
 * Always returns a fresh buffer (never the input); with an all-zero
 * perturbation the copy is bitwise identical to the input. Rotation fills
 * uncovered corners with mid-gray 0.5; brightness clips back into [0, 1].
 */
export function applyAugmentation(
  pixels: Float32Array,
  size: number,
  applied: AppliedAugmentation,
): Float32Array {
  let out: Float32Array;
  if (applied.rotation !== 0 || applied.flipped) {
    out = tf.tidy(() => {
      let image = tf.tensor4d(pixels, [1, size, size, 3]);
      if (applied.rotation !== 0) {
        image = tf.image.rotateWithOffset(image, applied.rotation, 0.5);
      }
      if (applied.flipped) {
        image = tf.image.flipLeftRight(image);
      }
      return image.dataSync() as Float32Array;
    });
  } else {
    out = pixels.slice();
  }
  if (applied.brightnessShift !== 0) {
    const shift = applied.brightnessShift;
    for (let i = 0; i < out.length; i++) {
      const v = out[i] + shift;
      out[i] = v < 0 ? 0 : v > 1 ? 1 : v;
    }
  }
  return out;
}

/** Sample from the policy and apply in one step. */
export function augmentImage(
  pixels: Float32Array,
  size: number,
  policy: AugmentationPolicy,
  rng: Rng,
): Float32Array {
  return applyAugmentation(pixels, size, sampleAugmentation(policy, rng));
}
