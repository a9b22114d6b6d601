import { describe, expect, it } from "vitest";

import {
  Rng,
  applyAugmentation,
  augmentImage,
  sampleAugmentation,
  type AugmentationPolicy,
} from "../dist/index.js";

const SIZE = 16;

function gradientImage(): Float32Array {
  const px = new Float32Array(SIZE * SIZE * 3);
  for (let y = 0; y < SIZE; y++) {
    for (let x = 0; x < SIZE; x++) {
      const i = (y * SIZE + x) * 3;
      px[i] = x / (SIZE - 1);
      px[i + 1] = y / (SIZE - 1);
      px[i + 2] = 0.5;
    }
  }
  return px;
}

const ZERO_POLICY: AugmentationPolicy = {
  rotationRange: 0,
  flipProbability: 0,
  brightnessRange: 0,
};

describe("augmentation", () => {
  it("returns a pixel-identical copy under an all-zero policy", () => {
    const px = gradientImage();
    const out = augmentImage(px, SIZE, ZERO_POLICY, new Rng(1));
    expect(out).not.toBe(px);
    expect(Buffer.from(out.buffer).equals(Buffer.from(px.buffer))).toBe(true);
  });

  it("is deterministic for a fixed seed", () => {
    const policy: AugmentationPolicy = {
      rotationRange: 0.4,
      flipProbability: 0.5,
      brightnessRange: 0.2,
    };
    const px = gradientImage();
    const a = augmentImage(px, SIZE, policy, new Rng(77));
    const b = augmentImage(px, SIZE, policy, new Rng(77));
    expect(Buffer.from(a.buffer).equals(Buffer.from(b.buffer))).toBe(true);
    const c = augmentImage(px, SIZE, policy, new Rng(78));
    expect(Buffer.from(a.buffer).equals(Buffer.from(c.buffer))).toBe(false);
  });

  it("applies a forced flip as an exact involution", () => {
    const px = gradientImage();
    const flip = { rotation: 0, flipped: true, brightnessShift: 0 };
    const once = applyAugmentation(px, SIZE, flip);
    expect(Buffer.from(once.buffer).equals(Buffer.from(px.buffer))).toBe(false);
    const twice = applyAugmentation(once, SIZE, flip);
    expect(Buffer.from(twice.buffer).equals(Buffer.from(px.buffer))).toBe(true);
  });

  it("keeps brightness-shifted pixels clipped to [0, 1]", () => {
    const px = gradientImage();
    const bright = applyAugmentation(px, SIZE, { rotation: 0, flipped: false, brightnessShift: 0.9 });
    const dark = applyAugmentation(px, SIZE, { rotation: 0, flipped: false, brightnessShift: -0.9 });
    for (let i = 0; i < px.length; i++) {
      expect(bright[i]).toBeLessThanOrEqual(1);
      expect(bright[i]).toBeGreaterThanOrEqual(0);
      expect(dark[i]).toBeLessThanOrEqual(1);
      expect(dark[i]).toBeGreaterThanOrEqual(0);
    }
    expect(bright[0]).toBeCloseTo(Math.min(1, px[0] + 0.9), 6);
    expect(dark[px.length - 1]).toBeCloseTo(Math.max(0, px[px.length - 1] - 0.9), 6);
  });

  it("preserves the pixel count and range under rotation", () => {
    const px = gradientImage();
    const rotated = applyAugmentation(px, SIZE, { rotation: 0.7, flipped: false, brightnessShift: 0 });
    expect(rotated.length).toBe(px.length);
    for (let i = 0; i < rotated.length; i++) {
      expect(rotated[i]).toBeGreaterThanOrEqual(0);
      expect(rotated[i]).toBeLessThanOrEqual(1);
    }
    expect(Buffer.from(rotated.buffer).equals(Buffer.from(px.buffer))).toBe(false);
  });

  it("samples within the policy ranges and skips draws for zero ranges", () => {
    const policy: AugmentationPolicy = {
      rotationRange: 0.3,
      flipProbability: 1,
      brightnessRange: 0.1,
    };
    const rng = new Rng(5);
    for (let i = 0; i < 200; i++) {
      const applied = sampleAugmentation(policy, rng);
      expect(Math.abs(applied.rotation)).toBeLessThanOrEqual(0.3);
      expect(applied.flipped).toBe(true);
      expect(Math.abs(applied.brightnessShift)).toBeLessThanOrEqual(0.1);
    }
    const silent = sampleAugmentation(ZERO_POLICY, new Rng(6));
    expect(silent).toEqual({ rotation: 0, flipped: false, brightnessShift: 0 });
  });
});
