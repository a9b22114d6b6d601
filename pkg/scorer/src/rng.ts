/** Deterministic pseudo-random number generation.
 *
 * Everything stochastic in this package (splits, shuffles, augmentation
 * parameters, synthetic data) draws from this generator, so a fixed seed
 * reproduces a run bit-for-bit. The core is splitmix32: tiny, fast, and
 * plenty for data pipelines (this is not a cryptographic generator).
 */

import { InvalidConfig } from "./errors.js";

/** Fold an arbitrary safe integer seed into 32 bits, mixing high bits in. */
function foldSeed(seed: number): number {
  if (!Number.isSafeInteger(seed)) {
    throw new InvalidConfig(`seed must be an integer, got ${seed}`);
  }
  const lo = seed >>> 0;
  const hi = Math.floor(Math.abs(seed) / 0x100000000) >>> 0;
  return (lo ^ Math.imul(hi, 0x85ebca6b)) >>> 0;
}

function mix(state: number): number {
  let z = state >>> 0;
  z = Math.imul(z ^ (z >>> 16), 0x21f0aaad) >>> 0;
  z = Math.imul(z ^ (z >>> 15), 0x735a2d97) >>> 0;
  return (z ^ (z >>> 15)) >>> 0;
}

/**
 * Derive an independent child seed from a parent seed and an integer key.
 *
 * Distinct keys give streams that do not collide in practice, so modules
 * can carve private substreams out of one user-facing seed.
 */
export function deriveSeed(seed: number, key: number): number {
  const base = (foldSeed(seed) + Math.imul(key | 0, 0x9e3779b9)) >>> 0;
  return mix(mix(base));
}

/** Seeded generator with the handful of draws the pipeline needs. */
export class Rng {
  private state: number;
  private spareNormal: number | null = null;

  constructor(seed: number) {
    this.state = foldSeed(seed);
  }

  /** Uniform float in [0, 1). */
  next(): number {
    this.state = (this.state + 0x9e3779b9) >>> 0;
    return mix(this.state) / 4294967296;
  }

  /** Uniform float in [lo, hi). */
  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.next();
  }

  /** Uniform integer in [0, n). */
  int(n: number): number {
    if (!Number.isInteger(n) || n <= 0) {
      throw new InvalidConfig(`int() needs a positive integer bound, got ${n}`);
    }
    return Math.floor(this.next() * n);
  }

  /** True with probability p. */
  bernoulli(p: number): boolean {
    return this.next() < p;
  }

  /** Standard normal via Box-Muller (caches the spare deviate). */
  normal(mean = 0, sd = 1): number {
    let z: number;
    if (this.spareNormal !== null) {
      z = this.spareNormal;
      this.spareNormal = null;
    } else {
      let u = this.next();
      if (u === 0) u = Number.MIN_VALUE;
      const v = this.next();
      const r = Math.sqrt(-2 * Math.log(u));
      z = r * Math.cos(2 * Math.PI * v);
      this.spareNormal = r * Math.sin(2 * Math.PI * v);
    }
    return mean + sd * z;
  }

  /** In-place Fisher-Yates shuffle; returns the same array for chaining. */
  shuffle<T>(items: T[]): T[] {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.int(i + 1);
      const tmp = items[i];
      items[i] = items[j];
      items[j] = tmp;
    }
    return items;
  }

  /** Child generator whose stream is independent of this one's future draws. */
  split(key: number): Rng {
    return new Rng(deriveSeed(this.state, key));
  }
}
