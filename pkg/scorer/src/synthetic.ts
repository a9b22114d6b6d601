/** Synthetic study generator: images + observations + ratings.
 *
 * Produces a complete, self-consistent multimodal N-of-1 study on disk so
 * the whole pipeline (rating binarization, scorer training, downstream
 * per-participant inference) can run end to end without any external data.
 *
 * Generative model, per participant:
 *   - a crossover schedule of `days` days x `slotsPerDay` slots, treated on
 *     the back half of every 4-day block (days 3,4,7,8,... for 16 days);
 *   - latent severity s(t) = base + effect * treated(t) + participant
 *     shift + AR(1) noise, clipped to [0.05, 0.95];
 *   - a facial-skin-like image whose appearance encodes severity two ways:
 *     redness (R up, G/B down, relative to a per-participant skin tone)
 *     and the number of small dark-red blemish blobs;
 *   - three raters who view severity through different strictly increasing
 *     curves plus small noise (so their 0-1 ratings agree in order but not
 *     in value).
 *
 * The per-participant tone offsets make appearance participant-specific:
 * a scorer trained without one participant transfers imperfectly to them,
 * which is exactly the gap that training on augmented copies of that
 * participant's own images is meant to close.
 */

import { mkdirSync } from "node:fs";
import { join } from "node:path";

import { writeTable, OBSERVATION_COLUMNS } from "./csv.js";
import { InvalidConfig } from "./errors.js";
import { writePpm, type RawImage } from "./ppm.js";
import { deriveSeed, Rng } from "./rng.js";

/** Planted treatment effects on latent severity (negative = improvement). */
export const DEFAULT_EFFECTS: Record<string, number> = {
  "1": 0.0,
  "2": -0.25,
  "3": 0.0,
  "4": -0.12,
  "5": 0.02,
};

export interface SyntheticStudyOptions {
  /** Directory to create the study in (made recursively). */
  outDir: string;
  seed: number;
  /** Square image side in pixels (default 32). */
  imageSize?: number;
  /** Participant ids and their severity effects (default DEFAULT_EFFECTS). */
  effects?: Record<string, number>;
  /** Days per participant (default 16). */
  days?: number;
  /** Observation slots per day (default 3). */
  slotsPerDay?: number;
}

export interface SyntheticStudySummary {
  observationsPath: string;
  ratingsPath: string;
  imagesDir: string;
  participants: string[];
  imageCount: number;
}

interface Tone {
  r: number;
  g: number;
  b: number;
}

const BASE_SEVERITY = 0.55;
const SEVERITY_AR = 0.4;
const SEVERITY_NOISE_SD = 0.05;
const TONE_SPREAD = 0.07;
const REDNESS_GAIN = { r: 0.55, g: -0.3, b: -0.22 };
const MAX_BLOBS = 10;
const PIXEL_NOISE_SD = 0.02;

const RATER_CURVES: Record<string, (x: number) => number> = {
  r1: (x) => x,
  r2: (x) => x * x,
  r3: (x) => Math.sqrt(x),
};
const RATING_NOISE_SD = 0.02;

function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

/** Render one severity value as an image (exported for focused tests). */
export function renderImage(
  size: number,
  severity: number,
  tone: Tone,
  rng: Rng,
): RawImage {
  const shift = severity - 0.5;
  const base = {
    r: tone.r + REDNESS_GAIN.r * shift,
    g: tone.g + REDNESS_GAIN.g * shift,
    b: tone.b + REDNESS_GAIN.b * shift,
  };
  const channels = new Float64Array(size * size * 3);
  for (let i = 0; i < size * size; i++) {
    channels[3 * i] = base.r;
    channels[3 * i + 1] = base.g;
    channels[3 * i + 2] = base.b;
  }
  const nBlobs = Math.round(severity * MAX_BLOBS);
  for (let blob = 0; blob < nBlobs; blob++) {
    const cx = rng.uniform(0, size);
    const cy = rng.uniform(0, size);
    const radius = rng.uniform(2, 4.5) * (size / 32);
    const r2 = radius * radius;
    const x0 = Math.max(0, Math.floor(cx - radius));
    const x1 = Math.min(size - 1, Math.ceil(cx + radius));
    const y0 = Math.max(0, Math.floor(cy - radius));
    const y1 = Math.min(size - 1, Math.ceil(cy + radius));
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        const dx = x - cx;
        const dy = y - cy;
        if (dx * dx + dy * dy > r2) continue;
        const i = y * size + x;
        channels[3 * i] += 0.35;
        channels[3 * i + 1] -= 0.25;
        channels[3 * i + 2] -= 0.18;
      }
    }
  }
  const data = new Uint8Array(size * size * 3);
  for (let i = 0; i < data.length; i++) {
    const noisy = clamp01(channels[i] + rng.normal(0, PIXEL_NOISE_SD));
    data[i] = Math.round(noisy * 255);
  }
  return { width: size, height: size, data };
}

/** Generate and write a full synthetic study; returns the file locations. */
export function generateSyntheticStudy(
  options: SyntheticStudyOptions,
): SyntheticStudySummary {
  const size = options.imageSize ?? 32;
  const days = options.days ?? 16;
  const slotsPerDay = options.slotsPerDay ?? 3;
  const effects = options.effects ?? DEFAULT_EFFECTS;
  const participants = Object.keys(effects);
  if (participants.length === 0) {
    throw new InvalidConfig("effects must name at least one participant");
  }
  if (!Number.isInteger(size) || size < 8) {
    throw new InvalidConfig(`imageSize must be an integer >= 8, got ${size}`);
  }
  if (!Number.isInteger(days) || days < 1 || !Number.isInteger(slotsPerDay) || slotsPerDay < 1) {
    throw new InvalidConfig(`days and slotsPerDay must be positive integers`);
  }

  const imagesDir = join(options.outDir, "images");
  mkdirSync(imagesDir, { recursive: true });

  const observationRows: string[][] = [];
  const ratingRows: string[][] = [];
  let imageCount = 0;

  participants.forEach((participant, pIndex) => {
    const rng = new Rng(deriveSeed(options.seed, 10 + pIndex));
    const tone: Tone = {
      r: 0.45 + rng.uniform(-TONE_SPREAD, TONE_SPREAD),
      g: 0.42 + rng.uniform(-TONE_SPREAD, TONE_SPREAD),
      b: 0.4 + rng.uniform(-TONE_SPREAD, TONE_SPREAD),
    };
    const participantShift = rng.uniform(-0.05, 0.05);
    const effect = effects[participant];
    let arNoise = 0;
    for (let day = 1; day <= days; day++) {
      // two control days then two treated days, repeating
      const treated = (day - 1) % 4 >= 2;
      for (let slot = 1; slot <= slotsPerDay; slot++) {
        arNoise = SEVERITY_AR * arNoise + rng.normal(0, SEVERITY_NOISE_SD);
        const severity = Math.min(
          0.95,
          Math.max(0.05, BASE_SEVERITY + (treated ? effect : 0) + participantShift + arNoise),
        );

        const dd = String(day).padStart(2, "0");
        const imageId = `p${participant}_d${dd}_s${slot}.ppm`;
        writePpm(join(imagesDir, imageId), renderImage(size, severity, tone, rng));
        imageCount++;

        const hour = String(8 + 5 * (slot - 1)).padStart(2, "0");
        observationRows.push([
          participant,
          String(day),
          String(slot),
          `2025-03-${dd}T${hour}:00:00`,
          treated ? "1" : "0",
          (22 + rng.normal(0, 1.5)).toFixed(1),
          String(rng.int(4)),
          rng.bernoulli(0.12) ? "1" : "0",
          imageId,
        ]);

        for (const [rater, curve] of Object.entries(RATER_CURVES)) {
          const rating = clamp01(curve(severity) + rng.normal(0, RATING_NOISE_SD));
          ratingRows.push([imageId, rater, String(rating)]);
        }
      }
    }
  });

  const observationsPath = join(options.outDir, "observations.csv");
  const ratingsPath = join(options.outDir, "ratings.csv");
  writeTable(observationsPath, [...OBSERVATION_COLUMNS], observationRows);
  writeTable(ratingsPath, ["image_id", "rater_id", "score"], ratingRows);
  return {
    observationsPath,
    ratingsPath,
    imagesDir,
    participants,
    imageCount,
  };
}
