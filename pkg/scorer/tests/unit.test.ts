import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import {
  EmptySplit,
  InvalidConfig,
  ParseError,
  Rng,
  SchemaError,
  decodePpm,
  deriveSeed,
  encodePpm,
  filterObservationsCsv,
  makeConfig,
  readFitCsv,
  readLabels,
  readObservations,
  readPpm,
  readScoresCsv,
  writePpm,
  writeScoresCsv,
} from "../dist/index.js";

const work = mkdtempSync(join(tmpdir(), "scorer-unit-"));
afterAll(() => rmSync(work, { recursive: true, force: true }));

describe("seeded rng", () => {
  it("reproduces the same stream for the same seed", () => {
    const a = new Rng(42);
    const b = new Rng(42);
    for (let i = 0; i < 100; i++) expect(a.next()).toBe(b.next());
  });

  it("gives different streams for different seeds", () => {
    const a = new Rng(1);
    const b = new Rng(2);
    const same = Array.from({ length: 10 }, () => a.next() === b.next());
    expect(same.every(Boolean)).toBe(false);
  });

  it("derives stable child seeds", () => {
    expect(deriveSeed(7, 1)).toBe(deriveSeed(7, 1));
    expect(deriveSeed(7, 1)).not.toBe(deriveSeed(7, 2));
    expect(deriveSeed(8, 1)).not.toBe(deriveSeed(7, 1));
  });

  it("keeps uniform draws in [0, 1) and bounded draws in range", () => {
    const rng = new Rng(3);
    for (let i = 0; i < 1000; i++) {
      const u = rng.next();
      expect(u).toBeGreaterThanOrEqual(0);
      expect(u).toBeLessThan(1);
      const v = rng.uniform(-2, 5);
      expect(v).toBeGreaterThanOrEqual(-2);
      expect(v).toBeLessThan(5);
      const k = rng.int(7);
      expect(k).toBeGreaterThanOrEqual(0);
      expect(k).toBeLessThan(7);
      expect(Number.isInteger(k)).toBe(true);
    }
  });

  it("shuffles into a permutation deterministically", () => {
    const items = [...Array(20).keys()];
    const shuffled = new Rng(9).shuffle([...items]);
    expect([...shuffled].sort((x, y) => x - y)).toEqual(items);
    expect(new Rng(9).shuffle([...items])).toEqual(shuffled);
    expect(shuffled).not.toEqual(items);
  });

  it("rejects non-integer seeds", () => {
    expect(() => new Rng(1.5)).toThrow(InvalidConfig);
  });

  it("produces roughly standard normal deviates", () => {
    const rng = new Rng(11);
    const n = 4000;
    let sum = 0;
    let sumSq = 0;
    for (let i = 0; i < n; i++) {
      const z = rng.normal();
      sum += z;
      sumSq += z * z;
    }
    expect(Math.abs(sum / n)).toBeLessThan(0.06);
    expect(Math.abs(sumSq / n - 1)).toBeLessThan(0.1);
  });
});

describe("ppm images", () => {
  it("round-trips pixels exactly", () => {
    const rng = new Rng(5);
    const data = new Uint8Array(6 * 4 * 3);
    for (let i = 0; i < data.length; i++) data[i] = rng.int(256);
    const image = { width: 6, height: 4, data };
    const path = join(work, "roundtrip.ppm");
    writePpm(path, image);
    const back = readPpm(path);
    expect(back.width).toBe(6);
    expect(back.height).toBe(4);
    expect(Buffer.from(back.data).equals(Buffer.from(data))).toBe(true);
  });

  it("parses headers with comments and whitespace", () => {
    const pixels = Buffer.alloc(2 * 2 * 3, 7);
    const buf = Buffer.concat([Buffer.from("P6\n# a comment\n 2\n2\t255\n"), pixels]);
    const image = decodePpm(buf);
    expect(image.width).toBe(2);
    expect(image.data.every((v) => v === 7)).toBe(true);
  });

  it("rejects wrong magic, truncated data, and bad maxval", () => {
    const good = encodePpm({ width: 2, height: 2, data: new Uint8Array(12) });
    expect(() => decodePpm(Buffer.from("P5" + good.subarray(2).toString("latin1"), "latin1"))).toThrow(
      ParseError,
    );
    expect(() => decodePpm(good.subarray(0, good.length - 1))).toThrow(/truncated/);
    expect(() => decodePpm(Buffer.concat([Buffer.from("P6\n2 2\n65535\n"), Buffer.alloc(24)]))).toThrow(
      /maxval/,
    );
    expect(() => encodePpm({ width: 3, height: 2, data: new Uint8Array(12) })).toThrow(ParseError);
  });
});

describe("csv tables", () => {
  it("reads observations with optional metadata", () => {
    const path = join(work, "obs.csv");
    writeFileSync(
      path,
      "participant_id,day,slot,timestamp,treatment,temperature,workout_level,lotion_or_makeup,image_ref\n" +
        "1,1,1,2025-03-01T08:00:00,0,21.5,2,0,img1.ppm\n" +
        "1,1,2,2025-03-01T13:00:00,1,,,,\n",
    );
    const rows = readObservations(path);
    expect(rows).toHaveLength(2);
    expect(rows[0]).toMatchObject({
      participantId: "1",
      day: 1,
      slot: 1,
      treatment: false,
      temperature: 21.5,
      workoutLevel: 2,
      lotionOrMakeup: false,
      imageRef: "img1.ppm",
    });
    expect(rows[1]).toMatchObject({
      treatment: true,
      temperature: null,
      workoutLevel: null,
      lotionOrMakeup: null,
      imageRef: null,
    });
  });

  it("reports the line number of a malformed value", () => {
    const path = join(work, "obs_bad.csv");
    writeFileSync(
      path,
      "participant_id,day,slot,timestamp,treatment\n1,1,1,t,0\n1,two,1,t,0\n",
    );
    expect(() => readObservations(path)).toThrow(/line 3.*day/);
  });

  it("rejects a missing required column", () => {
    const path = join(work, "obs_cols.csv");
    writeFileSync(path, "participant_id,day,slot,timestamp\n1,1,1,t\n");
    expect(() => readObservations(path)).toThrow(SchemaError);
    expect(() => readObservations(path)).toThrow(/treatment/);
  });

  it("round-trips scores at full float precision", () => {
    const path = join(work, "scores.csv");
    const rows = [
      { imageId: "a.ppm", score: 1 / 3 },
      { imageId: "b.ppm", score: 0.30000000000000004 },
      { imageId: "c,with comma", score: 1e-7 },
    ];
    writeScoresCsv(path, rows);
    const back = readScoresCsv(path);
    expect(back.size).toBe(3);
    for (const { imageId, score } of rows) expect(back.get(imageId)).toBe(score);
  });

  it("rejects duplicate image ids in labels and scores", () => {
    const labelsPath = join(work, "labels_dup.csv");
    writeFileSync(labelsPath, "image_id,label\na,1\na,0\n");
    expect(() => readLabels(labelsPath)).toThrow(/duplicate/);
    const scoresPath = join(work, "scores_dup.csv");
    writeFileSync(scoresPath, "image_id,score\na,0.5\na,0.6\n");
    expect(() => readScoresCsv(scoresPath)).toThrow(/duplicate/);
  });

  it("rejects labels other than 0/1", () => {
    const path = join(work, "labels_bad.csv");
    writeFileSync(path, "image_id,label\na,2\n");
    expect(() => readLabels(path)).toThrow(/label must be 0 or 1/);
  });

  it("parses the engine's fit table", () => {
    const path = join(work, "fit.csv");
    writeFileSync(
      path,
      "participant_id,beta_treatment,se,phi,sigma2,statistic,df,p_value,method,boundary_warning\n" +
        "2,-0.25,0.05,0.3,0.01,-5.0,44,1e-05,reml,0\n",
    );
    const fit = readFitCsv(path).get("2");
    expect(fit).toBeDefined();
    expect(fit!.betaTreatment).toBe(-0.25);
    expect(fit!.pValue).toBe(1e-5);
    expect(fit!.method).toBe("reml");
    expect(fit!.boundaryWarning).toBe(false);
  });

  it("filters an observations file to one participant verbatim", () => {
    const inPath = join(work, "obs_all.csv");
    writeFileSync(
      inPath,
      "participant_id,day,slot,timestamp,treatment,image_ref\n" +
        "1,1,1,t1,0,a.ppm\n2,1,1,t2,1,b.ppm\n2,1,2,t3,0,c.ppm\n",
    );
    const outPath = join(work, "obs_p2.csv");
    const kept = filterObservationsCsv(inPath, outPath, "2");
    expect(kept).toBe(2);
    const rows = readObservations(outPath);
    expect(rows.map((r) => r.imageRef)).toEqual(["b.ppm", "c.ppm"]);
    expect(rows.every((r) => r.participantId === "2")).toBe(true);
  });
});

describe("configuration", () => {
  it("fills documented defaults", () => {
    const config = makeConfig({ seed: 1, testParticipant: "2" });
    expect(config.inputSize).toBe(224);
    expect(config.learningRate).toBe(0.001);
    expect(config.optimizer).toBe("adam");
    expect(config.loss).toBe("binaryCrossentropy");
    expect(config.batchSize).toBe(32);
    expect(config.split.trainFraction).toBe(0.8);
    expect(config.includeTestParticipantAugmented).toBe(false);
  });

  it("rejects a split that would empty one side", () => {
    expect(() => makeConfig({ seed: 1, testParticipant: "2", trainFraction: 1 })).toThrow(
      EmptySplit,
    );
    expect(() => makeConfig({ seed: 1, testParticipant: "2", trainFraction: 0 })).toThrow(
      EmptySplit,
    );
  });

  it("rejects out-of-range fields", () => {
    expect(() => makeConfig({ seed: 1, testParticipant: "" })).toThrow(InvalidConfig);
    expect(() => makeConfig({ seed: 1, testParticipant: "2", learningRate: -1 })).toThrow(
      InvalidConfig,
    );
    expect(() => makeConfig({ seed: 1, testParticipant: "2", batchSize: 0 })).toThrow(
      InvalidConfig,
    );
    expect(() => makeConfig({ seed: 1, testParticipant: "2", flipProbability: 1.5 })).toThrow(
      InvalidConfig,
    );
    expect(() => makeConfig({ seed: 1.5, testParticipant: "2" })).toThrow(InvalidConfig);
    expect(() =>
      makeConfig({
        seed: 1,
        testParticipant: "2",
        includeTestParticipantAugmented: true,
        augmentedCopies: 0,
      }),
    ).toThrow(InvalidConfig);
  });
});
