/** CSV readers and writers for the tables shared with the analysis engine.
 *
 * Formats (headers are exact):
 *   observations: participant_id,day,slot,timestamp,treatment
 *                 [,temperature,workout_level,lotion_or_makeup,image_ref]
 *   labels:       image_id,label           (label is 0 or 1)
 *   scores:       image_id,score           (score in [0, 1])
 *   ratings:      image_id,rater_id,score  (score in [0, 1])
 *   fits:         participant_id,beta_treatment,se,phi,sigma2,statistic,df,
 *                 p_value,method,boundary_warning
 *
 * Readers are strict: missing required columns, malformed values, and
 * duplicate keys raise SchemaError/ParseError with 1-based line numbers
 * (line 1 is the header).
 */

import { readFileSync, writeFileSync } from "node:fs";

import Papa from "papaparse";

import { ParseError, SchemaError } from "./errors.js";

export const OBSERVATION_COLUMNS = [
  "participant_id",
  "day",
  "slot",
  "timestamp",
  "treatment",
  "temperature",
  "workout_level",
  "lotion_or_makeup",
  "image_ref",
] as const;

const REQUIRED_OBSERVATION_COLUMNS = OBSERVATION_COLUMNS.slice(0, 5);

/** One observation row with typed fields; optional metadata may be null. */
export interface ObservationRow {
  participantId: string;
  day: number;
  slot: number;
  timestamp: string;
  treatment: boolean;
  temperature: number | null;
  workoutLevel: number | null;
  lotionOrMakeup: boolean | null;
  imageRef: string | null;
}

interface ParsedTable {
  fields: string[];
  rows: Record<string, string>[];
}

function parseTable(path: string): ParsedTable {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new ParseError(`${path}: ${(err as Error).message}`);
  }
  const result = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: "greedy",
  });
  for (const issue of result.errors) {
    // Papaparse reports structural problems (bad quoting, ragged rows).
    if (issue.code !== "UndetectableDelimiter") {
      const line = issue.row === undefined ? "?" : String(issue.row + 2);
      throw new ParseError(`${path}: line ${line}: ${issue.message}`);
    }
  }
  const fields = result.meta.fields ?? [];
  if (fields.length === 0) {
    throw new SchemaError(`${path}: missing header row`);
  }
  return { fields, rows: result.data };
}

function requireColumns(path: string, fields: string[], needed: readonly string[]): void {
  const have = new Set(fields);
  const missing = needed.filter((c) => !have.has(c));
  if (missing.length > 0) {
    throw new SchemaError(`${path}: missing required column(s): ${missing.join(", ")}`);
  }
}

function parseIntStrict(raw: string, path: string, line: number, column: string): number {
  if (!/^[+-]?\d+$/.test(raw.trim())) {
    throw new ParseError(`${path}: line ${line}: ${column} must be an integer, got ${JSON.stringify(raw)}`);
  }
  return Number.parseInt(raw, 10);
}

function parseFloatStrict(raw: string, path: string, line: number, column: string): number {
  const value = Number(raw.trim());
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new ParseError(`${path}: line ${line}: ${column} must be a number, got ${JSON.stringify(raw)}`);
  }
  return value;
}

function parseBoolStrict(raw: string, path: string, line: number, column: string): boolean {
  const word = raw.trim().toLowerCase();
  if (word === "1" || word === "true") return true;
  if (word === "0" || word === "false") return false;
  throw new ParseError(`${path}: line ${line}: ${column} must be 0/1/true/false, got ${JSON.stringify(raw)}`);
}

/** Read an observations table; metadata columns are optional per row. */
export function readObservations(path: string): ObservationRow[] {
  const { fields, rows } = parseTable(path);
  requireColumns(path, fields, REQUIRED_OBSERVATION_COLUMNS);
  const out: ObservationRow[] = [];
  rows.forEach((row, index) => {
    const line = index + 2;
    const get = (column: string): string => (row[column] ?? "").trim();
    const participantId = get("participant_id");
    if (!participantId) {
      throw new ParseError(`${path}: line ${line}: participant_id must not be empty`);
    }
    const day = parseIntStrict(get("day"), path, line, "day");
    const slot = parseIntStrict(get("slot"), path, line, "slot");
    if (day < 1 || slot < 1) {
      throw new ParseError(`${path}: line ${line}: day and slot must be >= 1`);
    }
    const temperatureRaw = get("temperature");
    const workoutRaw = get("workout_level");
    const lotionRaw = get("lotion_or_makeup");
    const imageRef = get("image_ref");
    out.push({
      participantId,
      day,
      slot,
      timestamp: get("timestamp"),
      treatment: parseBoolStrict(get("treatment"), path, line, "treatment"),
      temperature: temperatureRaw === "" ? null : parseFloatStrict(temperatureRaw, path, line, "temperature"),
      workoutLevel: workoutRaw === "" ? null : parseIntStrict(workoutRaw, path, line, "workout_level"),
      lotionOrMakeup: lotionRaw === "" ? null : parseBoolStrict(lotionRaw, path, line, "lotion_or_makeup"),
      imageRef: imageRef === "" ? null : imageRef,
    });
  });
  return out;
}

/** Read a binary-labels table into an image_id -> 0|1 map. */
export function readLabels(path: string): Map<string, 0 | 1> {
  const { fields, rows } = parseTable(path);
  requireColumns(path, fields, ["image_id", "label"]);
  const labels = new Map<string, 0 | 1>();
  rows.forEach((row, index) => {
    const line = index + 2;
    const image = (row.image_id ?? "").trim();
    if (!image) throw new ParseError(`${path}: line ${line}: image_id must not be empty`);
    if (labels.has(image)) {
      throw new SchemaError(`${path}: line ${line}: duplicate label for image ${JSON.stringify(image)}`);
    }
    const label = parseIntStrict((row.label ?? "").trim(), path, line, "label");
    if (label !== 0 && label !== 1) {
      throw new ParseError(`${path}: line ${line}: label must be 0 or 1, got ${label}`);
    }
    labels.set(image, label);
  });
  return labels;
}

/** Read a per-image score table into an image_id -> score map. */
export function readScoresCsv(path: string): Map<string, number> {
  const { fields, rows } = parseTable(path);
  requireColumns(path, fields, ["image_id", "score"]);
  const scores = new Map<string, number>();
  rows.forEach((row, index) => {
    const line = index + 2;
    const image = (row.image_id ?? "").trim();
    if (!image) throw new ParseError(`${path}: line ${line}: image_id must not be empty`);
    if (scores.has(image)) {
      throw new SchemaError(`${path}: line ${line}: duplicate score for image ${JSON.stringify(image)}`);
    }
    scores.set(image, parseFloatStrict(row.score ?? "", path, line, "score"));
  });
  return scores;
}

/** One row to serialize into a score table. */
export interface ScoreRow {
  imageId: string;
  score: number;
}

/** Write per-image scores; numbers round-trip at full float64 precision. */
export function writeScoresCsv(path: string, rows: ScoreRow[]): void {
  writeTable(
    path,
    ["image_id", "score"],
    rows.map((row) => [row.imageId, String(row.score)]),
  );
}

/** One fitted-model row produced by the analysis engine. */
export interface FitRow {
  participantId: string;
  betaTreatment: number;
  se: number;
  phi: number;
  sigma2: number;
  statistic: number;
  df: number;
  pValue: number;
  method: string;
  boundaryWarning: boolean;
}

/** Read the analysis engine's per-participant fit table. */
export function readFitCsv(path: string): Map<string, FitRow> {
  const { fields, rows } = parseTable(path);
  requireColumns(path, fields, [
    "participant_id",
    "beta_treatment",
    "se",
    "phi",
    "sigma2",
    "statistic",
    "df",
    "p_value",
    "method",
    "boundary_warning",
  ]);
  const fits = new Map<string, FitRow>();
  rows.forEach((row, index) => {
    const line = index + 2;
    const participantId = (row.participant_id ?? "").trim();
    if (!participantId) {
      throw new ParseError(`${path}: line ${line}: participant_id must not be empty`);
    }
    fits.set(participantId, {
      participantId,
      betaTreatment: parseFloatStrict(row.beta_treatment ?? "", path, line, "beta_treatment"),
      se: parseFloatStrict(row.se ?? "", path, line, "se"),
      phi: parseFloatStrict(row.phi ?? "", path, line, "phi"),
      sigma2: parseFloatStrict(row.sigma2 ?? "", path, line, "sigma2"),
      statistic: parseFloatStrict(row.statistic ?? "", path, line, "statistic"),
      df: parseFloatStrict(row.df ?? "", path, line, "df"),
      pValue: parseFloatStrict(row.p_value ?? "", path, line, "p_value"),
      method: (row.method ?? "").trim(),
      boundaryWarning: parseBoolStrict(row.boundary_warning ?? "", path, line, "boundary_warning"),
    });
  });
  return fits;
}

/** Serialize rows (string cells) under an explicit header via papaparse. */
export function writeTable(path: string, fields: string[], rows: string[][]): void {
  const text = Papa.unparse({ fields, data: rows }, { newline: "\n" });
  writeFileSync(path, text + "\n", "utf8");
}

/**
 * Copy an observations CSV keeping only one participant's rows.
 *
 * Column order and cell values are preserved verbatim, so the result is
 * still a valid engine input.
 */
export function filterObservationsCsv(
  inPath: string,
  outPath: string,
  participantId: string,
): number {
  const { fields, rows } = parseTable(inPath);
  requireColumns(inPath, fields, ["participant_id"]);
  const kept = rows.filter((row) => (row.participant_id ?? "").trim() === participantId);
  writeTable(
    outPath,
    fields,
    kept.map((row) => fields.map((f) => row[f] ?? "")),
  );
  return kept.length;
}
