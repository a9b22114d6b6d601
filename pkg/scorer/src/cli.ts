#!/usr/bin/env node
/** Command-line interface for the image scorer.
 *
 * Subcommands:
 *   generate     write a synthetic study (images + observations + ratings)
 *   score        train on a study and score the held-out participant's images
 *   sensitivity  half-split analysis: augment one half, score the other
 *
 * Every subcommand requires --seed; given the same inputs and seed, outputs
 * are bit-identical. Scores are written in the analysis engine's table
 * format, ready for its per-participant fit step.
 */

import { pathToFileURL } from "node:url";

import yargs from "yargs";
import type { Argv } from "yargs";
import { hideBin } from "yargs/helpers";

import { makeConfig, type ConfigOverrides } from "./config.js";
import { buildDataset, loadStudy } from "./dataset.js";
import { ScorerError } from "./errors.js";
import { trainScorer } from "./model.js";
import { exportScores, predictScores } from "./predict.js";
import { halfSplitSensitivity } from "./sensitivity.js";
import { generateSyntheticStudy } from "./synthetic.js";

interface StudyArgs {
  observations: string;
  labels: string;
  images: string;
  out: string;
  seed: number;
  testParticipant: string;
  augmented: boolean;
  copies: number | undefined;
  inputSize: number | undefined;
  epochs: number | undefined;
  batchSize: number | undefined;
  learningRate: number | undefined;
  trainFraction: number | undefined;
  patience: number | undefined;
  freezeEpochs: number | undefined;
}

function configFrom(args: StudyArgs): ReturnType<typeof makeConfig> {
  const overrides: ConfigOverrides = {
    seed: args.seed,
    testParticipant: args.testParticipant,
    includeTestParticipantAugmented: args.augmented,
  };
  if (args.copies !== undefined) overrides.augmentedCopies = args.copies;
  if (args.inputSize !== undefined) overrides.inputSize = args.inputSize;
  if (args.epochs !== undefined) overrides.maxEpochs = args.epochs;
  if (args.batchSize !== undefined) overrides.batchSize = args.batchSize;
  if (args.learningRate !== undefined) overrides.learningRate = args.learningRate;
  if (args.trainFraction !== undefined) overrides.trainFraction = args.trainFraction;
  if (args.patience !== undefined) overrides.patience = args.patience;
  if (args.freezeEpochs !== undefined) overrides.freezeEpochs = args.freezeEpochs;
  return makeConfig(overrides);
}

function addStudyOptions(cmd: Argv): Argv {
  return cmd
    .option("observations", { type: "string", demandOption: true, describe: "observations CSV" })
    .option("labels", { type: "string", demandOption: true, describe: "binary labels CSV" })
    .option("images", { type: "string", demandOption: true, describe: "image directory" })
    .option("out", { type: "string", demandOption: true, describe: "output scores CSV" })
    .option("seed", { type: "number", demandOption: true, describe: "master random seed" })
    .option("test-participant", {
      type: "string",
      demandOption: true,
      describe: "participant whose images are held out and scored",
    })
    .option("augmented", {
      type: "boolean",
      default: false,
      describe: "add augmented-only copies of the held-out participant's images to training",
    })
    .option("copies", { type: "number", describe: "augmented copies per source image" })
    .option("input-size", { type: "number", describe: "network input side in pixels" })
    .option("epochs", { type: "number", describe: "maximum training epochs" })
    .option("batch-size", { type: "number", describe: "minibatch size" })
    .option("learning-rate", { type: "number", describe: "Adam learning rate" })
    .option("train-fraction", { type: "number", describe: "train share of non-test images" })
    .option("patience", { type: "number", describe: "early-stopping patience in epochs" })
    .option("freeze-epochs", {
      type: "number",
      describe: "epochs to keep the backbone frozen before fine-tuning (>= epochs: always frozen)",
    });
}

async function runScore(args: StudyArgs): Promise<void> {
  const config = configFrom(args);
  const study = loadStudy(args.observations, args.labels, args.images, config.inputSize);
  const splits = buildDataset(study, config);
  const scorer = await trainScorer(splits, config);
  const scored = predictScores(scorer, splits.test);
  scorer.model.dispose();
  exportScores(args.out, scored);
  const h = scorer.history;
  console.log(
    `trained ${h.trainLoss.length} epoch(s), best epoch ${h.bestEpoch + 1}, ` +
      `val loss ${h.valLoss[h.bestEpoch].toFixed(4)}`,
  );
  console.log(`wrote ${scored.length} score(s) to ${args.out}`);
}

async function runSensitivity(args: StudyArgs & { blockLength: number }): Promise<void> {
  const config = configFrom(args);
  const study = loadStudy(args.observations, args.labels, args.images, config.inputSize);
  const result = await halfSplitSensitivity(study, config, args.blockLength);
  exportScores(args.out, result.scores);
  console.log(
    `augmented half: ${result.augmentedHalf.length} image(s); ` +
      `scored held-out half: ${result.heldOutHalf.length} image(s)`,
  );
  console.log(`wrote ${result.scores.length} score(s) to ${args.out}`);
}

/** Run the CLI; returns the process exit code. */
export async function runCli(argv: string[]): Promise<number> {
  let exitCode = 0;
  const parser = yargs(argv)
    .scriptName("nof1-scorer")
    .strict()
    .demandCommand(1, "specify a subcommand")
    .fail((msg, err) => {
      if (err) throw err;
      console.error(msg);
      process.exitCode = 2;
      throw new CliUsage(msg);
    })
    .command(
      "generate",
      "write a synthetic study (images, observations, ratings)",
      (cmd) =>
        cmd
          .option("out", { type: "string", demandOption: true, describe: "study directory" })
          .option("seed", { type: "number", demandOption: true, describe: "master random seed" })
          .option("image-size", { type: "number", default: 32, describe: "image side in pixels" }),
      (args) => {
        const summary = generateSyntheticStudy({
          outDir: args.out,
          seed: args.seed,
          imageSize: args.imageSize,
        });
        console.log(
          `wrote ${summary.imageCount} images for ${summary.participants.length} ` +
            `participant(s) under ${args.out}`,
        );
        console.log(`observations: ${summary.observationsPath}`);
        console.log(`ratings: ${summary.ratingsPath}`);
      },
    )
    .command(
      "score",
      "train the scorer and score the held-out participant's images",
      (cmd) => addStudyOptions(cmd),
      async (args) => runScore(args as unknown as StudyArgs),
    )
    .command(
      "sensitivity",
      "augment half the held-out participant's days, score the other half",
      (cmd) =>
        addStudyOptions(cmd).option("block-length", {
          type: "number",
          default: 4,
          describe: "days per alternating block",
        }),
      async (args) => runSensitivity(args as unknown as StudyArgs & { blockLength: number }),
    )
    .help();

  try {
    await parser.parseAsync();
  } catch (err) {
    if (err instanceof CliUsage) {
      return 2;
    }
    if (err instanceof ScorerError) {
      console.error(`${err.name}: ${err.message}`);
      return 2;
    }
    throw err;
  }
  return exitCode;
}

class CliUsage extends Error {}

const isDirectRun =
  typeof process.argv[1] === "string" &&
  import.meta.url === pathToFileURL(process.argv[1]).href;

if (isDirectRun) {
  runCli(hideBin(process.argv))
    .then((code) => {
      process.exitCode = code;
    })
    .catch((err) => {
      console.error(err);
      process.exitCode = 1;
    });
}
