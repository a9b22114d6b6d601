/** Error taxonomy for the image-scorer pipeline. */

/** Base class for all errors raised by this package. */
export class ScorerError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** An observation references an image file that does not exist on disk. */
export class MissingImageFile extends ScorerError {}

/** The requested participant does not appear in the loaded study. */
export class ParticipantNotFound extends ScorerError {}

/** A train/validation split would leave one side empty. */
export class EmptySplit extends ScorerError {}

/** Training produced a non-finite loss value. */
export class NonFiniteLoss extends ScorerError {}

/** A file could not be parsed as the expected format. */
export class ParseError extends ScorerError {}

/** A table is missing required columns or contains an invalid value. */
export class SchemaError extends ScorerError {}

/** A configuration value is out of range or inconsistent. */
export class InvalidConfig extends ScorerError {}

/** Held-out images leaked into the training or validation set. */
export class LeakageError extends ScorerError {}
