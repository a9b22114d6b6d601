"""Exception types shared across the toolkit.

Every error raised by this package derives from :class:`Nof1Error` and its
class name doubles as a stable, machine-readable category (the CLI prints
``<category>: <message>`` on stderr). Errors raised deep inside a pipeline
carry extra location hints via :meth:`Nof1Error.add_context`.
"""

from __future__ import annotations


class Nof1Error(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message
        self._context: list[str] = []

    @property
    def category(self) -> str:
        return type(self).__name__

    def add_context(self, note: str) -> None:
        """Attach a location hint (stage, participant, file) to the error."""
        self._context.append(note)

    def __str__(self) -> str:
        if self._context:
            return f"{self.message} [{'; '.join(self._context)}]"
        return self.message


# --- trial design ---------------------------------------------------------

class InvalidCount(Nof1Error):
    """A schedule count (blocks, days, slots) is negative."""


class ZeroLengthBlock(Nof1Error):
    """Baseline and treatment days are both zero; blocks would be empty."""


class ParticipantMismatch(Nof1Error):
    """An observation names a different participant than the schedule."""


# --- rater scoring --------------------------------------------------------

class DegenerateRater(Nof1Error):
    """A rater gave the same score to every image; min-max scaling undefined."""


class EmptyMatrix(Nof1Error):
    """A rating matrix has no raters or no images."""


class EvenRaterTie(Nof1Error):
    """Binary votes split exactly in half; no majority label exists."""


class MissingScore(Nof1Error):
    """An observation references an image with no score."""


class OrderingConflict(Nof1Error):
    """Two observations occupy the same (day, slot) cell."""


class ScheduleViolation(Nof1Error):
    """The observation set does not match the trial schedule."""


# --- model fitting --------------------------------------------------------

class PhiOutOfRange(Nof1Error):
    """Autocorrelation parameter outside (-1, 1)."""


class RankDeficient(Nof1Error):
    """Design matrix is rank deficient or has too few rows."""


class NonFiniteInput(Nof1Error):
    """Inputs contain NaN or infinity."""


class DegenerateFit(Nof1Error):
    """Residual sum of squares is zero; the likelihood is unbounded."""


class IndexOutOfRange(Nof1Error):
    """Coefficient index outside the fitted coefficient vector."""


class SingleTreatmentLevel(Nof1Error):
    """All treatment flags identical; the contrast is not estimable."""


# --- file I/O -------------------------------------------------------------

class ParseError(Nof1Error):
    """A CSV cell failed strict parsing.

    Attributes:
        line: 1-based line number in the file (header = line 1).
        column: column name of the offending cell.
        reason: short description of the failure.
    """

    def __init__(self, line: int, column: str, reason: str):
        super().__init__(f"line {line}, column {column!r}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason


class SchemaError(Nof1Error):
    """File header or overall layout does not match the expected schema."""


class DuplicateKey(Nof1Error):
    """Two rows share a key that must be unique."""
