"""CSV interchange: loaders, writers, and report rendering.

All files are UTF-8, comma-separated, '.'-decimal CSV with a required header
row. Loaders parse strictly (every cell typed, every key checked); writers
emit floats with ``repr`` so a write/load round-trip reproduces values
exactly. Unknown extra columns in observation files are carried through
loading and writing untouched, but analysis never reads them.

File schemas:
    observations: participant_id, day, slot, timestamp, treatment,
        temperature, workout_level, lotion_or_makeup, image_ref, extras...
    ratings (long format): image_id, rater_id, score
    scores: image_id, score
    labels: image_id, label
    schedule: participant_id, day, slot, treatment, label
    fit results: participant_id, beta_treatment, se, phi, sigma2,
        statistic, df, p_value, method, boundary_warning
    report: participant, beta, se, phi, statistic, df, p_value
    permutation: '# n=... alpha=... rejections=... estimate=... seed=...
        scheme=... errors=...' summary line, then iteration, p_value rows
"""

from __future__ import annotations

import csv
import math
import warnings
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional, Sequence, TextIO, Union

import numpy as np

from .ar1 import Ar1Fit, TestResult
from .design import Observation, TrialSchedule
from .errors import DuplicateKey, ParseError, SchemaError
from .permutation import PermutationReport
from .scoring import BinaryLabels, RatingMatrix

PathLike = Union[str, Path]

OBSERVATION_COLUMNS = (
    "participant_id",
    "day",
    "slot",
    "timestamp",
    "treatment",
    "temperature",
    "workout_level",
    "lotion_or_makeup",
    "image_ref",
)
_REQUIRED_OBSERVATION_COLUMNS = OBSERVATION_COLUMNS[:5]

REPORT_COLUMNS = ("participant", "beta", "se", "phi", "statistic", "df", "p_value")

FIT_COLUMNS = (
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
)

_TRUE_WORDS = {"1", "true"}
_FALSE_WORDS = {"0", "false"}


def _fmt(x: float) -> str:
    # repr gives the shortest string that parses back to the same float
    return repr(float(x))


Writable = Union[PathLike, TextIO]


@contextmanager
def _writing(target: Writable) -> Iterator[TextIO]:
    """Yield a text handle for a path or pass an open handle through."""
    if hasattr(target, "write"):
        yield target  # type: ignore[misc]
    else:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _parse_bool(raw: str, line: int, column: str) -> bool:
    word = raw.strip().lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    raise ParseError(line, column, f"expected 0/1/true/false, got {raw!r}")


def _parse_int(raw: str, line: int, column: str, minimum: Optional[int] = None) -> int:
    try:
        value = int(raw.strip())
    except ValueError:
        raise ParseError(line, column, f"expected an integer, got {raw!r}") from None
    if minimum is not None and value < minimum:
        raise ParseError(line, column, f"must be >= {minimum}, got {value}")
    return value


def _parse_float(raw: str, line: int, column: str) -> float:
    try:
        return float(raw.strip())
    except ValueError:
        raise ParseError(line, column, f"expected a number, got {raw!r}") from None


def _parse_timestamp(raw: str, line: int, column: str) -> str:
    text = raw.strip()
    probe = text[:-1] + "+00:00" if text.endswith("Z") else text
    try:
        datetime.fromisoformat(probe)
    except ValueError:
        raise ParseError(
            line, column, f"expected an ISO-8601 timestamp, got {raw!r}"
        ) from None
    return text


def _read_rows(path: PathLike, required: Sequence[str]) -> tuple[list[str], list[dict[str, str]], list[int]]:
    """Read a CSV into header + row dicts + 1-based line numbers per row."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty, header row required") from None
        header = [h.strip() for h in header]
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: header is missing required columns {missing}, "
                f"found {header}"
            )
        if len(set(header)) != len(header):
            raise SchemaError(f"{path}: duplicate column names in header")
        rows: list[dict[str, str]] = []
        lines: list[int] = []
        for raw in reader:
            if not raw or all(not cell.strip() for cell in raw):
                continue
            if len(raw) != len(header):
                raise SchemaError(
                    f"{path}: line {reader.line_num} has {len(raw)} cells, "
                    f"header has {len(header)}"
                )
            rows.append(dict(zip(header, raw)))
            lines.append(reader.line_num)
    return header, rows, lines


def load_observations(
    path: PathLike, column_map: Optional[dict[str, str]] = None
) -> list[Observation]:
    """Load and strictly validate an observations file.

    Args:
        path: CSV with at least participant_id, day, slot, timestamp,
            treatment; the metadata columns are optional and may be empty.
        column_map: optional {canonical name: file column name} renaming, for
            files using a different naming convention.

    Returns:
        Observations in file order; unknown columns land in each row's
        ``extra`` dict.

    Raises:
        SchemaError: missing header columns.
        ParseError: any cell that fails strict typing (day or slot < 1,
            malformed timestamp, non-boolean flag, non-numeric metadata).
        DuplicateKey: repeated (participant_id, day, slot).
    """
    rename = dict(column_map or {})
    unknown = [c for c in rename if c not in OBSERVATION_COLUMNS]
    if unknown:
        raise SchemaError(f"column_map names unknown canonical columns {unknown}")
    actual = {c: rename.get(c, c) for c in OBSERVATION_COLUMNS}

    required = [actual[c] for c in _REQUIRED_OBSERVATION_COLUMNS]
    _, rows, lines = _read_rows(path, required)

    canonical_cells = set(actual.values())
    observations: list[Observation] = []
    seen: set[tuple[str, int, int]] = set()
    for row, line in zip(rows, lines):
        pid = row[actual["participant_id"]].strip()
        if not pid:
            raise ParseError(line, actual["participant_id"], "must not be empty")
        day = _parse_int(row[actual["day"]], line, actual["day"], minimum=1)
        slot = _parse_int(row[actual["slot"]], line, actual["slot"], minimum=1)
        timestamp = _parse_timestamp(row[actual["timestamp"]], line, actual["timestamp"])
        treatment = _parse_bool(row[actual["treatment"]], line, actual["treatment"])

        def optional(column: str) -> Optional[str]:
            raw = row.get(actual[column])
            if raw is None or not raw.strip():
                return None
            return raw

        temp_raw = optional("temperature")
        temperature = (
            _parse_float(temp_raw, line, actual["temperature"])
            if temp_raw is not None
            else None
        )
        workout_raw = optional("workout_level")
        workout = (
            _parse_int(workout_raw, line, actual["workout_level"])
            if workout_raw is not None
            else None
        )
        lotion_raw = optional("lotion_or_makeup")
        lotion = (
            _parse_bool(lotion_raw, line, actual["lotion_or_makeup"])
            if lotion_raw is not None
            else None
        )
        image_raw = optional("image_ref")
        image_ref = image_raw.strip() if image_raw is not None else None

        key = (pid, day, slot)
        if key in seen:
            raise DuplicateKey(
                f"line {line}: duplicate observation for participant {pid!r}, "
                f"day {day}, slot {slot}"
            )
        seen.add(key)
        extra = {c: v for c, v in row.items() if c not in canonical_cells}
        observations.append(
            Observation(
                participant_id=pid,
                day=day,
                slot=slot,
                timestamp=timestamp,
                treatment=treatment,
                temperature=temperature,
                workout_level=workout,
                lotion_or_makeup=lotion,
                image_ref=image_ref,
                extra=extra,
            )
        )
    return observations


def write_observations(path: Writable, observations: Sequence[Observation]) -> None:
    """Write observations with canonical columns plus any extra columns.

    Extra column order is the sorted union of extra keys across rows; rows
    missing an extra key get an empty cell.
    """
    extra_cols = sorted({k for obs in observations for k in obs.extra})
    header = list(OBSERVATION_COLUMNS) + extra_cols
    with _writing(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for obs in observations:
            row = [
                obs.participant_id,
                str(obs.day),
                str(obs.slot),
                obs.timestamp,
                "1" if obs.treatment else "0",
                "" if obs.temperature is None else _fmt(obs.temperature),
                "" if obs.workout_level is None else str(obs.workout_level),
                ""
                if obs.lotion_or_makeup is None
                else ("1" if obs.lotion_or_makeup else "0"),
                "" if obs.image_ref is None else obs.image_ref,
            ]
            row.extend(obs.extra.get(c, "") for c in extra_cols)
            writer.writerow(row)


def load_ratings(path: PathLike) -> RatingMatrix:
    """Load a long-format ratings file into a dense raters x images grid.

    Every (rater, image) pair must appear exactly once; scores must lie in
    [0, 1]. Rater and image order follow first appearance in the file.

    Raises:
        SchemaError: header mismatch or an incomplete grid.
        ParseError: malformed or out-of-range score.
        DuplicateKey: repeated (image_id, rater_id) pair.
    """
    _, rows, lines = _read_rows(path, ("image_id", "rater_id", "score"))
    raters: list[str] = []
    images: list[str] = []
    cells: dict[tuple[str, str], float] = {}
    for row, line in zip(rows, lines):
        image = row["image_id"].strip()
        rater = row["rater_id"].strip()
        if not image:
            raise ParseError(line, "image_id", "must not be empty")
        if not rater:
            raise ParseError(line, "rater_id", "must not be empty")
        score = _parse_float(row["score"], line, "score")
        if not 0.0 <= score <= 1.0:
            raise ParseError(line, "score", f"must lie in [0, 1], got {score}")
        if (rater, image) in cells:
            raise DuplicateKey(
                f"line {line}: duplicate rating for image {image!r} by {rater!r}"
            )
        if rater not in raters:
            raters.append(rater)
        if image not in images:
            images.append(image)
        cells[(rater, image)] = score

    if not cells:
        raise SchemaError(f"{path}: no rating rows found")
    missing = [
        (r, i) for r in raters for i in images if (r, i) not in cells
    ]
    if missing:
        r, i = missing[0]
        raise SchemaError(
            f"{path}: incomplete grid, {len(missing)} missing cells "
            f"(first: rater {r!r} x image {i!r})"
        )
    scores = np.array([[cells[(r, i)] for i in images] for r in raters])
    return RatingMatrix(tuple(raters), tuple(images), scores)


def write_ratings(path: Writable, ratings: RatingMatrix) -> None:
    """Write a rating matrix in long format (image_id, rater_id, score)."""
    with _writing(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(("image_id", "rater_id", "score"))
        for r, rater in enumerate(ratings.rater_ids):
            for i, image in enumerate(ratings.image_ids):
                writer.writerow((image, rater, _fmt(ratings.scores[r, i])))


def load_scores(path: PathLike) -> dict[str, float]:
    """Load per-image scores.

    Scores outside [0, 1] trigger a warning but load anyway; the model
    downstream is scale-free, so out-of-range scores are suspicious rather
    than fatal.

    Raises:
        ParseError: non-numeric score or empty image id.
        DuplicateKey: repeated image id.
    """
    _, rows, lines = _read_rows(path, ("image_id", "score"))
    scores: dict[str, float] = {}
    out_of_range = 0
    for row, line in zip(rows, lines):
        image = row["image_id"].strip()
        if not image:
            raise ParseError(line, "image_id", "must not be empty")
        value = _parse_float(row["score"], line, "score")
        if image in scores:
            raise DuplicateKey(f"line {line}: duplicate score for image {image!r}")
        if not math.isnan(value) and not 0.0 <= value <= 1.0:
            out_of_range += 1
        scores[image] = value
    if out_of_range:
        warnings.warn(
            f"{path}: {out_of_range} score(s) outside [0, 1]; analysis proceeds",
            stacklevel=2,
        )
    return scores


def write_scores(path: Writable, scores: dict[str, float]) -> None:
    with _writing(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(("image_id", "score"))
        for image, value in scores.items():
            writer.writerow((image, _fmt(value)))


def write_labels(path: Writable, labels: BinaryLabels) -> None:
    with _writing(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(("image_id", "label"))
        for image, label in zip(labels.image_ids, labels.labels):
            writer.writerow((image, str(label)))


def write_schedule_csv(path: Writable, schedule: TrialSchedule) -> None:
    """Write a schedule: participant_id, day, slot, treatment (0/1), label."""
    with _writing(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(("participant_id", "day", "slot", "treatment", "label"))
        for e in schedule:
            writer.writerow(
                (
                    schedule.participant_id,
                    str(e.day),
                    str(e.slot),
                    "1" if e.treatment else "0",
                    e.label or "",
                )
            )


@dataclass(frozen=True)
class ResultRow:
    """One participant's line in an analysis report."""

    participant: str
    beta: float
    se: float
    phi: float
    statistic: float
    df: int
    p_value: float

    @classmethod
    def from_fit(cls, participant: str, fit: Ar1Fit, test: TestResult) -> "ResultRow":
        return cls(
            participant=participant,
            beta=float(test.estimate),
            se=float(fit.se[1]) if fit.p > 1 else float(fit.se[0]),
            phi=float(fit.phi),
            statistic=float(test.statistic),
            df=int(test.df),
            p_value=float(test.p_value),
        )


def emit_report(
    rows: Sequence[ResultRow],
    path: Writable,
    format: str = "csv",
) -> None:
    """Render analysis results as CSV or a markdown table.

    Column order is fixed: participant, beta, se, phi, statistic, df,
    p_value. Empty results produce a header-only file.
    """
    if format not in ("csv", "markdown"):
        raise ValueError(f"format must be 'csv' or 'markdown', got {format!r}")
    with _writing(path) as fh:
        if format == "csv":
            writer = csv.writer(fh)
            writer.writerow(REPORT_COLUMNS)
            for r in rows:
                writer.writerow(
                    (
                        r.participant,
                        _fmt(r.beta),
                        _fmt(r.se),
                        _fmt(r.phi),
                        _fmt(r.statistic),
                        str(r.df),
                        _fmt(r.p_value),
                    )
                )
        else:
            fh.write("| " + " | ".join(REPORT_COLUMNS) + " |\n")
            fh.write("|" + "|".join(" --- " for _ in REPORT_COLUMNS) + "|\n")
            for r in rows:
                cells = (
                    r.participant,
                    f"{r.beta:.4f}",
                    f"{r.se:.4f}",
                    f"{r.phi:.4f}",
                    f"{r.statistic:.4f}",
                    str(r.df),
                    f"{r.p_value:.4g}",
                )
                fh.write("| " + " | ".join(cells) + " |\n")


def read_report_csv(path: PathLike) -> list[ResultRow]:
    """Load a CSV report written by emit_report (round-trip exact)."""
    _, rows, lines = _read_rows(path, REPORT_COLUMNS)
    result = []
    for row, line in zip(rows, lines):
        result.append(
            ResultRow(
                participant=row["participant"].strip(),
                beta=_parse_float(row["beta"], line, "beta"),
                se=_parse_float(row["se"], line, "se"),
                phi=_parse_float(row["phi"], line, "phi"),
                statistic=_parse_float(row["statistic"], line, "statistic"),
                df=_parse_int(row["df"], line, "df"),
                p_value=_parse_float(row["p_value"], line, "p_value"),
            )
        )
    return result


def write_fit_csv(
    path: Writable, results: Sequence[tuple[str, Ar1Fit, TestResult]]
) -> None:
    """Serialize fits: one row per participant, full parameter detail."""
    with _writing(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(FIT_COLUMNS)
        for participant, fit, test in results:
            treat_idx = 1 if fit.p > 1 else 0
            writer.writerow(
                (
                    participant,
                    _fmt(fit.beta[treat_idx]),
                    _fmt(fit.se[treat_idx]),
                    _fmt(fit.phi),
                    _fmt(fit.sigma2),
                    _fmt(test.statistic),
                    str(test.df),
                    _fmt(test.p_value),
                    fit.method,
                    "1" if fit.boundary_warning else "0",
                )
            )


def write_permutation_csv(path: Writable, report: PermutationReport) -> None:
    """Write per-iteration p-values behind a '#' summary line.

    The summary records n, alpha, rejections, estimate, seed, scheme, and
    the failed-iteration count, so the file is self-describing.
    """
    cfg = report.config
    with _writing(path) as fh:
        fh.write(
            f"# n={cfg.n_iterations} alpha={_fmt(cfg.alpha)} "
            f"rejections={report.n_rejections} "
            f"estimate={_fmt(report.type1_estimate)} "
            f"seed={cfg.master_seed} scheme={cfg.scheme} "
            f"errors={len(report.errors)}\n"
        )
        writer = csv.writer(fh)
        writer.writerow(("iteration", "p_value"))
        for k, p in enumerate(report.p_values):
            writer.writerow((str(k), _fmt(p)))
