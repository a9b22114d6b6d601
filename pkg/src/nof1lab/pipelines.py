"""End-to-end analysis pipelines over CSV inputs.

Two routes produce the same per-participant results table:

    manual: raw multi-rater severity scores are min-max scaled per rater,
        averaged per image, joined onto the observations, and fed to the
        AR(1) model (one fit and Wald test per participant).
    scores: a per-image score file (for example machine-predicted
        probabilities) is joined and analyzed directly.

Errors raised anywhere in a run are annotated with the pipeline stage and,
where it applies, the participant being processed, so a failure inside a
multi-file run still points at its source.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from . import io
from .ar1 import Ar1Fit, TestResult, analyze_participant
from .design import (
    Observation,
    ScheduleConfig,
    ScheduleEntry,
    TrialSchedule,
    generate_schedule,
    validate_observations,
)
from .errors import Nof1Error, ScheduleViolation
from .permutation import PermutationConfig
from .scoring import OutcomeSeries, attach_scores, average_ratings, scale_ratings

PathLike = Union[str, Path]

PIPELINES = ("manual", "scores")


@dataclass(frozen=True)
class RunConfig:
    """Inputs and settings for one pipeline run.

    Attributes:
        observations: observations CSV path.
        ratings: raw ratings CSV (manual pipeline) or None.
        scores: per-image scores CSV (scores pipeline) or None; exactly one
            of ratings/scores must be set, matching the pipeline.
        pipeline: "manual" or "scores".
        method: estimation criterion for the fitter.
        alpha: test level.
        design: when given, observations are validated against the schedule
            this config generates before analysis; when None, the observed
            grid is taken as planned.
        permutation: optional settings for a permutation study.
        output_dir: where CLI commands write their default-named files.
        column_map: optional observations-file column renaming.
    """

    observations: PathLike
    ratings: Optional[PathLike] = None
    scores: Optional[PathLike] = None
    pipeline: str = "manual"
    method: str = "REML"
    alpha: float = 0.05
    design: Optional[ScheduleConfig] = None
    permutation: Optional[PermutationConfig] = None
    output_dir: Optional[PathLike] = None
    column_map: Optional[dict[str, str]] = None

    def __post_init__(self) -> None:
        if self.pipeline not in PIPELINES:
            raise ValueError(f"pipeline must be one of {PIPELINES}")
        if (self.ratings is None) == (self.scores is None):
            raise ValueError("exactly one of ratings/scores must be provided")
        if self.pipeline == "manual" and self.ratings is None:
            raise ValueError("manual pipeline needs a ratings file")
        if self.pipeline == "scores" and self.scores is None:
            raise ValueError("scores pipeline needs a scores file")


@dataclass(frozen=True)
class ParticipantResult:
    """One participant's fitted model, test, and analyzed series."""

    participant_id: str
    series: OutcomeSeries
    fit: Ar1Fit
    test: TestResult

    def to_row(self) -> io.ResultRow:
        return io.ResultRow.from_fit(self.participant_id, self.fit, self.test)


def _participant_order(pid: str) -> tuple[int, int, str]:
    # numeric ids sort numerically, everything else lexicographically after
    return (0, int(pid), "") if pid.isdigit() else (1, 0, pid)


def _staged(exc: Nof1Error, stage: str, participant: Optional[str] = None) -> Nof1Error:
    exc.add_context(f"stage: {stage}")
    if participant is not None:
        exc.add_context(f"participant: {participant}")
    return exc


def _observed_schedule(pid: str, observations: list[Observation]) -> TrialSchedule:
    """Treat the collected grid itself as the plan (no design to check)."""
    entries = tuple(
        ScheduleEntry(o.day, o.slot, o.treatment)
        for o in sorted(observations, key=lambda o: (o.day, o.slot))
    )
    return TrialSchedule(pid, entries)


def build_series(
    observations: list[Observation],
    scores: dict[str, float],
    design: Optional[ScheduleConfig] = None,
) -> dict[str, OutcomeSeries]:
    """Group observations by participant and join scores onto each group.

    When a design is given, each participant's rows are validated against
    the schedule it generates; any violation aborts with ScheduleViolation.

    Returns:
        participant_id -> OutcomeSeries, ordered by participant.
    """
    groups: dict[str, list[Observation]] = {}
    for obs in observations:
        groups.setdefault(obs.participant_id, []).append(obs)

    series: dict[str, OutcomeSeries] = {}
    for pid in sorted(groups, key=_participant_order):
        rows = groups[pid]
        if design is not None:
            schedule = generate_schedule(design, pid)
            report = validate_observations(schedule, rows)
            if not report.ok:
                first = report.violations[0]
                raise _staged(
                    ScheduleViolation(
                        f"{len(report.violations)} violation(s); first: "
                        f"{first.rule} at {first.ref}: {first.message}"
                    ),
                    "validate observations",
                    pid,
                )
        else:
            schedule = _observed_schedule(pid, rows)
        try:
            series[pid] = attach_scores(schedule, scores, rows)
        except Nof1Error as exc:
            raise _staged(exc, "attach scores", pid) from None
    return series


def _load_scores_for(config: RunConfig) -> dict[str, float]:
    if config.pipeline == "manual":
        try:
            ratings = io.load_ratings(config.ratings)
        except Nof1Error as exc:
            raise _staged(exc, "load ratings") from None
        try:
            scaled = scale_ratings(ratings)
        except Nof1Error as exc:
            raise _staged(exc, "scale ratings") from None
        try:
            return average_ratings(scaled)
        except Nof1Error as exc:
            raise _staged(exc, "average ratings") from None
    try:
        return io.load_scores(config.scores)
    except Nof1Error as exc:
        raise _staged(exc, "load scores") from None


def load_outcome_series(config: RunConfig) -> dict[str, OutcomeSeries]:
    """Load the config's inputs into one OutcomeSeries per participant."""
    try:
        observations = io.load_observations(config.observations, config.column_map)
    except Nof1Error as exc:
        raise _staged(exc, "load observations") from None
    scores = _load_scores_for(config)
    return build_series(observations, scores, config.design)


def run_pipeline(config: RunConfig) -> list[ParticipantResult]:
    """Run the configured pipeline and return per-participant results."""
    series = load_outcome_series(config)

    results: list[ParticipantResult] = []
    for pid, s in series.items():
        try:
            fit, test = analyze_participant(s, method=config.method, alpha=config.alpha)
        except Nof1Error as exc:
            raise _staged(exc, "analyze participant", pid) from None
        results.append(ParticipantResult(pid, s, fit, test))
    return results


def run_manual_pipeline(config: RunConfig) -> list[ParticipantResult]:
    """Rater CSV route: scale per rater, average per image, fit per participant."""
    if config.pipeline != "manual":
        raise ValueError("config.pipeline must be 'manual'")
    return run_pipeline(config)


def run_scores_pipeline(config: RunConfig) -> list[ParticipantResult]:
    """Score CSV route: join precomputed per-image scores, fit per participant."""
    if config.pipeline != "scores":
        raise ValueError("config.pipeline must be 'scores'")
    return run_pipeline(config)
