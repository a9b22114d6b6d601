"""Turn raw multi-rater severity scores into model-ready outcomes.

Two representations come out of this module: continuous per-image scores
(per-rater min-max scaling, then the across-rater mean) and binary consensus
labels (per-rater median thresholding, then a majority vote). Both paths are
pure transformations with no shared state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import Observation, TrialSchedule
from .errors import (
    DegenerateRater,
    EmptyMatrix,
    EvenRaterTie,
    MissingScore,
    OrderingConflict,
    ParticipantMismatch,
)


@dataclass(frozen=True)
class RatingMatrix:
    """Dense raters x images grid of severity scores in [0, 1]."""

    rater_ids: tuple[str, ...]
    image_ids: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=float)
        object.__setattr__(self, "scores", scores)
        if scores.shape != (len(self.rater_ids), len(self.image_ids)):
            raise EmptyMatrix(
                f"scores shape {scores.shape} does not match "
                f"{len(self.rater_ids)} raters x {len(self.image_ids)} images"
            )
        if len(set(self.rater_ids)) != len(self.rater_ids):
            raise EmptyMatrix("rater ids must be unique")
        if len(set(self.image_ids)) != len(self.image_ids):
            raise EmptyMatrix("image ids must be unique")
        if scores.size:
            if not np.all(np.isfinite(scores)):
                raise EmptyMatrix("scores must be finite (no missing cells)")
            if scores.min() < 0.0 or scores.max() > 1.0:
                raise EmptyMatrix("scores must lie in [0, 1]")

    @property
    def n_raters(self) -> int:
        return len(self.rater_ids)

    @property
    def n_images(self) -> int:
        return len(self.image_ids)


@dataclass(frozen=True)
class BinaryLabels:
    """One 0/1 consensus label per image."""

    image_ids: tuple[str, ...]
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.image_ids) != len(self.labels):
            raise EmptyMatrix("one label required per image")
        if any(lab not in (0, 1) for lab in self.labels):
            raise EmptyMatrix("labels must be 0 or 1")


@dataclass(frozen=True)
class OutcomeSeries:
    """One participant's time-ordered outcomes with aligned treatment flags.

    Points are stored as parallel arrays ordered strictly by (day, slot);
    the sequence index is the array position. The model downstream treats
    consecutive positions as equally spaced.
    """

    participant_id: str
    day: np.ndarray
    slot: np.ndarray
    treatment: np.ndarray
    outcome: np.ndarray

    def __post_init__(self) -> None:
        day = np.asarray(self.day, dtype=int)
        slot = np.asarray(self.slot, dtype=int)
        treatment = np.asarray(self.treatment, dtype=bool)
        outcome = np.asarray(self.outcome, dtype=float)
        n = day.shape[0]
        if not (slot.shape[0] == treatment.shape[0] == outcome.shape[0] == n):
            raise OrderingConflict("point arrays must have equal length")
        if n > 1:
            d_day = np.diff(day)
            d_slot = np.diff(slot)
            increasing = (d_day > 0) | ((d_day == 0) & (d_slot > 0))
            if not bool(np.all(increasing)):
                k = int(np.argmin(increasing)) + 1
                raise OrderingConflict(
                    f"points not strictly ordered by (day, slot) at index {k}: "
                    f"({day[k - 1]},{slot[k - 1]}) then ({day[k]},{slot[k]})"
                )
        for name, arr in (
            ("day", day),
            ("slot", slot),
            ("treatment", treatment),
            ("outcome", outcome),
        ):
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.day.shape[0])

    @property
    def sequence_index(self) -> np.ndarray:
        return np.arange(len(self))

    def with_treatment(self, flags: np.ndarray) -> "OutcomeSeries":
        """Copy of the series with replaced treatment flags."""
        return OutcomeSeries(
            self.participant_id,
            self.day.copy(),
            self.slot.copy(),
            np.asarray(flags, dtype=bool).copy(),
            self.outcome.copy(),
        )


def scale_ratings(ratings: RatingMatrix) -> RatingMatrix:
    """Min-max scale each rater's scores to span [0, 1].

    Args:
        ratings: raw grid; every rater must have max > min.

    Returns:
        New matrix with per-rater minimum 0 and maximum 1; within-rater
        ordering is preserved (the map is strictly increasing).

    Raises:
        DegenerateRater: a rater gave identical scores to every image.
        EmptyMatrix: no raters or no images.
    """
    if ratings.scores.size == 0:
        raise EmptyMatrix("cannot scale an empty rating matrix")
    lo = ratings.scores.min(axis=1)
    hi = ratings.scores.max(axis=1)
    span = hi - lo
    for r, width in enumerate(span):
        if width == 0.0:
            raise DegenerateRater(
                f"rater {ratings.rater_ids[r]!r} gave identical scores to all images"
            )
    scaled = (ratings.scores - lo[:, None]) / span[:, None]
    # guard against round-off pushing an endpoint to 1+eps
    np.clip(scaled, 0.0, 1.0, out=scaled)
    return RatingMatrix(ratings.rater_ids, ratings.image_ids, scaled)


def average_ratings(ratings: RatingMatrix) -> dict[str, float]:
    """Arithmetic mean across raters, per image.

    Returns:
        Mapping image_id -> mean score, in the matrix's image order.

    Raises:
        EmptyMatrix: no raters or no images.
    """
    if ratings.scores.size == 0:
        raise EmptyMatrix("cannot average an empty rating matrix")
    means = ratings.scores.mean(axis=0)
    return {img: float(m) for img, m in zip(ratings.image_ids, means)}


def binarize_ratings(ratings: RatingMatrix) -> BinaryLabels:
    """Median-threshold each rater, then majority-vote across raters.

    Per rater, scores at or below that rater's own median vote 0 and scores
    above it vote 1 (ties at the median count as absence). The per-image
    label is the majority of the votes. The result depends only on
    within-rater score order, so any strictly increasing per-rater transform
    of the inputs leaves it unchanged.

    Raises:
        EvenRaterTie: an even rater count split exactly in half on an image.
        EmptyMatrix: no raters or no images.
    """
    if ratings.scores.size == 0:
        raise EmptyMatrix("cannot binarize an empty rating matrix")
    medians = np.median(ratings.scores, axis=1)
    votes = ratings.scores > medians[:, None]
    ones = votes.sum(axis=0)
    half = ratings.n_raters / 2.0
    labels: list[int] = []
    for i, count in enumerate(ones):
        if count == half:
            raise EvenRaterTie(
                f"image {ratings.image_ids[i]!r}: votes split "
                f"{int(count)}-{int(count)} with an even rater count"
            )
        labels.append(1 if count > half else 0)
    return BinaryLabels(ratings.image_ids, tuple(labels))


def attach_scores(
    schedule: TrialSchedule,
    scores: dict[str, float],
    observations: list[Observation],
) -> OutcomeSeries:
    """Join per-image scores back onto collected observations.

    Args:
        schedule: the observations' planned grid (supplies the participant id).
        scores: mapping image_id -> outcome value.
        observations: collected rows; each must reference a scored image.

    Returns:
        OutcomeSeries ordered by (day, slot) with treatment flags copied
        from the observations and sequence indices densely renumbered.

    Raises:
        MissingScore: an observation's image has no score (or no image ref).
        OrderingConflict: two observations share a (day, slot) cell.
        ParticipantMismatch: an observation belongs to another participant.
    """
    for obs in observations:
        if obs.participant_id != schedule.participant_id:
            raise ParticipantMismatch(
                f"observation at day={obs.day} slot={obs.slot} belongs to "
                f"{obs.participant_id!r}, schedule to {schedule.participant_id!r}"
            )

    ordered = sorted(observations, key=lambda o: (o.day, o.slot))
    for prev, cur in zip(ordered, ordered[1:]):
        if (prev.day, prev.slot) == (cur.day, cur.slot):
            raise OrderingConflict(
                f"duplicate observations in cell day={cur.day},slot={cur.slot}"
            )

    outcomes: list[float] = []
    for obs in ordered:
        if obs.image_ref is None:
            raise MissingScore(
                f"observation day={obs.day},slot={obs.slot} has no image reference"
            )
        if obs.image_ref not in scores:
            raise MissingScore(f"no score for image {obs.image_ref!r}")
        outcomes.append(float(scores[obs.image_ref]))

    return OutcomeSeries(
        schedule.participant_id,
        np.array([o.day for o in ordered], dtype=int),
        np.array([o.slot for o in ordered], dtype=int),
        np.array([o.treatment for o in ordered], dtype=bool),
        np.array(outcomes, dtype=float),
    )
