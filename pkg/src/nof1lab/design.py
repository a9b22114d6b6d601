"""Block crossover schedules for single-participant trials.

A trial runs in blocks; each block is a run of baseline days followed by a
run of treatment days (or the reverse). Every day expands into a fixed number
of observation slots. Days and slots are 1-based sequence indices; calendar
time lives only in observation timestamps, since the downstream model works
on sequence order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

from .errors import InvalidCount, ParticipantMismatch, ZeroLengthBlock

TREATMENT_LABELS = ("A", "B")


@dataclass(frozen=True)
class ScheduleConfig:
    """Parameters of a block crossover design.

    Attributes:
        n_blocks: number of baseline/treatment cycles.
        baseline_days_per_block: untreated days at the start of each block.
        treatment_days_per_block: treated days following them.
        slots_per_day: observations collected per day.
        treatment_label: product name attached to treated entries ("A" or "B").
        start_with_baseline: when False, treated days come first in each block.
    """

    n_blocks: int
    baseline_days_per_block: int
    treatment_days_per_block: int
    slots_per_day: int
    treatment_label: str = "A"
    start_with_baseline: bool = True

    def __post_init__(self) -> None:
        counts = {
            "n_blocks": self.n_blocks,
            "baseline_days_per_block": self.baseline_days_per_block,
            "treatment_days_per_block": self.treatment_days_per_block,
            "slots_per_day": self.slots_per_day,
        }
        for name, value in counts.items():
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidCount(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise InvalidCount(f"{name} must be >= 0, got {value}")
        if self.baseline_days_per_block + self.treatment_days_per_block == 0:
            raise ZeroLengthBlock("a block must contain at least one day")
        if self.treatment_label not in TREATMENT_LABELS:
            raise InvalidCount(
                f"treatment_label must be one of {TREATMENT_LABELS}, "
                f"got {self.treatment_label!r}"
            )

    @property
    def days_per_block(self) -> int:
        return self.baseline_days_per_block + self.treatment_days_per_block

    @property
    def n_days(self) -> int:
        return self.n_blocks * self.days_per_block


#: The published design: 4 blocks of 2 baseline then 2 treatment days,
#: 3 observations per day (16 days, 48 entries).
FOUR_BLOCK_DESIGN = ScheduleConfig(
    n_blocks=4,
    baseline_days_per_block=2,
    treatment_days_per_block=2,
    slots_per_day=3,
)


@dataclass(frozen=True)
class ScheduleEntry:
    """One planned observation cell."""

    day: int
    slot: int
    treatment: bool
    label: Optional[str] = None


@dataclass(frozen=True)
class TrialSchedule:
    """One participant's complete planned grid, ordered by (day, slot)."""

    participant_id: str
    entries: tuple[ScheduleEntry, ...]
    config: Optional[ScheduleConfig] = None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ScheduleEntry]:
        return iter(self.entries)

    @property
    def n_days(self) -> int:
        return max((e.day for e in self.entries), default=0)

    @property
    def treated_days(self) -> set[int]:
        return {e.day for e in self.entries if e.treatment}

    def cells(self) -> dict[tuple[int, int], ScheduleEntry]:
        """Entries keyed by (day, slot)."""
        return {(e.day, e.slot): e for e in self.entries}


@dataclass
class Observation:
    """One collected data point.

    The metadata fields mirror what was recorded alongside each image:
    ambient temperature, physical activity in the hour before, and whether
    lotion or makeup was applied. ``extra`` holds unknown file columns so
    round-trips preserve them; analysis ignores it.
    """

    participant_id: str
    day: int
    slot: int
    timestamp: str
    treatment: bool
    temperature: Optional[float] = None
    workout_level: Optional[int] = None
    lotion_or_makeup: Optional[bool] = None
    image_ref: Optional[str] = None
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Violation:
    """One schedule-conformance failure: which cell, which rule, and why."""

    ref: str
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def generate_schedule(config: ScheduleConfig, participant_id: str) -> TrialSchedule:
    """Expand a block design into the full (day, slot) grid.

    Within each block the first baseline_days_per_block days are untreated
    and the following treatment_days_per_block days are treated; the two runs
    swap when start_with_baseline is False. Deterministic: the design is
    strict alternation, never a randomized order.

    Args:
        config: validated design parameters.
        participant_id: id stamped on the schedule.

    Returns:
        TrialSchedule with n_blocks * days_per_block * slots_per_day entries.
    """
    entries: list[ScheduleEntry] = []
    day = 0
    for _ in range(config.n_blocks):
        for day_in_block in range(config.days_per_block):
            day += 1
            in_first_run = day_in_block < (
                config.baseline_days_per_block
                if config.start_with_baseline
                else config.treatment_days_per_block
            )
            treated = not in_first_run if config.start_with_baseline else in_first_run
            label = config.treatment_label if treated else None
            for slot in range(1, config.slots_per_day + 1):
                entries.append(ScheduleEntry(day, slot, treated, label))
    return TrialSchedule(participant_id, tuple(entries), config)


def validate_observations(
    schedule: TrialSchedule, observations: list[Observation]
) -> ValidationReport:
    """Check a collected dataset against its planned schedule.

    Rules reported:
        MissingCell: a planned (day, slot) has no observation.
        DuplicateCell: a planned (day, slot) has more than one.
        UnknownCell: an observation's (day, slot) is not in the schedule.
        FlagMismatch: an observation's treatment flag disagrees with the plan.

    Args:
        schedule: the planned grid.
        observations: collected rows, any order.

    Returns:
        ValidationReport; ok is True exactly when no rule fired.

    Raises:
        ParticipantMismatch: an observation names a different participant.
    """
    for obs in observations:
        if obs.participant_id != schedule.participant_id:
            raise ParticipantMismatch(
                f"observation at day={obs.day} slot={obs.slot} belongs to "
                f"{obs.participant_id!r}, schedule to {schedule.participant_id!r}"
            )

    planned = schedule.cells()
    seen: dict[tuple[int, int], int] = {}
    violations: list[Violation] = []

    for obs in observations:
        key = (obs.day, obs.slot)
        ref = f"day={obs.day},slot={obs.slot}"
        entry = planned.get(key)
        if entry is None:
            violations.append(
                Violation(ref, "UnknownCell", "no schedule entry for this cell")
            )
            continue
        seen[key] = seen.get(key, 0) + 1
        if seen[key] == 2:
            # report once per duplicated cell, not once per extra row
            violations.append(
                Violation(ref, "DuplicateCell", "more than one observation in cell")
            )
        if obs.treatment != entry.treatment:
            violations.append(
                Violation(
                    ref,
                    "FlagMismatch",
                    f"observation flag {obs.treatment}, schedule says {entry.treatment}",
                )
            )

    for key, entry in planned.items():
        if key not in seen:
            violations.append(
                Violation(
                    f"day={entry.day},slot={entry.slot}",
                    "MissingCell",
                    "no observation collected for this cell",
                )
            )

    violations.sort(key=lambda v: (v.rule, v.ref))
    return ValidationReport(tuple(violations))
