"""Schedule generation and observation validation."""

import pytest

from nof1lab.design import (
    FOUR_BLOCK_DESIGN,
    Observation,
    ScheduleConfig,
    TrialSchedule,
    generate_schedule,
    validate_observations,
)
from nof1lab.errors import InvalidCount, ParticipantMismatch, ZeroLengthBlock


def observations_from(schedule: TrialSchedule) -> list[Observation]:
    return [
        Observation(
            participant_id=schedule.participant_id,
            day=e.day,
            slot=e.slot,
            timestamp=f"2021-06-{e.day:02d}T0{e.slot + 6}:00:00",
            treatment=e.treatment,
        )
        for e in schedule
    ]


def test_published_design_golden():
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, "1")
    assert len(schedule) == 48
    assert schedule.treated_days == {3, 4, 7, 8, 11, 12, 15, 16}
    assert schedule.n_days == 16
    # strictly ordered by (day, slot), slots 1..3 per day
    keys = [(e.day, e.slot) for e in schedule]
    assert keys == sorted(keys)
    assert keys == [(d, s) for d in range(1, 17) for s in (1, 2, 3)]
    # labels ride along on treated entries only
    assert all((e.label == "A") == e.treatment for e in schedule)


def test_zero_blocks_gives_empty_schedule():
    config = ScheduleConfig(0, 2, 2, 3)
    assert len(generate_schedule(config, "x")) == 0


def test_minimal_alternation():
    config = ScheduleConfig(2, 1, 1, 1)
    flags = [e.treatment for e in generate_schedule(config, "x")]
    assert flags == [False, True, False, True]


def test_treatment_first_flips_runs():
    config = ScheduleConfig(2, 1, 1, 1, start_with_baseline=False)
    flags = [e.treatment for e in generate_schedule(config, "x")]
    assert flags == [True, False, True, False]


def test_uneven_runs():
    config = ScheduleConfig(2, 3, 1, 2, treatment_label="B")
    schedule = generate_schedule(config, "x")
    assert schedule.treated_days == {4, 8}
    assert len(schedule) == 2 * 4 * 2
    assert {e.label for e in schedule if e.treatment} == {"B"}


def test_treated_count_formula_exhaustive():
    # treated entries = blocks * treatment days * slots, for all small counts
    for blocks in range(7):
        for baseline in range(7):
            for treat in range(7):
                if baseline + treat == 0:
                    continue
                for slots in range(7):
                    config = ScheduleConfig(blocks, baseline, treat, slots)
                    schedule = generate_schedule(config, "x")
                    n_treated = sum(e.treatment for e in schedule)
                    assert n_treated == blocks * treat * slots
                    assert len(schedule) == blocks * (baseline + treat) * slots


def test_generation_is_deterministic():
    a = generate_schedule(FOUR_BLOCK_DESIGN, "p")
    b = generate_schedule(FOUR_BLOCK_DESIGN, "p")
    assert a == b


def test_invalid_counts_rejected():
    with pytest.raises(InvalidCount):
        ScheduleConfig(-1, 2, 2, 3)
    with pytest.raises(InvalidCount):
        ScheduleConfig(4, 2, 2, -3)
    with pytest.raises(ZeroLengthBlock):
        ScheduleConfig(4, 0, 0, 3)
    with pytest.raises(InvalidCount):
        ScheduleConfig(4, 2, 2, 3, treatment_label="C")


def test_validate_complete_set_ok():
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, "1")
    report = validate_observations(schedule, observations_from(schedule))
    assert report.ok
    assert report.violations == ()


def test_validate_missing_cell():
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, "1")
    rows = observations_from(schedule)
    removed = rows.pop(10)
    report = validate_observations(schedule, rows)
    assert not report.ok
    assert len(report.violations) == 1
    v = report.violations[0]
    assert v.rule == "MissingCell"
    assert v.ref == f"day={removed.day},slot={removed.slot}"


def test_validate_flag_mismatch():
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, "1")
    rows = observations_from(schedule)
    rows[7].treatment = not rows[7].treatment
    report = validate_observations(schedule, rows)
    assert [v.rule for v in report.violations] == ["FlagMismatch"]


def test_validate_duplicate_cell_reported_once():
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, "1")
    rows = observations_from(schedule)
    rows.append(rows[0])
    rows.append(rows[0])
    report = validate_observations(schedule, rows)
    assert [v.rule for v in report.violations] == ["DuplicateCell"]


def test_validate_unknown_cell():
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, "1")
    rows = observations_from(schedule)
    rows.append(
        Observation("1", day=99, slot=1, timestamp="2021-06-01T07:00:00", treatment=False)
    )
    report = validate_observations(schedule, rows)
    assert [v.rule for v in report.violations] == ["UnknownCell"]


def test_validate_rejects_foreign_participant():
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, "1")
    rows = observations_from(schedule)
    rows[0].participant_id = "2"
    with pytest.raises(ParticipantMismatch):
        validate_observations(schedule, rows)
