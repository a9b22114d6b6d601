"""
Designing and validating a crossover schedule
=============================================

A single-participant crossover trial alternates baseline and treatment
periods in blocks, with several observations per day. This demo builds the
canonical design (4 blocks x [2 baseline days + 2 treated days] x 3 photo
slots), inspects it, tweaks the block structure, and then checks a set of
collected observations against the plan.
"""

# %%
# The canonical design ships as a constant. A schedule is an explicit list
# of (day, slot) cells, each carrying its treatment flag.

from nof1lab import FOUR_BLOCK_DESIGN, generate_schedule

schedule = generate_schedule(FOUR_BLOCK_DESIGN, participant_id="demo")
print(f"{len(schedule)} entries over {schedule.n_days} days")
print(f"treated days: {sorted(schedule.treated_days)}")

# %%
# The first two days are baseline, days 3-4 are treated, and the pattern
# repeats every four days.

for entry in list(schedule)[:9]:
    state = f"treatment {entry.label}" if entry.treatment else "baseline"
    print(f"day {entry.day:2d} slot {entry.slot}: {state}")

# %%
# Any block structure works: here each block is one baseline day followed by
# one treated day, labeled B, with a single daily observation.

from nof1lab import ScheduleConfig

compact = ScheduleConfig(
    n_blocks=3,
    baseline_days_per_block=1,
    treatment_days_per_block=1,
    slots_per_day=1,
    treatment_label="B",
)
flags = [entry.treatment for entry in generate_schedule(compact, "demo")]
print(f"compact design treatment flags: {flags}")

# %%
# Collected observations are validated cell by cell against the plan:
# missing cells, duplicates, unknown cells, and treatment-flag mismatches
# are each reported with a pointer to the offending (day, slot).

from nof1lab import Observation, validate_observations

observations = [
    Observation("demo", e.day, e.slot, f"2026-03-{e.day:02d}T09:00:00", e.treatment)
    for e in schedule
]
print(f"clean copy of the plan: ok={validate_observations(schedule, observations).ok}")

observations[5].treatment = not observations[5].treatment  # wrong flag
del observations[10]                                       # missing cell
report = validate_observations(schedule, observations)
print(f"after corrupting two rows: ok={report.ok}")
for violation in report.violations:
    print(f"  {violation.rule} at {violation.ref}: {violation.message}")
