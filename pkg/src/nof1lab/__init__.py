"""Toolkit for single-participant crossover trials with image-derived outcomes.

Capabilities, one module each:

    design       block crossover schedules and observation validation
    scoring      rater-score scaling, averaging, and consensus binarization
    ar1          AR(1)-errors regression with profiled-likelihood estimation
    permutation  empirical type-I-error calibration by label permutation
    simulate     synthetic AR(1) series for tests and calibration
    io           strict CSV loaders/writers and report rendering
    pipelines    file-to-results orchestration
    cli          `nof1lab` command-line entry point
"""

from .ar1 import (
    PHI_BOUND,
    Ar1Fit,
    TestResult,
    analyze_participant,
    ar1_whiten,
    fit_gls_ar1,
    profile_objective,
    wald_test,
)
from .design import (
    FOUR_BLOCK_DESIGN,
    Observation,
    ScheduleConfig,
    ScheduleEntry,
    TrialSchedule,
    ValidationReport,
    Violation,
    generate_schedule,
    validate_observations,
)
from .errors import Nof1Error
from .permutation import (
    PermutationConfig,
    PermutationReport,
    estimate_type1,
    permute_labels,
)
from .pipelines import (
    ParticipantResult,
    RunConfig,
    build_series,
    load_outcome_series,
    run_manual_pipeline,
    run_pipeline,
    run_scores_pipeline,
)
from .scoring import (
    BinaryLabels,
    OutcomeSeries,
    RatingMatrix,
    attach_scores,
    average_ratings,
    binarize_ratings,
    scale_ratings,
)
from .simulate import ar1_noise, series_from_schedule

__version__ = "0.1.0"

__all__ = [
    "PHI_BOUND",
    "FOUR_BLOCK_DESIGN",
    "Ar1Fit",
    "BinaryLabels",
    "Nof1Error",
    "Observation",
    "OutcomeSeries",
    "ParticipantResult",
    "PermutationConfig",
    "PermutationReport",
    "RatingMatrix",
    "RunConfig",
    "ScheduleConfig",
    "ScheduleEntry",
    "TestResult",
    "TrialSchedule",
    "ValidationReport",
    "Violation",
    "analyze_participant",
    "ar1_noise",
    "ar1_whiten",
    "attach_scores",
    "average_ratings",
    "binarize_ratings",
    "build_series",
    "estimate_type1",
    "fit_gls_ar1",
    "generate_schedule",
    "load_outcome_series",
    "permute_labels",
    "profile_objective",
    "run_manual_pipeline",
    "run_pipeline",
    "run_scores_pipeline",
    "scale_ratings",
    "series_from_schedule",
    "validate_observations",
    "wald_test",
]
