"""Empirical type-I-error estimation by treatment-label permutation.

The full per-participant test (AR(1) fit plus Wald test) is re-run on many
label-permuted copies of a series; the fraction of p-values below alpha
estimates the procedure's actual size. Outcomes are never touched, only the
treatment flags move, matching a protocol where scores are fixed inputs.

Every iteration draws its random stream independently from
(master_seed, iteration index), so reports are bit-identical no matter how
many workers run the iterations or in what order they finish.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .ar1 import analyze_participant
from .errors import Nof1Error
from .scoring import OutcomeSeries

SCHEMES = ("unrestricted", "within_block")


@dataclass(frozen=True)
class PermutationConfig:
    """Settings for one permutation study.

    Attributes:
        master_seed: root seed; per-iteration streams are spawned from it.
        n_iterations: number of permuted refits (default 1000).
        alpha: rejection threshold (default 0.05).
        scheme: "unrestricted" permutes all flags as one pool;
            "within_block" permutes flags only inside each block of
            block_days consecutive days, preserving the design's block
            structure.
        block_days: days per block for the within_block scheme.
    """

    master_seed: int
    n_iterations: int = 1000
    alpha: float = 0.05
    scheme: str = "unrestricted"
    block_days: int = 4

    def __post_init__(self) -> None:
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.block_days < 1:
            raise ValueError("block_days must be >= 1")


@dataclass(frozen=True)
class PermutationReport:
    """Per-iteration p-values plus the rejection-rate summary.

    p_values holds one entry per iteration, NaN where that iteration's fit
    failed; failed iterations are listed in errors as (iteration, category)
    and excluded from the denominator of type1_estimate.
    """

    p_values: tuple[float, ...]
    errors: tuple[tuple[int, str], ...]
    config: PermutationConfig

    @property
    def n_valid(self) -> int:
        return len(self.p_values) - len(self.errors)

    @property
    def n_rejections(self) -> int:
        return sum(
            1 for p in self.p_values if not math.isnan(p) and p < self.config.alpha
        )

    @property
    def type1_estimate(self) -> float:
        if self.n_valid == 0:
            return math.nan
        return self.n_rejections / self.n_valid


def permute_labels(
    series: OutcomeSeries,
    scheme: str,
    rng: np.random.Generator,
    block_days: int = 4,
) -> OutcomeSeries:
    """Return a copy of the series with permuted treatment flags.

    unrestricted: the whole flag vector is shuffled uniformly at random.
    within_block: flags are shuffled independently inside each run of
    block_days consecutive days (days 1..block_days form block 0, and so
    on), so each block keeps its own treated/untreated counts.

    Outcomes, days, and slots are untouched. An empty series is returned
    unchanged. The flag multiset is always conserved.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    n = len(series)
    if n == 0:
        return series
    flags = series.treatment.copy()
    if scheme == "unrestricted":
        flags = flags[rng.permutation(n)]
    else:
        block = (series.day - 1) // block_days
        for b in np.unique(block):
            idx = np.flatnonzero(block == b)
            flags[idx] = flags[idx[rng.permutation(idx.size)]]
    return series.with_treatment(flags)


def _iteration_rng(master_seed: int, k: int) -> np.random.Generator:
    # spawn_key isolation keeps streams independent across iterations and
    # identical regardless of execution order
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(k,)))


def _run_iteration(
    series: OutcomeSeries,
    scheme: str,
    block_days: int,
    master_seed: int,
    method: str,
    alpha: float,
    k: int,
) -> tuple[int, float, str | None]:
    rng = _iteration_rng(master_seed, k)
    permuted = permute_labels(series, scheme, rng, block_days)
    try:
        _, test = analyze_participant(permuted, method=method, alpha=alpha)
    except Nof1Error as exc:
        return k, math.nan, exc.category
    return k, test.p_value, None


def estimate_type1(
    series: OutcomeSeries,
    config: PermutationConfig,
    method: str = "REML",
    n_jobs: int = 1,
) -> PermutationReport:
    """Re-fit the test on permuted labels and report the rejection rate.

    Iteration k permutes the labels with a stream derived from
    (master_seed, k) and runs the full analysis on the permuted series.
    Iterations that fail to fit are recorded with their error category and
    skipped in the rejection-rate denominator; they never abort the run.

    Args:
        series: outcome series with both treatment levels present.
        config: seed, iteration count, alpha, and permutation scheme.
        method: estimation criterion passed to the fitter.
        n_jobs: worker processes; 1 runs serially. The report is
            bit-identical for any value.

    Returns:
        PermutationReport with one p-value slot per iteration.
    """
    run = partial(
        _run_iteration,
        series,
        config.scheme,
        config.block_days,
        config.master_seed,
        method,
        config.alpha,
    )
    indices = range(config.n_iterations)
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            chunk = max(1, config.n_iterations // (n_jobs * 4))
            outcomes = list(pool.map(run, indices, chunksize=chunk))
    else:
        outcomes = [run(k) for k in indices]

    outcomes.sort(key=lambda item: item[0])  # assembly by index, not completion
    p_values = tuple(p for _, p, _ in outcomes)
    errors = tuple((k, cat) for k, _, cat in outcomes if cat is not None)
    return PermutationReport(p_values, errors, config)
