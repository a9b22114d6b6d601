"""
Calibrating the test with label permutations
============================================

Does the AR(1) Wald test actually hold its nominal 5% false-positive rate
on data like yours? The permutation lab answers that empirically: shuffle
the treatment labels of a null series many times, re-run the full fit each
time, and count how often p < alpha. This demo runs the calibration, shows
the within-block shuffling variant, and demonstrates that reports are
bit-for-bit reproducible regardless of how many worker processes run them.
"""

# %%
# Build a null series -- genuine AR(1) noise, zero treatment effect -- on
# the canonical design.

import numpy as np

from nof1lab import (
    FOUR_BLOCK_DESIGN,
    PermutationConfig,
    estimate_type1,
    generate_schedule,
    series_from_schedule,
)

schedule = generate_schedule(FOUR_BLOCK_DESIGN, "null")
series = series_from_schedule(
    schedule, beta0=0.4, beta1=0.0, phi=0.4, sigma=0.1,
    rng=np.random.default_rng(21),
)

# %%
# 500 relabelings, each refit from scratch. A well-calibrated test should
# reject close to 5% of them.

config = PermutationConfig(master_seed=4, n_iterations=500)
report = estimate_type1(series, config, n_jobs=2)
print(f"type I error estimate: {report.type1_estimate:.3f} "
      f"({report.n_rejections}/{report.n_valid} rejections at alpha=0.05)")

# %%
# The permutation scheme is pluggable. Unrestricted shuffling permutes all
# 48 labels freely; within_block permutes only inside each 4-day block,
# preserving the design's block balance.

blocked = PermutationConfig(
    master_seed=4, n_iterations=500, scheme="within_block", block_days=4
)
report_blocked = estimate_type1(series, blocked, n_jobs=2)
print(f"within-block estimate: {report_blocked.type1_estimate:.3f}")

# %%
# Every iteration draws its random stream from the master seed by index,
# not from whatever worker happened to run it -- so the same config gives
# the same report whether it runs serially or on four processes.

serial = estimate_type1(series, config, n_jobs=1)
quad = estimate_type1(series, config, n_jobs=4)
print(f"serial == 2 workers == 4 workers: "
      f"{serial.p_values == report.p_values == quad.p_values}")

# %%
# The per-iteration p-values are available for your own diagnostics, e.g.
# a quick look at how uniform they are under the null.

p = np.asarray(report.p_values)
edges = np.linspace(0.0, 1.0, 6)
counts, _ = np.histogram(p, edges)
for lo, hi, c in zip(edges, edges[1:], counts):
    print(f"  p in [{lo:.1f}, {hi:.1f}): {'#' * (c // 5)} {c}")
