"""Synthetic data generators for testing and calibration runs."""

from __future__ import annotations

import math

import numpy as np

from .design import TrialSchedule
from .errors import PhiOutOfRange
from .scoring import OutcomeSeries


def ar1_noise(
    n: int, phi: float, sigma: float, rng: np.random.Generator
) -> np.ndarray:
    """Draw a stationary AR(1) series of length n.

    The first value is drawn from the stationary distribution (standard
    deviation sigma / sqrt(1 - phi^2)), so the series has no burn-in
    transient.

    Args:
        n: series length.
        phi: autoregression parameter, |phi| < 1.
        sigma: innovation standard deviation.
        rng: numpy Generator supplying the shocks.
    """
    if not abs(phi) < 1.0:
        raise PhiOutOfRange(f"|phi| must be < 1, got {phi}")
    z = rng.standard_normal(n)
    u = np.empty(n)
    if n == 0:
        return u
    u[0] = sigma / math.sqrt(1.0 - phi * phi) * z[0]
    for t in range(1, n):
        u[t] = phi * u[t - 1] + sigma * z[t]
    return u


def series_from_schedule(
    schedule: TrialSchedule,
    beta0: float,
    beta1: float,
    phi: float,
    sigma: float,
    rng: np.random.Generator,
) -> OutcomeSeries:
    """Simulate outcomes on a schedule: beta0 + beta1 * flag + AR(1) noise.

    Args:
        schedule: planned grid supplying (day, slot, treatment) per point.
        beta0: intercept. beta1: treatment effect (0 for null data).
        phi: error autocorrelation. sigma: innovation standard deviation.
        rng: numpy Generator.
    """
    entries = list(schedule)
    flags = np.array([e.treatment for e in entries], dtype=bool)
    noise = ar1_noise(len(entries), phi, sigma, rng)
    return OutcomeSeries(
        schedule.participant_id,
        np.array([e.day for e in entries], dtype=int),
        np.array([e.slot for e in entries], dtype=int),
        flags,
        beta0 + beta1 * flags.astype(float) + noise,
    )
