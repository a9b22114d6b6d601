"""
Build a synthetic five-participant study on disk
================================================

Writes ``demos/data/observations.csv``, ``ratings.csv``, and ``scores.csv``:
a five-participant crossover trial on the canonical four-block design, with
a latent per-image severity, planted treatment effects of varying strength,
and five raters who each view that severity through their own strictly
increasing response curve. The other demo scripts (and your own CLI
experiments) can use these files directly.
"""

from pathlib import Path

import numpy as np

from nof1lab import FOUR_BLOCK_DESIGN, Observation, generate_schedule, io

DATA_DIR = Path(__file__).resolve().parent / "data"

# planted treatment effect per participant (latent-severity shift on treated days)
EFFECTS = {"1": 0.0, "2": -0.25, "3": 0.0, "4": -0.12, "5": 0.02}

# each rater is a strictly increasing distortion of the latent severity
RATER_CURVES = {
    "rater1": lambda x: x,
    "rater2": lambda x: x**2,
    "rater3": np.sqrt,
    "rater4": lambda x: 0.2 + 0.6 * x,
    "rater5": lambda x: x**3,
}


def build_study(seed: int = 2024):
    """Return (observations, latent scores dict) for the synthetic trial."""
    rng = np.random.default_rng(seed)
    observations, latent = [], {}
    for pid, effect in EFFECTS.items():
        schedule = generate_schedule(FOUR_BLOCK_DESIGN, pid)
        noise = 0.08 * rng.standard_normal(len(schedule))
        for k, entry in enumerate(schedule):
            ref = f"p{pid}_d{entry.day:02d}_s{entry.slot}.jpg"
            value = 0.55 + (effect if entry.treatment else 0.0) + noise[k]
            latent[ref] = float(np.clip(value, 0.05, 0.95))
            observations.append(
                Observation(
                    participant_id=pid,
                    day=entry.day,
                    slot=entry.slot,
                    timestamp=f"2026-03-{entry.day:02d}T{7 + entry.slot:02d}:15:00",
                    treatment=entry.treatment,
                    image_ref=ref,
                )
            )
    return observations, latent


def write_study(directory: Path = DATA_DIR, seed: int = 2024) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    observations, latent = build_study(seed)

    io.write_observations(directory / "observations.csv", observations)
    io.write_scores(directory / "scores.csv", latent)

    with open(directory / "ratings.csv", "w", encoding="utf-8") as fh:
        fh.write("image_id,rater_id,score\n")
        for rater, curve in RATER_CURVES.items():
            for ref, value in latent.items():
                fh.write(f"{ref},{rater},{float(curve(value)):.10f}\n")
    return directory


if __name__ == "__main__":
    where = write_study()
    print(f"wrote observations.csv, ratings.csv, scores.csv to {where}")
    print(f"participants and planted effects: {EFFECTS}")
