"""Rater-score scaling, averaging, binarization, and score attachment."""

import numpy as np
import pytest

from nof1lab.design import FOUR_BLOCK_DESIGN, Observation, generate_schedule
from nof1lab.errors import (
    DegenerateRater,
    EmptyMatrix,
    EvenRaterTie,
    MissingScore,
    OrderingConflict,
)
from nof1lab.scoring import (
    OutcomeSeries,
    RatingMatrix,
    attach_scores,
    average_ratings,
    binarize_ratings,
    scale_ratings,
)


def matrix(rows, raters=None, images=None):
    scores = np.asarray(rows, dtype=float)
    r, i = scores.shape
    return RatingMatrix(
        tuple(raters or (f"r{k}" for k in range(r))),
        tuple(images or (f"img{k}" for k in range(i))),
        scores,
    )


def random_matrix(rng, n_raters=None, n_images=None):
    r = n_raters or int(rng.integers(1, 7))
    i = n_images or int(rng.integers(2, 30))
    scores = rng.uniform(0.0, 1.0, size=(r, i))
    # keep every rater non-degenerate
    scores[:, 0] = 0.02
    scores[:, 1] = 0.98
    return matrix(scores)


# --- scaling ---------------------------------------------------------------

def test_scale_identity_when_already_spanning():
    m = matrix([[0.0, 0.5, 1.0]])
    assert np.allclose(scale_ratings(m).scores, [[0.0, 0.5, 1.0]])


def test_scale_affine_map():
    m = matrix([[0.2, 0.4, 0.6]])
    assert np.allclose(scale_ratings(m).scores, [[0.0, 0.5, 1.0]])


def test_scale_degenerate_rater_rejected():
    m = matrix([[0.3, 0.3, 0.3], [0.1, 0.2, 0.9]], raters=("alice", "bob"))
    with pytest.raises(DegenerateRater, match="alice"):
        scale_ratings(m)


def test_scale_empty_rejected():
    with pytest.raises(EmptyMatrix):
        scale_ratings(RatingMatrix((), (), np.zeros((0, 0))))


def test_scale_idempotent_and_order_preserving():
    rng = np.random.default_rng(931)
    for _ in range(100):
        m = random_matrix(rng)
        once = scale_ratings(m)
        twice = scale_ratings(once)
        assert np.abs(twice.scores - once.scores).max() < 1e-12
        assert once.scores.min(axis=1).max() == 0.0
        assert once.scores.max(axis=1).min() == 1.0
        # strict order within each rater is untouched
        for r in range(m.n_raters):
            order = np.argsort(m.scores[r], kind="stable")
            assert np.all(np.diff(once.scores[r][order]) >= 0.0)


# --- averaging -------------------------------------------------------------

def test_average_of_constant_votes():
    m = matrix([[0.4, 0.8]] * 5)
    assert average_ratings(m) == {"img0": 0.4, "img1": 0.8}


def test_average_two_raters():
    m = matrix([[0.0, 0.2], [1.0, 0.6]])
    result = average_ratings(m)
    assert result["img0"] == pytest.approx(0.5)
    assert result["img1"] == pytest.approx(0.4)


def test_average_bounded_by_rater_extremes():
    rng = np.random.default_rng(8)
    for _ in range(50):
        m = random_matrix(rng)
        means = np.array(list(average_ratings(m).values()))
        assert np.all(means <= m.scores.max(axis=0) + 1e-15)
        assert np.all(means >= m.scores.min(axis=0) - 1e-15)


def test_average_empty_rejected():
    with pytest.raises(EmptyMatrix):
        average_ratings(RatingMatrix((), (), np.zeros((0, 0))))


# --- binarization ----------------------------------------------------------

def test_binarize_single_rater_threshold_rule():
    m = matrix([[0.1, 0.2, 0.3, 0.4, 0.5]])
    # median 0.3; at-or-below maps to 0
    assert binarize_ratings(m).labels == (0, 0, 0, 1, 1)


def test_binarize_unanimous_and_majority():
    # each rater scores two images 0.8 and three 0.2, so its median is 0.2
    # and its 1-votes are exactly the 0.8 cells
    votes = np.array(
        [
            [1, 1, 0, 0, 0],
            [1, 1, 0, 0, 0],
            [1, 0, 1, 0, 0],
            [1, 0, 1, 0, 0],
            [1, 1, 0, 0, 0],
        ]
    )
    m = matrix(np.where(votes, 0.8, 0.2))
    # image0 unanimous 5-0, image1 majority 3-2, image2 minority 2-3
    assert binarize_ratings(m).labels == (1, 1, 0, 0, 0)


def test_binarize_even_split_rejected():
    m = matrix([[0.1, 0.9, 0.2, 0.8], [0.9, 0.1, 0.8, 0.2]])
    with pytest.raises(EvenRaterTie):
        binarize_ratings(m)


def test_binarize_even_count_without_tie():
    m = matrix([[0.1, 0.9, 0.2, 0.8], [0.2, 0.8, 0.1, 0.9]])
    assert binarize_ratings(m).labels == (0, 1, 0, 1)


def test_binarize_commutes_with_scaling():
    rng = np.random.default_rng(77)
    for _ in range(50):
        m = random_matrix(rng, n_raters=int(rng.integers(1, 4)) * 2 - 1)
        assert binarize_ratings(scale_ratings(m)) == binarize_ratings(m)


def test_binarize_invariant_under_monotone_transforms():
    rng = np.random.default_rng(4041)
    for _ in range(100):
        m = random_matrix(rng, n_raters=int(rng.integers(1, 4)) * 2 - 1)
        k = float(rng.uniform(0.3, 3.0))
        transformed = matrix(m.scores**k)
        assert binarize_ratings(transformed) == binarize_ratings(m)


# --- attachment ------------------------------------------------------------

def schedule_observations(pid="1"):
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, pid)
    rows = [
        Observation(
            participant_id=pid,
            day=e.day,
            slot=e.slot,
            timestamp=f"2021-06-{e.day:02d}T0{e.slot + 6}:00:00",
            treatment=e.treatment,
            image_ref=f"img_{e.day:02d}_{e.slot}",
        )
        for e in schedule
    ]
    return schedule, rows


def test_attach_full_series():
    schedule, rows = schedule_observations()
    rng = np.random.default_rng(0)
    scores = {r.image_ref: float(rng.uniform()) for r in rows}
    series = attach_scores(schedule, scores, rows)
    assert len(series) == 48
    assert series.participant_id == "1"
    treated_days = set(series.day[series.treatment].tolist())
    assert treated_days == {3, 4, 7, 8, 11, 12, 15, 16}
    assert series.outcome[0] == scores["img_01_1"]


def test_attach_reorders_shuffled_input():
    schedule, rows = schedule_observations()
    scores = {r.image_ref: 0.5 for r in rows}
    shuffled = list(reversed(rows))
    series = attach_scores(schedule, scores, shuffled)
    assert series.day.tolist() == sorted(series.day.tolist())


def test_attach_empty():
    schedule, _ = schedule_observations()
    series = attach_scores(schedule, {}, [])
    assert len(series) == 0


def test_attach_missing_score():
    schedule, rows = schedule_observations()
    scores = {r.image_ref: 0.5 for r in rows}
    del scores["img_05_2"]
    with pytest.raises(MissingScore, match="img_05_2"):
        attach_scores(schedule, scores, rows)


def test_attach_duplicate_cell():
    schedule, rows = schedule_observations()
    scores = {r.image_ref: 0.5 for r in rows}
    rows.append(rows[3])
    with pytest.raises(OrderingConflict):
        attach_scores(schedule, scores, rows)


# --- series validation -----------------------------------------------------

def test_series_rejects_unordered_points():
    with pytest.raises(OrderingConflict):
        OutcomeSeries(
            "x",
            np.array([1, 1, 2]),
            np.array([2, 1, 1]),
            np.zeros(3, dtype=bool),
            np.zeros(3),
        )


def test_series_rejects_length_mismatch():
    with pytest.raises(OrderingConflict):
        OutcomeSeries(
            "x", np.array([1, 2]), np.array([1]), np.zeros(2, dtype=bool), np.zeros(2)
        )


def test_matrix_rejects_bad_scores():
    with pytest.raises(EmptyMatrix):
        matrix([[0.5, 1.5]])
    with pytest.raises(EmptyMatrix):
        matrix([[0.5, np.nan]])
    with pytest.raises(EmptyMatrix):
        RatingMatrix(("a", "a"), ("i0", "i1"), np.full((2, 2), 0.5))
