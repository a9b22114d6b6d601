"""AR(1) regression: whitening identities, likelihood, fitting, testing.

Reference values come from tests/_dense.py, which builds the covariance
matrix explicitly and never shares code with the package. The frozen
constants in test_fit_golden_* were produced by that dense path (grid search
at 1e-3 plus bounded refinement) and recorded here.
"""

import math

import numpy as np
import pytest
from _dense import dense_criterion, dense_fit, dense_V, ols_fit

from nof1lab.ar1 import (
    PHI_BOUND,
    analyze_participant,
    ar1_whiten,
    fit_gls_ar1,
    profile_objective,
    wald_test,
)
from nof1lab.design import FOUR_BLOCK_DESIGN, generate_schedule
from nof1lab.errors import (
    DegenerateFit,
    IndexOutOfRange,
    NonFiniteInput,
    PhiOutOfRange,
    RankDeficient,
    SingleTreatmentLevel,
)
from nof1lab.simulate import series_from_schedule


def toy_problem(seed=7, n=10, p=2):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.standard_normal((n, p - 1))])
    y = rng.standard_normal(n)
    return y, X


def golden_series(seed=42):
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, "p")
    return series_from_schedule(
        schedule, 0.5, -0.2, 0.5, 0.1, np.random.default_rng(seed)
    )


# --- whitening -------------------------------------------------------------

def test_whiten_matches_dense_covariance():
    y, X = toy_problem(seed=7, n=10)
    phi = 0.6
    y_w, X_w, logdet = ar1_whiten(y, X, phi)
    V = dense_V(10, phi)
    _, logdet_dense = np.linalg.slogdet(V)
    assert abs(logdet - logdet_dense) < 1e-9
    gram_dense = (1.0 - phi * phi) * (X.T @ np.linalg.inv(V) @ X)
    assert np.abs(X_w.T @ X_w - gram_dense).max() < 1e-9
    quad_dense = (1.0 - phi * phi) * (y @ np.linalg.inv(V) @ y)
    assert abs(y_w @ y_w - quad_dense) < 1e-9


def test_whiten_logdet_across_phi_and_n():
    for n in (1, 2, 5, 23, 50):
        y = np.linspace(0.0, 1.0, n)
        X = np.ones((n, 1))
        for phi in (-0.95, -0.5, 0.0, 0.3, 0.9, 0.998):
            _, _, logdet = ar1_whiten(y, X, phi)
            _, logdet_dense = np.linalg.slogdet(dense_V(n, phi))
            assert abs(logdet - logdet_dense) < 1e-9


def test_whiten_phi_zero_is_identity():
    y, X = toy_problem()
    y_w, X_w, logdet = ar1_whiten(y, X, 0.0)
    assert np.array_equal(y_w, y)
    assert np.array_equal(X_w, X)
    assert logdet == 0.0


def test_whiten_single_point():
    y_w, X_w, logdet = ar1_whiten(np.array([2.0]), np.ones((1, 1)), 0.8)
    assert y_w[0] == pytest.approx(math.sqrt(1 - 0.64) * 2.0)
    assert logdet == 0.0


def test_whiten_rejects_bad_phi():
    y, X = toy_problem()
    for phi in (1.0, -1.0, 1.5):
        with pytest.raises(PhiOutOfRange):
            ar1_whiten(y, X, phi)


# --- profile criterion -------------------------------------------------------

def test_profile_matches_dense_likelihood_on_grid():
    rng = np.random.default_rng(20)
    n = 20
    y = rng.standard_normal(n).cumsum() * 0.3 + rng.standard_normal(n)
    X = np.column_stack([np.ones(n), rng.standard_normal(n)])
    for method in ("ML", "REML"):
        for phi in np.arange(-0.9, 0.95, 0.1):
            mine = profile_objective(float(phi), y, X, method)
            dense = dense_criterion(float(phi), y, X, method)
            assert abs(mine - dense) < 1e-8


def test_profile_phi_zero_reduces_to_ols_criterion():
    y, X = toy_problem(seed=3, n=15)
    n, p = X.shape
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    rss = float(((y - X @ beta) ** 2).sum())
    assert profile_objective(0.0, y, X, "ML") == pytest.approx(
        0.5 * n * math.log(rss / n), abs=1e-12
    )


def test_profile_perfect_fit_raises():
    X = np.column_stack([np.ones(8), np.arange(8.0)])
    y = X @ np.array([1.0, 2.0])
    with pytest.raises(DegenerateFit):
        profile_objective(0.3, y, X, "REML")


def test_profile_rank_deficient_raises():
    y = np.arange(6.0)
    X = np.column_stack([np.ones(6), np.ones(6)])
    with pytest.raises(RankDeficient):
        profile_objective(0.2, y, X, "REML")


# --- fitting ----------------------------------------------------------------

def test_fit_golden_reml():
    # dense-oracle reference for the seeded 48-point series
    series = golden_series()
    fit, test = analyze_participant(series, method="REML")
    assert fit.beta[0] == pytest.approx(0.4956240327004647, abs=1e-8)
    assert fit.beta[1] == pytest.approx(-0.15932261540735496, abs=1e-8)
    assert fit.se[0] == pytest.approx(0.025251142142024237, abs=1e-8)
    assert fit.se[1] == pytest.approx(0.029504491863433645, abs=1e-8)
    assert fit.phi == pytest.approx(0.46788338757878656, abs=1e-6)
    assert fit.sigma2 == pytest.approx(0.005917278146258251, abs=1e-9)
    assert test.statistic == pytest.approx(-5.399944393037022, abs=1e-6)
    assert test.p_value == pytest.approx(2.2715518970134436e-06, abs=1e-9)
    assert test.df == 46
    assert not fit.boundary_warning


def test_fit_golden_ml():
    series = golden_series()
    fit, test = analyze_participant(series, method="ML")
    assert fit.phi == pytest.approx(0.42467610265736944, abs=1e-6)
    assert fit.beta[1] == pytest.approx(-0.16262015706529034, abs=1e-8)
    assert test.p_value == pytest.approx(6.999267178977754e-07, abs=1e-9)


def test_fit_agrees_with_dense_oracle():
    series = golden_series(seed=9)
    X = np.column_stack([np.ones(len(series)), series.treatment.astype(float)])
    for method in ("REML", "ML"):
        fit = fit_gls_ar1(series.outcome, X, method=method)
        test = wald_test(fit)
        oracle = dense_fit(series.outcome, X, method=method)
        assert np.abs(fit.beta - oracle["beta"]).max() < 1e-6
        assert abs(fit.phi - oracle["phi"]) < 2e-3
        assert np.abs(fit.se - oracle["se"]).max() < 1e-6
        assert abs(test.p_value - oracle["p_value"]) < 1e-6
        assert fit.sigma2 == pytest.approx(oracle["sigma2"], rel=1e-6)


def test_fixed_phi_zero_is_ols():
    rng = np.random.default_rng(55)
    for _ in range(10):
        n = int(rng.integers(8, 40))
        X = np.column_stack([np.ones(n), rng.standard_normal((n, 2))])
        y = X @ rng.standard_normal(3) + rng.standard_normal(n)
        fit = fit_gls_ar1(y, X, phi=0.0)
        test = wald_test(fit)
        ols = ols_fit(y, X)
        assert np.abs(fit.beta - ols["beta"]).max() < 1e-10
        assert np.abs(fit.se - ols["se"]).max() < 1e-10
        assert abs(test.statistic - ols["statistic"]) < 1e-10
        assert abs(test.p_value - ols["p_value"]) < 1e-10
        assert fit.sigma2 == pytest.approx(ols["sigma2"], abs=1e-10)


def test_whitened_beta_equals_dense_gls_across_phi():
    rng = np.random.default_rng(314)
    for _ in range(40):
        n = int(rng.integers(5, 51))
        p = int(rng.integers(1, 4))
        X = np.column_stack([np.ones(n), rng.standard_normal((n, p - 1))])
        y = rng.standard_normal(n) * rng.uniform(0.5, 3.0)
        phi = float(rng.uniform(-0.95, 0.95))
        if n <= p:
            continue
        y_w, X_w, _ = ar1_whiten(y, X, phi)
        beta_w, *_ = np.linalg.lstsq(X_w, y_w, rcond=None)
        Vinv = np.linalg.inv(dense_V(n, phi))
        beta_d = np.linalg.solve(X.T @ Vinv @ X, X.T @ Vinv @ y)
        scale = max(1.0, np.abs(beta_d).max())
        assert np.abs(beta_w - beta_d).max() / scale < 1e-8


def test_fit_constant_series_exact():
    y = np.full(12, 3.0)
    X = np.column_stack([np.ones(12), np.arange(12) % 2])
    fit = fit_gls_ar1(y, X)
    assert fit.beta[0] == 3.0
    assert fit.beta[1] == 0.0
    assert fit.sigma2 == 0.0
    assert np.all(fit.se == 0.0)
    assert math.isinf(fit.loglik)
    test = wald_test(fit)
    assert test.statistic == 0.0
    assert test.p_value == 1.0


def test_fit_exact_linear_combination():
    X = np.column_stack([np.ones(10), np.arange(10.0)])
    y = X @ np.array([-1.5, 0.25])
    fit = fit_gls_ar1(y, X)
    assert fit.sigma2 == 0.0
    assert fit.beta == pytest.approx([-1.5, 0.25], abs=1e-12)


def test_fit_input_validation():
    y, X = toy_problem()
    bad = y.copy()
    bad[3] = np.nan
    with pytest.raises(NonFiniteInput):
        fit_gls_ar1(bad, X)
    with pytest.raises(NonFiniteInput):
        fit_gls_ar1(y[:-1], X)
    with pytest.raises(RankDeficient):
        fit_gls_ar1(y[:2], X[:2])
    with pytest.raises(RankDeficient):
        fit_gls_ar1(y, np.column_stack([X[:, 0], X[:, 0]]))
    with pytest.raises(PhiOutOfRange):
        fit_gls_ar1(y, X, phi=1.0)


def test_fit_flags_boundary_optimum():
    # a strong deterministic ramp drives the correlation estimate into the
    # search bound
    n = 60
    y = np.linspace(0.0, 10.0, n) + 0.001 * np.sin(np.arange(n))
    X = np.column_stack([np.ones(n), np.arange(n) % 2])
    fit = fit_gls_ar1(y, X)
    assert fit.boundary_warning
    assert abs(fit.phi) > PHI_BOUND - 1e-3


def test_optimum_beats_grid():
    series = golden_series(seed=2)
    X = np.column_stack([np.ones(len(series)), series.treatment.astype(float)])
    fit = fit_gls_ar1(series.outcome, X)
    best = -fit.loglik
    for phi in np.arange(-0.998, 0.999, 1e-3):
        assert best <= profile_objective(float(phi), series.outcome, X) + 1e-12


# --- Wald test ---------------------------------------------------------------

def test_wald_index_out_of_range():
    series = golden_series()
    fit, _ = analyze_participant(series)
    with pytest.raises(IndexOutOfRange):
        wald_test(fit, coef_index=2)
    with pytest.raises(IndexOutOfRange):
        wald_test(fit, coef_index=-1)


def test_wald_p_value_definition():
    from scipy import stats

    series = golden_series(seed=13)
    fit, test = analyze_participant(series)
    expected = 2.0 * stats.t.sf(abs(test.statistic), fit.n - fit.p)
    assert test.p_value == pytest.approx(expected, abs=1e-15)
    assert test.df == fit.n - fit.p


# --- per-participant wrapper --------------------------------------------------

def test_analyze_requires_both_levels():
    schedule = generate_schedule(FOUR_BLOCK_DESIGN, "p")
    series = series_from_schedule(schedule, 0.0, 0.0, 0.2, 1.0, np.random.default_rng(1))
    flat = series.with_treatment(np.zeros(len(series), dtype=bool))
    with pytest.raises(SingleTreatmentLevel):
        analyze_participant(flat)


def test_affine_equivariance_spot_check():
    rng = np.random.default_rng(500)
    series = golden_series(seed=21)
    X = np.column_stack([np.ones(len(series)), series.treatment.astype(float)])
    base_fit = fit_gls_ar1(series.outcome, X)
    base_test = wald_test(base_fit)
    for _ in range(5):
        a = float(rng.uniform(0.2, 5.0)) * float(rng.choice([-1.0, 1.0]))
        b = float(rng.uniform(-3.0, 3.0))
        fit = fit_gls_ar1(a * series.outcome + b, X)
        test = wald_test(fit)
        assert fit.beta[1] == pytest.approx(a * base_fit.beta[1], abs=1e-9 * max(1, abs(a)))
        assert fit.phi == pytest.approx(base_fit.phi, abs=1e-9)
        # negating y negates the estimate, so the t statistic follows sign(a)
        assert test.statistic == pytest.approx(
            math.copysign(1.0, a) * base_test.statistic, abs=1e-9
        )
        assert test.p_value == pytest.approx(base_test.p_value, abs=1e-9)


def test_time_reversal_spot_check():
    series = golden_series(seed=23)
    X = np.column_stack([np.ones(len(series)), series.treatment.astype(float)])
    fit = fit_gls_ar1(series.outcome, X)
    test = wald_test(fit)
    fit_r = fit_gls_ar1(series.outcome[::-1].copy(), X[::-1].copy())
    test_r = wald_test(fit_r)
    assert np.abs(fit.beta - fit_r.beta).max() < 1e-9
    assert abs(fit.phi - fit_r.phi) < 1e-9
    assert abs(test.p_value - test_r.p_value) < 1e-9
