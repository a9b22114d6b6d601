"""Linear regression with AR(1) errors, fitted by profiled likelihood.

The model is y = X @ beta + u where u follows a stationary first-order
autoregression: corr(u_i, u_j) = phi ** |i - j|. Estimation whitens the data
with the Prais-Winsten transform (which turns generalized least squares into
ordinary least squares on transformed rows), profiles beta and the variance
out of the Gaussian likelihood, and minimizes the resulting univariate
criterion over phi with a bracketed scalar search.

Identities the implementation relies on, with V the AR(1) correlation matrix
and T the whitening transform:
    T' T = (1 - phi^2) * inv(V)
    ln det V = (n - 1) * ln(1 - phi^2)
    whitened RSS = (1 - phi^2) * (y - X beta)' inv(V) (y - X beta)
Substituting these into the profiled Gaussian log-likelihood collapses the
ln det V term and the (1 - phi^2) factor inside the RSS into a single
-(1/2) ln(1 - phi^2) term; see profile_objective. The criterion value equals
the dense multivariate-normal computation exactly, not just up to a constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import (
    DegenerateFit,
    IndexOutOfRange,
    NonFiniteInput,
    PhiOutOfRange,
    RankDeficient,
    SingleTreatmentLevel,
)
from .optimize import scan_minimize
from .scoring import OutcomeSeries

#: Search bound for |phi|; optima this close to 1 are flagged, not trusted.
PHI_BOUND = 0.999

# proximity to PHI_BOUND that sets boundary_warning on a fit
_BOUNDARY_MARGIN = 1e-4

# relative residual floor below which a fit counts as exact
_DEGENERATE_REL = 1e-24


@dataclass(frozen=True)
class Ar1Fit:
    """Fitted coefficients and AR(1) parameter for one series.

    Attributes:
        beta: coefficient estimates; index 1 is the treatment effect under
            the standard [intercept, treatment] design.
        phi: AR(1) correlation parameter estimate, in (-PHI_BOUND, PHI_BOUND).
        sigma2: innovation variance estimate (whitened-residual scale).
        se: standard errors of beta.
        loglik: profiled log-likelihood at the optimum, up to an additive
            constant (the negative of the minimized criterion).
        method: "REML" or "ML".
        n: observations. p: regressors.
        boundary_warning: True when phi landed within 1e-4 of the search
            bound; the point estimate is then untrustworthy.

    An exact fit (y in the column space of X) is reported with sigma2 = 0,
    se = 0, phi = 0 and infinite loglik rather than as an error, so constant
    series flow through to a {statistic 0, p 1} test result.
    """

    beta: np.ndarray
    phi: float
    sigma2: float
    se: np.ndarray
    loglik: float
    method: str
    n: int
    p: int
    boundary_warning: bool = False


@dataclass(frozen=True)
class TestResult:
    """Two-sided Wald t-test of a single coefficient."""

    estimate: float
    statistic: float
    df: int
    p_value: float
    alpha: float = 0.05

    @property
    def reject(self) -> bool:
        return self.p_value < self.alpha


def _check_inputs(y: np.ndarray, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if y.ndim != 1:
        raise NonFiniteInput(f"y must be 1-D, got shape {y.shape}")
    if X.ndim != 2:
        raise NonFiniteInput(f"X must be 2-D, got shape {X.shape}")
    if X.shape[0] != y.shape[0]:
        raise NonFiniteInput(
            f"X has {X.shape[0]} rows but y has {y.shape[0]} entries"
        )
    if not np.all(np.isfinite(y)) or not np.all(np.isfinite(X)):
        raise NonFiniteInput("y and X must contain only finite values")
    return y, X


def ar1_whiten(
    y: np.ndarray, X: np.ndarray, phi: float
) -> tuple[np.ndarray, np.ndarray, float]:
    """Apply the Prais-Winsten whitening transform for a given phi.

    Row 0 is scaled by sqrt(1 - phi^2); row t (t >= 1) becomes
    row_t - phi * row_{t-1}, applied to y and every column of X alike.
    After the transform, ordinary least squares on (y_w, X_w) is the
    generalized least squares fit under the AR(1) correlation matrix.

    Args:
        y: response vector, length n >= 1.
        X: design matrix, n rows.
        phi: AR(1) parameter, |phi| < 1.

    Returns:
        (y_w, X_w, logdet_V) where logdet_V = (n - 1) * ln(1 - phi^2) is the
        log-determinant of the dense correlation matrix.

    Raises:
        PhiOutOfRange: |phi| >= 1.
        NonFiniteInput: malformed or non-finite y, X.
    """
    y, X = _check_inputs(y, X)
    if not abs(phi) < 1.0:
        raise PhiOutOfRange(f"|phi| must be < 1, got {phi}")
    n = y.shape[0]
    scale0 = math.sqrt(1.0 - phi * phi)
    y_w = np.empty_like(y)
    X_w = np.empty_like(X)
    y_w[0] = scale0 * y[0]
    X_w[0] = scale0 * X[0]
    if n > 1:
        y_w[1:] = y[1:] - phi * y[:-1]
        X_w[1:] = X[1:] - phi * X[:-1]
    logdet_V = (n - 1) * math.log1p(-phi * phi)
    return y_w, X_w, logdet_V


def _whitened_ols(
    y_w: np.ndarray, X_w: np.ndarray
) -> tuple[np.ndarray, float]:
    """OLS on whitened data: returns (beta, residual sum of squares)."""
    p = X_w.shape[1]
    beta, _, rank, _ = np.linalg.lstsq(X_w, y_w, rcond=None)
    if rank < p:
        raise RankDeficient(
            f"design matrix has rank {rank} < {p} columns after whitening"
        )
    resid = y_w - X_w @ beta
    return beta, float(resid @ resid)


def profile_objective(
    phi: float, y: np.ndarray, X: np.ndarray, method: str = "REML"
) -> float:
    """Negative profiled log-likelihood of phi (constants dropped).

    beta and the variance are profiled out analytically: beta is the OLS
    solution on whitened data and the variance its residual mean square.
    With RSS_w the whitened residual sum of squares,

        ML:   (n/2) ln(RSS_w / n) - (1/2) ln(1 - phi^2)
        REML: ((n-p)/2) ln(RSS_w / (n-p)) - (1/2) ln(1 - phi^2)
              + (1/2) ln det(X_w' X_w)

    The -(1/2) ln(1 - phi^2) term is what remains of ln det V once the
    (1 - phi^2) factor hidden inside RSS_w is pulled out; writing the
    criterion directly on ln RSS_w with ln det V added, as if the two were
    independent, double-counts that factor and produces a criterion with no
    interior minimum. Both expressions above equal the dense
    multivariate-normal criterion (explicit V inverse and determinant)
    exactly, which the test suite verifies on a phi grid.

    Args:
        phi: AR(1) parameter, |phi| < 1.
        y: response vector. X: design matrix, full column rank.
        method: "REML" or "ML".

    Returns:
        Criterion value; smaller is better.

    Raises:
        PhiOutOfRange, RankDeficient, NonFiniteInput.
        DegenerateFit: y lies in the column space of X (zero residuals).
    """
    if method not in ("REML", "ML"):
        raise ValueError(f"method must be 'REML' or 'ML', got {method!r}")
    y_w, X_w, _ = ar1_whiten(y, X, phi)
    n, p = X_w.shape
    _, rss_w = _whitened_ols(y_w, X_w)
    ss_yw = float(y_w @ y_w)
    if rss_w <= _DEGENERATE_REL * ss_yw:
        raise DegenerateFit(
            "response lies in the column space of the design matrix; "
            "the likelihood is unbounded"
        )
    log1m = math.log1p(-phi * phi)
    if method == "ML":
        return 0.5 * n * math.log(rss_w / n) - 0.5 * log1m
    dof = n - p
    if dof <= 0:
        raise RankDeficient(f"REML needs n > p, got n={n}, p={p}")
    sign, logdet_gram = np.linalg.slogdet(X_w.T @ X_w)
    if sign <= 0:
        raise RankDeficient("whitened Gram matrix is singular")
    return 0.5 * dof * math.log(rss_w / dof) - 0.5 * log1m + 0.5 * logdet_gram


def fit_gls_ar1(
    y: np.ndarray,
    X: np.ndarray,
    method: str = "REML",
    tol: float = 1e-8,
    phi: float | None = None,
) -> Ar1Fit:
    """Fit the AR(1)-errors linear model by profiled likelihood.

    phi is found by a coarse scan plus bracketed golden-section/parabolic
    search over (-PHI_BOUND, PHI_BOUND); beta, the innovation variance and
    standard errors then come from the whitened least-squares fit at that
    phi. sigma2 is RSS_w/(n-p) under REML and RSS_w/n under ML;
    se_j = sqrt(sigma2 * [(X_w' X_w)^-1]_jj).

    Args:
        y: response vector. X: full-column-rank design matrix, n > p.
        method: "REML" (default) or "ML".
        tol: bracket width at which the phi search stops.
        phi: when given, skip estimation and fit at this fixed value
            (phi=0 reproduces ordinary least squares).

    Returns:
        Ar1Fit. boundary_warning is set when the phi estimate is within
        1e-4 of the search bound.

    Raises:
        NonFiniteInput, RankDeficient, PhiOutOfRange.
    """
    y, X = _check_inputs(y, X)
    n, p = X.shape
    if n <= p:
        raise RankDeficient(f"need more observations than regressors: n={n}, p={p}")

    # Exact-fit detection is phi-independent: y in colspace(X) gives zero
    # residuals under every correlation structure.
    beta0, rss0 = _whitened_ols(y, X)
    if rss0 <= _DEGENERATE_REL * max(float(y @ y), 1e-300):
        # coefficients at solver round-off level are exact zeros here, so a
        # constant series yields statistic 0 rather than an infinite one
        scale = np.abs(beta0).max()
        beta0[np.abs(beta0) <= 1e-12 * scale] = 0.0
        return Ar1Fit(
            beta=beta0,
            phi=0.0,
            sigma2=0.0,
            se=np.zeros(p),
            loglik=math.inf,
            method=method,
            n=n,
            p=p,
        )

    if phi is not None:
        if not abs(phi) < 1.0:
            raise PhiOutOfRange(f"|phi| must be < 1, got {phi}")
        phi_hat = float(phi)
        criterion = profile_objective(phi_hat, y, X, method)
        searched = False
    else:
        lo = -PHI_BOUND + 1e-6
        hi = PHI_BOUND - 1e-6
        phi_hat, criterion = scan_minimize(
            lambda ph: profile_objective(ph, y, X, method), lo, hi, tol=tol
        )
        searched = True

    y_w, X_w, _ = ar1_whiten(y, X, phi_hat)
    beta, rss_w = _whitened_ols(y_w, X_w)
    dof = n - p
    sigma2 = rss_w / dof if method == "REML" else rss_w / n
    gram_inv = np.linalg.inv(X_w.T @ X_w)
    se = np.sqrt(sigma2 * np.diag(gram_inv))
    boundary = searched and (PHI_BOUND - abs(phi_hat)) < _BOUNDARY_MARGIN
    return Ar1Fit(
        beta=beta,
        phi=phi_hat,
        sigma2=float(sigma2),
        se=se,
        loglik=-criterion,
        method=method,
        n=n,
        p=p,
        boundary_warning=boundary,
    )


def wald_test(fit: Ar1Fit, coef_index: int = 1, alpha: float = 0.05) -> TestResult:
    """Two-sided t-test of one coefficient against zero.

    statistic = beta / se with df = n - p. An exact fit (se = 0) yields
    statistic 0 and p 1 when the estimate is zero, and an infinite statistic
    with p 0 otherwise.

    Raises:
        IndexOutOfRange: coef_index is not a valid beta index.
    """
    if not 0 <= coef_index < fit.p:
        raise IndexOutOfRange(
            f"coefficient index {coef_index} out of range for p={fit.p}"
        )
    est = float(fit.beta[coef_index])
    se = float(fit.se[coef_index])
    if se > 0.0:
        statistic = est / se
    elif est == 0.0:
        statistic = 0.0
    else:
        statistic = math.copysign(math.inf, est)
    df = fit.n - fit.p
    p_value = float(2.0 * stats.t.sf(abs(statistic), df))
    return TestResult(est, statistic, df, p_value, alpha)


def analyze_participant(
    series: OutcomeSeries, method: str = "REML", alpha: float = 0.05
) -> tuple[Ar1Fit, TestResult]:
    """Estimate and test the treatment effect for one participant.

    Builds the two-column design [intercept, treatment indicator], fits the
    AR(1)-errors model, and Wald-tests the treatment coefficient.

    Raises:
        SingleTreatmentLevel: the series has only one treatment level, so
            the effect is not identifiable.
        RankDeficient: fewer than 3 observations.
    """
    n = len(series)
    flags = series.treatment
    if n > 0 and (bool(flags.all()) or not bool(flags.any())):
        raise SingleTreatmentLevel(
            "all treatment flags are identical; effect not identifiable"
        )
    X = np.column_stack([np.ones(n), flags.astype(float)])
    fit = fit_gls_ar1(series.outcome, X, method=method)
    test = wald_test(fit, coef_index=1, alpha=alpha)
    return fit, test
