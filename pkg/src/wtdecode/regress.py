"""OLS with Gaussian log-likelihood, ΔLL comparison, garden-path effect
estimation, and the paired sign-flip permutation test.

Deliberately a fixed-effects, desk-scale stand-in for mixed-effects pipelines:
random intercepts become optional one-hot indicator blocks and smooth terms
become linear (optionally quadratic) columns. Every function is deterministic;
resampling procedures take mandatory seeds.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.linalg import qr

from .errors import ComparisonError, EstimationError, SingularDesignError, ValidationError

LN2 = math.log(2.0)

NUMERIC_FIELDS = (
    "surp", "surp_prev1", "surp_prev2", "freq", "freq_prev1", "freq_prev2",
    "length", "index", "miss_prev1", "miss_prev2", "slength", "pfix",
)


@dataclass(frozen=True)
class DesignMatrix:
    names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray | None

    def __post_init__(self):
        n, p = self.X.shape
        if p != len(self.names):
            raise ValidationError(f"{len(self.names)} names for {p} columns")
        if not np.all(np.isfinite(self.X)):
            raise ValidationError("design matrix contains non-finite entries")
        if self.y is not None:
            if self.y.shape != (n,):
                raise ValidationError("response length does not match design rows")
            if not np.all(np.isfinite(self.y)):
                raise ValidationError("response contains non-finite entries")
            if n <= p:
                raise ValidationError(f"need more rows than columns, got n={n}, p={p}")


def design_from_rows(rows, predictors, quadratic=(), groups=(), with_response=True) -> DesignMatrix:
    """Assemble a DesignMatrix from RegressionRows.

    `quadratic` adds squared copies of the named predictors; `groups` adds
    one-hot indicator blocks (first level dropped) for grouping fields such as
    subject or item.
    """
    rows = list(rows)
    if not rows:
        raise ValidationError("no rows to assemble")
    names: list[str] = []
    cols: list[np.ndarray] = []
    for p in predictors:
        if p not in NUMERIC_FIELDS:
            raise ValidationError(f"unknown predictor {p!r}")
        vals = [getattr(r, p) for r in rows]
        if any(v is None for v in vals):
            raise ValidationError(f"predictor {p!r} missing on some rows")
        names.append(p)
        cols.append(np.asarray(vals, dtype=float))
    for q in quadratic:
        if q not in names:
            raise ValidationError(f"quadratic term {q!r} requires the linear term")
        names.append(f"{q}^2")
        cols.append(cols[names.index(q)] ** 2)
    for g in groups:
        levels = sorted({getattr(r, g) for r in rows})
        for level in levels[1:]:
            names.append(f"{g}={level}")
            cols.append(np.asarray([1.0 if getattr(r, g) == level else 0.0 for r in rows]))
    X = np.column_stack(cols) if cols else np.empty((len(rows), 0))
    y = None
    if with_response:
        resp = [r.response for r in rows]
        if any(v is None for v in resp):
            raise ValidationError("some rows have no response")
        y = np.asarray(resp, dtype=float)
    return DesignMatrix(tuple(names), X, y)


@dataclass(frozen=True)
class FitResult:
    column_names: tuple[str, ...]
    coefficients: np.ndarray
    intercept: float
    sigma2: float            # MLE (divide by n); keeps nested ΔLL >= 0 exact
    sigma2_unbiased: float   # divide by n - p - 1, for reporting
    loglik: float | None     # None when perfect_fit
    n: int
    p: int
    perfect_fit: bool
    response_fingerprint: str

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.column_names.index(name)])


def _fingerprint(y: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(y, dtype=float).tobytes()).hexdigest()


def fit_ols(dm: DesignMatrix) -> FitResult:
    """Least-squares fit with intercept; log-likelihood at the MLE variance."""
    if dm.y is None:
        raise ValidationError("design matrix has no response to fit")
    n, p = dm.X.shape
    X1 = np.column_stack([np.ones(n), dm.X])
    rank = np.linalg.matrix_rank(X1)
    if rank < p + 1:
        _, R, piv = qr(X1, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        thresh = diag[0] * max(X1.shape) * np.finfo(float).eps if diag[0] > 0 else 0.0
        all_names = ("(intercept)",) + dm.names
        bad = [all_names[piv[j]] for j in range(len(diag)) if diag[j] <= thresh]
        raise SingularDesignError(bad or ["<undetermined>"])
    beta, _, _, _ = np.linalg.lstsq(X1, dm.y, rcond=None)
    resid = dm.y - X1 @ beta
    rss = float(resid @ resid)
    sigma2 = rss / n
    dof = n - p - 1
    sigma2_unbiased = rss / dof if dof > 0 else math.inf
    scale = max(1.0, float(np.mean(dm.y ** 2)))
    perfect = sigma2 <= 1e-20 * scale
    loglik = None if perfect else -0.5 * n * (math.log(2 * math.pi * sigma2) + 1.0)
    return FitResult(
        column_names=dm.names,
        coefficients=beta[1:],
        intercept=float(beta[0]),
        sigma2=sigma2,
        sigma2_unbiased=sigma2_unbiased,
        loglik=loglik,
        n=n,
        p=p,
        perfect_fit=perfect,
        response_fingerprint=_fingerprint(dm.y),
    )


def delta_ll(base: FitResult, full: FitResult) -> float:
    """Log-likelihood gain of the full model over a nested baseline."""
    if base.n != full.n:
        raise ComparisonError(f"row counts differ: {base.n} vs {full.n}")
    if base.response_fingerprint != full.response_fingerprint:
        raise ComparisonError("fits are not over the same response vector")
    if not set(base.column_names) <= set(full.column_names):
        extra = set(base.column_names) - set(full.column_names)
        raise ComparisonError(f"models are not nested; base-only columns: {sorted(extra)}")
    if base.perfect_fit or full.perfect_fit:
        raise ComparisonError("ΔLL against a perfect fit is undefined")
    return full.loglik - base.loglik


def predict(fit: FitResult, dm: DesignMatrix) -> np.ndarray:
    if tuple(dm.names) != tuple(fit.column_names):
        raise ComparisonError(
            f"design columns {list(dm.names)} do not match fit columns {list(fit.column_names)}"
        )
    return dm.X @ fit.coefficients + fit.intercept


@dataclass(frozen=True)
class EffectEstimate:
    region: str
    effect: float
    ci_low: float
    ci_high: float
    n_boot: int

    @property
    def ci_half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0


@dataclass(frozen=True)
class PredRow:
    """One predicted reading time with its grouping labels."""
    pred: float
    condition: str
    region: str
    item: str
    subject: str


def _item_stats(rows, region, cond_a, cond_b):
    picked = sorted(
        (r for r in rows if r.region == region),
        key=lambda r: (r.item, r.subject, r.condition),
    )
    if not picked:
        raise EstimationError(f"no rows in region {region!r}")
    items = sorted({r.item for r in picked})
    index = {it: i for i, it in enumerate(items)}
    sums = np.zeros((len(items), 2))
    counts = np.zeros((len(items), 2))
    for r in picked:
        if r.condition == cond_a:
            j = 0
        elif r.condition == cond_b:
            j = 1
        else:
            continue
        sums[index[r.item], j] += r.pred
        counts[index[r.item], j] += 1
    for j, cond in ((0, cond_a), (1, cond_b)):
        if counts[:, j].sum() == 0:
            raise EstimationError(f"region {region!r} has no rows in condition {cond!r}")
    return sums, counts


def _mean_diff(sums, counts, weights=None):
    if weights is None:
        tot_sum = sums.sum(axis=0)
        tot_cnt = counts.sum(axis=0)
    else:
        tot_sum = weights @ sums
        tot_cnt = weights @ counts
    if tot_cnt[0] == 0 or tot_cnt[1] == 0:
        raise EstimationError("bootstrap resample lost a condition")
    return tot_sum[0] / tot_cnt[0] - tot_sum[1] / tot_cnt[1]


def garden_path_effect(rows, region: str, n_boot: int, seed: int,
                       cond_a: str = "ambiguous", cond_b: str = "unambiguous") -> EffectEstimate:
    """Mean predicted-RT difference (cond_a - cond_b) in a region, with a 95%
    nonparametric bootstrap-over-items confidence interval."""
    sums, counts = _item_stats(rows, region, cond_a, cond_b)
    effect = _mean_diff(sums, counts)
    n_items = sums.shape[0]
    rng = np.random.default_rng(seed)
    diffs = np.empty(n_boot)
    for b in range(n_boot):
        draw = rng.integers(0, n_items, size=n_items)
        weights = np.bincount(draw, minlength=n_items).astype(float)
        diffs[b] = _mean_diff(sums, counts, weights)
    ci_low, ci_high = np.percentile(diffs, [2.5, 97.5])
    return EffectEstimate(region, float(effect), float(ci_low), float(ci_high), n_boot)


def effect_difference_ci(rows_a, rows_b, region: str, n_boot: int, seed: int,
                         cond_a: str = "ambiguous", cond_b: str = "unambiguous"):
    """Bootstrap CI (over items, paired across pipelines) for the difference of
    two garden-path effects computed from the same items."""
    sums_a, counts_a = _item_stats(rows_a, region, cond_a, cond_b)
    sums_b, counts_b = _item_stats(rows_b, region, cond_a, cond_b)
    if sums_a.shape != sums_b.shape:
        raise ComparisonError("pipelines cover different item sets")
    observed = _mean_diff(sums_a, counts_a) - _mean_diff(sums_b, counts_b)
    n_items = sums_a.shape[0]
    rng = np.random.default_rng(seed)
    diffs = np.empty(n_boot)
    for b in range(n_boot):
        draw = rng.integers(0, n_items, size=n_items)
        weights = np.bincount(draw, minlength=n_items).astype(float)
        diffs[b] = _mean_diff(sums_a, counts_a, weights) - _mean_diff(sums_b, counts_b, weights)
    ci_low, ci_high = np.percentile(diffs, [2.5, 97.5])
    return float(observed), float(ci_low), float(ci_high)


EXACT_PERM_LIMIT = 12


def permutation_test(sq_err_a, sq_err_b, n_perm: int, seed: int) -> float:
    """Two-sided paired sign-flip test on per-group aggregated squared errors.

    For up to EXACT_PERM_LIMIT groups the full 2^k flip set is enumerated and
    the p-value is exact (seed-independent); beyond that, n_perm Monte-Carlo
    flips with +1 smoothing in numerator and denominator.
    """
    if set(sq_err_a) != set(sq_err_b):
        raise ComparisonError("group ids differ between the two error maps")
    groups = sorted(sq_err_a)
    if not groups:
        raise ComparisonError("no groups to compare")
    d = np.asarray([sq_err_a[g] - sq_err_b[g] for g in groups], dtype=float)
    k = len(d)
    observed = abs(float(np.mean(d)))
    if k <= EXACT_PERM_LIMIT:
        hits = 0
        for signs in product((1.0, -1.0), repeat=k):
            if abs(float(np.mean(d * np.asarray(signs)))) >= observed:
                hits += 1
        return hits / 2 ** k
    rng = np.random.default_rng(seed)
    signs = rng.choice((1.0, -1.0), size=(n_perm, k))
    perm_means = np.abs((signs * d).mean(axis=1))
    return (1 + int(np.sum(perm_means >= observed))) / (n_perm + 1)
