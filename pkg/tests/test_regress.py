import itertools
import math

import numpy as np
import pytest

from wtdecode.errors import ComparisonError, EstimationError, SingularDesignError, ValidationError
from wtdecode.ingest import RegressionRow
from wtdecode.regress import (
    DesignMatrix,
    PredRow,
    delta_ll,
    design_from_rows,
    effect_difference_ci,
    fit_ols,
    garden_path_effect,
    permutation_test,
    predict,
)


def dm(X, y, names=None):
    X = np.asarray(X, dtype=float)
    names = tuple(names or [f"x{k}" for k in range(X.shape[1])])
    return DesignMatrix(names, X, np.asarray(y, dtype=float) if y is not None else None)


def test_noiseless_line_is_perfect_fit():
    x = np.linspace(0, 1, 40)
    fit = fit_ols(dm(x[:, None], 3 + 2 * x))
    assert fit.perfect_fit
    assert fit.loglik is None
    assert fit.intercept == pytest.approx(3.0, abs=1e-9)
    assert fit.coefficients[0] == pytest.approx(2.0, abs=1e-9)


def test_constant_response():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 2))
    fit = fit_ols(dm(X, np.full(30, 5.5)))
    assert fit.intercept == pytest.approx(5.5, abs=1e-9)
    assert np.allclose(fit.coefficients, 0.0, atol=1e-9)


def test_planted_coefficients_recovered():
    rng = np.random.default_rng(12345)
    n = 1000
    x1 = rng.normal(size=n)
    x2 = rng.normal(size=n)
    y = 1.0 + 0.5 * x1 - 2.0 * x2 + rng.normal(0, 0.1, size=n)
    fit = fit_ols(dm(np.column_stack([x1, x2]), y, names=["x1", "x2"]))
    assert fit.intercept == pytest.approx(1.0, abs=0.02)
    assert fit.coef("x1") == pytest.approx(0.5, abs=0.02)
    assert fit.coef("x2") == pytest.approx(-2.0, abs=0.02)


def test_residual_orthogonality():
    rng = np.random.default_rng(7)
    for _ in range(10):
        X = rng.normal(size=(60, 3))
        y = rng.normal(size=60)
        fit = fit_ols(dm(X, y))
        resid = y - predict(fit, dm(X, None))
        bound = 1e-8 * np.linalg.norm(X) * np.linalg.norm(y)
        assert np.all(np.abs(X.T @ resid) < bound)


def test_rank_deficiency_names_columns():
    rng = np.random.default_rng(11)
    x = rng.normal(size=50)
    X = np.column_stack([x, 2 * x])
    with pytest.raises(SingularDesignError) as err:
        fit_ols(dm(X, rng.normal(size=50), names=["a", "a_doubled"]))
    assert any("a" in c for c in err.value.columns)


def test_design_rejects_bad_input():
    with pytest.raises(ValidationError, match="non-finite"):
        dm([[1.0], [np.inf]], [1.0, 2.0])
    with pytest.raises(ValidationError, match="more rows"):
        dm([[1.0, 2.0]], [1.0])


def test_delta_ll_identical_fits_is_zero():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(40, 2))
    y = rng.normal(size=40)
    fit = fit_ols(dm(X, y))
    assert delta_ll(fit, fit) == pytest.approx(0.0, abs=1e-9)


def test_delta_ll_nested_nonnegative_random_designs():
    rng = np.random.default_rng(99)
    for _ in range(200):
        n = int(rng.integers(12, 40))
        X = rng.normal(size=(n, 3))
        y = rng.normal(size=n)
        base = fit_ols(dm(X[:, :2], y, names=["a", "b"]))
        full = fit_ols(dm(X, y, names=["a", "b", "c"]))
        assert delta_ll(base, full) >= -1e-9


def test_delta_ll_closed_form_identity():
    rng = np.random.default_rng(5)
    n = 500
    X = rng.normal(size=(n, 2))
    y = 2.0 + 1.0 * X[:, 0] + 0.3 * X[:, 1] + rng.normal(0, 0.5, size=n)
    base = fit_ols(dm(X[:, :1], y, names=["a"]))
    full = fit_ols(dm(X, y, names=["a", "b"]))
    d = delta_ll(base, full)
    assert d > 0
    assert d == pytest.approx(n / 2 * math.log(base.sigma2 / full.sigma2), abs=1e-8)


def test_delta_ll_preconditions():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(40, 2))
    y = rng.normal(size=40)
    y2 = rng.normal(size=40)
    fit_a = fit_ols(dm(X, y, names=["a", "b"]))
    with pytest.raises(ComparisonError, match="row counts"):
        delta_ll(fit_a, fit_ols(dm(X[:30], y[:30], names=["a", "b"])))
    with pytest.raises(ComparisonError, match="same response"):
        delta_ll(fit_a, fit_ols(dm(X, y2, names=["a", "b"])))
    with pytest.raises(ComparisonError, match="not nested"):
        delta_ll(fit_ols(dm(X[:, :1], y, names=["z"])), fit_a)

    x = np.linspace(0, 1, 40)
    y_line = 1 + x
    perfect_base = fit_ols(dm(x[:, None], y_line, names=["a"]))
    perfect_full = fit_ols(dm(np.column_stack([x, x ** 2]), y_line, names=["a", "b"]))
    with pytest.raises(ComparisonError, match="perfect"):
        delta_ll(perfect_base, perfect_full)


def test_predict_identity_and_intercept():
    rng = np.random.default_rng(8)
    x = rng.normal(size=30)
    y = 4.0 - 1.5 * x
    fit = fit_ols(dm(x[:, None], y, names=["x"]))
    assert np.allclose(predict(fit, dm(x[:, None], None, names=["x"])), y, atol=1e-9)
    assert predict(fit, dm([[0.0]], None, names=["x"]))[0] == pytest.approx(fit.intercept)
    with pytest.raises(ComparisonError, match="do not match"):
        predict(fit, dm(x[:, None], None, names=["other"]))


def regression_row(**kw):
    base = dict(response=1.0, surp=1.0, surp_prev1=0.0, surp_prev2=0.0, freq=0.0,
                freq_prev1=0.0, freq_prev2=0.0, length=3.0, index=1.0,
                miss_prev1=0.0, miss_prev2=0.0, subject="s1", item="i1",
                sentence_id="sent0", word_index=1, word="w")
    base.update(kw)
    return RegressionRow(**base)


def test_design_from_rows_features():
    rows = [regression_row(surp=float(k), length=float(k % 3 + 1),
                           subject=f"s{k % 2}", response=float(k)) for k in range(8)]
    d = design_from_rows(rows, ["surp", "length"], quadratic=["length"], groups=["subject"])
    assert d.names == ("surp", "length", "length^2", "subject=s1")
    assert d.X.shape == (8, 4)
    assert np.array_equal(d.X[:, 2], d.X[:, 1] ** 2)

    with pytest.raises(ValidationError, match="unknown predictor"):
        design_from_rows(rows, ["color"])
    with pytest.raises(ValidationError, match="requires the linear"):
        design_from_rows(rows, ["surp"], quadratic=["length"])
    with pytest.raises(ValidationError, match="missing"):
        design_from_rows([regression_row(slength=None)], ["slength"])


def test_design_supports_gpd_predictors():
    rows = [regression_row(slength=float(k % 4), pfix=float(k % 2), response=float(k),
                           surp=float(k) * 0.3, length=float(k % 5 + 1),
                           index=float(k % 7)) for k in range(12)]
    d = design_from_rows(rows, ["surp", "length", "index", "slength", "pfix"])
    assert d.names[-2:] == ("slength", "pfix")
    fit_ols(d)  # must be estimable


def test_imputation_constant_invariance_with_indicators():
    # rows imputed at sentence starts are exactly the indicator rows, so the
    # fitted likelihood cannot depend on the imputation constant
    rng = np.random.default_rng(21)
    rows_a, rows_b = [], []
    for k in range(60):
        start = k % 3 == 0
        surp_prev1 = 0.0 if start else float(rng.uniform(1, 5))
        resp = float(rng.normal(200, 5))
        common = dict(response=resp, surp=float(rng.uniform(1, 5)),
                      miss_prev1=1.0 if start else 0.0, word_index=0 if start else 1)
        rows_a.append(regression_row(surp_prev1=surp_prev1, **common))
        rows_b.append(regression_row(surp_prev1=9.0 if start else surp_prev1, **common))
    fit_a = fit_ols(design_from_rows(rows_a, ["surp", "surp_prev1", "miss_prev1"]))
    fit_b = fit_ols(design_from_rows(rows_b, ["surp", "surp_prev1", "miss_prev1"]))
    assert fit_a.loglik == pytest.approx(fit_b.loglik, abs=1e-8)
    assert fit_a.sigma2 == pytest.approx(fit_b.sigma2, rel=1e-10)


def pred_rows(diffs, base=300.0):
    rows = []
    for item, d in enumerate(diffs):
        for subject in ("s1", "s2"):
            rows.append(PredRow(base + d, "ambiguous", "critical", f"i{item}", subject))
            rows.append(PredRow(base, "unambiguous", "critical", f"i{item}", subject))
    return rows


def test_effect_zero_when_conditions_identical():
    est = garden_path_effect(pred_rows([0.0] * 6), "critical", n_boot=200, seed=0)
    assert est.effect == pytest.approx(0.0, abs=1e-12)
    assert est.ci_half_width == pytest.approx(0.0, abs=1e-12)


def test_effect_constant_shift_has_degenerate_bootstrap():
    est = garden_path_effect(pred_rows([7.0] * 6), "critical", n_boot=500, seed=1)
    assert est.effect == pytest.approx(7.0, abs=1e-12)
    assert est.ci_low == pytest.approx(7.0, abs=1e-12)
    assert est.ci_high == pytest.approx(7.0, abs=1e-12)


def test_effect_invariant_to_labels_and_order():
    rng = np.random.default_rng(17)
    rows = pred_rows(list(rng.uniform(2, 9, size=8)))
    est = garden_path_effect(rows, "critical", n_boot=300, seed=4)

    relabeled = [PredRow(r.pred, r.condition, r.region, r.item, r.subject + "_x")
                 for r in rows]
    assert garden_path_effect(relabeled, "critical", n_boot=300, seed=4) == \
        garden_path_effect(rows, "critical", n_boot=300, seed=4)

    shuffled = list(rows)
    rng.shuffle(shuffled)
    assert garden_path_effect(shuffled, "critical", n_boot=300, seed=4) == est


def test_effect_requires_both_conditions():
    rows = [PredRow(300.0, "ambiguous", "critical", "i0", "s1")]
    with pytest.raises(EstimationError, match="unambiguous"):
        garden_path_effect(rows, "critical", n_boot=10, seed=0)
    with pytest.raises(EstimationError, match="no rows in region"):
        garden_path_effect(rows, "spill9", n_boot=10, seed=0)


def test_effect_difference_ci_centers_on_zero_for_identical_pipelines():
    rng = np.random.default_rng(23)
    rows = pred_rows(list(rng.uniform(2, 9, size=8)))
    observed, lo, hi = effect_difference_ci(rows, rows, "critical", n_boot=200, seed=9)
    assert observed == 0.0 and lo == 0.0 and hi == 0.0


def exhaustive_signflip_p(d):
    """Brute-force oracle: share of sign assignments at least as extreme."""
    d = list(d)
    m0 = abs(sum(d) / len(d))
    hits = 0
    for signs in itertools.product([1, -1], repeat=len(d)):
        m = abs(sum(s * v for s, v in zip(signs, d)) / len(d))
        if m >= m0:
            hits += 1
    return hits / 2 ** len(d)


def test_permutation_identical_errors_give_p_one():
    errs = {f"g{k}": 1.5 for k in range(8)}
    assert permutation_test(errs, dict(errs), n_perm=100, seed=0) == 1.0


def test_permutation_same_sign_ten_groups():
    a = {f"g{k}": 10.0 + k for k in range(10)}
    b = {f"g{k}": 0.0 for k in range(10)}
    p = permutation_test(a, b, n_perm=10000, seed=0)
    assert p == pytest.approx(2 / 1024, abs=1e-12)  # exact path for <= 12 groups


def test_permutation_matches_exhaustive_oracle():
    rng = np.random.default_rng(41)
    for k in (3, 5, 9, 12):
        d = rng.normal(0.3, 1.0, size=k)
        a = {f"g{j}": float(d[j]) for j in range(k)}
        b = {f"g{j}": 0.0 for j in range(k)}
        assert permutation_test(a, b, n_perm=50, seed=7) == exhaustive_signflip_p(d)


def test_permutation_swap_symmetry():
    rng = np.random.default_rng(43)
    a = {f"g{j}": float(v) for j, v in enumerate(rng.normal(1, 1, size=9))}
    b = {f"g{j}": float(v) for j, v in enumerate(rng.normal(0, 1, size=9))}
    assert permutation_test(a, b, 100, seed=3) == permutation_test(b, a, 100, seed=3)


def test_permutation_monte_carlo_path():
    rng = np.random.default_rng(44)
    k = 20
    a = {f"g{j}": float(10 + rng.normal()) for j in range(k)}
    b = {f"g{j}": 0.0 for j in range(k)}
    n_perm = 20000
    p = permutation_test(a, b, n_perm=n_perm, seed=11)
    expected = 2 / 2 ** k
    assert p >= 1 / (n_perm + 1)  # +1 smoothing floor
    assert p <= expected + 3 * math.sqrt(expected / n_perm) + 1 / n_perm

    with pytest.raises(ComparisonError):
        permutation_test(a, {"other": 1.0}, 10, seed=0)
