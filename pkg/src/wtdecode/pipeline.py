"""End-to-end analyses: ΔLL comparisons and predicted-RT garden-path effects.

These functions tie ingest, decoding, and regress together; the CLI wraps them
thinly and tests drive them directly.
"""

from __future__ import annotations

from .decoding import score_from_records
from .errors import ValidationError
from .ingest import build_rows
from .regress import (
    PredRow,
    delta_ll,
    design_from_rows,
    effect_difference_ci,
    fit_ols,
    garden_path_effect,
    predict,
)

NOTES = (
    "fixed-effects reduction: random intercepts are approximated by optional "
    "one-hot indicator blocks, smooth terms by linear (optionally quadratic) "
    "columns; effects are condition-mean differences with item-bootstrap CIs"
)


def scores_from_records(records) -> dict:
    scores = {}
    for record in records:
        if record.sentence_id in scores:
            raise ValidationError(f"duplicate sentence id {record.sentence_id!r}")
        scores[record.sentence_id] = score_from_records(record)
    return scores


def _present_miss_columns(rows):
    return [c for c in ("miss_prev1", "miss_prev2")
            if any(getattr(r, c) != 0.0 for r in rows)]


def fit_summary(fit) -> dict:
    return {
        "coefficients": {name: fit.coef(name) for name in fit.column_names},
        "intercept": fit.intercept,
        "sigma2": fit.sigma2,
        "sigma2_unbiased": fit.sigma2_unbiased,
        "loglik": fit.loglik,
        "n": fit.n,
        "p": fit.p,
        "perfect_fit": fit.perfect_fit,
    }


def delta_ll_analysis(scores, rt_rows, variants=("wl", "wt"), transform="log",
                      base_predictors=("length", "index"), spillover=False,
                      groups=(), predictor_rows=None) -> dict:
    """Fit baseline vs +surprisal regressions per variant and report ΔLL."""
    result = {"variants": {}, "notes": NOTES, "transform": transform}
    for variant in variants:
        rows = build_rows(scores, rt_rows, variant=variant, transform=transform,
                          predictor_rows=predictor_rows)
        full_predictors = list(base_predictors) + ["surp"]
        if spillover:
            full_predictors += ["surp_prev1", "surp_prev2"]
            full_predictors += _present_miss_columns(rows)
        base_fit = fit_ols(design_from_rows(rows, list(base_predictors), groups=groups))
        full_fit = fit_ols(design_from_rows(rows, full_predictors, groups=groups))
        result["variants"][variant] = {
            "n": base_fit.n,
            "ll_base": base_fit.loglik,
            "ll_full": full_fit.loglik,
            "delta_ll": delta_ll(base_fit, full_fit),
            "fit": fit_summary(full_fit),
        }
    if {"wl", "wt"} <= set(result["variants"]):
        result["delta_ll_wt_minus_wl"] = (
            result["variants"]["wt"]["delta_ll"] - result["variants"]["wl"]["delta_ll"]
        )
    return result


GP_PREDICTORS = ("surp", "surp_prev1", "surp_prev2", "length",
                 "freq", "freq_prev1", "freq_prev2", "index")


def gp_predicted_rows(filler_scores, filler_rt_filtered, gp_scores, gp_rt, variant,
                      filler_predictor_rows=None):
    """Fit the filler linking regression and predict RTs for the garden-path rows.

    Returns (fit, list[PredRow]) where PredRows carry condition/region/item
    labels from the RT rows.
    """
    rows = build_rows(filler_scores, filler_rt_filtered, variant=variant,
                      transform="identity", predictor_rows=filler_predictor_rows)
    predictors = list(GP_PREDICTORS) + _present_miss_columns(rows)
    fit = fit_ols(design_from_rows(rows, predictors))
    gp_rows = build_rows(gp_scores, gp_rt, variant=variant, transform="identity",
                         predictor_rows=gp_rt)
    gp_dm = design_from_rows(gp_rows, predictors, with_response=False)
    preds = predict(fit, gp_dm)
    pred_rows = [
        PredRow(pred=float(p), condition=row.condition or "", region=row.region or "",
                item=row.item, subject=row.subject)
        for p, row in zip(preds, gp_rows)
    ]
    return fit, pred_rows


def gp_effect_analysis(filler_records, filler_rt_filtered, gp_records, gp_rt,
                       regions, n_boot, seed, variants=("wl", "wt"),
                       filler_predictor_rows=None) -> dict:
    filler_scores = scores_from_records(filler_records)
    gp_scores = scores_from_records(gp_records)
    result = {"variants": {}, "notes": NOTES}
    pred_rows_by_variant = {}
    for variant in variants:
        fit, pred_rows = gp_predicted_rows(
            filler_scores, filler_rt_filtered, gp_scores, gp_rt, variant,
            filler_predictor_rows=filler_predictor_rows,
        )
        pred_rows_by_variant[variant] = pred_rows
        effects = {}
        for region in regions:
            est = garden_path_effect(pred_rows, region, n_boot=n_boot, seed=seed)
            effects[region] = {
                "effect": est.effect, "ci_low": est.ci_low, "ci_high": est.ci_high,
                "n_boot": est.n_boot,
            }
        result["variants"][variant] = {"fit": fit_summary(fit), "effects": effects}
    if {"wl", "wt"} <= set(pred_rows_by_variant):
        diffs = {}
        for region in regions:
            observed, lo, hi = effect_difference_ci(
                pred_rows_by_variant["wt"], pred_rows_by_variant["wl"], region,
                n_boot=n_boot, seed=seed,
            )
            diffs[region] = {"wt_minus_wl": observed, "ci_low": lo, "ci_high": hi}
        result["wt_minus_wl"] = diffs
    result["_pred_rows"] = pred_rows_by_variant
    return result
