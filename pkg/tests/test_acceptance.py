"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines.
"""

import itertools
import math
import re
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from wtdecode.decoding import score_sentence, wt_word_logprob
from wtdecode.ingest import filter_rt
from wtdecode.normcheck import enumerate_words, p_omega_partial
from wtdecode.pipeline import delta_ll_analysis, gp_effect_analysis
from wtdecode.probsource import garden_table, nonmono_table
from wtdecode.regress import (
    delta_ll,
    design_from_rows,
    fit_ols,
    permutation_test,
)
from wtdecode.synthdata import direction_corpus, garden_path_corpus
from wtdecode.vocab import segment_words

from randmodels import make_random_models
from test_regress import dm


@contextmanager
def criterion(name):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL  {name}")
        raise
    print(f"PASS  {name}  ({time.perf_counter() - start:.2f}s)")


def test_theorem1_witness_via_cli():
    with criterion("theorem-1: WL word mass reaches exactly 2.0 at depth 2 (<1s)"):
        argv = [sys.executable, "-m", "wtdecode.cli", "check-omega", "--witness"]
        subprocess.run(argv, capture_output=True)  # warm interpreter/import caches
        start = time.perf_counter()
        result = subprocess.run(argv, capture_output=True, text=True)
        elapsed = time.perf_counter() - start
        assert result.returncode == 0
        match = re.search(r"^total=(\S+)$", result.stdout, re.MULTILINE)
        assert match, result.stdout
        assert float(match.group(1)) == 2.0
        assert elapsed < 1.0, f"witness took {elapsed:.2f}s"


def test_theorem2_garden_table_masses():
    with criterion("theorem-2: WT mass -> 1 (depth 200, 1e-9; terms 1e-12), WL diverges (<5s)"):
        start = time.perf_counter()
        model = garden_table()

        wt = p_omega_partial(model, (), max_tokens=200, mode="WT")
        assert abs(wt.cumulative - 1.0) < 1e-9
        for n, mass in wt.per_depth:
            # independent oracle: geometric series term 0.1 * 0.9^(n-1)
            assert abs(mass - 0.1 * 0.9 ** (n - 1)) < 1e-12

        wl2 = p_omega_partial(model, (), max_tokens=2, mode="WL")
        assert wl2.cumulative >= 1.71
        wl50 = p_omega_partial(model, (), max_tokens=50, mode="WL")
        assert wl50.cumulative > 8.9
        assert wl50.cumulative < 9.0  # partial sums approach 0.9 / (1 - 0.9)

        assert time.perf_counter() - start < 5.0


def test_telescoping_property():
    with criterion("telescoping: sum(WT)-sum(WL) = final-initial boundary mass "
                   "(1000 random models, 1e-9, zero failures)"):
        failures = 0
        for rng, model in make_random_models(seed=511, count=1000):
            n_words = int(rng.integers(1, 9))
            tokens = []
            for k in range(n_words):
                tokens.append(int(rng.choice(model.vocab.b_ids)))
                for _ in range(int(rng.integers(0, 3))):
                    tokens.append(int(rng.choice(model.vocab.i_ids)))
            score = score_sentence(model, segment_words(tokens, model.vocab))
            lhs = score.logprob_sum("wt") - score.logprob_sum("wl")
            rhs = score.final_b_logmass - score.initial_b_logmass
            if abs(lhs - rhs) > 1e-9:
                failures += 1
        assert failures == 0


def test_monotonicity_contrast():
    with criterion("monotonicity: WL never grows with word-internal extensions "
                   "(100 models, depth 6); WT reversal witness 0.855 > 0.1"):
        for _, model in make_random_models(seed=77, count=100):
            words = enumerate_words(model, (), max_tokens=6)
            wl_by_tokens = {surf: wl for surf, wl, _ in words}
            i_surfaces = [model.vocab.surface_of(t) for t in model.vocab.i_ids]
            for surf, wl, _ in words:
                for i_surface in i_surfaces:
                    ext = surf + (i_surface,)
                    if ext in wl_by_tokens:
                        assert wl_by_tokens[ext] <= wl + 1e-15

        witness = nonmono_table()
        short = math.exp(wt_word_logprob(witness, (), (0,)))
        longer = math.exp(wt_word_logprob(witness, (), (0, 1)))
        assert abs(short - 0.1) < 1e-12
        assert abs(longer - 0.855) < 1e-12
        assert longer > short


def test_regression_engine():
    with criterion("regression: planted recovery 0.02; nested dLL >= 0 x1000; "
                   "closed form 1e-8; exact permutation <= 12 groups"):
        rng = np.random.default_rng(20240505)
        n = 1000
        x1, x2 = rng.normal(size=n), rng.normal(size=n)
        y = 1.0 + 0.5 * x1 - 2.0 * x2 + rng.normal(0.0, 0.1, size=n)
        fit = fit_ols(dm(np.column_stack([x1, x2]), y, names=["x1", "x2"]))
        assert abs(fit.intercept - 1.0) < 0.02
        assert abs(fit.coef("x1") - 0.5) < 0.02
        assert abs(fit.coef("x2") + 2.0) < 0.02

        for _ in range(1000):
            m = int(rng.integers(10, 30))
            X = rng.normal(size=(m, 3))
            yy = rng.normal(size=m)
            base = fit_ols(dm(X[:, :2], yy, names=["a", "b"]))
            full = fit_ols(dm(X, yy, names=["a", "b", "c"]))
            d = delta_ll(base, full)
            assert d >= -1e-9
            assert abs(d - m / 2 * math.log(base.sigma2 / full.sigma2)) < 1e-8

        for k in (4, 8, 12):
            diffs = rng.normal(0.4, 1.0, size=k)
            a = {f"g{j}": float(diffs[j]) for j in range(k)}
            b = {f"g{j}": 0.0 for j in range(k)}
            observed = abs(float(np.mean(diffs)))
            hits = sum(
                1 for signs in itertools.product((1.0, -1.0), repeat=k)
                if abs(float(np.mean(diffs * np.asarray(signs)))) >= observed
            )
            assert permutation_test(a, b, n_perm=200, seed=1) == hits / 2 ** k


def test_garden_path_mechanism():
    with criterion("garden-path mechanism: WT shrinks spillover-region effects, "
                   "critical effect unchanged within bootstrap CI (<30s)"):
        start = time.perf_counter()
        corpus = garden_path_corpus(seed=0)
        kept = filter_rt(corpus.filler_rt, "spr")
        result = gp_effect_analysis(
            corpus.filler_records, kept, corpus.gp_records, corpus.gp_rt,
            regions=("critical", "spill1", "spill2"), n_boot=2000, seed=42,
            filler_predictor_rows=corpus.filler_rt,
        )
        wl = result["variants"]["wl"]["effects"]
        wt = result["variants"]["wt"]["effects"]
        assert wt["spill1"]["effect"] < wl["spill1"]["effect"]
        assert wt["spill2"]["effect"] < wl["spill2"]["effect"]
        # unchanged at the critical region: each estimate inside the other's CI
        assert wl["critical"]["ci_low"] <= wt["critical"]["effect"] <= wl["critical"]["ci_high"]
        assert wt["critical"]["ci_low"] <= wl["critical"]["effect"] <= wt["critical"]["ci_high"]
        assert time.perf_counter() - start < 30.0


def test_delta_ll_direction_harness():
    with criterion("dLL direction: WL-generated responses favor WL, WT-generated "
                   "flip the sign of dLL_WT - dLL_WL"):
        corpus = direction_corpus(seed=0)
        signs = {}
        for gen in ("wl", "wt"):
            res = delta_ll_analysis(corpus.scores, corpus.rt_by_variant[gen],
                                    transform="identity")
            assert res["variants"]["wl"]["delta_ll"] > 0
            assert res["variants"]["wt"]["delta_ll"] > 0
            signs[gen] = res["delta_ll_wt_minus_wl"]
        assert signs["wl"] < 0
        assert signs["wt"] > 0
