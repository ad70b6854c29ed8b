"""Brute-force checks of word-probability normalization over the word sample space.

The word sample space is every token sequence of shape "one class-B token then
zero or more class-I tokens". Summing WL word probabilities over it can exceed
one; summing WT word probabilities approaches one from below. Enumeration is
exact, never sampled, so the reported masses carry deterministic tolerances,
and reports include a geometric tail bound q^depth whenever the model can
certify q, its maximum I-continuation probability.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .enumcore import BACKEND, StateMachine, run_walk, word_counts
from .errors import EnumerationBudgetError, InvariantError, RescalingError, ValidationError
from .probsource import theorem1_table

ENUM_BUDGET = 10_000_000
WT_MASS_TOL = 1e-9

MODE_WL = "WL"
MODE_WT = "WT"


@dataclass(frozen=True)
class OmegaReport:
    """Per-depth and cumulative word-probability mass for one decoding mode."""

    mode: str
    context: tuple[str, ...]
    per_depth: tuple[tuple[int, float], ...]  # (word length in tokens, mass)
    cumulative: float
    q: float | None = None          # max I-continuation probability, if certified
    tail_bound: float | None = None  # q ** depth, WT mode only
    backend: str = BACKEND

    def __post_init__(self):
        # Masses are sums of exp() terms, so nonnegativity (and with it a
        # nondecreasing cumulative) must hold exactly.
        for _, mass in self.per_depth:
            if mass < 0:
                raise InvariantError(f"negative per-depth mass in report: {self.per_depth}")

    @property
    def depth(self) -> int:
        return len(self.per_depth)

    def cumulative_rows(self):
        running = 0.0
        for n, mass in self.per_depth:
            running += mass
            yield n, mass, running

    def to_text(self) -> str:
        lines = [
            f"mode={self.mode} context={' '.join(self.context) or '(empty)'} "
            f"depth={self.depth} backend={self.backend}",
            f"{'n':>5}  {'mass':>18}  {'cumulative':>18}",
        ]
        for n, mass, running in self.cumulative_rows():
            lines.append(f"{n:>5}  {mass:>18.12g}  {running:>18.12g}")
        lines.append(f"total={self.cumulative:.12g}")
        if self.tail_bound is not None:
            lines.append(f"tail_bound={self.tail_bound:.6g} (q={self.q:.6g})")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps({
            "mode": self.mode,
            "context": list(self.context),
            "per_depth": [{"n": n, "mass": m, "cumulative": c}
                          for n, m, c in self.cumulative_rows()],
            "cumulative": self.cumulative,
            "q": self.q,
            "tail_bound": self.tail_bound,
            "backend": self.backend,
        })


def _check_budget(model, max_tokens: int) -> None:
    if max_tokens < 1:
        raise ValidationError(f"max_tokens must be >= 1, got {max_tokens}")
    words, _ = word_counts(len(model.vocab.b_ids), len(model.vocab.i_ids), max_tokens)
    if words > ENUM_BUDGET:
        raise EnumerationBudgetError(
            f"enumeration would visit {words} words, over the {ENUM_BUDGET} budget"
        )


def enumerate_words(model, ctx=(), max_tokens: int = 4):
    """All words of up to max_tokens tokens with their WL and WT probabilities.

    Returns a list of (token surface tuple, wl_prob, wt_prob) in
    depth-then-lexicographic order.
    """
    _check_budget(model, max_tokens)
    ctx = tuple(ctx)
    sm = StateMachine(model, ctx)
    if sm.root_b_logmass == -math.inf:
        raise RescalingError(f"boundary mass is zero in context {ctx!r}")
    _, _, collected = run_walk(sm, max_tokens, compute_wt=True, collect=True)
    wl_logs, wt_logs, lengths, toks = collected
    out = []
    pos = 0
    for w in range(len(wl_logs)):
        n = int(lengths[w])
        surfaces = model.vocab.decode(toks[pos:pos + n])
        pos += n
        out.append((surfaces, float(np.exp(wl_logs[w])), float(np.exp(wt_logs[w]))))
    return out


def p_omega_partial(model, ctx=(), max_tokens: int = 4, mode: str = MODE_WT) -> OmegaReport:
    """Cumulative word mass over the sample space, truncated at max_tokens."""
    mode = mode.upper()
    if mode not in (MODE_WL, MODE_WT):
        raise ValidationError(f"mode must be WL or WT, got {mode!r}")
    _check_budget(model, max_tokens)
    ctx = tuple(ctx)
    sm = StateMachine(model, ctx)
    compute_wt = mode == MODE_WT
    if compute_wt and sm.root_b_logmass == -math.inf:
        raise RescalingError(f"boundary mass is zero in context {ctx!r}")
    per_wl, per_wt, _ = run_walk(sm, max_tokens, compute_wt=compute_wt, collect=False)
    masses = per_wt if compute_wt else per_wl
    q = model.max_i_mass()
    tail = None
    if compute_wt and q is not None and q < 1.0:
        tail = q ** max_tokens
    return OmegaReport(
        mode=mode,
        context=model.vocab.decode(ctx),
        per_depth=tuple((n + 1, float(masses[n])) for n in range(max_tokens)),
        cumulative=float(sum(masses.tolist())),
        q=q,
        tail_bound=tail,
    )


def theorem1_witness() -> OmegaReport:
    """WL mass of the degenerate two-token table: exactly 2.0 by depth 2."""
    return p_omega_partial(theorem1_table(), (), max_tokens=2, mode=MODE_WL)


def check_wt_bound(report: OmegaReport) -> None:
    """Raise if a WT report exceeds the axiomatic bound (an implementation bug)."""
    if report.mode != MODE_WT:
        return
    if report.cumulative > 1.0 + WT_MASS_TOL:
        raise InvariantError(
            f"WT cumulative mass {report.cumulative!r} exceeds 1 + {WT_MASS_TOL}"
        )
    if report.tail_bound is not None and abs(report.cumulative - 1.0) > report.tail_bound + WT_MASS_TOL:
        raise InvariantError(
            f"WT cumulative mass {report.cumulative!r} misses 1 by more than the "
            f"certified tail bound {report.tail_bound!r}"
        )
