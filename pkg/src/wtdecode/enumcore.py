"""Backend selection and state-machine materialization for word enumeration.

The compiled kernel (_enum_cy) is preferred; the pure-Python twin (_enum_py)
is selected at import time when the extension is missing. Both expose the same
walk_words signature and produce bit-identical output.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

try:
    from . import _enum_cy as _impl

    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _enum_py as _impl

    BACKEND = "python"

from . import _enum_py as _pyimpl


def word_counts(n_b: int, n_i: int, max_tokens: int) -> tuple[int, int]:
    """Exact (word count, token count) of the enumeration up to max_tokens."""
    words = 0
    tokens = 0
    level = n_b
    for depth in range(1, max_tokens + 1):
        words += level
        tokens += depth * level
        level *= n_i
    return words, tokens


class StateMachine:
    """Dense arrays describing a model's reachable truncated-context states."""

    def __init__(self, model, ctx_ids):
        vocab = model.vocab
        self.vocab = vocab
        self.b_ids = np.asarray(vocab.b_ids, dtype=np.int32)
        self.i_ids = np.asarray(vocab.i_ids, dtype=np.int32)
        n_tokens = len(vocab)

        root_key = model.context_key(tuple(ctx_ids))
        keys = [root_key]
        key_to_id = {root_key: 0}
        trans_rows: list[np.ndarray] = []
        pending = [0]
        while pending:
            sid = pending.pop(0)
            key = keys[sid]
            row = np.full(n_tokens, -1, dtype=np.int32)
            # Word continuations are class I; class-B steps only ever leave the
            # root state, so other states skip them.
            token_iter = range(n_tokens) if sid == 0 else vocab.i_ids
            for tok in token_iter:
                nk = model.context_key(key + (tok,))
                nid = key_to_id.get(nk)
                if nid is None:
                    nid = key_to_id[nk] = len(keys)
                    keys.append(nk)
                    pending.append(nid)
                row[tok] = nid
            while len(trans_rows) <= sid:
                trans_rows.append(None)
            trans_rows[sid] = row

        n_states = len(keys)
        self.trans = np.empty((n_states, n_tokens), dtype=np.int32)
        self.logp = np.empty((n_states, n_tokens), dtype=np.float64)
        self.b_logmass = np.empty(n_states, dtype=np.float64)
        b_list = list(vocab.b_ids)
        for sid, key in enumerate(keys):
            self.trans[sid] = trans_rows[sid] if trans_rows[sid] is not None else -1
            row = model.next_logdist(key)
            self.logp[sid] = row
            self.b_logmass[sid] = logsumexp(row[b_list])
        self.root = 0

    @property
    def root_b_logmass(self) -> float:
        return float(self.b_logmass[self.root])


_DUMMY_F = np.zeros(1, dtype=np.float64)
_DUMMY_I = np.zeros(1, dtype=np.int32)


def run_walk(sm: StateMachine, max_tokens: int, compute_wt: bool, collect: bool,
             backend=None):
    """Run the enumeration kernel over a materialized state machine.

    Returns (per_depth_wl, per_depth_wt, words) where words is None unless
    collect is set, in which case it is (wl_logs, wt_logs, lengths, tokens_flat).
    """
    impl = {"cython": _impl, "python": _pyimpl, None: _impl}[backend]
    per_wl = np.zeros(max_tokens, dtype=np.float64)
    per_wt = np.zeros(max_tokens, dtype=np.float64)
    if collect:
        n_words, n_toks = word_counts(len(sm.b_ids), len(sm.i_ids), max_tokens)
        out_wl = np.empty(n_words, dtype=np.float64)
        out_wt = np.empty(n_words, dtype=np.float64)
        out_len = np.empty(n_words, dtype=np.int32)
        out_toks = np.empty(n_toks, dtype=np.int32)
    else:
        out_wl = out_wt = _DUMMY_F
        out_len = out_toks = _DUMMY_I
    written = impl.walk_words(
        sm.logp, sm.trans, sm.b_logmass, sm.root, sm.b_ids, sm.i_ids,
        max_tokens, compute_wt, per_wl, per_wt,
        collect, out_wl, out_wt, out_len, out_toks,
    )
    if collect:
        assert written == len(out_wl)
        return per_wl, per_wt, (out_wl, out_wt, out_len, out_toks)
    return per_wl, per_wt, None
