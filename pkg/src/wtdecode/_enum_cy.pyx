# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled word-space enumeration kernel; see _enum_py for the reference loop."""

import numpy as np

from libc.math cimport exp


def walk_words(double[:, ::1] logp, int[:, ::1] trans, double[::1] b_logmass,
               int root, int[::1] b_ids, int[::1] i_ids, int max_tokens,
               bint compute_wt, double[::1] per_depth_wl, double[::1] per_depth_wt,
               bint collect, double[::1] out_wl, double[::1] out_wt,
               int[::1] out_len, int[::1] out_toks):
    cdef double root_bm = b_logmass[root]
    cdef Py_ssize_t n_b = b_ids.shape[0]
    cdef Py_ssize_t n_i = i_ids.shape[0]

    cdef int[::1] state_stack = np.zeros(max_tokens + 1, dtype=np.int32)
    cdef double[::1] log_stack = np.zeros(max_tokens + 1, dtype=np.float64)
    cdef long[::1] idx_stack = np.zeros(max_tokens + 1, dtype=np.int64)
    cdef int[::1] tok_stack = np.zeros(max_tokens, dtype=np.int32)
    state_stack[0] = root
    log_stack[0] = 0.0

    cdef Py_ssize_t w = 0, t = 0, i, j, n_ids
    cdef int d = 1
    cdef int tok, s, ns
    cdef double lw, lwt
    idx_stack[1] = 0
    while d >= 1:
        n_ids = n_b if d == 1 else n_i
        i = idx_stack[d]
        if i >= n_ids:
            d -= 1
            if d >= 1:
                idx_stack[d] += 1
            continue
        tok = b_ids[i] if d == 1 else i_ids[i]
        s = state_stack[d - 1]
        lw = log_stack[d - 1] + logp[s, tok]
        ns = trans[s, tok]
        tok_stack[d - 1] = tok

        per_depth_wl[d - 1] += exp(lw)
        if compute_wt:
            lwt = lw + b_logmass[ns] - root_bm
            per_depth_wt[d - 1] += exp(lwt)
        else:
            lwt = 0.0
        if collect:
            out_wl[w] = lw
            out_wt[w] = lwt
            out_len[w] = d
            for j in range(d):
                out_toks[t + j] = tok_stack[j]
            t += d
            w += 1

        if d < max_tokens:
            state_stack[d] = ns
            log_stack[d] = lw
            d += 1
            idx_stack[d] = 0
        else:
            idx_stack[d] += 1
    return w
