"""Pure-Python word-space enumeration kernel.

Mirrors _enum_cy.walk_words operation for operation (same traversal order,
same floating-point evaluation order) so the two backends produce bit-identical
results; this one is the fallback when the compiled extension is unavailable.
"""

from math import exp


def walk_words(logp, trans, b_logmass, root, b_ids, i_ids, max_tokens,
               compute_wt, per_depth_wl, per_depth_wt,
               collect, out_wl, out_wt, out_len, out_toks):
    """Depth-first enumeration of every B I^(n-1) token shape up to max_tokens.

    Visits words in (depth-lexicographic) DFS preorder and accumulates
    per-depth probability mass; when `collect` is set, also writes each word's
    log-probabilities, length, and token ids into the out_* buffers.
    """
    root_bm = b_logmass[root]
    n_b = len(b_ids)
    n_i = len(i_ids)

    state_stack = [0] * (max_tokens + 1)
    log_stack = [0.0] * (max_tokens + 1)
    idx_stack = [0] * (max_tokens + 1)
    tok_stack = [0] * max_tokens
    state_stack[0] = root
    log_stack[0] = 0.0

    w = 0  # next word slot
    t = 0  # next token-buffer slot
    d = 1
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
