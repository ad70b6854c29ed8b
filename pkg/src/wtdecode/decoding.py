"""Word log-probabilities under whitespace-leading (WL) and whitespace-trailing (WT) decoding.

WL multiplies the chain-rule factors of a word's tokens, leading whitespace
included. WT rescales that product by the ratio of the boundary-token mass
after the word to the boundary-token mass before it, reallocating the
probability of each word's leading whitespace to the previous word. Natural
logs everywhere internally; bits only at the surprisal boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import RescalingError
from .vocab import Segmentation, spans_from_flags

LN2 = math.log(2.0)
# Slack for float noise in log-space sums; matches the reduced-precision
# allowance on validated records (member vs marginal within 1e-6).
_POS_TOL = 1e-6

WHITESPACE_MARKERS = ("▁", "Ġ")  # "▁" (sentencepiece), "Ġ" (byte-level BPE)


def surprisal_bits(logprob: float) -> float:
    """Convert a natural-log probability to surprisal in bits."""
    if logprob > _POS_TOL:
        raise ValueError(f"logprob must be <= 0, got {logprob!r}")
    return -logprob / LN2


@dataclass(frozen=True)
class ScoredWord:
    surface: str
    span: tuple[int, int]
    wl_logprob: float
    wt_logprob: float
    wl_surprisal: float
    wt_surprisal: float

    @classmethod
    def build(cls, surface, span, wl_logprob, wt_logprob) -> "ScoredWord":
        return cls(surface, span, wl_logprob, wt_logprob,
                   surprisal_bits(wl_logprob), surprisal_bits(wt_logprob))


@dataclass(frozen=True)
class SentenceScore:
    """Per-word scores plus the boundary masses at the sentence edges."""

    words: tuple[ScoredWord, ...]
    initial_b_logmass: float
    final_b_logmass: float

    def logprob_sum(self, variant: str) -> float:
        if variant == "wl":
            return sum(w.wl_logprob for w in self.words)
        if variant == "wt":
            return sum(w.wt_logprob for w in self.words)
        raise ValueError(f"variant must be 'wl' or 'wt', got {variant!r}")


def wl_word_logprob(model, ctx, word_ids) -> float:
    """Chain-rule log probability of the word's tokens given the context."""
    ctx = list(ctx)
    total = 0.0
    for tok in word_ids:
        total += float(model.next_logdist(ctx)[tok])
        ctx.append(tok)
    return total


def wt_word_logprob(model, ctx, word_ids) -> float:
    """Trailing-whitespace log probability: the WL product rescaled by the
    boundary-mass ratio after/before the word."""
    ctx = tuple(ctx)
    before = model.b_logmass(ctx)
    if before == -math.inf:
        raise RescalingError(
            f"boundary mass is zero in context {ctx!r}; no word can start here"
        )
    after = model.b_logmass(ctx + tuple(word_ids))
    return wl_word_logprob(model, ctx, word_ids) + after - before


def word_surface(token_surfaces) -> str:
    """Human-facing word form: marker characters become spaces, edges trimmed."""
    joined = "".join(token_surfaces)
    for marker in WHITESPACE_MARKERS:
        joined = joined.replace(marker, " ")
    return joined.strip()


def score_sentence(model, seg: Segmentation) -> SentenceScore:
    """Score every word of a segmented sentence under both decodings.

    Contexts accumulate left to right over tokens; each word's WT denominator
    is the boundary mass before its first token (the empty context for the
    sequence-initial word).
    """
    tokens = seg.token_ids
    boundaries = [0] + [end for _, end in seg.spans]
    b_logmasses = [model.b_logmass(tokens[:pos]) for pos in boundaries]
    words = []
    for idx, (start, end) in enumerate(seg.spans):
        if b_logmasses[idx] == -math.inf:
            raise RescalingError(
                f"boundary mass is zero before token {start}; "
                f"WT rescaling undefined for word {idx}"
            )
        wl = wl_word_logprob(model, tokens[:start], tokens[start:end])
        wt = wl + b_logmasses[idx + 1] - b_logmasses[idx]
        surface = word_surface(model.vocab.decode(tokens[start:end]))
        words.append(ScoredWord.build(surface, (start, end), wl, wt))
    return SentenceScore(tuple(words), b_logmasses[0], b_logmasses[-1])


def record_from_model(model, token_ids, sentence_id: str):
    """Export a LogprobRecord for a token sequence under a live model.

    score_from_records on the result reproduces score_sentence bit-exactly,
    which is the cross-oracle check tying the file-backed path to the live one.
    """
    from .ingest import LogprobRecord, TokenLogprob

    token_ids = tuple(token_ids)
    vocab = model.vocab
    tokens = []
    for i, tok in enumerate(token_ids):
        lp = float(model.next_logdist(token_ids[:i])[tok])
        tokens.append(TokenLogprob(vocab.surface_of(tok), lp, vocab.is_b(tok)))
    bm = tuple(model.b_logmass(token_ids[:i]) for i in range(len(token_ids) + 1))
    return LogprobRecord(sentence_id, tuple(tokens), bm).validate()


def score_from_records(record) -> SentenceScore:
    """Same arithmetic as score_sentence, but reading token log probabilities
    and boundary masses from a validated LogprobRecord."""
    record.validate()
    surfaces = [t.surface for t in record.tokens]
    lps = [t.logp for t in record.tokens]
    bm = record.b_mass_logps
    spans = spans_from_flags([t.is_b for t in record.tokens])
    words = []
    for idx, (start, end) in enumerate(spans):
        if bm[start] == -math.inf:
            raise RescalingError(
                f"record {record.sentence_id}: zero boundary mass before token {start}"
            )
        wl = sum(lps[start:end])
        wt = wl + bm[end] - bm[start]
        words.append(ScoredWord.build(word_surface(surfaces[start:end]), (start, end), wl, wt))
    return SentenceScore(tuple(words), bm[0], bm[-1])
