"""Deterministic synthetic corpora for the two experiment harnesses.

garden_path_corpus builds filler sentences plus 24 item pairs of the
transitive/intransitive construction, engineered so that in the ambiguous
condition the critical word follows a boundary where the model strongly
expects a word-internal token (a comma), i.e. a low boundary mass. Reading
times for fillers are generated from a known linear model, so every downstream
quantity has a planted ground truth.

direction_corpus builds a small n-gram world whose reading times are generated
from one decoding variant's surprisals, for checking that the ΔLL harness
recovers which variant generated them.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass

import numpy as np

from .ingest import LogprobRecord, RTRow, TokenLogprob
from .probsource import train_ngram
from .vocab import Vocabulary, segment_words

LN2 = math.log(2.0)

FILLER_COEFS = {
    "intercept": 300.0,
    "surp": 3.0,
    "surp_prev1": 3.0,   # equals surp so the critical-region effect is WT-invariant
    "surp_prev2": 1.5,   # < surp_prev1 so spillover regions shrink under WT
    "length": 2.0,
    "freq": -1.0,
    "freq_prev1": -0.5,
    "freq_prev2": -0.25,
    "index": 0.5,
}
FILLER_NOISE_SD = 5.0

GP_WORDS = ["after", "the", "doctor", "left", "the", "room",
            "turned", "very", "dark", "that", "night"]
CRITICAL_INDEX = 6
REGIONS = {6: "critical", 7: "spill1", 8: "spill2"}
LOW_B_MASS_RANGE = (0.04, 0.07)
BASE_B_MASS = 0.5


@dataclass
class GardenPathCorpus:
    filler_records: list
    filler_rt: list
    gp_records: list
    gp_rt: list


def _record_one_token_per_word(sid, words, surps, b_masses) -> LogprobRecord:
    """Record where each word is a single boundary token; b_masses has one
    entry per token boundary (len(words) + 1)."""
    tokens = tuple(
        TokenLogprob("▁" + w, -s * LN2, True) for w, s in zip(words, surps)
    )
    bm = tuple(math.log(m) for m in b_masses)
    return LogprobRecord(sid, tokens, bm).validate()


def _filler_rt(rng, sid, item, words, surps, freqs, subjects) -> list[RTRow]:
    rows = []
    c = FILLER_COEFS
    for subject in subjects:
        for w, word in enumerate(words):
            s1 = surps[w - 1] if w >= 1 else 0.0
            s2 = surps[w - 2] if w >= 2 else 0.0
            f1 = freqs[w - 1] if w >= 1 else 0.0
            f2 = freqs[w - 2] if w >= 2 else 0.0
            rt = (c["intercept"] + c["surp"] * surps[w] + c["surp_prev1"] * s1
                  + c["surp_prev2"] * s2 + c["length"] * len(word)
                  + c["freq"] * freqs[w] + c["freq_prev1"] * f1 + c["freq_prev2"] * f2
                  + c["index"] * w + rng.normal(0.0, FILLER_NOISE_SD))
            rows.append(RTRow(
                subject=subject, item=item, sentence_id=sid, word_index=w,
                word=word, rt=float(rt), length=len(word), logfreq=freqs[w],
            ))
    return rows


def garden_path_corpus(seed: int = 0, n_items: int = 24, n_subjects: int = 20,
                       n_fillers: int = 30) -> GardenPathCorpus:
    rng = np.random.default_rng(seed)
    subjects = [f"s{k:02d}" for k in range(n_subjects)]
    letters = list(string.ascii_lowercase)

    filler_records = []
    filler_rt = []
    for f in range(n_fillers):
        sid = f"fill{f:03d}"
        n_words = int(rng.integers(8, 13))
        words = ["".join(rng.choice(letters, size=int(rng.integers(2, 10))))
                 for _ in range(n_words)]
        surps = [float(rng.uniform(2.0, 10.0)) for _ in range(n_words)]
        freqs = [float(rng.uniform(0.0, 5.0)) for _ in range(n_words)]
        # constant boundary mass: WT and WL coincide exactly on fillers
        filler_records.append(_record_one_token_per_word(
            sid, words, surps, [BASE_B_MASS] * (n_words + 1)))
        filler_rt.extend(_filler_rt(rng, sid, f"fitem{f:03d}", words, surps, freqs, subjects))

    word_freq = {w: float(rng.uniform(1.0, 4.0)) for w in dict.fromkeys(GP_WORDS)}
    word_freq["left,"] = word_freq["left"]
    base_profile = [float(rng.uniform(3.0, 7.0)) for _ in GP_WORDS]

    gp_records = []
    gp_rt = []
    for item in range(n_items):
        jitter = rng.normal(0.0, 0.3, size=len(GP_WORDS))
        surps = [max(2.0, base_profile[w] + float(jitter[w])) for w in range(len(GP_WORDS))]
        boost = float(rng.uniform(5.0, 7.0))
        low_b_mass = float(rng.uniform(*LOW_B_MASS_RANGE))
        for cond in ("ambiguous", "unambiguous"):
            amb = cond == "ambiguous"
            sid = f"gp{item:02d}{'a' if amb else 'u'}"
            words = list(GP_WORDS)
            word_surps = list(surps)
            if amb:
                word_surps[CRITICAL_INDEX] += boost
            else:
                words[3] = "left,"

            tokens = []
            b_masses = [BASE_B_MASS]
            for w, word in enumerate(words):
                if word == "left,":
                    # comma is a word-internal token: the word spans two tokens
                    comma_lp = math.log(0.9)
                    tokens.append(TokenLogprob("▁left", -word_surps[w] * LN2 - comma_lp, True))
                    b_masses.append(BASE_B_MASS)
                    tokens.append(TokenLogprob(",", comma_lp, False))
                else:
                    tokens.append(TokenLogprob("▁" + word, -word_surps[w] * LN2, True))
                if amb and w == CRITICAL_INDEX - 1:
                    # the model expects a comma here, so a word boundary is unlikely
                    b_masses.append(low_b_mass)
                else:
                    b_masses.append(BASE_B_MASS)
            record = LogprobRecord(sid, tuple(tokens),
                                   tuple(math.log(m) for m in b_masses)).validate()
            gp_records.append(record)

            for subject in subjects:
                for w, word in enumerate(words):
                    gp_rt.append(RTRow(
                        subject=subject, item=f"item{item:02d}", sentence_id=sid,
                        word_index=w, word=word,
                        rt=float(300.0 + rng.normal(0.0, 10.0)),
                        length=len(word), logfreq=word_freq[word],
                        condition=cond, region=REGIONS.get(w, "other"),
                    ))
    return GardenPathCorpus(filler_records, filler_rt, gp_records, gp_rt)


DIRECTION_COEFS = {"intercept": 250.0, "surp": 6.0, "length": 1.2, "index": 0.8}
DIRECTION_NOISE_SD = 1.5


@dataclass
class DirectionCorpus:
    model: object
    segs: dict              # sid -> Segmentation of the eval sentence
    scores: dict            # sid -> SentenceScore
    rt_by_variant: dict     # "wl"/"wt" -> list[RTRow]: responses generated from that variant


def _direction_vocab() -> Vocabulary:
    nouns = ["cat", "dog", "rat", "bird", "mat", "rug", "tree", "log"]
    verbs = ["sat", "ran", "hid", "sang"]
    preps = ["on", "by", "near"]
    b = ["▁the", "▁a"] + ["▁" + w for w in nouns + verbs + preps]
    return Vocabulary(b + ["s", ",", "."])


def _sample_sentence(rng, vocab) -> list[int]:
    nouns = ["cat", "dog", "rat", "bird"]
    objects = ["mat", "rug", "tree", "log"]
    verbs = ["sat", "ran", "hid", "sang"]
    preps = ["on", "by", "near"]
    toks = []

    def word(surface, plural=False, punct=None):
        toks.append(vocab.id_of("▁" + surface))
        if plural:
            toks.append(vocab.id_of("s"))
        if punct:
            toks.append(vocab.id_of(punct))

    word(str(rng.choice(["the", "a"])))
    word(str(rng.choice(nouns)), plural=rng.random() < 0.4,
         punct="," if rng.random() < 0.3 else None)
    word(str(rng.choice(verbs)))
    word(str(rng.choice(preps)))
    word(str(rng.choice(["the", "a"])))
    word(str(rng.choice(objects)), plural=rng.random() < 0.4,
         punct="." if rng.random() < 0.8 else None)
    return toks


def direction_corpus(seed: int = 0, n_subjects: int = 12, n_train: int = 400,
                     n_eval: int = 60, order: int = 2, alpha: float = 0.5) -> DirectionCorpus:
    from .decoding import score_sentence

    rng = np.random.default_rng(seed)
    vocab = _direction_vocab()
    train = [_sample_sentence(rng, vocab) for _ in range(n_train)]
    model = train_ngram(vocab, train, order=order, alpha=alpha)

    scores = {}
    segs = {}
    for k in range(n_eval):
        sid = f"ev{k:03d}"
        seg = segment_words(_sample_sentence(rng, vocab), vocab)
        segs[sid] = seg
        scores[sid] = score_sentence(model, seg)

    subjects = [f"s{k:02d}" for k in range(n_subjects)]
    rt_by_variant = {"wl": [], "wt": []}
    c = DIRECTION_COEFS
    for sid, score in sorted(scores.items()):
        words = segs[sid].word_surfaces()
        for subject in subjects:
            noise = rng.normal(0.0, DIRECTION_NOISE_SD, size=len(words))
            for variant in ("wl", "wt"):
                for w, sw in enumerate(score.words):
                    surp = sw.wl_surprisal if variant == "wl" else sw.wt_surprisal
                    rt = (c["intercept"] + c["surp"] * surp
                          + c["length"] * len(words[w]) + c["index"] * w + float(noise[w]))
                    rt_by_variant[variant].append(RTRow(
                        subject=subject, item=sid, sentence_id=sid, word_index=w,
                        word=words[w], rt=rt, length=len(words[w]), logfreq=0.0,
                    ))
    return DirectionCorpus(model, segs, scores, rt_by_variant)
