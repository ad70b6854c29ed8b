"""Word probabilities from subword LMs under leading- and trailing-whitespace decoding."""

from .decoding import (
    ScoredWord,
    SentenceScore,
    score_from_records,
    score_sentence,
    surprisal_bits,
    wl_word_logprob,
    wt_word_logprob,
)
from .enumcore import BACKEND
from .ingest import LogprobRecord, RTRow, TokenLogprob, build_rows, filter_rt, read_records
from .normcheck import OmegaReport, enumerate_words, p_omega_partial, theorem1_witness
from .probsource import (
    NGramModel,
    TabularModel,
    UniformModel,
    garden_table,
    nonmono_table,
    theorem1_table,
    train_ngram,
)
from .regress import (
    DesignMatrix,
    EffectEstimate,
    FitResult,
    delta_ll,
    design_from_rows,
    fit_ols,
    garden_path_effect,
    permutation_test,
    predict,
)
from .vocab import Segmentation, Vocabulary, segment_words, tokenize_greedy

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DesignMatrix",
    "EffectEstimate",
    "FitResult",
    "LogprobRecord",
    "NGramModel",
    "OmegaReport",
    "RTRow",
    "ScoredWord",
    "Segmentation",
    "SentenceScore",
    "TabularModel",
    "TokenLogprob",
    "UniformModel",
    "Vocabulary",
    "build_rows",
    "delta_ll",
    "design_from_rows",
    "enumerate_words",
    "filter_rt",
    "fit_ols",
    "garden_path_effect",
    "garden_table",
    "nonmono_table",
    "p_omega_partial",
    "permutation_test",
    "predict",
    "read_records",
    "score_from_records",
    "score_sentence",
    "segment_words",
    "surprisal_bits",
    "theorem1_table",
    "theorem1_witness",
    "tokenize_greedy",
    "train_ngram",
    "wl_word_logprob",
    "wt_word_logprob",
]
