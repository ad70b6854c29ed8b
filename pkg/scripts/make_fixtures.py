#!/usr/bin/env python3
"""Regenerate the checked-in files under data/ (deterministic, seed 0).

Run from the repository root: python3 scripts/make_fixtures.py
"""

from pathlib import Path

import numpy as np

from wtdecode.decoding import record_from_model
from wtdecode.ingest import write_records, write_rt_csv
from wtdecode.probsource import garden_table, nonmono_table, theorem1_table
from wtdecode.synthdata import _sample_sentence, direction_corpus, garden_path_corpus
from wtdecode.vocab import segment_words

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"


def main() -> None:
    DATA.mkdir(exist_ok=True)

    garden_table().to_file(DATA / "garden.model")
    theorem1_table().to_file(DATA / "theorem1.model")
    nonmono_table().to_file(DATA / "nonmono.model")

    gp = garden_path_corpus(seed=0)
    write_records(gp.filler_records, DATA / "gp_filler_records.jsonl")
    write_rt_csv(gp.filler_rt, DATA / "gp_filler_rt.csv")
    write_records(gp.gp_records, DATA / "gp_records.jsonl")
    write_rt_csv(gp.gp_rt, DATA / "gp_rt.csv")

    # n-gram world: records exported from the trained model plus matching RTs,
    # and raw text + vocabulary for the train-ngram command
    dc = direction_corpus(seed=0, n_subjects=6, n_train=200, n_eval=30)
    vocab = dc.model.vocab
    vocab.to_file(DATA / "toy.vocab")

    records = [record_from_model(dc.model, dc.segs[sid].token_ids, sid)
               for sid in sorted(dc.scores)]
    write_records(records, DATA / "regress_records.jsonl")
    write_rt_csv(dc.rt_by_variant["wl"], DATA / "regress_rt.csv")

    rng = np.random.default_rng(12)
    lines = [segment_words(_sample_sentence(rng, vocab), vocab).detokenize()
             for _ in range(60)]
    (DATA / "toy_corpus.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote fixtures to {DATA}")


if __name__ == "__main__":
    main()
