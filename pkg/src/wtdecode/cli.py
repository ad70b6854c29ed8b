"""Command-line interface.

Subcommands: score, check-omega, regress, gp-effect, train-ngram. Exit codes:
0 success, 1 config/validation problems, 2 runtime/data failures, 3 violation
of a probability bound the implementation guarantees. A JSON config file may
supply any flag via --config; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import normcheck, pipeline
from .decoding import score_from_records, score_sentence
from .errors import ConfigError, DataError, InvariantError, ValidationError, WtdecodeError
from .ingest import filter_rt, read_records, read_rt_csv
from .probsource import BUILTIN_MODELS, NGramModel, TabularModel, train_ngram
from .vocab import Vocabulary, tokenize_greedy


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def load_model(spec: str):
    """Resolve --model: a builtin table name, a tabular file, or an n-gram JSON file."""
    if spec in BUILTIN_MODELS:
        return BUILTIN_MODELS[spec]()
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"model file not found: {path}")
    with path.open(encoding="utf-8") as f:
        head = f.read(1).strip()
    if head == "{":
        return NGramModel.from_file(path)
    return TabularModel.from_file(path)


def _write_rows(out_path, header, rows):
    def emit(f):
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)

    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as f:
            emit(f)
    else:
        emit(sys.stdout)


def cmd_score(args) -> int:
    sources = [s for s in (args.model, args.records) if s]
    if len(sources) != 1:
        raise ConfigError("score needs exactly one of --model or --records")
    variants = ("wl", "wt") if args.variant == "both" else (args.variant,)

    scores = []
    if args.records:
        if not Path(args.records).exists():
            raise ConfigError(f"records file not found: {args.records}")
        for record in read_records(args.records):
            scores.append(score_from_records(record))
    else:
        model = load_model(args.model)
        texts = []
        if args.text is not None:
            texts.append(args.text)
        if args.infile:
            if not Path(args.infile).exists():
                raise ConfigError(f"input file not found: {args.infile}")
            with open(args.infile, encoding="utf-8") as f:
                texts.extend(line.rstrip("\n") for line in f if line.strip())
        if not texts:
            raise ConfigError("score needs --text or --in")
        for text in texts:
            seg = tokenize_greedy(text, model.vocab)
            scores.append(score_sentence(model, seg))

    header = ["word"] + [f"{v}_bits" for v in variants]
    rows = []
    for score in scores:
        for word in score.words:
            row = [word.surface]
            for v in variants:
                row.append(_fmt(word.wl_surprisal if v == "wl" else word.wt_surprisal))
            rows.append(row)
    _write_rows(args.out, header, rows)
    return 0


def cmd_check_omega(args) -> int:
    if args.witness:
        report = normcheck.theorem1_witness()
    else:
        if not args.model:
            raise ConfigError("check-omega needs --model (or --witness)")
        if args.variant not in ("wl", "wt"):
            raise ConfigError("check-omega needs --variant wl or wt")
        model = load_model(args.model)
        ctx = model.vocab.encode(args.ctx.split()) if args.ctx else ()
        report = normcheck.p_omega_partial(model, ctx, max_tokens=args.depth,
                                           mode=args.variant.upper())
    print(report.to_text())
    if report.mode == normcheck.MODE_WL and report.cumulative > 1.0:
        print(f"note: cumulative mass {_fmt(report.cumulative)} exceeds 1; "
              "leading-whitespace word mass is not a probability")
    if args.out:
        base = Path(args.out)
        base.with_suffix(".txt").write_text(report.to_text() + "\n", encoding="utf-8")
        base.with_suffix(".json").write_text(report.to_json() + "\n", encoding="utf-8")
    normcheck.check_wt_bound(report)  # raises InvariantError -> exit 3
    return 0


def _load_scores_and_rt(records_path, rt_path):
    for label, path in (("records", records_path), ("rt", rt_path)):
        if not path or not Path(path).exists():
            raise ConfigError(f"{label} file not found: {path}")
    scores = pipeline.scores_from_records(read_records(records_path))
    rt_rows = read_rt_csv(rt_path)
    if not rt_rows:
        raise ValidationError(f"RT file {rt_path} has no rows")
    return scores, rt_rows


def cmd_regress(args) -> int:
    scores, rt_rows = _load_scores_and_rt(args.records, args.rt)
    kept = filter_rt(rt_rows, args.filter) if args.filter != "none" else rt_rows
    if not kept:
        raise ValidationError("no RT rows left after filtering")
    variants = ("wl", "wt") if args.variant == "both" else (args.variant,)
    result = pipeline.delta_ll_analysis(
        scores, kept,
        variants=variants,
        transform="log" if args.response == "log" else "identity",
        base_predictors=tuple(args.base.split(",")) if args.base else ("length", "index"),
        spillover=args.spillover,
        predictor_rows=rt_rows,
    )
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_gp_effect(args) -> int:
    filler_scores_path = args.filler_records
    for label, path in (("filler records", filler_scores_path), ("filler rt", args.filler_rt),
                        ("gp records", args.records), ("gp rt", args.rt)):
        if not path or not Path(path).exists():
            raise ConfigError(f"{label} file not found: {path}")
    filler_records = read_records(filler_scores_path)
    filler_rt = read_rt_csv(args.filler_rt)
    gp_records = read_records(args.records)
    gp_rt = read_rt_csv(args.rt)
    if not filler_rt or not gp_rt:
        raise ValidationError("empty RT input")
    kept = filter_rt(filler_rt, args.filter) if args.filter != "none" else filler_rt
    regions = args.regions.split(",")
    variants = ("wl", "wt") if args.variant == "both" else (args.variant,)
    result = pipeline.gp_effect_analysis(
        filler_records, kept, gp_records, gp_rt,
        regions=regions, n_boot=args.n_boot, seed=args.seed, variants=variants,
        filler_predictor_rows=filler_rt,
    )
    result.pop("_pred_rows")
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.out:
        base = Path(args.out)
        base.with_suffix(".json").write_text(text + "\n", encoding="utf-8")
        with open(base.with_suffix(".csv"), "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["variant", "region", "effect", "ci_low", "ci_high"])
            for variant in variants:
                effects = result["variants"][variant]["effects"]
                for region in regions:
                    e = effects[region]
                    writer.writerow([variant, region, _fmt(e["effect"]),
                                     _fmt(e["ci_low"]), _fmt(e["ci_high"])])
    else:
        print(text)
    return 0


def cmd_train_ngram(args) -> int:
    for label, path in (("corpus", args.infile), ("vocab", args.vocab)):
        if not path or not Path(path).exists():
            raise ConfigError(f"{label} file not found: {path}")
    vocab = Vocabulary.from_file(args.vocab)
    corpus = []
    with open(args.infile, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if line.strip():
                corpus.append(tokenize_greedy(line, vocab).token_ids)
    model = train_ngram(vocab, corpus, order=args.order, alpha=args.alpha)
    model.to_file(args.out or "ngram.json")
    return 0


_DEFAULTS = {
    "model": None, "records": None, "text": None, "infile": None, "out": None,
    "variant": "both", "depth": 8, "ctx": "", "witness": False,
    "rt": None, "filter": "none", "response": "log", "base": "length,index",
    "spillover": False, "seed": 0, "n_boot": 2000,
    "regions": "critical,spill1,spill2",
    "filler_records": None, "filler_rt": None,
    "order": 2, "alpha": 1.0, "vocab": None,
}

# check-omega enumerates one mode at a time
_COMMAND_DEFAULTS = {"check-omega": {"variant": "wt"}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wtdecode")
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def add_common(p):
        p.add_argument("--config", default=None, help="JSON file supplying any flag")
        p.add_argument("--out", default=S)

    p = sub.add_parser("score", help="per-word surprisal table under both decodings")
    p.add_argument("--model", default=S, help="builtin name, tabular file, or n-gram JSON")
    p.add_argument("--records", default=S, help="LogprobRecord JSONL")
    p.add_argument("--text", default=S)
    p.add_argument("--in", dest="infile", default=S, help="file of sentences, one per line")
    p.add_argument("--variant", choices=["wl", "wt", "both"], default=S)
    add_common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("check-omega", help="enumerate word mass and check normalization")
    p.add_argument("--model", default=S)
    p.add_argument("--variant", choices=["wl", "wt"], default=S)
    p.add_argument("--depth", type=int, default=S)
    p.add_argument("--ctx", default=S, help="space-separated context token surfaces")
    p.add_argument("--witness", action="store_true", default=S)
    add_common(p)
    p.set_defaults(func=cmd_check_omega)

    p = sub.add_parser("regress", help="ΔLL of adding surprisal to a baseline regression")
    p.add_argument("--records", default=S)
    p.add_argument("--rt", default=S)
    p.add_argument("--variant", choices=["wl", "wt", "both"], default=S)
    p.add_argument("--filter", choices=["spr", "gpd", "none"], default=S)
    p.add_argument("--response", choices=["log", "ms"], default=S)
    p.add_argument("--base", default=S, help="comma-separated baseline predictors")
    p.add_argument("--spillover", action="store_true", default=S)
    add_common(p)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("gp-effect", help="predicted-RT garden-path effects per region")
    p.add_argument("--filler-records", dest="filler_records", default=S)
    p.add_argument("--filler-rt", dest="filler_rt", default=S)
    p.add_argument("--records", default=S, help="garden-path item records")
    p.add_argument("--rt", default=S, help="garden-path RT CSV with condition/region")
    p.add_argument("--variant", choices=["wl", "wt", "both"], default=S)
    p.add_argument("--filter", choices=["spr", "gpd", "none"], default=S)
    p.add_argument("--regions", default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--n-boot", dest="n_boot", type=int, default=S)
    add_common(p)
    p.set_defaults(func=cmd_gp_effect)

    p = sub.add_parser("train-ngram", help="train a smoothed n-gram model file")
    p.add_argument("--in", dest="infile", default=S)
    p.add_argument("--vocab", default=S)
    p.add_argument("--order", type=int, default=S)
    p.add_argument("--alpha", type=float, default=S)
    add_common(p)
    p.set_defaults(func=cmd_train_ngram)
    return parser


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    merged = dict(_DEFAULTS)
    merged.update(_COMMAND_DEFAULTS.get(args.command, {}))
    config_path = getattr(args, "config", None)
    if config_path:
        if not Path(config_path).exists():
            raise ConfigError(f"config file not found: {config_path}")
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {config_path} is not valid JSON: {e}") from None
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {config_path} must hold a JSON object")
        unknown = set(loaded) - set(_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(loaded)
    merged.update({k: v for k, v in vars(args).items() if k not in ("config",)})
    return argparse.Namespace(**merged)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        filled = _merge_config(args)
        return args.func(filled)
    except InvariantError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValidationError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (DataError, WtdecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
