"""CLI: wtexport export --model <id> --in sentences.txt --out records.jsonl [--batch N]."""

from __future__ import annotations

import argparse
import sys

from .export import ExportError, ExportSpec, export_records


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wtexport")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", help="write LogprobRecord JSONL for a sentences file")
    p.add_argument("--model", required=True, help="model id or local path")
    p.add_argument("--in", dest="infile", required=True, help="sentences, one per line")
    p.add_argument("--out", required=True, help="records JSONL output path")
    p.add_argument("--batch", type=int, default=8)
    p.add_argument("--vocab-out", default=None, help="also write the B/I vocabulary file")
    p.add_argument("--sid-prefix", default="s")
    p.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = ExportSpec(
        model_id=args.model,
        sentences_path=args.infile,
        output_path=args.out,
        batch_size=args.batch,
        vocab_out=args.vocab_out,
        sid_prefix=args.sid_prefix,
        device=args.device,
    )
    try:
        count = export_records(spec)
    except ExportError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {count} records to {spec.output_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
