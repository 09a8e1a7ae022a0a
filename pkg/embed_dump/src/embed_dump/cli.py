"""Command line: embed_dump --model <name> --fasta <path> --out <dir> [--fp64]."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dump import DumpSpec, UnknownModel, dump_layers
from .fasta import FastaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed_dump",
        description="Dump per-layer ESM2 residue embeddings as NPY files.")
    parser.add_argument("--model", required=True,
                        help="public ESM2 name (e.g. esm2_t6_8M_UR50D) or a "
                             "local checkpoint directory")
    parser.add_argument("--fasta", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path,
                        help="output directory (one subdirectory per sequence)")
    parser.add_argument("--fp64", action="store_true",
                        help="store float64 instead of float32")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = dump_layers(DumpSpec(model=args.model, out_dir=args.out,
                                      fasta_path=args.fasta, fp64=args.fp64))
    except (UnknownModel, FastaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    n_ok = len(result.fragment["entries"])
    print(f"embedded {n_ok} sequence(s): {result.n_layers} layers x "
          f"{result.hidden_width} dims -> {args.out}/manifest.json")
    for seq_id, reason in result.skipped:
        print(f"skipped {seq_id}: {reason}", file=sys.stderr)
    return 0 if not result.skipped else 1


if __name__ == "__main__":
    sys.exit(main())
