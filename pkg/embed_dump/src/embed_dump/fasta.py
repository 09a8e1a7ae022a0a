"""Minimal FASTA reading and canonical-alphabet validation."""

from __future__ import annotations

from pathlib import Path

CANONICAL_ALPHABET = frozenset("ACDEFGHIKLMNPQRSTVWY")


class FastaError(Exception):
    pass


def read_fasta(path: str | Path) -> list[tuple[str, str]]:
    """Parse a FASTA file into (id, sequence) pairs, order preserved.

    The id is the first whitespace-delimited token after '>'.  Sequences are
    uppercased; duplicate ids are an error.
    """
    records: list[tuple[str, str]] = []
    seen: set[str] = set()
    seq_id = None
    chunks: list[str] = []

    def flush():
        if seq_id is None:
            return
        seq = "".join(chunks)
        if not seq:
            raise FastaError(f"{seq_id}: empty sequence")
        records.append((seq_id, seq))

    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            flush()
            seq_id = line[1:].split()[0] if len(line) > 1 else ""
            if not seq_id:
                raise FastaError(f"line {lineno}: header without an id")
            if seq_id in seen:
                raise FastaError(f"line {lineno}: duplicate id {seq_id!r}")
            seen.add(seq_id)
            chunks = []
        elif seq_id is None:
            raise FastaError(f"line {lineno}: sequence data before any header")
        else:
            chunks.append(line.upper())
    flush()
    if not records:
        raise FastaError(f"{path}: no sequences")
    return records


def noncanonical_letters(sequence: str) -> set[str]:
    """Letters outside the 20-letter canonical amino-acid alphabet."""
    return set(sequence) - CANONICAL_ALPHABET
