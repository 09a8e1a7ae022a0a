"""Per-layer ESM2 residue-embedding dumps in the analysis tool's NPY format."""

from .dump import (ESM2_MODELS, DumpResult, DumpSpec, UnknownModel,
                   dump_layers, load_model, resolve_checkpoint)
from .fasta import CANONICAL_ALPHABET, FastaError, read_fasta

__version__ = "0.1.0"

__all__ = [
    "CANONICAL_ALPHABET", "DumpResult", "DumpSpec", "ESM2_MODELS",
    "FastaError", "UnknownModel", "dump_layers", "load_model", "read_fasta",
    "resolve_checkpoint",
]
