"""Run an ESM2 checkpoint over sequences and dump per-layer embeddings.

For every sequence and every layer 0..depth (layer 0 is the embedding layer,
layer i the post-block residual stream) a `<id>/layer_<idx>.npy` file of
shape (L, hidden_width) is written, with the begin/end special tokens
stripped so the row count equals the residue count.  A JSON manifest
fragment in the analysis tool's schema is emitted alongside.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .fasta import noncanonical_letters, read_fasta

log = logging.getLogger(__name__)

# Public ESM2 checkpoints (bare names; the hub id is facebook/<name>).
ESM2_MODELS = (
    "esm2_t6_8M_UR50D",
    "esm2_t12_35M_UR50D",
    "esm2_t30_150M_UR50D",
    "esm2_t33_650M_UR50D",
    "esm2_t36_3B_UR50D",
    "esm2_t48_15B_UR50D",
)


class UnknownModel(Exception):
    """Model name is neither a known ESM2 checkpoint nor a local directory."""


@dataclass
class DumpSpec:
    """What to embed and where to put it.

    ``sequences`` may be given inline as (id, sequence) pairs; otherwise they
    are read from ``fasta_path``.  float32 output by default; ``fp64`` widens
    to float64.
    """

    model: str
    out_dir: Path
    fasta_path: Path | None = None
    sequences: list[tuple[str, str]] | None = None
    fp64: bool = False


@dataclass
class DumpResult:
    fragment: dict
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (id, reason)
    hidden_width: int = 0
    n_layers: int = 0  # depth + 1, embedding layer included


def resolve_checkpoint(name: str) -> str:
    """Map a model name to something ``from_pretrained`` accepts.

    Accepts a local checkpoint directory, a bare public ESM2 name, or a
    ``facebook/``-prefixed one.

    Raises:
        UnknownModel: anything else.
    """
    if Path(name).is_dir():
        return name
    if name in ESM2_MODELS:
        return f"facebook/{name}"
    if name.startswith("facebook/") and name.split("/", 1)[1] in ESM2_MODELS:
        return name
    raise UnknownModel(
        f"{name!r} is not a local checkpoint directory or a public ESM2 model "
        f"(known: {', '.join(ESM2_MODELS)})")


def load_model(name: str):
    """Load tokenizer and model in eval mode (inference only, no dropout)."""
    from transformers import AutoTokenizer, EsmModel

    checkpoint = resolve_checkpoint(name)
    tokenizer = AutoTokenizer.from_pretrained(checkpoint)
    model = EsmModel.from_pretrained(checkpoint)
    model.eval()
    return tokenizer, model


def _resolve_sequences(spec: DumpSpec) -> list[tuple[str, str]]:
    if spec.sequences is not None:
        ids = [i for i, _ in spec.sequences]
        if len(set(ids)) != len(ids):
            raise ValueError("sequence ids must be unique")
        return [(i, s.upper()) for i, s in spec.sequences]
    if spec.fasta_path is None:
        raise ValueError("DumpSpec needs either sequences or a fasta_path")
    return read_fasta(spec.fasta_path)


def dump_layers(spec: DumpSpec, model_and_tokenizer=None) -> DumpResult:
    """Embed every sequence and write one NPY per layer.

    Sequences with letters outside the canonical alphabet are reported and
    skipped, not embedded with substitute tokens.  Output is deterministic
    for fixed model weights.

    ``model_and_tokenizer`` lets callers inject an already-loaded
    (tokenizer, model) pair; by default the checkpoint named in the spec is
    loaded.
    """
    sequences = _resolve_sequences(spec)
    tokenizer, model = model_and_tokenizer or load_model(spec.model)

    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dtype = np.float64 if spec.fp64 else np.float32

    entries = []
    skipped: list[tuple[str, str]] = []
    hidden_width = 0
    n_layers = 0
    for seq_id, seq in sequences:
        bad = noncanonical_letters(seq)
        if bad:
            reason = f"noncanonical letters {sorted(bad)}"
            log.warning("skipping %s: %s", seq_id, reason)
            skipped.append((seq_id, reason))
            continue

        encoded = tokenizer(seq, return_tensors="pt")
        with torch.no_grad():
            out = model(**encoded, output_hidden_states=True)
        seq_dir = out_dir / seq_id
        seq_dir.mkdir(parents=True, exist_ok=True)
        layers = []
        for idx, hidden in enumerate(out.hidden_states):
            # strip <cls> and <eos>: rows must equal the residue count
            arr = hidden[0, 1:-1].numpy().astype(dtype)
            assert arr.shape[0] == len(seq)
            path = seq_dir / f"layer_{idx}.npy"
            np.save(path, arr)
            layers.append({"layer_index": idx,
                           "embedding_path": str(path.relative_to(out_dir))})
        hidden_width = int(out.hidden_states[0].shape[-1])
        n_layers = len(out.hidden_states)
        entries.append({"protein_id": seq_id, "layers": layers})

    fragment = {"entries": entries}
    (out_dir / "manifest.json").write_text(json.dumps(fragment, indent=2) + "\n")
    return DumpResult(fragment, skipped, hidden_width, n_layers)
