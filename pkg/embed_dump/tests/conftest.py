"""Fixtures: a tiny locally-built ESM2-architecture checkpoint.

The public checkpoints need hub access; a small randomly-initialized model
saved with the real serialization exercises the identical load/tokenize/
forward/dump code path hermetically.
"""

from __future__ import annotations

import pytest
import torch

# The fixed public ESM2 alphabet, in checkpoint vocabulary order.
ESM_VOCAB = [
    "<cls>", "<pad>", "<eos>", "<unk>",
    "L", "A", "G", "V", "S", "E", "R", "T", "I", "D", "P", "K", "Q", "N",
    "F", "Y", "M", "H", "W", "C", "X", "B", "U", "Z", "O", ".", "-",
    "<null_1>", "<mask>",
]

TINY_LAYERS = 3
TINY_HIDDEN = 32


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    from transformers import EsmConfig, EsmModel, EsmTokenizer

    root = tmp_path_factory.mktemp("tiny_esm")
    vocab = root / "vocab.txt"
    vocab.write_text("\n".join(ESM_VOCAB))
    tokenizer = EsmTokenizer(vocab_file=str(vocab))

    config = EsmConfig(
        vocab_size=len(ESM_VOCAB), hidden_size=TINY_HIDDEN,
        num_hidden_layers=TINY_LAYERS, num_attention_heads=4,
        intermediate_size=64, max_position_embeddings=128,
        pad_token_id=ESM_VOCAB.index("<pad>"),
        mask_token_id=ESM_VOCAB.index("<mask>"))
    torch.manual_seed(0)
    model = EsmModel(config)
    model.eval()

    ckpt = root / "checkpoint"
    model.save_pretrained(ckpt)
    tokenizer.save_pretrained(ckpt)
    return ckpt
