"""Shared helpers: random rotations, shapes on the sphere, synthetic datasets."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from plmshape import PointCloud, SrvShape, l2_inner, l2_norm
from plmshape.pdb import Chain, Residue, chain_to_pdb_text, extract_point_cloud, parse_pdb


def random_rotation(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random element of SO(m) via QR with sign fixing."""
    q, r = np.linalg.qr(rng.normal(size=(m, m)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_srv(T: int, m: int, rng: np.random.Generator) -> SrvShape:
    a = rng.normal(size=(T, m))
    return SrvShape(a / l2_norm(a))


def tangent_at(base: SrvShape, rng: np.random.Generator,
               norm: float) -> np.ndarray:
    """Random tangent vector at ``base`` with the given L2 norm."""
    w = rng.normal(size=base.q.shape)
    w = w - l2_inner(w, base.q) * base.q
    return w * (norm / l2_norm(w))


def helix_cloud(L: int, rng: np.random.Generator, spacing: float = 3.8) -> PointCloud:
    """Backbone-like ordered cloud: a jittered helix with ~`spacing` steps."""
    radius = 2.3 * (0.8 + 0.4 * rng.random())
    turn = 1.0 + 0.4 * rng.random()
    rise = spacing * 0.4
    t = np.arange(L) * turn
    pts = np.stack([radius * np.cos(t), radius * np.sin(t), rise * np.arange(L)], axis=1)
    pts = pts + rng.normal(scale=0.15, size=pts.shape)
    return PointCloud(pts)


def build_dataset(root: Path, rng: np.random.Generator,
                  classes: dict[str, int], layers: list[int],
                  L: int = 20, noise: dict[int, float] | None = None,
                  embed_dim: int = 3, dtype=np.float64) -> Path:
    """Write a synthetic PDB+NPY dataset and return the manifest path.

    ``classes`` maps class_label -> protein count.  Each layer's embedding is
    the structure cloud plus Gaussian noise of the per-layer scale in
    ``noise`` (default 0: exact copies), embedded in ``embed_dim`` columns
    (zero-padded past the third).
    """
    noise = noise or {}
    entries = []
    i = 0
    for class_label, count in classes.items():
        for _ in range(count):
            pid = f"prot{i:03d}"
            cloud = helix_cloud(L, rng)
            chain = Chain("A", [Residue(n + 1, "", cloud.points[n]) for n in range(L)])
            pdb_path = root / f"{pid}.pdb"
            pdb_path.write_text(chain_to_pdb_text(chain))
            # reparse so "copy" embeddings match the PDB's column precision exactly
            stored = extract_point_cloud(parse_pdb(pdb_path.read_text())[0]).points
            layer_specs = []
            for layer in layers:
                emb = np.zeros((L, embed_dim))
                emb[:, :3] = stored + rng.normal(scale=noise.get(layer, 0.0),
                                                 size=(L, 3))
                emb_path = root / f"{pid}_layer{layer}.npy"
                np.save(emb_path, np.asarray(emb, dtype=dtype))
                layer_specs.append({"layer_index": layer,
                                    "embedding_path": emb_path.name})
            entries.append({"protein_id": pid, "class_label": class_label,
                            "pdb_path": pdb_path.name, "chain": "A",
                            "layers": layer_specs})
            i += 1
    manifest = root / "manifest.json"
    manifest.write_text(json.dumps({"entries": entries}, indent=2))
    return manifest


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
