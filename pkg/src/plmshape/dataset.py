"""Dataset plumbing: NPY embedding tensors, JSON manifests, report writers.

The NPY reader is deliberately strict — version 1.0/2.0, C order, 2-D,
little-endian float32/float64 — and fails loudly instead of guessing.
Embedding row counts are validated against the parsed chain so that special
tokens left in by a producer surface as LengthMismatch, never as silently
trimmed rows.
"""

from __future__ import annotations

import ast
import csv
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curve import PointCloud
from .errors import (BadMagic, LengthMismatch, MissingFile, NotTwoDimensional,
                     SchemaError, TruncatedData, UnsupportedDtype,
                     UnsupportedOrder)
from .filtration import MomentCurve
from .pdb import Chain, extract_point_cloud

NPY_MAGIC = b"\x93NUMPY"

_DTYPES = {"<f4": np.dtype("<f4"), "<f8": np.dtype("<f8")}


def read_npy(path: str | Path) -> PointCloud:
    """Read a 2-D float NPY file into a point cloud, widened to float64.

    Accepts NPY versions 1.0 and 2.0, C-ordered payloads of little-endian
    4- or 8-byte IEEE floats; the first axis is residues, the second the
    model dimension.

    Raises:
        BadMagic, UnsupportedDtype, UnsupportedOrder, NotTwoDimensional,
        TruncatedData.
    """
    path = Path(path)
    with path.open("rb") as fh:
        magic = fh.read(6)
        if magic != NPY_MAGIC:
            raise BadMagic(f"{path}: not an NPY file (magic {magic!r})")
        version = fh.read(2)
        if version not in (b"\x01\x00", b"\x02\x00"):
            raise BadMagic(f"{path}: unsupported NPY version {version!r}")
        if version == b"\x01\x00":
            (header_len,) = struct.unpack("<H", fh.read(2))
        else:
            (header_len,) = struct.unpack("<I", fh.read(4))
        try:
            header = ast.literal_eval(fh.read(header_len).decode("latin-1"))
            descr = header["descr"]
            fortran = header["fortran_order"]
            shape = header["shape"]
        except Exception as exc:
            raise BadMagic(f"{path}: unparseable NPY header ({exc})") from None

        if descr not in _DTYPES:
            raise UnsupportedDtype(
                f"{path}: dtype {descr!r} not supported (need '<f4' or '<f8')")
        if fortran:
            raise UnsupportedOrder(f"{path}: Fortran-ordered payloads are rejected")
        if not (isinstance(shape, tuple) and len(shape) == 2):
            raise NotTwoDimensional(f"{path}: shape {shape!r} is not 2-D")

        dtype = _DTYPES[descr]
        count = shape[0] * shape[1]
        payload = fh.read(count * dtype.itemsize)
        if len(payload) < count * dtype.itemsize:
            raise TruncatedData(
                f"{path}: payload holds {len(payload)} bytes, "
                f"need {count * dtype.itemsize} for shape {shape}")
    data = np.frombuffer(payload, dtype=dtype, count=count).reshape(shape)
    return PointCloud(data.astype(np.float64))


@dataclass(frozen=True)
class ManifestLayer:
    layer_index: int
    embedding_path: Path


@dataclass(frozen=True)
class ManifestEntry:
    protein_id: str
    class_label: str
    pdb_path: Path
    chain: str
    layers: tuple[ManifestLayer, ...]


@dataclass(frozen=True)
class DatasetManifest:
    """Declarative binding of protein IDs to structure and embedding files."""

    entries: tuple[ManifestEntry, ...]

    @property
    def layer_indices(self) -> list[int]:
        seen: list[int] = []
        for e in self.entries:
            for layer in e.layers:
                if layer.layer_index not in seen:
                    seen.append(layer.layer_index)
        return sorted(seen)

    @property
    def class_labels(self) -> list[str]:
        seen: list[str] = []
        for e in self.entries:
            if e.class_label not in seen:
                seen.append(e.class_label)
        return seen


def _entry_field(raw: dict, name: str, entry_label: str):
    if name not in raw:
        raise SchemaError(f"entry {entry_label}: missing field {name!r}")
    return raw[name]


def read_manifest(path: str | Path) -> DatasetManifest:
    """Load and validate a dataset manifest.

    Relative paths are resolved against the manifest's directory.  Every
    referenced file must exist at load time.

    Raises:
        SchemaError: structural problems, naming the offending entry.
        MissingFile: a referenced path does not exist.
    """
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))
    base = path.parent
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None

    if not isinstance(doc, dict) or "entries" not in doc:
        raise SchemaError(f"{path}: top level must be an object with 'entries'")
    raw_entries = doc["entries"]
    if not isinstance(raw_entries, list) or not raw_entries:
        raise SchemaError(f"{path}: 'entries' must be a non-empty list")

    entries = []
    ids = set()
    for i, raw in enumerate(raw_entries):
        label = f"#{i}"
        if not isinstance(raw, dict):
            raise SchemaError(f"entry {label}: must be an object")
        pid = _entry_field(raw, "protein_id", label)
        label = f"#{i} ({pid})"
        if pid in ids:
            raise SchemaError(f"entry {label}: duplicate protein_id")
        ids.add(pid)
        class_label = _entry_field(raw, "class_label", label)
        pdb_path = base / _entry_field(raw, "pdb_path", label)
        chain = _entry_field(raw, "chain", label)
        if not isinstance(chain, str) or len(chain) != 1:
            raise SchemaError(f"entry {label}: chain must be a single character")
        raw_layers = _entry_field(raw, "layers", label)
        if not isinstance(raw_layers, list) or not raw_layers:
            raise SchemaError(f"entry {label}: 'layers' must be a non-empty list")
        layers = []
        last = None
        for raw_layer in raw_layers:
            if not isinstance(raw_layer, dict):
                raise SchemaError(f"entry {label}: each layer must be an object")
            idx = _entry_field(raw_layer, "layer_index", label)
            emb = base / _entry_field(raw_layer, "embedding_path", label)
            if not isinstance(idx, int):
                raise SchemaError(f"entry {label}: layer_index must be an integer")
            if last is not None and idx <= last:
                raise SchemaError(
                    f"entry {label}: layer_index must be strictly increasing")
            last = idx
            layers.append(ManifestLayer(idx, emb))
        for p in [pdb_path] + [layer.embedding_path for layer in layers]:
            if not p.exists():
                raise MissingFile(str(p))
        entries.append(ManifestEntry(pid, class_label, pdb_path, chain, tuple(layers)))
    return DatasetManifest(tuple(entries))


def validate_embedding(cloud: PointCloud, chain: Chain, protein_id: str) -> PointCloud:
    """Check that an embedding's row count equals the chain's residue count.

    The producer must strip special (begin/end) tokens; a mismatch is an
    error, never something to trim away silently.
    """
    if cloud.L != len(chain.residues):
        raise LengthMismatch(
            f"{protein_id}: embedding has {cloud.L} rows, "
            f"chain has {len(chain.residues)} residues")
    return cloud


def structure_cloud(chain: Chain) -> PointCloud:
    """Alias for extract_point_cloud, for symmetry with validate_embedding."""
    return extract_point_cloud(chain)


@dataclass
class LayerReport:
    """Per-(layer, class) analysis record; layer_index -1 marks the
    3d-structure baseline row."""

    layer_index: int
    class_label: str
    n_proteins: int
    frechet_radius_geodesic: float | None = None
    frechet_radius_chordal: float | None = None
    effective_dimension_tangent: float | None = None
    effective_dimension_flat: float | None = None
    moment_curve: MomentCurve | None = None
    moment_min: float | None = None
    moment_argmin_k: int | None = None
    degenerate: bool = False


_SCALAR_FIELDS = [
    "layer_index", "class_label", "n_proteins",
    "frechet_radius_geodesic", "frechet_radius_chordal",
    "effective_dimension_tangent", "effective_dimension_flat",
    "moment_min", "moment_argmin_k", "degenerate",
]

_MOMENT_FIELDS = ["layer_index", "class_label", "k",
                  "raw_mean", "baseline_mean", "normalized"]


def report_to_dict(report: LayerReport) -> dict:
    """JSON-ready dict mirroring the report verbatim (deterministic order)."""
    out = {name: getattr(report, name) for name in _SCALAR_FIELDS}
    if report.moment_curve is not None:
        mc = report.moment_curve
        out["moment_curve"] = {
            "ks": list(mc.ks),
            "raw_mean": [float(v) for v in mc.raw_mean],
            "baseline_mean": [float(v) for v in mc.baseline_mean],
            "normalized": [float(v) for v in mc.normalized],
        }
    else:
        out["moment_curve"] = None
    return out


def scalars_path_for(path: str | Path) -> Path:
    """Companion CSV carrying one row per (layer, class) scalar metrics."""
    path = Path(path)
    return path.with_name(path.stem + ".scalars.csv")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))  # builtin repr even for numpy scalars
    return str(value)


def write_report(reports: list[LayerReport], path: str | Path,
                 format: str = "csv") -> None:
    """Write layer reports as CSV (+ companion scalars file) or JSON.

    CSV: ``path`` gets one row per (layer, class, k) of moment data; the
    companion file (``<stem>.scalars.csv``) gets one row per (layer, class).
    JSON mirrors the reports verbatim.  Output is a pure function of the
    input: identical reports give identical bytes.
    """
    path = Path(path)
    if format == "json":
        doc = [report_to_dict(r) for r in reports]
        with path.open("w", encoding="utf-8", newline="") as fh:
            json.dump(doc, fh, indent=2, allow_nan=True)
            fh.write("\n")
        return
    if format != "csv":
        raise ValueError(f"unknown report format {format!r}")

    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_MOMENT_FIELDS)
        for r in reports:
            if r.moment_curve is None:
                continue
            mc = r.moment_curve
            for k, raw, base, norm in zip(mc.ks, mc.raw_mean,
                                          mc.baseline_mean, mc.normalized):
                writer.writerow([r.layer_index, r.class_label, k,
                                 _cell(float(raw)), _cell(float(base)),
                                 _cell(float(norm))])
    with scalars_path_for(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_SCALAR_FIELDS)
        for r in reports:
            writer.writerow([_cell(getattr(r, name)) for name in _SCALAR_FIELDS])
