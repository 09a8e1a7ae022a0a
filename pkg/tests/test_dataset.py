"""Tests for NPY reading, manifest validation, and report writing."""

from __future__ import annotations

import json
import struct

import numpy as np
import pytest

from plmshape import LayerReport, MomentCurve, read_manifest, read_npy, write_report
from plmshape.dataset import (report_to_dict, scalars_path_for,
                              validate_embedding)
from plmshape.errors import (BadMagic, LengthMismatch, MissingFile,
                             NotTwoDimensional, SchemaError, TruncatedData,
                             UnsupportedDtype, UnsupportedOrder)
from plmshape.pdb import Chain, Residue


def npy_bytes(header: str, payload: bytes) -> bytes:
    raw = header.encode("latin-1")
    pad = 64 - (10 + len(raw) + 1) % 64
    raw += b" " * pad + b"\n"
    return b"\x93NUMPY\x01\x00" + struct.pack("<H", len(raw)) + raw + payload


def test_handwritten_npy_header(tmp_path):
    payload = np.arange(6, dtype="<f8").tobytes()
    path = tmp_path / "a.npy"
    path.write_bytes(npy_bytes(
        "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }", payload))
    cloud = read_npy(path)
    assert cloud.points.shape == (2, 3)
    np.testing.assert_array_equal(cloud.points, np.arange(6.0).reshape(2, 3))


def test_npy_roundtrip_float64(tmp_path, rng):
    arr = rng.normal(size=(7, 4))
    np.save(tmp_path / "b.npy", arr)
    np.testing.assert_array_equal(read_npy(tmp_path / "b.npy").points, arr)


def test_npy_roundtrip_float32_widened(tmp_path, rng):
    arr = rng.normal(size=(5, 3)).astype(np.float32)
    np.save(tmp_path / "c.npy", arr)
    cloud = read_npy(tmp_path / "c.npy")
    assert cloud.points.dtype == np.float64
    np.testing.assert_allclose(cloud.points, arr, atol=1e-6)


def test_bad_magic(tmp_path):
    path = tmp_path / "x.npy"
    path.write_bytes(b"NOTNPY\x01\x00junk")
    with pytest.raises(BadMagic):
        read_npy(path)


def test_unsupported_version(tmp_path):
    path = tmp_path / "x.npy"
    path.write_bytes(b"\x93NUMPY\x03\x00junkjunk")
    with pytest.raises(BadMagic):
        read_npy(path)


def test_unsupported_dtype(tmp_path):
    path = tmp_path / "x.npy"
    path.write_bytes(npy_bytes(
        "{'descr': '<i8', 'fortran_order': False, 'shape': (2, 3), }", b"\x00" * 48))
    with pytest.raises(UnsupportedDtype):
        read_npy(path)


def test_fortran_order_rejected(tmp_path):
    path = tmp_path / "x.npy"
    path.write_bytes(npy_bytes(
        "{'descr': '<f8', 'fortran_order': True, 'shape': (2, 3), }", b"\x00" * 48))
    with pytest.raises(UnsupportedOrder):
        read_npy(path)


def test_not_two_dimensional(tmp_path):
    path = tmp_path / "x.npy"
    path.write_bytes(npy_bytes(
        "{'descr': '<f8', 'fortran_order': False, 'shape': (6,), }", b"\x00" * 48))
    with pytest.raises(NotTwoDimensional):
        read_npy(path)


def test_truncated_payload_is_error_not_partial(tmp_path):
    path = tmp_path / "x.npy"
    path.write_bytes(npy_bytes(
        "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }", b"\x00" * 30))
    with pytest.raises(TruncatedData):
        read_npy(path)


def make_manifest(tmp_path, rng, entries=1):
    doc = {"entries": []}
    for i in range(entries):
        pdb = tmp_path / f"p{i}.pdb"
        pdb.write_text("ATOM      1  CA  ALA A   1       0.000   0.000   0.000\n")
        emb = tmp_path / f"p{i}.npy"
        np.save(emb, rng.normal(size=(4, 6)))
        doc["entries"].append({
            "protein_id": f"p{i}", "class_label": "Alpha",
            "pdb_path": pdb.name, "chain": "A",
            "layers": [{"layer_index": 0, "embedding_path": emb.name}],
        })
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(doc))
    return path, doc


def test_manifest_roundtrip(tmp_path, rng):
    path, doc = make_manifest(tmp_path, rng, entries=2)
    manifest = read_manifest(path)
    assert [e.protein_id for e in manifest.entries] == ["p0", "p1"]
    assert manifest.entries[0].class_label == "Alpha"
    assert manifest.entries[0].layers[0].layer_index == 0
    assert manifest.entries[0].pdb_path.exists()
    assert manifest.class_labels == ["Alpha"]
    assert manifest.layer_indices == [0]


def test_manifest_empty_entries(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"entries": []}))
    with pytest.raises(SchemaError):
        read_manifest(path)


def test_manifest_missing_file_names_path(tmp_path, rng):
    path, doc = make_manifest(tmp_path, rng)
    doc["entries"][0]["pdb_path"] = "absent.pdb"
    path.write_text(json.dumps(doc))
    with pytest.raises(MissingFile, match="absent.pdb"):
        read_manifest(path)


def test_manifest_duplicate_protein_id(tmp_path, rng):
    path, doc = make_manifest(tmp_path, rng, entries=2)
    doc["entries"][1]["protein_id"] = "p0"
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="duplicate"):
        read_manifest(path)


def test_manifest_layer_order_enforced(tmp_path, rng):
    path, doc = make_manifest(tmp_path, rng)
    layer = doc["entries"][0]["layers"][0]
    doc["entries"][0]["layers"] = [layer, dict(layer)]
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="strictly increasing"):
        read_manifest(path)


def test_validate_embedding_counts(rng):
    chain = Chain("A", [Residue(i, "", np.zeros(3)) for i in range(5)])
    from plmshape import PointCloud
    good = PointCloud(rng.normal(size=(5, 8)))
    assert validate_embedding(good, chain, "p") is good
    with pytest.raises(LengthMismatch, match="p:"):
        validate_embedding(PointCloud(rng.normal(size=(7, 8))), chain, "p")


def sample_reports():
    curve = MomentCurve(ks=[1, 2], raw_mean=np.array([0.0, 2.0]),
                        baseline_mean=np.array([4.0, 8.0]),
                        normalized=np.array([0.0, 0.25]))
    return [
        LayerReport(layer_index=-1, class_label="Alpha", n_proteins=3,
                    frechet_radius_geodesic=0.5, frechet_radius_chordal=0.49,
                    effective_dimension_tangent=2.0, effective_dimension_flat=3.5),
        LayerReport(layer_index=0, class_label="Alpha", n_proteins=3,
                    moment_curve=curve, moment_min=0.0, moment_argmin_k=1),
        LayerReport(layer_index=1, class_label="Beta", n_proteins=2,
                    moment_curve=curve, moment_min=0.0, moment_argmin_k=1),
    ]


def test_empty_report_writes_headers(tmp_path):
    out = tmp_path / "r.csv"
    write_report([], out, "csv")
    assert out.read_text().startswith("layer_index,class_label,k")
    assert scalars_path_for(out).read_text().startswith("layer_index,class_label")


def test_json_write_then_parse_mirrors_reports(tmp_path):
    out = tmp_path / "r.json"
    reports = sample_reports()
    write_report(reports, out, "json")
    doc = json.loads(out.read_text())
    assert doc == [report_to_dict(r) for r in reports]
    assert doc[0]["frechet_radius_geodesic"] == 0.5
    assert doc[1]["moment_curve"]["normalized"] == [0.0, 0.25]


def test_csv_row_count_oracle(tmp_path):
    out = tmp_path / "r.csv"
    reports = sample_reports()
    write_report(reports, out, "csv")
    rows = out.read_text().splitlines()
    expected = sum(len(r.moment_curve.ks) for r in reports
                   if r.moment_curve is not None)
    assert len(rows) == 1 + expected  # header + moment rows
    scalar_rows = scalars_path_for(out).read_text().splitlines()
    assert len(scalar_rows) == 1 + len(reports)


def test_report_writer_is_pure(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_report(sample_reports(), a, "csv")
    write_report(sample_reports(), b, "csv")
    assert a.read_bytes() == b.read_bytes()
    assert scalars_path_for(a).read_bytes() == scalars_path_for(b).read_bytes()
