"""Command-line entry points for the per-layer analysis pipeline.

Subcommands: ``parse-pdb`` (extract a C-alpha cloud to NPY), ``shape-stats``
(Karcher mean, Fréchet radius, effective dimensions per layer and class),
``filtration`` (normalized graph-filtration moments), and ``baseline-check``
(Monte Carlo self-diagnostic of the analytic random baseline).

Runs are deterministic: per-protein RNG streams are derived from the seed and
the manifest position, and results are reduced in manifest order, so thread
count never changes the output bytes.  Proteins that fail are skipped with a
warning; any skip makes the exit code nonzero and emits a JSON error summary
on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dataset, filtration, manifold_stats, pdb
from .curve import DEFAULT_SAMPLES, PointCloud, fit_and_resample, srv_transform
from .errors import PlmShapeError

STRUCTURE_LAYER = -1  # pseudo layer index for the 3d-structure baseline rows


@dataclass
class RunConfig:
    """Resolved options shared by the analysis subcommands."""

    manifest_path: Path
    out: Path
    format: str = "csv"
    points: int = DEFAULT_SAMPLES
    k_max: int = filtration.DEFAULT_K_CAP
    n_baseline: int = filtration.DEFAULT_N_BASELINE
    seed: int = 0
    threads: int = 0  # 0 = available parallelism
    symmetrize: bool = False
    karcher_step: float = manifold_stats.DEFAULT_STEP
    karcher_tol: float = manifold_stats.DEFAULT_TOL
    karcher_max_iter: int = manifold_stats.DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("--points must be >= 2")
        if self.threads <= 0:
            self.threads = os.cpu_count() or 1


@dataclass
class _Protein:
    """One manifest entry loaded into memory."""

    protein_id: str
    class_label: str
    structure: PointCloud
    embeddings: dict[int, PointCloud]


class _ErrorLog:
    def __init__(self):
        self.records: list[dict] = []

    def add(self, protein_id: str, context: str, error: Exception):
        record = {"protein_id": protein_id, "context": context,
                  "error": f"{type(error).__name__}: {error}"}
        self.records.append(record)
        print(f"warning: skipping {protein_id} ({context}): "
              f"{record['error']}", file=sys.stderr)

    def finish(self) -> int:
        if not self.records:
            return 0
        print(json.dumps({"errors": self.records}), file=sys.stderr)
        return 1


def _map_ordered(fn, items, threads: int):
    """Parallel map that preserves input order (deterministic reduction)."""
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _select_chain(chains: list[pdb.Chain], wanted: str | None) -> pdb.Chain:
    if wanted is None:
        return chains[0]
    for chain in chains:
        if chain.chain_id == wanted:
            return chain
    available = ", ".join(repr(c.chain_id) for c in chains)
    raise PlmShapeError(f"chain {wanted!r} not found; available: {available}")


def _load_protein(entry: dataset.ManifestEntry) -> _Protein:
    chains = pdb.parse_pdb(entry.pdb_path.read_text(encoding="utf-8", errors="replace"))
    chain = _select_chain(chains, entry.chain)
    structure = pdb.extract_point_cloud(chain)
    embeddings = {}
    for layer in entry.layers:
        cloud = dataset.read_npy(layer.embedding_path)
        dataset.validate_embedding(cloud, chain, entry.protein_id)
        embeddings[layer.layer_index] = cloud
    return _Protein(entry.protein_id, entry.class_label, structure, embeddings)


def _load_all(manifest: dataset.DatasetManifest, threads: int,
              errors: _ErrorLog) -> list[_Protein]:
    def load(entry):
        try:
            return _load_protein(entry)
        except (PlmShapeError, OSError, ValueError) as exc:
            return (entry.protein_id, exc)

    proteins = []
    for result in _map_ordered(load, list(manifest.entries), threads):
        if isinstance(result, _Protein):
            proteins.append(result)
        else:
            errors.add(result[0], "load", result[1])
    return proteins


# --- shape-stats ---

def _srv_shapes(named_clouds, cfg: RunConfig, context: str, errors: _ErrorLog):
    """SRV-transform each (id, cloud) pair, skipping per-protein failures."""
    def work(item):
        pid, cloud = item
        try:
            return pid, cloud, srv_transform(fit_and_resample(cloud, cfg.points))
        except PlmShapeError as exc:
            return pid, cloud, exc

    kept_clouds, shapes = [], []
    for pid, cloud, result in _map_ordered(work, named_clouds, cfg.threads):
        if isinstance(result, Exception):
            errors.add(pid, context, result)
        else:
            kept_clouds.append(cloud)
            shapes.append(result)
    return kept_clouds, shapes


def _stats_report(layer_index: int, class_label: str, named_clouds,
                  cfg: RunConfig, errors: _ErrorLog) -> dataset.LayerReport | None:
    context = f"shape-stats layer {layer_index} class {class_label}"
    clouds, shapes = _srv_shapes(named_clouds, cfg, context, errors)
    if not shapes:
        return None
    km = manifold_stats.karcher_mean(shapes, cfg.karcher_step, cfg.karcher_tol,
                                     cfg.karcher_max_iter)
    radius = manifold_stats.frechet_radius(shapes, km.mean)
    report = dataset.LayerReport(
        layer_index=layer_index,
        class_label=class_label,
        n_proteins=len(shapes),
        frechet_radius_geodesic=float(radius.geodesic),
        frechet_radius_chordal=float(radius.chordal),
    )
    if len(shapes) >= 2:
        tangent = manifold_stats.tangent_pca(shapes, km.mean)
        flat = manifold_stats.flat_effective_dimension(clouds, cfg.points)
        report.effective_dimension_tangent = float(tangent.effective_dimension)
        report.effective_dimension_flat = float(flat.effective_dimension)
        report.degenerate = tangent.degenerate or flat.degenerate
    return report


def cmd_shape_stats(cfg: RunConfig) -> int:
    manifest = dataset.read_manifest(cfg.manifest_path)
    errors = _ErrorLog()
    proteins = _load_all(manifest, cfg.threads, errors)

    reports = []
    for class_label in manifest.class_labels:
        members = [p for p in proteins if p.class_label == class_label]
        if not members:
            continue
        named = [(p.protein_id, p.structure) for p in members]
        report = _stats_report(STRUCTURE_LAYER, class_label, named, cfg, errors)
        if report is not None:
            reports.append(report)
        for layer in sorted({idx for p in members for idx in p.embeddings}):
            named = [(p.protein_id, p.embeddings[layer])
                     for p in members if layer in p.embeddings]
            report = _stats_report(layer, class_label, named, cfg, errors)
            if report is not None:
                reports.append(report)

    dataset.write_report(reports, cfg.out, cfg.format)
    return errors.finish()


# --- filtration ---

def cmd_filtration(cfg: RunConfig) -> int:
    manifest = dataset.read_manifest(cfg.manifest_path)
    errors = _ErrorLog()
    proteins = _load_all(manifest, cfg.threads, errors)

    reports = []
    for class_label in manifest.class_labels:
        members = [p for p in proteins if p.class_label == class_label]
        if not members:
            continue
        for layer in sorted({idx for p in members for idx in p.embeddings}):
            subset = [p for p in members if layer in p.embeddings]
            structures = [p.structure for p in subset]
            embeddings = [p.embeddings[layer] for p in subset]
            l_min = min(s.L for s in structures)
            ks = list(range(1, min(cfg.k_max, l_min - 1) + 1))
            curve = filtration.filtration_moment(
                structures, embeddings, ks,
                n_baseline=cfg.n_baseline, seed=cfg.seed,
                symmetrize=cfg.symmetrize, threads=cfg.threads)
            argmin = int(np.argmin(curve.normalized))
            reports.append(dataset.LayerReport(
                layer_index=layer,
                class_label=class_label,
                n_proteins=len(subset),
                moment_curve=curve,
                moment_min=float(curve.normalized[argmin]),
                moment_argmin_k=int(curve.ks[argmin]),
            ))

    dataset.write_report(reports, cfg.out, cfg.format)
    return errors.finish()


# --- parse-pdb ---

def cmd_parse_pdb(pdb_path: Path, chain_id: str | None, out_path: Path) -> int:
    chains = pdb.parse_pdb(Path(pdb_path).read_text(encoding="utf-8", errors="replace"))
    chain = _select_chain(chains, chain_id)
    cloud = pdb.extract_point_cloud(chain)
    np.save(out_path, cloud.points)
    print(f"chain {chain.chain_id}: {cloud.L} residues -> {out_path}")
    return 0


# --- baseline-check ---

def cmd_baseline_check(length: int, k_max: int, n_samples: int, seed: int,
                       dim: int = 3) -> int:
    """Monte Carlo vs analytic expected adjacency distance, per k."""
    rng = np.random.default_rng(seed)
    k_max = min(k_max, length - 1)
    ks = list(range(1, k_max + 1))
    samples = np.zeros((n_samples, len(ks)))
    for s in range(n_samples):
        f1 = filtration.knn_filtration(
            PointCloud(rng.standard_normal((length, dim))), k_max)
        f2 = filtration.knn_filtration(
            PointCloud(rng.standard_normal((length, dim))), k_max)
        samples[s] = [filtration.adjacency_distance(f1, f2, k) for k in ks]

    print(f"L={length} dim={dim} n_samples={n_samples} seed={seed}")
    print(f"{'k':>4} {'analytic':>12} {'monte_carlo':>12} {'std_err':>10} {'rel_gap':>10}")
    for j, k in enumerate(ks):
        analytic = filtration.expected_random_distance(length, k)
        mc = float(samples[:, j].mean())
        se = float(samples[:, j].std(ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else 0.0
        gap = abs(mc - analytic) / analytic if analytic > 0 else abs(mc - analytic)
        print(f"{k:>4} {analytic:>12.4f} {mc:>12.4f} {se:>10.4f} {gap:>10.4%}")
    return 0


# --- argument plumbing ---

def _add_run_options(sub: argparse.ArgumentParser):
    sub.add_argument("--manifest", type=Path, help="dataset manifest JSON")
    sub.add_argument("--points", type=int, help="spline resample count (default 1000)")
    sub.add_argument("--k-max", type=int, dest="k_max",
                     help="largest neighbor count (default 64, capped at L-1)")
    sub.add_argument("--n-baseline", type=int, dest="n_baseline",
                     help="random clouds per protein for the baseline (default 8)")
    sub.add_argument("--seed", type=int, help="master RNG seed (default 0)")
    sub.add_argument("--threads", type=int,
                     help="worker threads (default: available parallelism)")
    sub.add_argument("--symmetrize", action="store_true", default=None,
                     help="compare OR-symmetrized kNN adjacency instead of directed")
    sub.add_argument("--out", type=Path, help="output report path")
    sub.add_argument("--format", choices=["csv", "json"], help="report format")
    sub.add_argument("--config", type=Path,
                     help="JSON config file; explicit flags override it")
    sub.add_argument("--karcher-step", type=float, dest="karcher_step")
    sub.add_argument("--karcher-tol", type=float, dest="karcher_tol")
    sub.add_argument("--karcher-max-iter", type=int, dest="karcher_max_iter")


_CONFIG_KEYS = ["manifest", "points", "k_max", "n_baseline", "seed", "threads",
                "symmetrize", "out", "format", "karcher_step", "karcher_tol",
                "karcher_max_iter"]


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    file_values = {}
    if args.config is not None:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        unknown = set(doc) - set(_CONFIG_KEYS)
        if unknown:
            raise PlmShapeError(f"unknown config keys: {sorted(unknown)}")
        file_values = doc

    def pick(key, default=None):
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            return cli_value
        return file_values.get(key, default)

    manifest = pick("manifest")
    out = pick("out")
    if manifest is None:
        raise PlmShapeError("--manifest is required (flag or config file)")
    if out is None:
        raise PlmShapeError("--out is required (flag or config file)")

    kwargs = {}
    for key in ["points", "k_max", "n_baseline", "seed", "threads",
                "karcher_step", "karcher_tol", "karcher_max_iter", "format"]:
        value = pick(key)
        if value is not None:
            kwargs[key] = value
    symmetrize = pick("symmetrize")
    if symmetrize is not None:
        kwargs["symmetrize"] = bool(symmetrize)
    return RunConfig(manifest_path=Path(manifest), out=Path(out), **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plmshape",
        description="Shape-space and graph-filtration analysis of protein "
                    "backbones and PLM layer representations.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("parse-pdb", help="extract a C-alpha cloud to NPY")
    p.add_argument("pdb_path", type=Path)
    p.add_argument("--chain", help="chain id (default: first chain)")
    p.add_argument("--out", type=Path, required=True)

    p = subs.add_parser("shape-stats",
                        help="Karcher mean, Fréchet radius, effective dimensions")
    _add_run_options(p)

    p = subs.add_parser("filtration", help="normalized graph-filtration moments")
    _add_run_options(p)

    p = subs.add_parser("baseline-check",
                        help="Monte Carlo vs analytic random-baseline diagnostic")
    p.add_argument("--length", type=int, required=True, help="cloud size L")
    p.add_argument("--k-max", type=int, dest="k_max", default=8)
    p.add_argument("--n-samples", type=int, dest="n_samples", default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=3)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "parse-pdb":
            return cmd_parse_pdb(args.pdb_path, args.chain, args.out)
        if args.command == "shape-stats":
            return cmd_shape_stats(_resolve_config(args))
        if args.command == "filtration":
            return cmd_filtration(_resolve_config(args))
        if args.command == "baseline-check":
            return cmd_baseline_check(args.length, args.k_max,
                                      args.n_samples, args.seed, args.dim)
    except PlmShapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
