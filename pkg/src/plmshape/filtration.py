"""kNN graph filtrations and the normalized adjacency-distance moment.

Each point cloud induces a nested family of directed k-nearest-neighbor
graphs for k = 1..k_max (row i of the adjacency marks i's neighbors; no
symmetrization by default, which keeps the nesting property exact).  Two
filtrations over clouds of equal size are compared by the entrywise 1-norm
of their adjacency difference, and a population of structure/embedding pairs
is summarized by the per-k moment normalized against random-cloud baselines.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .curve import PointCloud
from .errors import KTooLarge, LengthMismatch, SizeMismatch

DEFAULT_N_BASELINE = 8
DEFAULT_K_CAP = 64


@dataclass(frozen=True, eq=False)
class KnnFiltration:
    """Nested neighbor lists of one cloud: row i holds i's k_max nearest points.

    Lists are ordered by ascending distance (ties to the lower index), so the
    k-neighbor set is always the first k entries of the k_max list.
    """

    neighbors: np.ndarray  # (L, k_max) int

    def __post_init__(self):
        nb = np.asarray(self.neighbors)
        if nb.ndim != 2 or not np.issubdtype(nb.dtype, np.integer):
            raise ValueError("neighbors must be an integer L x k_max matrix")
        L, k_max = nb.shape
        if not 1 <= k_max <= L - 1:
            raise ValueError(f"k_max must be in [1, L-1], got {k_max} for L={L}")
        if np.any(nb < 0) or np.any(nb >= L):
            raise ValueError("neighbor indices out of range")
        if np.any(nb == np.arange(L)[:, None]):
            raise ValueError("a point cannot neighbor itself")
        if any(len(set(row)) != k_max for row in nb):
            raise ValueError("duplicate entries in a neighbor list")
        object.__setattr__(self, "neighbors", nb)

    @property
    def L(self) -> int:
        return self.neighbors.shape[0]

    @property
    def k_max(self) -> int:
        return self.neighbors.shape[1]


@dataclass
class MomentCurve:
    """Per-k adjacency-distance means over a protein set, raw and normalized."""

    ks: list[int]
    raw_mean: np.ndarray
    baseline_mean: np.ndarray
    normalized: np.ndarray


def knn_filtration(cloud: PointCloud, k_max: int) -> KnnFiltration:
    """Exact k-nearest-neighbor lists under the ambient Euclidean metric.

    Self is excluded and distance ties break to the lower point index, which
    makes the construction deterministic on crafted symmetric inputs.

    Raises:
        KTooLarge: k_max outside [1, L-1].
    """
    if not 1 <= k_max <= cloud.L - 1:
        raise KTooLarge(f"k_max must be in [1, L-1], got {k_max} for L={cloud.L}")
    d = cdist(cloud.points, cloud.points, "sqeuclidean")
    np.fill_diagonal(d, np.inf)
    order = np.argsort(d, axis=1, kind="stable")  # stable => lower index on ties
    return KnnFiltration(order[:, :k_max])


def _check_k(f1: KnnFiltration, f2: KnnFiltration, k: int) -> None:
    if f1.L != f2.L:
        raise SizeMismatch(f"filtrations over {f1.L} vs {f2.L} points")
    if not 1 <= k <= min(f1.k_max, f2.k_max):
        raise KTooLarge(f"k={k} exceeds a filtration's k_max "
                        f"({f1.k_max} and {f2.k_max} available)")


def _symmetrized_sets(f: KnnFiltration, k: int) -> list[set[int]]:
    sets = [set(row[:k]) for row in f.neighbors]
    for i, row in enumerate(f.neighbors):
        for j in row[:k]:
            sets[j].add(i)
    return sets


def adjacency_distance(f1: KnnFiltration, f2: KnnFiltration, k: int,
                       symmetrize: bool = False) -> int:
    """Entrywise 1-norm of the difference of the two k-NN adjacency matrices.

    Computed per point as the symmetric difference of the first-k neighbor
    sets (exact integer arithmetic).  With ``symmetrize`` the OR-symmetrized
    adjacency (i~j if either lists the other) is compared instead.
    """
    _check_k(f1, f2, k)
    if symmetrize:
        total = sum(len(a ^ b) for a, b in
                    zip(_symmetrized_sets(f1, k), _symmetrized_sets(f2, k)))
        return int(total)
    total = 0
    for a, b in zip(f1.neighbors[:, :k], f2.neighbors[:, :k]):
        common = np.intersect1d(a, b, assume_unique=True).size
        total += 2 * (k - common)
    return int(total)


def expected_random_distance(L: int, k: int) -> float:
    """Analytic E[adjacency_distance] between two uniformly random filtrations.

    Per point the two k-neighbor sets are independent uniform k-subsets of an
    (L-1)-set, giving an expected symmetric difference of 2k(1 - k/(L-1));
    summing over L points yields 2Lk(1 - k/(L-1)).
    """
    if not 1 <= k <= L - 1:
        raise KTooLarge(f"k must be in [1, L-1], got {k} for L={L}")
    return 2.0 * L * k * (1.0 - k / (L - 1))


def baseline_distance(cloud: PointCloud, m_embed: int, k: int,
                      n_samples: int, seed: int,
                      symmetrize: bool = False) -> float:
    """Mean adjacency distance from ``cloud`` to i.i.d. Gaussian clouds.

    The ``n_samples`` random clouds have the same point count in R^m_embed;
    standard Gaussian coordinates are the canonical choice since kNN structure
    is invariant to similarity transforms.  Deterministic for a fixed seed.
    """
    if n_samples <= 0:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.default_rng(seed)
    f = knn_filtration(cloud, k)
    total = 0
    for _ in range(n_samples):
        random_cloud = PointCloud(rng.standard_normal((cloud.L, m_embed)))
        total += adjacency_distance(f, knn_filtration(random_cloud, k), k,
                                    symmetrize=symmetrize)
    return total / n_samples


def _moment_one_protein(structure: PointCloud, embedding: PointCloud,
                        ks: list[int], n_baseline: int,
                        seed_seq: np.random.SeedSequence,
                        symmetrize: bool) -> tuple[np.ndarray, np.ndarray]:
    k_top = max(ks)
    f_s = knn_filtration(structure, k_top)
    f_e = knn_filtration(embedding, k_top)
    raw = np.array([adjacency_distance(f_s, f_e, k, symmetrize=symmetrize)
                    for k in ks], dtype=np.float64)

    rng = np.random.default_rng(seed_seq)
    base = np.zeros(len(ks))
    for _ in range(n_baseline):
        cloud = PointCloud(rng.standard_normal((structure.L, embedding.m)))
        f_r = knn_filtration(cloud, k_top)
        base += [adjacency_distance(f_s, f_r, k, symmetrize=symmetrize) for k in ks]
    return raw, base / n_baseline


def filtration_moment(structures: list[PointCloud], embeddings: list[PointCloud],
                      ks: list[int] | None = None,
                      n_baseline: int = DEFAULT_N_BASELINE,
                      seed: int = 0,
                      symmetrize: bool = False,
                      threads: int | None = None) -> MomentCurve:
    """Normalized per-k first moment of structure-vs-embedding distances.

    For each k: the mean over proteins of the adjacency distance between the
    structure's and the embedding's kNN graphs, divided by the mean distance
    between the structures and random Gaussian clouds in the embedding's
    ambient dimension.  0 means identical graphs; 1 means the embedding
    arranges residues like a random cloud.

    ``ks`` defaults to 1..min(64, L_min - 1).  Each protein draws its random
    baselines from an RNG stream spawned from ``seed`` and its index, so the
    result does not depend on ``threads`` or scheduling.

    Raises:
        LengthMismatch: structures[i] and embeddings[i] differ in point count.
    """
    if len(structures) != len(embeddings):
        raise LengthMismatch(
            f"{len(structures)} structures vs {len(embeddings)} embeddings")
    if not structures:
        raise ValueError("need at least one structure/embedding pair")
    for i, (s, e) in enumerate(zip(structures, embeddings)):
        if s.L != e.L:
            raise LengthMismatch(
                f"protein {i}: structure has {s.L} points, embedding {e.L}")
    if ks is None:
        l_min = min(s.L for s in structures)
        ks = list(range(1, min(DEFAULT_K_CAP, l_min - 1) + 1))
    if not ks:
        raise ValueError("ks must be non-empty")
    ks = [int(k) for k in ks]

    seeds = np.random.SeedSequence(seed).spawn(len(structures))
    jobs = [(s, e, ks, n_baseline, ss, symmetrize)
            for (s, e), ss in zip(zip(structures, embeddings), seeds)]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda j: _moment_one_protein(*j), jobs))
    else:
        results = [_moment_one_protein(*j) for j in jobs]

    raw_mean = np.mean([r for r, _ in results], axis=0)
    baseline_mean = np.mean([b for _, b in results], axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        normalized = np.where(baseline_mean > 0.0, raw_mean / baseline_mean,
                              np.where(raw_mean == 0.0, 0.0, np.nan))
    return MomentCurve(ks, raw_mean, baseline_mean, normalized)
