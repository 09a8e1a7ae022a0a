"""Shape-space and graph-filtration geometry of ordered point clouds.

Quantifies protein backbones and protein-language-model layer representations
through square-root velocity shape spaces (Karcher mean, Fréchet radius,
tangent-PCA effective dimension) and kNN graph-filtration moments.
"""

from .curve import (Curve, PointCloud, SrvShape, fit_and_resample, l2_inner,
                    l2_norm, srv_inverse, srv_transform)
from .dataset import (DatasetManifest, LayerReport, ManifestEntry,
                      ManifestLayer, read_manifest, read_npy, write_report)
from .filtration import (KnnFiltration, MomentCurve, adjacency_distance,
                         baseline_distance, expected_random_distance,
                         filtration_moment, knn_filtration)
from .manifold_stats import (FrechetRadius, KarcherResult, SpectrumResult,
                             effective_dimension, flat_effective_dimension,
                             frechet_radius, karcher_mean, tangent_pca)
from .pdb import Chain, Residue, chain_to_pdb_text, extract_point_cloud, parse_pdb
from .shape_space import (Rotation, TangentVector, align, chordal_distance,
                          geodesic_distance, optimal_rotation, sphere_exp,
                          sphere_log)

__version__ = "0.1.0"

__all__ = [
    "Chain", "Curve", "DatasetManifest", "FrechetRadius", "KarcherResult",
    "KnnFiltration", "LayerReport", "ManifestEntry", "ManifestLayer",
    "MomentCurve", "PointCloud", "Residue", "Rotation", "SpectrumResult",
    "SrvShape", "TangentVector", "adjacency_distance", "align",
    "baseline_distance", "chain_to_pdb_text", "chordal_distance",
    "effective_dimension", "expected_random_distance", "extract_point_cloud",
    "filtration_moment", "fit_and_resample", "flat_effective_dimension",
    "frechet_radius", "geodesic_distance", "karcher_mean", "knn_filtration",
    "l2_inner", "l2_norm", "optimal_rotation", "parse_pdb", "read_manifest",
    "read_npy", "sphere_exp", "sphere_log", "srv_inverse", "srv_transform",
    "tangent_pca", "write_report",
]
