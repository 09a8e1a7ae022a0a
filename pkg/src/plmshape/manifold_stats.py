"""Population statistics on the shape sphere.

Karcher mean by quotient-aware gradient descent (every shape is re-aligned to
the current mean each iteration), Fréchet radius in both metrics, tangent PCA
with the participation-ratio effective dimension, and the flattened-PCA
baseline that skips the manifold entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import PointCloud, SrvShape, fit_and_resample, l2_norm
from .errors import AntipodalPoints, DimensionMismatch, EmptyInput
from .shape_space import (ANTIPODAL_TOL, LOG_EPS, TangentVector,
                          _procrustes_rotations, sphere_exp)

DEFAULT_STEP = 1.0
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 200


@dataclass
class KarcherResult:
    """Outcome of the Karcher-mean descent.

    ``objective_history[i]`` is the sum of squared geodesic distances to the
    iterate at the start of iteration i; it is non-increasing for populations
    inside a geodesic ball.
    """

    mean: SrvShape
    iterations: int
    final_gradient_norm: float
    converged: bool
    objective_history: list[float] = field(default_factory=list)


@dataclass
class FrechetRadius:
    """Mean distance of a population to a center, in both metrics."""

    geodesic: float
    chordal: float
    distances_geodesic: np.ndarray
    distances_chordal: np.ndarray


@dataclass
class SpectrumResult:
    """Descending covariance eigenvalues and their participation ratio."""

    eigenvalues: np.ndarray
    effective_dimension: float
    degenerate: bool = False


def _as_stack(shapes: list[SrvShape]) -> np.ndarray:
    if not shapes:
        raise EmptyInput("need at least one shape")
    first = shapes[0].q.shape
    for i, s in enumerate(shapes):
        if s.q.shape != first:
            raise DimensionMismatch(
                f"shape {i} has shape {s.q.shape}, expected {first}")
    return np.stack([s.q for s in shapes])


def _aligned_logs(p_q: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Align every ys[n] to p, then take the sphere log at p.

    Returns (logs, distances): logs is (N, T, m) with ||logs[n]|| equal to the
    geodesic distance d_n.  Vectorized twin of shape_space.sphere_log.
    """
    T = p_q.shape[0]
    rots = _procrustes_rotations(ys, p_q)
    aligned = np.einsum("nti,nji->ntj", ys, rots)
    cos_d = np.clip(np.einsum("nti,ti->n", aligned, p_q) / T, -1.0, 1.0)
    d = np.arccos(cos_d)
    if np.any(math.pi - d < ANTIPODAL_TOL):
        raise AntipodalPoints("population contains a point antipodal to the mean")
    small = d < LOG_EPS
    coef = np.where(small, 1.0, d / np.sin(np.where(small, 1.0, d)))
    logs = coef[:, None, None] * (aligned - cos_d[:, None, None] * p_q)
    logs[small] = 0.0
    return logs, d


def _pairwise_geodesic(qs: np.ndarray) -> np.ndarray:
    """Full N x N matrix of aligned geodesic distances."""
    n, T = qs.shape[0], qs.shape[1]
    dist = np.zeros((n, n))
    for i in range(n):
        rots = _procrustes_rotations(qs, qs[i])
        aligned = np.einsum("nti,nji->ntj", qs, rots)
        cos_d = np.clip(np.einsum("nti,ti->n", aligned, qs[i]) / T, -1.0, 1.0)
        dist[i] = np.arccos(cos_d)
    return dist


def karcher_mean(shapes: list[SrvShape],
                 step: float = DEFAULT_STEP,
                 tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> KarcherResult:
    """Karcher mean of a shape population by Riemannian gradient descent.

    Each iteration re-aligns every shape to the current iterate, averages the
    log maps, and follows the sphere exponential:

        p <- exp_p( step/N * sum_i log_p(align(y_i, p)) )

    Descent starts at the medoid (the shape closest on average to all others
    under the geodesic distance) and stops when the tangent update norm drops
    below ``tol`` or after ``max_iter`` updates; non-convergence is flagged in
    the result rather than raised.
    """
    qs = _as_stack(shapes)
    n = qs.shape[0]
    if n == 1:
        return KarcherResult(shapes[0], 0, 0.0, True, [0.0])

    medoid = int(np.argmin(_pairwise_geodesic(qs).sum(axis=1)))
    p = shapes[medoid]

    history: list[float] = []
    iterations = 0
    converged = False
    grad_norm = math.inf
    for _ in range(max_iter):
        logs, d = _aligned_logs(p.q, qs)
        history.append(float(np.sum(d * d)))
        update = (step / n) * logs.sum(axis=0)
        grad_norm = l2_norm(update)
        if grad_norm < tol:
            converged = True
            break
        p = sphere_exp(p, TangentVector(p, update))
        iterations += 1
    return KarcherResult(p, iterations, grad_norm, converged, history)


def frechet_radius(shapes: list[SrvShape], mean: SrvShape) -> FrechetRadius:
    """Mean distance from each aligned shape to ``mean``, both metrics.

    The geodesic radius is the arithmetic mean of arc lengths; the chordal
    variant replaces the arc by the L2 chord on the same aligned pairs.
    """
    qs = _as_stack(shapes)
    if qs.shape[1:] != mean.q.shape:
        raise DimensionMismatch("mean does not match the population in shape")
    T = mean.q.shape[0]
    rots = _procrustes_rotations(qs, mean.q)
    aligned = np.einsum("nti,nji->ntj", qs, rots)
    cos_d = np.clip(np.einsum("nti,ti->n", aligned, mean.q) / T, -1.0, 1.0)
    d_geo = np.arccos(cos_d)
    diff = aligned - mean.q
    d_chord = np.sqrt(np.einsum("nti,nti->n", diff, diff) / T)
    return FrechetRadius(float(d_geo.mean()), float(d_chord.mean()), d_geo, d_chord)


def effective_dimension(eigenvalues: np.ndarray) -> float:
    """Participation ratio (sum lambda)^2 / sum lambda^2; 0 for a zero spectrum."""
    lam = np.asarray(eigenvalues, dtype=np.float64)
    s2 = float(np.sum(lam * lam))
    if s2 == 0.0:
        return 0.0
    s1 = float(np.sum(lam))
    return s1 * s1 / s2


def _spectrum(rows: np.ndarray, quad_T: int) -> SpectrumResult:
    """Covariance spectrum of flattened rows under the (1/T) L2 quadrature.

    Uses the N x N Gram matrix whenever the ambient dimension exceeds the
    population size; both routes share the nonzero spectrum.  Sample
    covariance is centered with divisor N - 1.  Eigenvalues at the centering
    roundoff floor (identical rows) are reported as exactly zero.
    """
    n, dim = rows.shape
    centered = rows - rows.mean(axis=0)
    scale = 1.0 / (quad_T * (n - 1))
    if dim > n:
        mat = centered @ centered.T * scale
    else:
        mat = centered.T @ centered * scale
    vals = np.linalg.eigvalsh(mat)[::-1]
    vals = np.clip(vals, 0.0, None)
    floor = float(np.mean(rows * rows)) * 1e-24
    vals[vals <= floor] = 0.0
    eff = effective_dimension(vals)
    return SpectrumResult(vals, eff, degenerate=eff == 0.0)


def tangent_pca(shapes: list[SrvShape], mean: SrvShape) -> SpectrumResult:
    """PCA of the population's log-map images in the tangent space at ``mean``.

    Every shape is rotation-aligned to the mean, projected by the log map,
    flattened to length T*m, and the sample covariance spectrum (tangent-mean
    centered, divisor N - 1) is returned together with the participation-ratio
    effective dimension.
    """
    qs = _as_stack(shapes)
    if len(shapes) < 2:
        raise EmptyInput("tangent PCA needs at least 2 shapes")
    if qs.shape[1:] != mean.q.shape:
        raise DimensionMismatch("mean does not match the population in shape")
    logs, _ = _aligned_logs(mean.q, qs)
    return _spectrum(logs.reshape(len(shapes), -1), mean.q.shape[0])


def flat_effective_dimension(clouds: list[PointCloud], T: int = 1000) -> SpectrumResult:
    """Ordinary PCA over curves resampled to T points and flattened.

    The manifold-free baseline: no SRV transform, no alignment, just the
    covariance spectrum of the T*m-dimensional resampled coordinates.
    """
    if len(clouds) < 2:
        raise EmptyInput("flat PCA needs at least 2 clouds")
    m = clouds[0].m
    for i, c in enumerate(clouds):
        if c.m != m:
            raise DimensionMismatch(f"cloud {i} has ambient dimension {c.m}, expected {m}")
    rows = np.stack([fit_and_resample(c, T).samples.ravel() for c in clouds])
    return _spectrum(rows, T)
