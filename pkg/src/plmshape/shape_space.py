"""Geometry of the rotation-quotiented unit sphere of SRV shapes.

Distances between two shapes are computed after rotating one onto the other
with the SVD (Kabsch) solution of the orthogonal Procrustes problem restricted
to SO(m).  Rotations act on the right of T x m sample matrices, i.e. every
sample row is rotated by the same matrix.  The sphere exponential and
logarithm operate on already-aligned shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import SrvShape, l2_inner, l2_norm
from .errors import AntipodalPoints, DimensionMismatch

# Below this geodesic distance the log map returns the zero vector.
LOG_EPS = 1e-12
# Within this distance of pi the log map is refused as undefined.  arccos of
# a clipped inner product cannot resolve distances to pi finer than
# sqrt(2 * eps) ~ 2e-8, so the guard band sits just above that noise floor.
ANTIPODAL_TOL = 1e-7

ROTATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Rotation:
    """An m x m special orthogonal matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.matrix, dtype=np.float64)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError(f"rotation must be square, got shape {r.shape}")
        m = r.shape[0]
        if np.linalg.norm(r.T @ r - np.eye(m)) > ROTATION_TOL:
            raise ValueError("matrix is not orthogonal")
        if np.linalg.det(r) <= 0.0:
            raise ValueError("matrix has non-positive determinant")
        object.__setattr__(self, "matrix", r)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector v tangent to the unit sphere at ``base``: <v, base.q> = 0."""

    base: SrvShape
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64)
        if v.shape != self.base.q.shape:
            raise ValueError("tangent vector must match its base point in shape")
        if abs(l2_inner(v, self.base.q)) > 1e-8:
            raise ValueError("vector is not tangent to the sphere at base")
        object.__setattr__(self, "v", v)

    @property
    def norm(self) -> float:
        return l2_norm(self.v)


def _check_compatible(q1: SrvShape, q2: SrvShape) -> None:
    if q1.q.shape != q2.q.shape:
        raise DimensionMismatch(
            f"shapes disagree: {q1.q.shape} vs {q2.q.shape}")


def _procrustes_rotations(targets: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Batched Kabsch rotations aligning each targets[n] onto ``reference``.

    targets is (N, T, m), reference (T, m); returns (N, m, m) matrices R_n
    such that targets[n] @ R_n.T is closest to reference in Frobenius norm,
    with det(R_n) = +1 enforced by flipping the smallest singular direction.
    """
    M = np.einsum("nti,tj->nij", targets, reference)
    U, _, Vt = np.linalg.svd(M)
    V = np.swapaxes(Vt, -1, -2)
    signs = np.sign(np.linalg.det(U) * np.linalg.det(Vt))
    signs[signs == 0.0] = 1.0
    V = V.copy()
    V[:, :, -1] *= signs[:, None]
    return V @ np.swapaxes(U, -1, -2)


def optimal_rotation(q1: SrvShape, q2: SrvShape) -> Rotation:
    """Rotation minimizing ||q1 - q2 R^T|| over SO(m) (rows rotated).

    Computed from the SVD of M = q2^T q1 as V diag(1, ..., 1, det(V U^T)) U^T,
    the determinant-corrected Kabsch solution.
    """
    _check_compatible(q1, q2)
    return Rotation(_procrustes_rotations(q2.q[None], q1.q)[0])


def align(shape: SrvShape, reference: SrvShape) -> SrvShape:
    """Rotate ``shape`` onto ``reference`` with its optimal rotation."""
    r = optimal_rotation(reference, shape)
    return SrvShape(shape.q @ r.matrix.T)


def chordal_distance(q1: SrvShape, q2: SrvShape) -> float:
    """Discrete L2 norm of q1 - align(q2, q1); zero iff equal up to rotation."""
    _check_compatible(q1, q2)
    return l2_norm(q1.q - align(q2, q1).q)


def geodesic_distance(q1: SrvShape, q2: SrvShape) -> float:
    """Arc length on the unit sphere between q1 and rotation-aligned q2, in [0, pi]."""
    _check_compatible(q1, q2)
    cos_d = l2_inner(q1.q, align(q2, q1).q)
    return math.acos(min(1.0, max(-1.0, cos_d)))


def sphere_log(p: SrvShape, y: SrvShape) -> TangentVector:
    """Log map of y at p on the unit sphere.

    z = d / sin(d) * (y - cos(d) p) with d the geodesic arc length, so that
    ||z|| = d.  The caller is responsible for rotation-aligning y to p first;
    no alignment happens here.

    Raises:
        AntipodalPoints: if d is numerically indistinguishable from pi
            (closer than the arccos noise floor; see ANTIPODAL_TOL).
    """
    _check_compatible(p, y)
    cos_d = min(1.0, max(-1.0, l2_inner(p.q, y.q)))
    d = math.acos(cos_d)
    if d < LOG_EPS:
        return TangentVector(p, np.zeros_like(p.q))
    if math.pi - d < ANTIPODAL_TOL:
        raise AntipodalPoints(f"points at geodesic distance {d!r}, too close to pi")
    v = (d / math.sin(d)) * (y.q - cos_d * p.q)
    return TangentVector(p, v)


def sphere_exp(p: SrvShape, v: TangentVector) -> SrvShape:
    """Exponential map at p: cos(||v||) p + sin(||v||) v / ||v||."""
    if v.v.shape != p.q.shape:
        raise DimensionMismatch(
            f"tangent vector shape {v.v.shape} does not match point {p.q.shape}")
    n = v.norm
    if n < LOG_EPS:
        return p
    out = math.cos(n) * p.q + math.sin(n) * (v.v / n)
    # guard: renormalize away the rounding from cos^2 + sin^2
    return SrvShape(out / l2_norm(out))
