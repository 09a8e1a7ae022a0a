"""Point clouds, spline resampling, and the square-root velocity transform.

An ordered point cloud (a protein backbone in R^3 or one layer of per-residue
embeddings in R^m) is interpolated with a componentwise quadratic spline,
resampled at T uniform parameters on [0, 1], and mapped to its square-root
velocity (SRV) representation.  After unit-norm projection the SRV array is a
point on the unit sphere of the discrete L2 space, where geodesics are cheap.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import make_interp_spline

from .errors import ZeroCurve

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 1000

# Unit-norm tolerance for SrvShape construction.
UNIT_NORM_TOL = 1e-9


def l2_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Discrete L2 inner product <a, b> = (1/T) sum_i a_i . b_i.

    The 1/T quadrature weight makes norms independent of the sample count, so
    shapes resampled at different resolutions live on the same unit sphere.
    """
    return float(np.vdot(a, b)) / a.shape[0]


def l2_norm(a: np.ndarray) -> float:
    """Discrete L2 norm induced by :func:`l2_inner`."""
    return math.sqrt(max(l2_inner(a, a), 0.0))


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered L x m matrix: a backbone (m = 3) or one layer's embeddings."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError(f"points must be 2-D, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise ValueError("a point cloud needs at least 2 points")
        if pts.shape[1] < 1:
            raise ValueError("ambient dimension must be at least 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud contains non-finite entries")
        object.__setattr__(self, "points", pts)

    @property
    def L(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class Curve:
    """A curve gamma sampled at T uniform parameters, with its derivative.

    ``degenerate`` flags clouds with consecutive duplicate points; those
    produce zero-derivative samples, which the SRV transform maps to q = 0.
    """

    samples: np.ndarray
    derivatives: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        d = np.asarray(self.derivatives, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] < 2:
            raise ValueError(f"samples must be T x m with T >= 2, got {s.shape}")
        if d.shape != s.shape:
            raise ValueError("derivatives must match samples in shape")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(d))):
            raise ValueError("curve contains non-finite entries")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "derivatives", d)

    @property
    def T(self) -> int:
        return self.samples.shape[0]

    @property
    def m(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True, eq=False)
class SrvShape:
    """SRV array q (T x m) with unit discrete L2 norm."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] < 2:
            raise ValueError(f"q must be T x m with T >= 2, got {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("q contains non-finite entries")
        norm = l2_norm(q)
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"q must have unit discrete L2 norm, got {norm!r}")
        object.__setattr__(self, "q", q)

    @property
    def T(self) -> int:
        return self.q.shape[0]

    @property
    def m(self) -> int:
        return self.q.shape[1]


def fit_and_resample(cloud: PointCloud, T: int = DEFAULT_SAMPLES) -> Curve:
    """Fit a quadratic spline through the cloud and resample it uniformly.

    A componentwise quadratic spline is fit through the L points at uniform
    knots l/(L-1) and evaluated, with its analytic first derivative, at T
    uniform parameters on [0, 1].  For L = 2 the spline degenerates to linear
    interpolation.

    Args:
        cloud: ordered points to interpolate.
        T: number of output samples, >= 2.

    Returns:
        The resampled curve; ``degenerate`` is set (and a warning logged) when
        the cloud has consecutive duplicate points.
    """
    if T < 2:
        raise ValueError(f"sample count T must be >= 2, got {T}")
    knots = np.linspace(0.0, 1.0, cloud.L)
    degree = min(2, cloud.L - 1)
    spline = make_interp_spline(knots, cloud.points, k=degree, axis=0)
    params = np.linspace(0.0, 1.0, T)
    samples = spline(params)
    derivatives = spline.derivative()(params)

    degenerate = bool(np.any(np.all(np.diff(cloud.points, axis=0) == 0.0, axis=1)))
    if degenerate:
        log.warning("point cloud has consecutive duplicate points; "
                    "zero-derivative samples map to q = 0")
    return Curve(samples, derivatives, degenerate)


def srv_transform(curve: Curve) -> SrvShape:
    """Map a curve to its square-root velocity representation.

    q_i = dgamma_i / sqrt(||dgamma_i||), with q_i = 0 where the derivative
    vanishes, then rescaled by one positive scalar to unit discrete L2 norm
    (equivalently, the curve is rescaled to unit length), which projects the
    representation onto the unit sphere.

    Raises:
        ZeroCurve: if every derivative sample is zero.
    """
    d = curve.derivatives
    speed = np.linalg.norm(d, axis=1)
    nonzero = speed > 0.0
    if not np.any(nonzero):
        raise ZeroCurve("all derivative samples are zero; cannot normalize")
    q = np.zeros_like(d)
    q[nonzero] = d[nonzero] / np.sqrt(speed[nonzero])[:, None]
    return SrvShape(q / l2_norm(q))


def srv_inverse(srv: SrvShape, origin: np.ndarray) -> Curve:
    """Reconstruct a curve from its SRV representation.

    The derivative field q_i * ||q_i|| is integrated cumulatively with the
    trapezoid rule from ``origin``.  Composing ``srv_transform`` after this
    reproduces q up to floating-point error; the curve itself is recovered up
    to the trapezoid quadrature error.
    """
    origin = np.asarray(origin, dtype=np.float64)
    if origin.shape != (srv.m,):
        raise ValueError(f"origin must be a {srv.m}-vector, got shape {origin.shape}")
    q = srv.q
    f = q * np.linalg.norm(q, axis=1)[:, None]
    samples = origin + cumulative_trapezoid(f, dx=1.0 / (srv.T - 1), axis=0, initial=0.0)
    return Curve(samples, f)
