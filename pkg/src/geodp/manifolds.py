"""Exact geometry kernels for the three model manifolds.

Supported models, all at unit curvature scale:

* ``euclidean:m``    -- R^m with the flat metric,
* ``sphere:m``       -- unit sphere S^m embedded in R^(m+1),
* ``hyperboloid:m``  -- upper sheet of the unit hyperboloid in Minkowski
  space R^(1,m), with <x,y>_L = -x0*y0 + sum_i xi*yi.

Module-level operations act on typed points; the ``*_array`` variants act
on raw coordinate arrays with leading batch dimensions and are what the
samplers and Monte-Carlo oracles use.  All randomness flows through an
explicit ``RngState`` or ``numpy.random.Generator``; nothing here keeps
state, so concurrent use on immutable inputs is safe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CutLocusError, DomainError, SpecMismatchError
from .numerics import bisect_increasing, gl_integral
from .rng import RngState

POINT_TOL = 1e-10
_TINY = 1e-14
_ANTIPODE_TOL = 1e-9


class Kind(enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERE = "sphere"
    HYPERBOLOID = "hyperboloid"


@dataclass(frozen=True)
class ManifoldSpec:
    """Manifold model plus the curvature constants the mechanisms need.

    ``ric_lower_K`` is the K in Ric >= -K: 0 for Euclidean space,
    -(m-1) for the unit sphere, m-1 for the unit hyperboloid.
    """

    kind: Kind
    m: int
    ric_lower_K: float
    sec_upper_kappa: float
    sec_lower: float
    inj_radius: float

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"dimension must be positive, got m={self.m}")
        if self.kind is Kind.EUCLIDEAN:
            ok = (
                self.ric_lower_K == 0.0
                and self.sec_upper_kappa == 0.0
                and self.sec_lower == 0.0
                and math.isinf(self.inj_radius)
            )
        elif self.kind is Kind.SPHERE:
            ok = (
                self.ric_lower_K == -(self.m - 1)
                and self.sec_upper_kappa == 1.0
                and self.sec_lower == 1.0
                and self.inj_radius == math.pi
            )
        else:
            ok = (
                self.ric_lower_K == self.m - 1
                and self.sec_upper_kappa == -1.0
                and self.sec_lower == -1.0
                and math.isinf(self.inj_radius)
            )
        if not ok:
            raise DomainError(f"inconsistent curvature data for {self.kind.value}:{self.m}")

    @staticmethod
    def euclidean(m: int) -> "ManifoldSpec":
        return ManifoldSpec(Kind.EUCLIDEAN, m, 0.0, 0.0, 0.0, math.inf)

    @staticmethod
    def sphere(m: int) -> "ManifoldSpec":
        return ManifoldSpec(Kind.SPHERE, m, -(m - 1.0), 1.0, 1.0, math.pi)

    @staticmethod
    def hyperboloid(m: int) -> "ManifoldSpec":
        return ManifoldSpec(Kind.HYPERBOLOID, m, m - 1.0, -1.0, -1.0, math.inf)

    @property
    def ambient_dim(self) -> int:
        return self.m if self.kind is Kind.EUCLIDEAN else self.m + 1

    @property
    def is_hadamard(self) -> bool:
        return self.kind in (Kind.EUCLIDEAN, Kind.HYPERBOLOID)

    @property
    def label(self) -> str:
        return f"{self.kind.value}:{self.m}"


def from_label(label: str) -> ManifoldSpec:
    """Parse 'kind:m' (e.g. 'sphere:2') into a spec."""
    try:
        kind_str, m_str = label.split(":")
        m = int(m_str)
        kind = Kind(kind_str.lower())
    except (ValueError, KeyError) as exc:
        raise DomainError(f"cannot parse manifold label {label!r}") from exc
    factory = {
        Kind.EUCLIDEAN: ManifoldSpec.euclidean,
        Kind.SPHERE: ManifoldSpec.sphere,
        Kind.HYPERBOLOID: ManifoldSpec.hyperboloid,
    }[kind]
    return factory(m)


def metric_dot(spec: ManifoldSpec, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Ambient inner product: Euclidean, or Minkowski on the hyperboloid."""
    s = np.sum(u * v, axis=-1)
    if spec.kind is Kind.HYPERBOLOID:
        s = s - 2.0 * u[..., 0] * v[..., 0]
    return s


def _check_point(spec: ManifoldSpec, coords: np.ndarray) -> None:
    if coords.shape[-1] != spec.ambient_dim:
        raise DomainError(
            f"expected {spec.ambient_dim} ambient coordinates for {spec.label}, "
            f"got {coords.shape[-1]}"
        )
    if not np.all(np.isfinite(coords)):
        raise DomainError("point coordinates must be finite")
    if spec.kind is Kind.SPHERE:
        err = np.abs(np.linalg.norm(coords, axis=-1) - 1.0)
        if np.any(err > POINT_TOL):
            raise DomainError(f"point is off the unit sphere by {float(np.max(err)):.3e}")
    elif spec.kind is Kind.HYPERBOLOID:
        err = np.abs(metric_dot(spec, coords, coords) + 1.0)
        if np.any(err > POINT_TOL) or np.any(coords[..., 0] <= 0):
            raise DomainError("point is off the unit hyperboloid sheet")


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A point given by its embedding coordinates; validated on construction."""

    spec: ManifoldSpec
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.ndim != 1:
            raise DomainError("a point holds a single coordinate vector")
        _check_point(self.spec, c)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Tangent vector at ``base``, in the same embedding coordinates."""

    base: ManifoldPoint
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.shape != self.base.coords.shape:
            raise DomainError("tangent coordinates must match the base point's")
        if self.base.spec.kind is not Kind.EUCLIDEAN:
            tangency = abs(float(metric_dot(self.base.spec, self.base.coords, c)))
            if tangency > POINT_TOL * max(1.0, float(np.max(np.abs(c)))):
                raise DomainError(f"vector is not tangent at base (defect {tangency:.3e})")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def norm(self) -> float:
        return float(np.sqrt(max(metric_dot(self.base.spec, self.coords, self.coords), 0.0)))


def base_point(spec: ManifoldSpec) -> ManifoldPoint:
    """Canonical base point: origin, north pole, or hyperboloid apex."""
    c = np.zeros(spec.ambient_dim)
    if spec.kind is Kind.SPHERE:
        c[-1] = 1.0
    elif spec.kind is Kind.HYPERBOLOID:
        c[0] = 1.0
    return ManifoldPoint(spec, c)


# ---------------------------------------------------------------------------
# array kernels
# ---------------------------------------------------------------------------

def project_point_array(spec: ManifoldSpec, x: np.ndarray) -> np.ndarray:
    """Re-project onto the constraint surface (fixes floating-point drift)."""
    if spec.kind is Kind.EUCLIDEAN:
        return x
    if spec.kind is Kind.SPHERE:
        return x / np.linalg.norm(x, axis=-1, keepdims=True)
    scale = np.sqrt(np.maximum(-metric_dot(spec, x, x), _TINY))
    return x / scale[..., None]


def distance_array(spec: ManifoldSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if spec.kind is Kind.EUCLIDEAN:
        return np.linalg.norm(x - y, axis=-1)
    if spec.kind is Kind.SPHERE:
        c = np.clip(np.sum(x * y, axis=-1), -1.0, 1.0)
        return np.arccos(c)
    c = np.maximum(-metric_dot(spec, x, y), 1.0)
    return np.arccosh(c)


def exp_array(spec: ManifoldSpec, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    if spec.kind is Kind.EUCLIDEAN:
        return x + v
    if spec.kind is Kind.SPHERE:
        nv = np.linalg.norm(v, axis=-1)
        small = nv < _TINY
        safe = np.where(small, 1.0, nv)
        y = np.cos(nv)[..., None] * x + (np.sin(nv) / safe)[..., None] * v
        y = np.where(small[..., None], x, y)
        return project_point_array(spec, y)
    s = np.sqrt(np.maximum(metric_dot(spec, v, v), 0.0))
    small = s < _TINY
    safe = np.where(small, 1.0, s)
    y = np.cosh(s)[..., None] * x + (np.sinh(s) / safe)[..., None] * v
    y = np.where(small[..., None], x, y)
    return project_point_array(spec, y)


def log_array(spec: ManifoldSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if spec.kind is Kind.EUCLIDEAN:
        return y - x
    if spec.kind is Kind.SPHERE:
        c = np.clip(np.sum(x * y, axis=-1), -1.0, 1.0)
        theta = np.arccos(c)
        if np.any(theta > math.pi - _ANTIPODE_TOL):
            raise CutLocusError("log map at an (almost) antipodal point on the sphere")
        u = y - c[..., None] * x
        nu = np.linalg.norm(u, axis=-1)
        coef = np.where(nu > _TINY, theta / np.where(nu > _TINY, nu, 1.0), 0.0)
        return coef[..., None] * u
    c = np.maximum(-metric_dot(spec, x, y), 1.0)
    theta = np.arccosh(c)
    u = y - c[..., None] * x
    nu = np.sqrt(np.maximum(c * c - 1.0, 0.0))
    coef = np.where(nu > _TINY, theta / np.where(nu > _TINY, nu, 1.0), 1.0)
    return coef[..., None] * u


def tangent_project_array(spec: ManifoldSpec, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Orthogonal projection of an ambient vector onto T_x M."""
    if spec.kind is Kind.EUCLIDEAN:
        return z
    if spec.kind is Kind.SPHERE:
        return z - metric_dot(spec, x, z)[..., None] * x
    # <x,x>_L = -1 on the sheet
    return z + metric_dot(spec, x, z)[..., None] * x


def tangent_frame_array(spec: ManifoldSpec, x: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal frame of T_x M, shape (..., m, d).

    Seeded by Gram-Schmidt on the m ambient axes with smallest
    |component along x| (stable ties by index), projected onto the
    tangent space; orthonormal in the manifold metric.
    """
    m, d = spec.m, spec.ambient_dim
    if spec.kind is Kind.EUCLIDEAN:
        eye = np.eye(m)
        return np.broadcast_to(eye, x.shape[:-1] + (m, m)).copy()
    comp = np.abs(x)
    order = np.argsort(comp, axis=-1, kind="stable")[..., :m]
    eye = np.eye(d)
    seeds = eye[order]  # (..., m, d)
    frame = np.empty(x.shape[:-1] + (m, d))
    for k in range(m):
        v = tangent_project_array(spec, x, seeds[..., k, :])
        for j in range(k):
            u = frame[..., j, :]
            v = v - metric_dot(spec, v, u)[..., None] * u
        nrm = np.sqrt(np.maximum(metric_dot(spec, v, v), _TINY))
        frame[..., k, :] = v / nrm[..., None]
    return frame


def tangent_gaussian_array(
    spec: ManifoldSpec, x: np.ndarray, gen: np.random.Generator
) -> np.ndarray:
    """Standard Gaussian on T_x M: m i.i.d. N(0,1) frame coefficients."""
    z = gen.standard_normal(x.shape[:-1] + (spec.m,))
    if spec.kind is Kind.EUCLIDEAN:
        return z
    frame = tangent_frame_array(spec, x)
    return np.einsum("...k,...kd->...d", z, frame)


# ---------------------------------------------------------------------------
# typed operations
# ---------------------------------------------------------------------------

def _require_same_spec(x: ManifoldPoint, y: ManifoldPoint) -> ManifoldSpec:
    if x.spec != y.spec:
        raise SpecMismatchError(f"points live on {x.spec.label} and {y.spec.label}")
    return x.spec


def distance(x: ManifoldPoint, y: ManifoldPoint) -> float:
    """Riemannian distance between two points on the same manifold."""
    spec = _require_same_spec(x, y)
    return float(distance_array(spec, x.coords, y.coords))


def _require_based_at(x: ManifoldPoint, v: TangentVector) -> None:
    if v.base.spec != x.spec or not np.allclose(v.base.coords, x.coords, atol=1e-12):
        raise DomainError("tangent vector is not based at the given point")


def exp_map(x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
    """Geodesic exponential: follow v from x for unit time."""
    _require_based_at(x, v)
    return ManifoldPoint(x.spec, exp_array(x.spec, x.coords, v.coords))


def log_map(x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
    """Inverse of exp_map: the initial velocity of the geodesic x -> y."""
    spec = _require_same_spec(x, y)
    return TangentVector(x, log_array(spec, x.coords, y.coords))


def tangent_gaussian(x: ManifoldPoint, rng: RngState) -> TangentVector:
    """Isotropic standard Gaussian in the tangent space at x."""
    gen = rng.generator()
    return TangentVector(x, tangent_gaussian_array(x.spec, x.coords, gen))


# ---------------------------------------------------------------------------
# uniform sampling on geodesic balls
# ---------------------------------------------------------------------------

def _radial_area(spec: ManifoldSpec, s: np.ndarray) -> np.ndarray:
    """Area factor A(s) of the geodesic sphere of radius s, up to a constant."""
    e = spec.m - 1
    if spec.kind is Kind.EUCLIDEAN:
        return s**e
    if spec.kind is Kind.SPHERE:
        return np.sin(s) ** e
    return np.sinh(s) ** e


def _ball_radius_ppf(spec: ManifoldSpec, r: float, u: np.ndarray) -> np.ndarray:
    """Inverse CDF of the radius with density proportional to A(s) on [0, r]."""
    m = spec.m
    if spec.kind is Kind.EUCLIDEAN:
        return r * u ** (1.0 / m)
    if m == 2:
        if spec.kind is Kind.SPHERE:
            return np.arccos(np.clip(1.0 - u * (1.0 - math.cos(r)), -1.0, 1.0))
        return np.arccosh(1.0 + u * (math.cosh(r) - 1.0))
    total = gl_integral(lambda s: _radial_area(spec, s), np.asarray(r))
    return bisect_increasing(
        lambda s: gl_integral(lambda q: _radial_area(spec, q), s),
        u * total,
        0.0,
        r,
        xtol=1e-12,
    )


def uniform_ball_array(
    spec: ManifoldSpec, center: np.ndarray, r: float, size: int, gen: np.random.Generator
) -> np.ndarray:
    if r <= 0:
        raise DomainError(f"ball radius must be positive, got {r}")
    if spec.kind is Kind.SPHERE and r >= math.pi:
        raise DomainError("ball radius must be below pi on the sphere")
    base = np.broadcast_to(center, (size,) + center.shape)
    w = tangent_gaussian_array(spec, base, gen)
    wn = np.sqrt(np.maximum(metric_dot(spec, w, w), _TINY))
    s = _ball_radius_ppf(spec, r, gen.random(size))
    return exp_array(spec, base, (s / wn)[..., None] * w)


def uniform_ball_sample(o: ManifoldPoint, r: float, rng: RngState) -> ManifoldPoint:
    """One draw from the uniform law (w.r.t. Riemannian volume) on B(o, r)."""
    coords = uniform_ball_array(o.spec, o.coords, r, 1, rng.generator())[0]
    return ManifoldPoint(o.spec, coords)


# ---------------------------------------------------------------------------
# spherical heat kernel (spectral form, S^2 only)
# ---------------------------------------------------------------------------

def heat_kernel_cos_array(c: np.ndarray, t: float, order: int) -> np.ndarray:
    """Heat kernel on S^2 at cosine-of-angle c, truncated spectral sum.

    p = sum_{l=0..order} (2l+1)/(4 pi) * exp(-l(l+1) t) * P_l(c); the
    generator is the full Laplacian, so the Euclidean analogue at time t
    is N(x, 2t I).
    """
    c = np.asarray(c, dtype=float)
    p_prev = np.ones_like(c)
    acc = (1.0 / (4.0 * math.pi)) * p_prev
    if order >= 1:
        p_cur = c.copy()
        acc = acc + (3.0 / (4.0 * math.pi)) * math.exp(-2.0 * t) * p_cur
        for l in range(2, order + 1):
            p_next = ((2 * l - 1) * c * p_cur - (l - 1) * p_prev) / l
            acc = acc + ((2 * l + 1) / (4.0 * math.pi)) * math.exp(-l * (l + 1) * t) * p_next
            p_prev, p_cur = p_cur, p_next
    return acc


def sphere_heat_kernel(x: ManifoldPoint, z: ManifoldPoint, t: float, order: int = 50) -> float:
    """Brownian transition density p(x, z, t) on the unit 2-sphere."""
    spec = _require_same_spec(x, z)
    if spec.kind is not Kind.SPHERE or spec.m != 2:
        raise DomainError("the spectral heat kernel is implemented on sphere:2 only")
    if t <= 0:
        raise DomainError(f"diffusion time must be positive, got {t}")
    if order < 1:
        raise DomainError("truncation order must be at least 1")
    c = float(np.clip(np.dot(x.coords, z.coords), -1.0, 1.0))
    return float(heat_kernel_cos_array(np.asarray(c), t, order))
