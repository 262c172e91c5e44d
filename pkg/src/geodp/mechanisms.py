"""Samplers for the diffusion mechanisms and the two baselines.

All samplers are pure functions of their inputs and an RngState, so a
given (input, seed, counter) triple reproduces bit-identical output on
any thread count.  The ``*_batch`` variants evolve many independent
draws at once and are the fast path for Monte-Carlo work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    DriftTooWeakError,
    NormalizationError,
    UnsupportedManifoldError,
)
from .manifolds import (
    Kind,
    ManifoldPoint,
    ManifoldSpec,
    exp_array,
    log_array,
    metric_dot,
    tangent_gaussian_array,
    _radial_area,
)
from .numerics import bisect_increasing, gl_integral
from .rng import RngState

_RL_XTOL = 1e-10


@dataclass(frozen=True)
class MechanismConfig:
    """Diffusion parameters: time t, step count, and the Langevin pull.

    ``lam`` and ``anchor`` are only consulted by the Langevin sampler,
    which additionally requires lam > K of the target manifold.
    """

    t: float
    n_step: int
    lam: float | None = None
    anchor: ManifoldPoint | None = None

    def __post_init__(self):
        if self.t <= 0:
            raise DomainError(f"diffusion time must be positive, got {self.t}")
        if self.n_step < 1:
            raise DomainError(f"need at least one step, got {self.n_step}")


def default_n_step(t: float) -> int:
    """Step count keeping h <= 0.01 and at least 100 steps."""
    return max(100, math.ceil(t / 0.01))


def bm_sample_batch(
    a: ManifoldPoint, t: float, n_step: int, rng: RngState, size: int
) -> np.ndarray:
    """``size`` independent geodesic-random-walk approximations of B_t(a)."""
    if t <= 0:
        raise DomainError(f"diffusion time must be positive, got {t}")
    if n_step < 1:
        raise DomainError(f"need at least one step, got {n_step}")
    spec = a.spec
    gen = rng.generator()
    h = t / n_step
    scale = math.sqrt(2.0 * h)
    y = np.broadcast_to(a.coords, (size,) + a.coords.shape).copy()
    for _ in range(n_step):
        xi = tangent_gaussian_array(spec, y, gen)
        y = exp_array(spec, y, scale * xi)
    return y


def bm_sample(a: ManifoldPoint, t: float, n_step: int, rng: RngState) -> ManifoldPoint:
    """One draw of the Brownian-motion mechanism started at ``a``."""
    return ManifoldPoint(a.spec, bm_sample_batch(a, t, n_step, rng, 1)[0])


def langevin_sample_batch(
    a: ManifoldPoint, cfg: MechanismConfig, rng: RngState, size: int
) -> np.ndarray:
    """Euler-geodesic discretization of the anchored Langevin diffusion.

    Each step follows h*lam*Log_Y(o) + sqrt(2h)*xi; the drift is the
    negative gradient of V(x) = lam d^2(o, x)/2.
    """
    spec = a.spec
    if not spec.is_hadamard:
        raise UnsupportedManifoldError(
            "the Langevin mechanism needs a Hadamard manifold (euclidean or hyperboloid)"
        )
    if cfg.lam is None or cfg.anchor is None:
        raise DomainError("Langevin sampling needs both lam and anchor in the config")
    if cfg.lam <= 0:
        raise DomainError(f"lambda must be positive, got {cfg.lam}")
    if cfg.lam <= spec.ric_lower_K:
        raise DriftTooWeakError(
            f"lambda={cfg.lam} does not exceed K={spec.ric_lower_K} on {spec.label}"
        )
    if cfg.anchor.spec != spec:
        raise DomainError("anchor must live on the same manifold as the start point")
    gen = rng.generator()
    h = cfg.t / cfg.n_step
    scale = math.sqrt(2.0 * h)
    o = np.broadcast_to(cfg.anchor.coords, (size,) + cfg.anchor.coords.shape)
    y = np.broadcast_to(a.coords, (size,) + a.coords.shape).copy()
    for _ in range(cfg.n_step):
        drift = cfg.lam * log_array(spec, y, o)
        xi = tangent_gaussian_array(spec, y, gen)
        y = exp_array(spec, y, h * drift + scale * xi)
    return y


def langevin_sample(a: ManifoldPoint, cfg: MechanismConfig, rng: RngState) -> ManifoldPoint:
    """One draw of the anchored Langevin mechanism started at ``a``."""
    return ManifoldPoint(a.spec, langevin_sample_batch(a, cfg, rng, 1)[0])


# ---------------------------------------------------------------------------
# Riemannian Laplace baseline
# ---------------------------------------------------------------------------

def _rl_radius(spec: ManifoldSpec, sigma: float, u: np.ndarray, gen) -> np.ndarray:
    """Radius with density proportional to exp(-s/sigma) * A(s)."""
    a = 1.0 / sigma
    m = spec.m
    if spec.kind is Kind.EUCLIDEAN:
        # exp(-s/sigma) s^(m-1) is a Gamma(m, sigma) law
        return gen.gamma(shape=m, scale=sigma, size=u.shape)
    if spec.kind is Kind.HYPERBOLOID:
        if sigma >= 1.0 / (m - 1):
            raise NormalizationError(
                f"exp(-s/{sigma}) sinh^{m - 1}(s) is not integrable on [0, inf); "
                f"the Riemannian Laplace law needs sigma < {1.0 / (m - 1)} on {spec.label}"
            )
        if m == 2:
            def cdf(s):
                return 0.5 * (
                    -np.expm1(-(a - 1.0) * s) / (a - 1.0)
                    - np.expm1(-(a + 1.0) * s) / (a + 1.0)
                )

            total = a / (a * a - 1.0)
            hi = 1.0
            target = u * total
            while float(cdf(np.asarray(hi))) < float(np.max(target)):
                hi *= 2.0
            return bisect_increasing(cdf, target, 0.0, hi, xtol=_RL_XTOL)
        density = lambda s: np.exp(-a * s) * _radial_area(spec, s)
        hi = 1.0
        while True:
            total = gl_integral(density, np.asarray(hi))
            if float(gl_integral(density, np.asarray(2.0 * hi)) - total) < 1e-16 * float(total):
                break
            hi *= 2.0
        target = u * gl_integral(density, np.asarray(hi))
        return bisect_increasing(lambda s: gl_integral(density, s), target, 0.0, hi, xtol=_RL_XTOL)
    # sphere: support [0, pi]
    if m == 2:
        def cdf(s):
            return (1.0 - np.exp(-a * s) * (np.cos(s) + a * np.sin(s))) / (1.0 + a * a)

        total = (1.0 + math.exp(-a * math.pi)) / (1.0 + a * a)
        return bisect_increasing(cdf, u * total, 0.0, math.pi, xtol=_RL_XTOL)
    density = lambda s: np.exp(-a * s) * _radial_area(spec, s)
    total = gl_integral(density, np.asarray(math.pi))
    return bisect_increasing(
        lambda s: gl_integral(density, s), u * total, 0.0, math.pi, xtol=_RL_XTOL
    )


def rl_sample_batch(
    center: ManifoldPoint, sigma: float, rng: RngState, size: int
) -> np.ndarray:
    """Riemannian Laplace draws: density proportional to exp(-d(center, x)/sigma)."""
    if sigma <= 0:
        raise DomainError(f"rate must be positive, got {sigma}")
    spec = center.spec
    gen = rng.generator()
    base = np.broadcast_to(center.coords, (size,) + center.coords.shape)
    w = tangent_gaussian_array(spec, base, gen)
    wn = np.sqrt(np.maximum(metric_dot(spec, w, w), 1e-300))
    s = _rl_radius(spec, sigma, gen.random(size), gen)
    return exp_array(spec, base, (s / wn)[..., None] * w)


def rl_sample(center: ManifoldPoint, sigma: float, rng: RngState) -> ManifoldPoint:
    return ManifoldPoint(center.spec, rl_sample_batch(center, sigma, rng, 1)[0])


# ---------------------------------------------------------------------------
# exponential-wrapped Gaussian baseline
# ---------------------------------------------------------------------------

def ewg_sample_batch(
    footpoint: ManifoldPoint, center: ManifoldPoint, sigma: float, rng: RngState, size: int
) -> np.ndarray:
    """Exp-wrapped Gaussian: N(Log_fp(center), sigma^2 I) pushed through Exp_fp."""
    if sigma < 0:
        raise DomainError(f"rate must be nonnegative, got {sigma}")
    spec = footpoint.spec
    mean = log_array(spec, footpoint.coords, center.coords)
    gen = rng.generator()
    base = np.broadcast_to(footpoint.coords, (size,) + footpoint.coords.shape)
    noise = tangent_gaussian_array(spec, base, gen)
    return exp_array(spec, base, mean[None, :] + sigma * noise)


def ewg_sample(
    footpoint: ManifoldPoint, center: ManifoldPoint, sigma: float, rng: RngState
) -> ManifoldPoint:
    if footpoint.spec != center.spec:
        raise DomainError("footpoint and center must share a manifold")
    return ManifoldPoint(footpoint.spec, ewg_sample_batch(footpoint, center, sigma, rng, 1)[0])
