"""Closed-form Renyi-DP budgets, time calibration, and utility bounds.

Everything here is pure arithmetic.  The curvature parameter K is the
constant in Ric >= -K, so K < 0 means positively curved (sphere),
K = 0 Euclidean, and K > 0 covers negative curvature (hyperboloid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, DriftTooWeakError, InfeasibleBudgetError, QuadratureError
from .manifolds import Kind, ManifoldPoint, heat_kernel_cos_array

_K_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class RdpBudget:
    """Renyi differential privacy budget (alpha, epsilon)."""

    alpha: float
    epsilon: float

    def __post_init__(self):
        if not self.alpha > 1:
            raise DomainError(f"RDP order must exceed 1, got alpha={self.alpha}")
        if not self.epsilon > 0:
            raise DomainError(f"budget must be positive, got epsilon={self.epsilon}")


@dataclass(frozen=True)
class SensitivitySummary:
    """Global sensitivity of a summary, in Riemannian distance units."""

    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise DomainError(f"sensitivity must be nonnegative, got {self.delta}")


def bm_epsilon(K: float, alpha: float, delta: float, t: float) -> float:
    """Budget of the Brownian mechanism: K*alpha*delta^2 / (2(1 - e^{-2Kt})).

    The simple pole at K = 0 is removable; within |K*t| < 1e-12 the
    analytic limit alpha*delta^2/(4t) is returned.
    """
    if t <= 0:
        raise DomainError(f"diffusion time must be positive, got {t}")
    if alpha <= 1:
        raise DomainError(f"RDP order must exceed 1, got {alpha}")
    if abs(K * t) < _K_ZERO_TOL:
        return alpha * delta * delta / (4.0 * t)
    return K * alpha * delta * delta / (-2.0 * math.expm1(-2.0 * K * t))


def bm_time_for_budget(K: float, budget: RdpBudget, delta: float) -> float:
    """Diffusion time achieving the budget: (log 2e - log(2e - K a d^2))/(2K).

    For K > 0 the mechanism has the privacy floor K*alpha*delta^2/2;
    budgets at or below it raise InfeasibleBudgetError.
    """
    alpha, eps = budget.alpha, budget.epsilon
    t_flat = alpha * delta * delta / (4.0 * eps)
    if abs(K) * t_flat < _K_ZERO_TOL:
        return t_flat
    arg = K * alpha * delta * delta / (2.0 * eps)
    if K > 0 and arg >= 1.0:
        floor = K * alpha * delta * delta / 2.0
        raise InfeasibleBudgetError(
            f"epsilon={eps} is at or below the Brownian privacy floor "
            f"K*alpha*delta^2/2 = {floor}; no finite diffusion time reaches it - "
            "use the Langevin mechanism instead",
            floor=floor,
        )
    return -math.log1p(-arg) / (2.0 * K)


def langevin_epsilon(K: float, lam: float, alpha: float, delta: float, t: float) -> float:
    """Budget of the anchored Langevin mechanism at time t.

    The effective curvature of the drifted diffusion is lam - K > 0, so
    the budget is (lam-K)*alpha*delta^2 / (2(e^{2(lam-K)t} - 1)).
    """
    if lam <= K:
        raise DriftTooWeakError(f"need lambda > K, got lambda={lam}, K={K}")
    return bm_epsilon(-(lam - K), alpha, delta, t)


def langevin_time_for_budget(K: float, lam: float, budget: RdpBudget, delta: float) -> float:
    """Time t = log(1 + (lam-K)*alpha*delta^2/(2 eps)) / (2(lam-K))."""
    if lam <= K:
        raise DriftTooWeakError(f"need lambda > K, got lambda={lam}, K={K}")
    k = lam - K
    return math.log1p(k * budget.alpha * delta * delta / (2.0 * budget.epsilon)) / (2.0 * k)


def dp_to_rdp(eps_star: float, alpha: float) -> float:
    """Renyi budget of order alpha implied by a pure eps*-DP guarantee.

    eps(alpha) = (alpha-1)^{-1} log( e^{a e*}/(e^{e*}+1)
                                     + e^{e*} e^{-a e*}/(e^{e*}+1) ),
    evaluated in log-sum-exp form so large alpha*eps* cannot overflow.
    """
    if eps_star < 0:
        raise DomainError(f"eps* must be nonnegative, got {eps_star}")
    if alpha <= 1:
        raise DomainError(f"RDP order must exceed 1, got {alpha}")
    if eps_star == 0.0:
        return 0.0
    num = np.logaddexp(alpha * eps_star, eps_star - alpha * eps_star)
    den = np.logaddexp(0.0, eps_star)
    return float((num - den) / (alpha - 1.0))


def rdp_to_dp_budget(target: RdpBudget) -> float:
    """The unique eps* >= epsilon with dp_to_rdp(eps*, alpha) = epsilon.

    Bisection on [epsilon, epsilon*alpha/(alpha-1) + 10], expanded until
    it brackets, to absolute tolerance 1e-12.
    """
    alpha, eps = target.alpha, target.epsilon
    lo = eps
    hi = eps * alpha / (alpha - 1.0) + 10.0
    while dp_to_rdp(hi, alpha) < eps:
        hi *= 2.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if dp_to_rdp(mid, alpha) < eps:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bm_utility_bound(m: int, t: float) -> float:
    """Mean-distance bound sqrt(2 m t) for Brownian release under Ric > 0."""
    if t <= 0:
        raise DomainError(f"diffusion time must be positive, got {t}")
    return math.sqrt(2.0 * m * t)


def langevin_utility_bound(m: int, K: float, lam: float, d_oa: float, t: float) -> float:
    """Mean-distance bound for the anchored Langevin release.

    (2m/lam + (d(o,a) + sqrt((m-1)K)/lam)^2)^{1/2} (1 - e^{-lam t})^{1/2}.
    """
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if K < 0:
        raise DomainError(f"K must be nonnegative in the Hadamard regime, got {K}")
    amp = math.sqrt(2.0 * m / lam + (d_oa + math.sqrt((m - 1) * K) / lam) ** 2)
    return amp * math.sqrt(-math.expm1(-lam * t))


def rl_rate(delta: float, eps_star: float, homogeneous: bool = True) -> float:
    """Riemannian Laplace rate: delta/eps*, or 2*delta/eps* off homogeneous spaces."""
    if eps_star <= 0:
        raise DomainError(f"eps* must be positive, got {eps_star}")
    sigma = delta / eps_star
    return sigma if homogeneous else 2.0 * sigma


def ewg_rate(delta: float, budget: RdpBudget) -> float:
    """Exponential-wrapped Gaussian rate: delta / sqrt(2 eps / alpha)."""
    return delta * math.sqrt(budget.alpha / (2.0 * budget.epsilon))


def renyi_divergence_sphere(
    x: ManifoldPoint,
    y: ManifoldPoint,
    t: float,
    alpha: float,
    order: int = 60,
    grid: tuple[int, int] = (400, 800),
) -> float:
    """Numerical D_alpha between the S^2 heat kernels started at x and y.

    Latitude-longitude product quadrature: Gauss-Legendre in cos(theta)
    crossed with a uniform rule in phi.  The value is recomputed at half
    resolution; a relative change above 1e-6 raises QuadratureError.
    """
    if x.spec != y.spec or x.spec.kind is not Kind.SPHERE or x.spec.m != 2:
        raise DomainError("divergence quadrature is implemented on sphere:2 only")
    if t <= 0:
        raise DomainError(f"diffusion time must be positive, got {t}")
    if alpha <= 1:
        raise DomainError(f"RDP order must exceed 1, got {alpha}")
    n_th, n_ph = grid
    d_full = _renyi_quadrature(x.coords, y.coords, t, alpha, order, n_th, n_ph)
    d_half = _renyi_quadrature(x.coords, y.coords, t, alpha, order, n_th // 2, n_ph // 2)
    if abs(d_full - d_half) > 1e-6 * max(1.0, abs(d_full)):
        raise QuadratureError(
            f"divergence quadrature has not converged: {d_full!r} vs {d_half!r}"
        )
    return max(d_full, 0.0)


def _renyi_quadrature(
    xc: np.ndarray, yc: np.ndarray, t: float, alpha: float, order: int, n_th: int, n_ph: int
) -> float:
    u, w = np.polynomial.legendre.leggauss(n_th)
    phi = (np.arange(n_ph) + 0.5) * (2.0 * math.pi / n_ph)
    sin_th = np.sqrt(np.maximum(1.0 - u * u, 0.0))
    pts = np.empty((n_th, n_ph, 3))
    pts[..., 0] = sin_th[:, None] * np.cos(phi)[None, :]
    pts[..., 1] = sin_th[:, None] * np.sin(phi)[None, :]
    pts[..., 2] = u[:, None]
    log_p = np.log(np.clip(heat_kernel_cos_array(pts @ xc, t, order), 1e-300, None))
    log_q = np.log(np.clip(heat_kernel_cos_array(pts @ yc, t, order), 1e-300, None))
    integrand = np.exp(alpha * log_p + (1.0 - alpha) * log_q)
    integral = float(w @ integrand.sum(axis=1)) * (2.0 * math.pi / n_ph)
    return math.log(integral) / (alpha - 1.0)
