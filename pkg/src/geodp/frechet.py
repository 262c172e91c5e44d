"""Generalized Frechet p-means on geodesic balls and their sensitivity.

The solver is projected Riemannian gradient descent with backtracking;
the sensitivity bounds cover three regimes: small geodesic balls for
p in (1, 2], Hadamard manifolds for p >= 2, and compact positive
curvature for p >= 2 inside the 2-uniform-convexity radius.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, NoValidBoundError, RegimeError
from .manifolds import (
    ManifoldPoint,
    ManifoldSpec,
    TangentVector,
    distance_array,
    exp_array,
    log_array,
    metric_dot,
    project_point_array,
)

_ZERO_DIST = 1e-12


@dataclass(frozen=True, eq=False)
class Dataset:
    """Points supported in the closed geodesic ball B(center_o, radius_r)."""

    points: tuple[ManifoldPoint, ...]
    center_o: ManifoldPoint
    radius_r: float

    def __post_init__(self):
        pts = tuple(self.points)
        if len(pts) < 1:
            raise DomainError("a dataset needs at least one point")
        if self.radius_r <= 0:
            raise DomainError(f"ball radius must be positive, got {self.radius_r}")
        spec = self.center_o.spec
        for p in pts:
            if p.spec != spec:
                raise DomainError("all dataset points must share one manifold")
        coords = np.stack([p.coords for p in pts])
        dists = distance_array(spec, self.center_o.coords[None, :], coords)
        if np.any(dists > self.radius_r + 1e-9):
            raise DomainError(
                f"dataset leaves B(o, r): max distance {float(np.max(dists)):.6g} "
                f"> r = {self.radius_r}"
            )
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_coords", coords)

    @property
    def spec(self) -> ManifoldSpec:
        return self.center_o.spec

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def coords(self) -> np.ndarray:
        return self._coords


def dataset_from_coords(
    spec: ManifoldSpec, coords: np.ndarray, center_o: ManifoldPoint, radius_r: float
) -> Dataset:
    pts = tuple(ManifoldPoint(spec, c) for c in np.asarray(coords, dtype=float))
    return Dataset(pts, center_o, radius_r)


def _objective_arr(spec: ManifoldSpec, X: np.ndarray, y: np.ndarray, p: float) -> float:
    d = distance_array(spec, y[None, :], X)
    return float(np.mean(d**p)) / p


def _gradient_arr(spec: ManifoldSpec, X: np.ndarray, y: np.ndarray, p: float) -> np.ndarray:
    d = distance_array(spec, y[None, :], X)
    logs = log_array(spec, np.broadcast_to(y, X.shape), X)
    # d^(p-2) * Log has magnitude d^(p-1) -> 0, so zero-distance terms drop out
    w = np.where(d > _ZERO_DIST, d, 1.0) ** (p - 2.0)
    w = np.where(d > _ZERO_DIST, w, 0.0)
    return -np.mean(w[:, None] * logs, axis=0)


def frechet_objective(D: Dataset, y: ManifoldPoint, p: float) -> float:
    """F_D(y) = (1/(n p)) sum_i d(y, x_i)^p."""
    if p <= 1:
        raise DomainError(f"exponent must exceed 1, got p={p}")
    if y.spec != D.spec:
        raise DomainError("query point lives on a different manifold")
    return _objective_arr(D.spec, D.coords, y.coords, p)


def frechet_gradient(D: Dataset, y: ManifoldPoint, p: float) -> TangentVector:
    """Riemannian gradient -(1/n) sum_i d(y, x_i)^(p-2) Log_y(x_i)."""
    if p <= 1:
        raise DomainError(f"exponent must exceed 1, got p={p}")
    if y.spec != D.spec:
        raise DomainError("query point lives on a different manifold")
    return TangentVector(y, _gradient_arr(D.spec, D.coords, y.coords, p))


def solve_pmean(
    D: Dataset, p: float, tol: float = 1e-9, max_iter: int = 10000
) -> ManifoldPoint:
    """Constrained empirical Frechet p-mean over B(o, r).

    Projected gradient descent from the ball center with backtracking
    (step seed 1, halve while the objective rises); iterates leaving the
    ball are pulled back by geodesic truncation.  Terminates when the
    gradient norm drops to ``tol``, else raises ConvergenceError.
    """
    if p <= 1:
        raise DomainError(f"exponent must exceed 1, got p={p}")
    spec = D.spec
    X = D.coords
    o = D.center_o.coords
    r = D.radius_r
    y = o.copy()
    f_y = _objective_arr(spec, X, y, p)
    grad_norm = math.inf
    for _ in range(max_iter):
        g = _gradient_arr(spec, X, y, p)
        grad_norm = math.sqrt(max(float(metric_dot(spec, g, g)), 0.0))
        if grad_norm <= tol:
            return ManifoldPoint(spec, project_point_array(spec, y))
        eta = 1.0
        while True:
            y_trial = exp_array(spec, y, -eta * g)
            d_o = float(distance_array(spec, o, y_trial))
            if d_o > r:
                v = log_array(spec, o, y_trial)
                y_trial = exp_array(spec, o, (r / d_o) * v)
            f_trial = _objective_arr(spec, X, y_trial, p)
            # the tiny slack tolerates objective ties at float resolution
            if f_trial <= f_y + 1e-15 * (1.0 + abs(f_y)):
                break
            eta *= 0.5
            if eta < 1e-18:
                raise ConvergenceError(
                    f"line search stalled at gradient norm {grad_norm:.3e}", grad_norm
                )
        y, f_y = y_trial, f_trial
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations (gradient norm {grad_norm:.3e})",
        grad_norm,
    )


# ---------------------------------------------------------------------------
# convexity constants and sensitivity bounds
# ---------------------------------------------------------------------------

def b_func(c: float, l: float) -> float:
    """Comparison function: sqrt(c) l cot(sqrt(c) l) for c >= 0, else 1."""
    if l <= 0:
        raise DomainError(f"length must be positive, got {l}")
    if c < 0:
        return 1.0
    if c == 0.0:
        return 1.0
    x = math.sqrt(c) * l
    if x >= math.pi:
        raise DomainError(f"need l < pi/sqrt(c); got sqrt(c)*l = {x}")
    return x / math.tan(x)


def admissible_radius(kappa: float, p: float, inj: float) -> float:
    """Ball radius guaranteeing a unique constrained p-mean.

    (1/2) min(inj, pi/(2 sqrt(kappa))) for p < 2 and
    (1/2) min(inj, pi/sqrt(kappa)) for p >= 2, with the kappa terms
    read as infinity when kappa <= 0.
    """
    if p < 1:
        raise DomainError(f"exponent must be at least 1, got p={p}")
    cap = math.inf if kappa <= 0 else math.pi / math.sqrt(kappa)
    if p < 2:
        cap = cap / 2.0
    return 0.5 * min(inj, cap)


def _small_ball_radius_ok(kappa: float, r: float) -> bool:
    # r <= (1/2) min(inj, pi/(2 sqrt(kappa))): on the concrete models the
    # curvature term binds (sphere inj = pi), so only kappa is consulted
    return kappa <= 0 or r <= math.pi / (4.0 * math.sqrt(kappa))


def strong_convexity_k(kappa: float, r: float, p: float) -> float:
    """Strong-convexity constant (2r)^(p-2) min(p-1, b_kappa(2r))."""
    if not 1 < p <= 2:
        raise DomainError(f"strong convexity needs p in (1, 2], got p={p}")
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    if not _small_ball_radius_ok(kappa, r):
        raise DomainError(
            f"radius {r} exceeds the strong-convexity range pi/(4 sqrt(kappa))"
        )
    return (2.0 * r) ** (p - 2.0) * min(p - 1.0, b_func(kappa, 2.0 * r))


class Regime(enum.Enum):
    GENERAL_SMALL_BALL = "general-small-ball"
    HADAMARD = "hadamard"
    COMPACT_POSITIVE = "compact-positive"


@dataclass(frozen=True)
class SensitivityContext:
    """Inputs to the sensitivity formulas: exponent, ball, size, curvature."""

    p: float
    r: float
    n: int
    kappa: float
    regime: Regime

    def __post_init__(self):
        if self.p <= 1:
            raise DomainError(f"exponent must exceed 1, got p={self.p}")
        if self.r <= 0:
            raise DomainError(f"radius must be positive, got {self.r}")
        if self.n < 1:
            raise DomainError(f"sample size must be at least 1, got {self.n}")
        if self.regime is Regime.GENERAL_SMALL_BALL and not _small_ball_radius_ok(
            self.kappa, self.r
        ):
            raise DomainError(
                f"small-ball regime needs r <= pi/(4 sqrt(kappa)), got r={self.r}"
            )
        if self.regime is Regime.HADAMARD and self.kappa > 0:
            raise DomainError("Hadamard regime needs nonpositive sectional curvature")
        if self.regime is Regime.COMPACT_POSITIVE:
            if self.kappa <= 0 or self.p < 2:
                raise DomainError("compact regime needs kappa > 0 and p >= 2")
            if self.r > math.pi / (4.0 * math.sqrt(self.kappa)):
                raise DomainError(
                    f"compact regime needs r <= pi/(4 sqrt(kappa)), got r={self.r}"
                )

    @staticmethod
    def for_dataset(D: Dataset, p: float) -> "SensitivityContext":
        kappa = D.spec.sec_upper_kappa
        if kappa <= 0:
            regime = Regime.HADAMARD
        elif p <= 2:
            regime = Regime.GENERAL_SMALL_BALL
        else:
            regime = Regime.COMPACT_POSITIVE
        return SensitivityContext(p=p, r=D.radius_r, n=D.n, kappa=kappa, regime=regime)


def sensitivity_p_le_2(ctx: SensitivityContext) -> float:
    """Small-ball bound (2r(2 - b))^{p-1} / (n (4r)^{p-2} min(p-1, b))."""
    p, r, n = ctx.p, ctx.r, ctx.n
    if not 1 < p <= 2:
        raise DomainError(f"this bound needs p in (1, 2], got p={p}")
    if not _small_ball_radius_ok(ctx.kappa, r):
        raise DomainError(f"radius {r} violates the small-ball condition")
    b = b_func(ctx.kappa, 2.0 * r)
    num = (2.0 * r * (2.0 - b)) ** (p - 1.0)
    den = n * (4.0 * r) ** (p - 2.0) * min(p - 1.0, b)
    return num / den


def sensitivity_hadamard(ctx: SensitivityContext) -> float:
    """Hadamard bound ((p-1)(4r)^{p-2} 2r / (n lambda_p))^{1/(p-1)}.

    lambda_p = k_p / p with k_p = 2(p-1) on (1, 2] and 8/2^p above.
    """
    if ctx.kappa > 0:
        raise RegimeError("Hadamard bound needs nonpositive sectional curvature")
    p, r, n = ctx.p, ctx.r, ctx.n
    k_p = 2.0 * (p - 1.0) if p <= 2 else 8.0 / 2.0**p
    lam_p = k_p / p
    return ((p - 1.0) * (4.0 * r) ** (p - 2.0) * 2.0 * r / (n * lam_p)) ** (1.0 / (p - 1.0))


def sensitivity_compact(ctx: SensitivityContext) -> float:
    """Compact positive-curvature bound for p >= 2 within r <= pi/(4 sqrt(kappa))."""
    p, r, n, kappa = ctx.p, ctx.r, ctx.n, ctx.kappa
    if kappa <= 0:
        raise RegimeError("compact bound needs positive sectional curvature")
    if p < 2:
        raise DomainError(f"compact bound needs p >= 2, got p={p}")
    if r > math.pi / (4.0 * math.sqrt(kappa)):
        raise DomainError(f"compact bound needs r <= pi/(4 sqrt(kappa)), got r={r}")
    b = b_func(kappa, 2.0 * r)
    inner = 2.0 ** (p - 1.0) * p * (p - 1.0) * (4.0 * r) ** (p - 2.0) * (2.0 - b) * 2.0 * r / (n * b)
    return inner ** (1.0 / (p - 1.0))


def sensitivity_bound(ctx: SensitivityContext) -> float:
    """Dispatch to every applicable theorem and return the tightest bound.

    p in (1, 2] uses the small-ball bound; p >= 2 adds the Hadamard or
    compact bound depending on curvature, so at p = 2 the minimum of the
    applicable values is returned.
    """
    candidates = []
    if 1 < ctx.p <= 2 and _small_ball_radius_ok(ctx.kappa, ctx.r):
        candidates.append(sensitivity_p_le_2(ctx))
    if ctx.p >= 2 and ctx.kappa <= 0:
        candidates.append(sensitivity_hadamard(ctx))
    if (
        ctx.p >= 2
        and ctx.kappa > 0
        and ctx.r <= math.pi / (4.0 * math.sqrt(ctx.kappa))
    ):
        candidates.append(sensitivity_compact(ctx))
    if not candidates:
        raise NoValidBoundError(
            f"no sensitivity theorem covers p={ctx.p}, kappa={ctx.kappa}, r={ctx.r}"
        )
    return min(candidates)
