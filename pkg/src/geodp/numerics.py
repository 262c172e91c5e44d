"""Small numerical helpers shared by the samplers and oracles."""

from __future__ import annotations

from typing import Callable

import numpy as np

# 96-point Gauss-Legendre rule; exact to machine precision for the smooth
# radial densities integrated here.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)


def gl_integral(f: Callable[[np.ndarray], np.ndarray], upper) -> np.ndarray:
    """Integral of ``f`` over [0, u] for each u in ``upper``, vectorized."""
    upper = np.asarray(upper, dtype=float)
    half = 0.5 * upper
    pts = half[..., None] * (_GL_NODES + 1.0)
    return half * (f(pts) @ _GL_WEIGHTS)


def bisect_increasing(
    f: Callable[[np.ndarray], np.ndarray],
    target: np.ndarray,
    lo,
    hi,
    xtol: float,
    max_iter: int = 200,
) -> np.ndarray:
    """Solve f(x) = target elementwise for nondecreasing vectorized f."""
    target = np.asarray(target, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).astype(float).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).astype(float).copy()
    for _ in range(max_iter):
        if np.max(hi - lo) <= xtol:
            break
        mid = 0.5 * (lo + hi)
        below = f(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)
