"""Exception types raised across the toolkit.

Every failure mode callers are expected to branch on gets its own class;
all inherit from GeodpError so a blanket handler is possible.
"""


class GeodpError(Exception):
    """Base class for all geodp errors."""


class SpecMismatchError(GeodpError, ValueError):
    """Operands live on different manifolds."""


class DomainError(GeodpError, ValueError):
    """Argument outside an operation's domain."""


class CutLocusError(GeodpError, ValueError):
    """Logarithm map requested at or beyond the cut locus."""


class UnsupportedManifoldError(GeodpError, ValueError):
    """Operation is not defined on this manifold family."""


class DriftTooWeakError(GeodpError, ValueError):
    """Langevin pull strength does not exceed the curvature parameter K."""


class InfeasibleBudgetError(GeodpError, ValueError):
    """No finite diffusion time achieves the requested budget.

    Carries the privacy floor ``K * alpha * delta**2 / 2`` in ``floor``.
    """

    def __init__(self, message: str, floor: float):
        super().__init__(message)
        self.floor = floor


class NormalizationError(GeodpError, ValueError):
    """Requested density is not normalizable."""


class RegimeError(GeodpError, ValueError):
    """Sensitivity formula applied outside its curvature regime."""


class NoValidBoundError(GeodpError, ValueError):
    """No sensitivity bound applies to the given context."""


class ConvergenceError(GeodpError, RuntimeError):
    """Iterative solver failed to reach tolerance.

    Carries the last observed gradient norm in ``grad_norm``.
    """

    def __init__(self, message: str, grad_norm: float):
        super().__init__(message)
        self.grad_norm = grad_norm


class QuadratureError(GeodpError, RuntimeError):
    """Numerical quadrature failed its convergence check."""
