"""End-to-end private release of the generalized Frechet p-mean.

Pipeline: solve the constrained p-mean, bound its sensitivity, calibrate
the diffusion time for the requested budget, then draw the release from
the chosen diffusion mechanism.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .calibration import (
    RdpBudget,
    bm_time_for_budget,
    bm_utility_bound,
    langevin_time_for_budget,
    langevin_utility_bound,
)
from .errors import DomainError, DriftTooWeakError, UnsupportedManifoldError
from .frechet import Dataset, SensitivityContext, sensitivity_bound, solve_pmean
from .manifolds import ManifoldPoint, distance
from .mechanisms import MechanismConfig, bm_sample, default_n_step, langevin_sample
from .rng import RngState


class Mechanism(enum.Enum):
    BM = "bm"
    LANGEVIN = "langevin"


@dataclass(frozen=True)
class LangevinOptions:
    """Anchor and pull strength; the anchor must not depend on the data.

    The provenance string is logged verbatim into the release record;
    independence itself is the caller's attestation.
    """

    lam: float
    anchor: ManifoldPoint
    anchor_provenance: str = "unspecified"


@dataclass(frozen=True)
class ReleaseRequest:
    dataset: Dataset
    p: float
    budget: RdpBudget
    mechanism: Mechanism
    langevin: LangevinOptions | None = None
    n_step: int | None = None

    def __post_init__(self):
        if self.mechanism is Mechanism.LANGEVIN:
            if self.langevin is None:
                raise DomainError("Langevin releases need LangevinOptions")
            spec = self.dataset.spec
            if not spec.is_hadamard:
                raise UnsupportedManifoldError(
                    f"Langevin mechanism needs a Hadamard manifold, got {spec.label}"
                )
            if self.langevin.lam <= spec.ric_lower_K:
                raise DriftTooWeakError(
                    f"lambda={self.langevin.lam} must exceed K={spec.ric_lower_K}"
                )
            if self.langevin.anchor.spec != spec:
                raise DomainError("anchor must live on the dataset's manifold")
        if self.n_step is not None and self.n_step < 1:
            raise DomainError(f"n_step override must be positive, got {self.n_step}")


@dataclass(frozen=True, eq=False)
class ReleaseRecord:
    """Audit trail of one private release."""

    private_point: ManifoldPoint
    delta_used: float
    t_used: float
    mechanism: Mechanism
    utility_bound: float | None
    seed: int
    anchor_provenance: str | None = None


def private_pmean(req: ReleaseRequest, rng: RngState) -> ReleaseRecord:
    """Release the p-mean of the dataset under the requested RDP budget."""
    spec = req.dataset.spec
    mu = solve_pmean(req.dataset, req.p)
    ctx = SensitivityContext.for_dataset(req.dataset, req.p)
    delta = sensitivity_bound(ctx)
    K = spec.ric_lower_K

    if req.mechanism is Mechanism.BM:
        t = bm_time_for_budget(K, req.budget, delta)
        n_step = req.n_step or default_n_step(t)
        point = bm_sample(mu, t, n_step, rng)
        # sqrt(2mt) holds under Ric > 0 and exactly in the Euclidean case;
        # no mean-distance bound is available for Brownian motion at K > 0
        utility = bm_utility_bound(spec.m, t) if K <= 0 else None
        provenance = None
    else:
        opts = req.langevin
        t = langevin_time_for_budget(K, opts.lam, req.budget, delta)
        n_step = req.n_step or default_n_step(t)
        cfg = MechanismConfig(t=t, n_step=n_step, lam=opts.lam, anchor=opts.anchor)
        point = langevin_sample(mu, cfg, rng)
        utility = langevin_utility_bound(
            spec.m, max(K, 0.0), opts.lam, distance(opts.anchor, mu), t
        )
        provenance = opts.anchor_provenance

    return ReleaseRecord(
        private_point=point,
        delta_used=delta,
        t_used=t,
        mechanism=req.mechanism,
        utility_bound=utility,
        seed=rng.seed,
        anchor_provenance=provenance,
    )
