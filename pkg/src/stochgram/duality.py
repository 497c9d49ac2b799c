"""Observability/constructability dual systems.

The dual of a system over ``0..N`` reverses time and inverts the dynamics:

    phi_bar[N-k-1] = phi[k]^{-1}
    q_bar[N-k-1]   = phi[k]^{-1} q[k] phi[k]^{-T}
    c_bar[N-k]     = c[k],  r_bar[N-k] = r[k]

so that the constructability Gramian of the dual over ``N+1`` steps equals the
observability Gramian of the original, and vice versa.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import PHI_COND_CAP, SingularMatrixError, symmetrize
from .system import (
    TimeInvariantLinearSystem,
    TimeVaryingLinearSystem,
    checked_phi,
    inverse_step,
)


@dataclass(frozen=True, eq=False)
class DualSystemMap:
    original: TimeVaryingLinearSystem
    dual: TimeVaryingLinearSystem

    @property
    def window(self) -> int:
        return self.original.horizon + 1


def _sandwich_inverse(phi: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``phi^{-1} q phi^{-T}`` using two solves."""
    left = np.linalg.solve(phi, q)
    return symmetrize(np.linalg.solve(phi, left.T))


def _require_noise(sys) -> None:
    if sys.q is None:
        raise ValueError(
            "dual systems need positive definite process noise; "
            "use the no-process-noise recursions for q=None"
        )


def dual_ltv(sys: TimeVaryingLinearSystem) -> DualSystemMap:
    _require_noise(sys)
    N = sys.horizon
    phi = [None] * N
    q = [None] * N
    for k in range(N):
        phi[N - k - 1] = inverse_step(sys, k)
        q[N - k - 1] = _sandwich_inverse(checked_phi(sys, k), sys.q[k])
    c = [sys.c[N - k] for k in range(N + 1)]
    r = [sys.r[N - k] for k in range(N + 1)]
    return DualSystemMap(sys, TimeVaryingLinearSystem(phi=phi, c=c, q=q, r=r))


def dual_lti(sys: TimeInvariantLinearSystem) -> TimeInvariantLinearSystem:
    _require_noise(sys)
    n = sys.state_dim
    if np.linalg.cond(sys.phi) > PHI_COND_CAP:
        raise SingularMatrixError("phi is numerically singular")
    return TimeInvariantLinearSystem(
        phi=np.linalg.solve(sys.phi, np.eye(n)),
        c=sys.c,
        q=_sandwich_inverse(sys.phi, sys.q),
        r=sys.r,
    )
