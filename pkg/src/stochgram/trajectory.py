"""Trajectory information matrix and its relation to the stochastic Gramians.

For states ``x_0..x_{w-1}`` with no prior, the Fisher information of the
measurements and the Gaussian dynamics is block tridiagonal:

    D_k = C_k^T R_k^{-1} C_k + [k > 0] Q_{k-1}^{-1} + [k < w-1] Phi_k^T Q_k^{-1} Phi_k
    E_k = -Phi_k^T Q_k^{-1}         (block (k, k+1); block (k+1, k) is E_k^T)

The corner blocks of its inverse are the inverse observability and
constructability Gramians of the window, and the inverse of any diagonal block
is the total information about that intermediate state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .direct import cons_fim_direct, obs_fim_direct
from .info import SymmetricInfoMatrix
from .linalg import (
    GramianError,
    HorizonError,
    rel_err,
    spd_inverse,
    symmetrize,
)
from .recursive import cons_recursion, measurement_info, obs_recursion_dual
from .system import TimeVaryingLinearSystem

MAX_DENSE_SIZE = 512
# Above this condition number the trajectory matrix counts as singular.
COND_CAP = 1e12


@dataclass(frozen=True, eq=False)
class TrajectoryFim:
    matrix: np.ndarray
    window: int
    state_dim: int

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.state_dim
        return self.matrix[i * n : (i + 1) * n, j * n : (j + 1) * n]


def assemble_trajectory_fim(sys: TimeVaryingLinearSystem, w: int) -> TrajectoryFim:
    if sys.q is None:
        raise ValueError("the trajectory information matrix needs process noise")
    if not 2 <= w <= sys.horizon + 1:
        raise HorizonError(f"window {w} outside 2..{sys.horizon + 1}")
    n = sys.state_dim
    out = np.zeros((w * n, w * n))
    q_inv = [spd_inverse(sys.q[k], f"q[{k}]") for k in range(w - 1)]
    for k in range(w):
        d = measurement_info(sys.c[k], sys.r[k])
        if k > 0:
            d = d + q_inv[k - 1]
        if k < w - 1:
            d = d + sys.phi[k].T @ q_inv[k] @ sys.phi[k]
            e = -sys.phi[k].T @ q_inv[k]
            out[k * n : (k + 1) * n, (k + 1) * n : (k + 2) * n] = e
            out[(k + 1) * n : (k + 2) * n, k * n : (k + 1) * n] = e.T
        out[k * n : (k + 1) * n, k * n : (k + 1) * n] = symmetrize(d)
    return TrajectoryFim(out, w, n)


def _dense_inverse(fim: TrajectoryFim) -> np.ndarray:
    if fim.matrix.shape[0] > MAX_DENSE_SIZE:
        raise ValueError(f"dense inversion capped at {MAX_DENSE_SIZE} rows")
    return spd_inverse(fim.matrix, "trajectory information matrix")


@dataclass
class CornerReport:
    passed: bool
    obs_error: float = float("nan")
    cons_error: float = float("nan")
    message: str = ""
    blocks: dict = field(default_factory=dict)


def corner_check(sys: TimeVaryingLinearSystem, w: int, rtol: float = 1e-7) -> CornerReport:
    """Compare the corner blocks of the inverse trajectory FIM with the direct Gramians.

    Failures, including a singular or ill-conditioned trajectory matrix, are
    reported, not raised.
    """
    try:
        fim = assemble_trajectory_fim(sys, w)
        inv = _dense_inverse(fim)
        cond = np.linalg.cond(fim.matrix)
        if not cond <= COND_CAP:
            return CornerReport(False, message=f"trajectory information matrix is singular (cond {cond:.3g})")
        window = sys.segment(0, w - 1)
        obs = obs_fim_direct(window, w).matrix
        cons = cons_fim_direct(window, w).matrix
        obs_inv = spd_inverse(obs, "observability Gramian")
        cons_inv = spd_inverse(cons, "constructability Gramian")
    except (GramianError, np.linalg.LinAlgError, ValueError) as exc:
        return CornerReport(False, message=str(exc))
    n = sys.state_dim
    top_left = inv[:n, :n]
    bottom_right = inv[-n:, -n:]
    obs_error = rel_err(top_left, obs_inv)
    cons_error = rel_err(bottom_right, cons_inv)
    return CornerReport(
        passed=obs_error <= rtol and cons_error <= rtol,
        obs_error=obs_error,
        cons_error=cons_error,
        blocks={"top_left": top_left, "bottom_right": bottom_right},
    )


@dataclass(frozen=True, eq=False)
class IntermediateInfo:
    total: SymmetricInfoMatrix
    obs: np.ndarray
    cons: np.ndarray
    measurement: np.ndarray


def intermediate_components(sys: TimeVaryingLinearSystem, w: int, k: int) -> IntermediateInfo:
    """Total information about ``x_k`` from measurements ``0..w-1`` and its parts.

    ``obs`` uses measurements ``k..w-1`` and ``cons`` measurements ``0..k``,
    both taken with respect to ``x_k``; the measurement at ``k`` is in both,
    so it is subtracted once.
    """
    if not 0 <= k <= w - 1:
        raise HorizonError(f"state index {k} outside 0..{w - 1}")
    if not 1 <= w <= sys.horizon + 1:
        raise HorizonError(f"window {w} outside 1..{sys.horizon + 1}")
    obs = obs_recursion_dual(sys.segment(k, w - 1), w - k).final.matrix
    cons = cons_recursion(sys.segment(0, k), k + 1).final.matrix
    meas = measurement_info(sys.c[k], sys.r[k])
    total = symmetrize(obs + cons - meas)
    return IntermediateInfo(SymmetricInfoMatrix(total, w, k, "both"), obs, cons, meas)


def intermediate_state_info(sys: TimeVaryingLinearSystem, w: int, k: int) -> SymmetricInfoMatrix:
    return intermediate_components(sys, w, k).total


def block_inverse_info(sys: TimeVaryingLinearSystem, w: int, k: int) -> np.ndarray:
    """Inverse of the ``k``-th diagonal block of the inverse trajectory FIM."""
    fim = assemble_trajectory_fim(sys, w)
    inv = _dense_inverse(fim)
    n = sys.state_dim
    return spd_inverse(inv[k * n : (k + 1) * n, k * n : (k + 1) * n], f"block {k}")
