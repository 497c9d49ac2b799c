"""Non-recursive stochastic Gramians built from the stacked-measurement covariance.

These are the baseline formulas: they form the full ``wp x wp`` covariance of
the measurement window and solve against it. Every solve goes through a
Cholesky factorization, so the instability they show for long windows comes
from the conditioning of the covariance itself.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .deterministic import check_window, constructability_matrix, observability_matrix
from .info import SymmetricInfoMatrix
from .linalg import chol_solve, cholesky, symmetrize
from .system import TimeVaryingLinearSystem, state_transition

FORWARD = "forward"
REVERSE = "reverse"
BLOCK_SUM = "block_sum"
M_FORM = "m_form"


@dataclass(frozen=True, eq=False)
class MeasurementCovariance:
    matrix: np.ndarray
    window: int
    direction: str
    construction: str


def _require_noise(sys: TimeVaryingLinearSystem) -> None:
    if sys.q is None:
        raise ValueError("system has no process noise; use the no-process-noise formulas")


def fim_linear_gaussian(H: np.ndarray, cov, window: int = 0, anchor: int = 0, direction: str = FORWARD):
    """``H^T cov^{-1} H`` through a Cholesky solve, then symmetrized.

    The unsymmetrized product is kept on the result as ``raw``.
    """
    cov_m = cov.matrix if isinstance(cov, MeasurementCovariance) else np.asarray(cov, dtype=float)
    H = np.asarray(H, dtype=float)
    if H.ndim == 1:
        H = H.reshape(-1, 1)
    if cov_m.shape != (H.shape[0], H.shape[0]):
        raise ValueError(f"covariance shape {cov_m.shape} does not match H rows {H.shape[0]}")
    t0 = time.perf_counter_ns()
    factor = cholesky(cov_m, "measurement covariance")
    raw = H.T @ chol_solve(factor, H)
    elapsed = time.perf_counter_ns() - t0
    return SymmetricInfoMatrix.from_raw(raw, window, anchor, direction, elapsed)


def meas_cov_no_process_noise(sys: TimeVaryingLinearSystem, w: int, direction: str = FORWARD) -> np.ndarray:
    check_window(sys, w)
    N = sys.horizon
    idx = range(w) if direction == FORWARD else range(N, N - w, -1)
    return block_diag(*(sys.r[k] for k in idx))


def obs_fim_no_process_noise(sys: TimeVaryingLinearSystem, w: int) -> SymmetricInfoMatrix:
    H = observability_matrix(sys, w).matrix
    return fim_linear_gaussian(H, meas_cov_no_process_noise(sys, w, FORWARD), w, 0, FORWARD)


def cons_fim_no_process_noise(sys: TimeVaryingLinearSystem, w: int) -> SymmetricInfoMatrix:
    H = constructability_matrix(sys, w).matrix
    N = sys.horizon
    return fim_linear_gaussian(H, meas_cov_no_process_noise(sys, w, REVERSE), w, N, REVERSE)


def meas_cov_theorem1(sys: TimeVaryingLinearSystem, w: int) -> MeasurementCovariance:
    """Forward measurement covariance assembled block by block.

    Block ``(j, k)`` for ``j >= k`` is ``delta_jk R_j`` plus
    ``sum_{i=1..k} C_j Phi_{j,i} Q_{i-1} (C_k Phi_{k,i})^T``; upper blocks by
    symmetry.
    """
    _require_noise(sys)
    check_window(sys, w)
    p = sys.meas_dim
    out = np.zeros((w * p, w * p))
    for j in range(w):
        for k in range(j + 1):
            block = np.zeros((p, p))
            for i in range(1, k + 1):
                left = sys.c[j] @ state_transition(sys, j, i)
                right = sys.c[k] @ state_transition(sys, k, i)
                block += left @ sys.q[i - 1] @ right.T
            if j == k:
                block += sys.r[j]
            out[j * p : (j + 1) * p, k * p : (k + 1) * p] = block
            if j != k:
                out[k * p : (k + 1) * p, j * p : (j + 1) * p] = block.T
    return MeasurementCovariance(out, w, FORWARD, BLOCK_SUM)


def noise_gain_matrix(sys: TimeVaryingLinearSystem, w: int, direction: str = FORWARD) -> np.ndarray:
    """The ``wp x wn`` map from stacked process noise to stacked measurements.

    The last block column is always zero.
    """
    check_window(sys, w)
    n, p, N = sys.state_dim, sys.meas_dim, sys.horizon
    M = np.zeros((w * p, w * n))
    for i in range(1, w + 1):
        for j in range(1, i):
            if direction == FORWARD:
                block = sys.c[i - 1] @ state_transition(sys, i - 1, j)
            else:
                # C_{N-i+1} Phi_{N-j+1,N-i+1}^{-1} == C_{N-i+1} Phi_{N-i+1,N-j+1}
                block = sys.c[N - i + 1] @ state_transition(sys, N - i + 1, N - j + 1)
            M[(i - 1) * p : i * p, (j - 1) * n : j * n] = block
    return M


def process_noise_blocks(sys: TimeVaryingLinearSystem, w: int, direction: str = FORWARD, fill=None) -> np.ndarray:
    """``blkdiag(Q_0..Q_{w-2}, fill)`` forward or ``blkdiag(Q_{N-1}..Q_{N-w+1}, fill)`` reverse.

    ``fill`` is the free trailing block; zero by default.
    """
    _require_noise(sys)
    check_window(sys, w)
    n, N = sys.state_dim, sys.horizon
    idx = range(w - 1) if direction == FORWARD else range(N - 1, N - w, -1)
    blocks = [sys.q[k] for k in idx]
    blocks.append(np.zeros((n, n)) if fill is None else np.asarray(fill, dtype=float))
    return block_diag(*blocks)


def meas_cov_m_form(sys: TimeVaryingLinearSystem, w: int, direction: str = FORWARD, fill=None) -> MeasurementCovariance:
    """Measurement covariance as ``blkdiag(R) + M Qblk M^T`` in either time direction."""
    _require_noise(sys)
    M = noise_gain_matrix(sys, w, direction)
    Qb = process_noise_blocks(sys, w, direction, fill)
    R = meas_cov_no_process_noise(sys, w, direction)
    return MeasurementCovariance(symmetrize(R + M @ Qb @ M.T), w, direction, M_FORM)


def obs_fim_direct(sys: TimeVaryingLinearSystem, w: int, construction: str = M_FORM) -> SymmetricInfoMatrix:
    if construction == BLOCK_SUM:
        cov = meas_cov_theorem1(sys, w)
    elif construction == M_FORM:
        cov = meas_cov_m_form(sys, w, FORWARD)
    else:
        raise ValueError(f"unknown covariance construction {construction!r}")
    H = observability_matrix(sys, w).matrix
    return fim_linear_gaussian(H, cov, w, 0, FORWARD)


def cons_fim_direct(sys: TimeVaryingLinearSystem, w: int, construction: str = M_FORM) -> SymmetricInfoMatrix:
    if construction != M_FORM:
        raise ValueError(
            f"construction {construction!r} is only available for the forward (observability) stack"
        )
    cov = meas_cov_m_form(sys, w, REVERSE)
    H = constructability_matrix(sys, w).matrix
    return fim_linear_gaussian(H, cov, w, sys.horizon, REVERSE)
