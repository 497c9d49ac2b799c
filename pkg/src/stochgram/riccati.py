"""Steady-state observability Gramian of a time-invariant system.

The limit ``F`` of the time-invariant recursion satisfies

    F = -Phi^T Q^{-1} (F + Q^{-1})^{-1} Q^{-1} Phi + Phi^T Q^{-1} Phi + C^T R^{-1} C

or, equivalently,

    F = Phi^T F Phi - Phi^T F (F + Q^{-1})^{-1} (Phi^T F)^T + C^T R^{-1} C.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .info import SymmetricInfoMatrix
from .linalg import ConditioningError, NotPositiveDefiniteError, chol_solve, cholesky, spd_inverse, symmetrize
from .recursive import backward_step, measurement_info
from .system import TimeInvariantLinearSystem

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class DareSolution:
    f_inf: SymmetricInfoMatrix
    iterations: int
    residual: float
    converged: bool


def _factor(s: np.ndarray) -> np.ndarray:
    try:
        return cholesky(s, "F + Q^{-1}")
    except NotPositiveDefiniteError as exc:
        raise ConditioningError("F + Q^{-1} is not positive definite") from exc


def riccati_rhs(sys: TimeInvariantLinearSystem, F: np.ndarray, form: int = 2) -> np.ndarray:
    """Right-hand side of the Riccati equation in the first or second form."""
    F = np.asarray(F, dtype=float)
    phi = sys.phi
    q_inv = spd_inverse(sys.q, "q")
    meas = measurement_info(sys.c, sys.r)
    factor = _factor(F + q_inv)
    if form == 1:
        g = q_inv @ phi
        return phi.T @ g - g.T @ chol_solve(factor, g) + meas
    if form == 2:
        g = F @ phi  # (Phi^T F)^T
        return phi.T @ F @ phi - g.T @ chol_solve(factor, g) + meas
    raise ValueError("form must be 1 or 2")


def riccati_residual(sys: TimeInvariantLinearSystem, F, form: int = 2) -> float:
    """Frobenius norm of ``rhs(F) - F``."""
    F = np.asarray(F, dtype=float)
    return float(np.linalg.norm(riccati_rhs(sys, F, form) - F))


def solve_dare_fixed_point(
    sys: TimeInvariantLinearSystem, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> DareSolution:
    """Iterate the time-invariant recursion from ``C^T R^{-1} C`` to its fixed point.

    Stops when ``||F_{k+1} - F_k||_F <= tol * max(1, ||F_k||_F)``. Running out
    of iterations is not an error: the last iterate comes back with
    ``converged=False``.
    """
    if sys.q is None:
        raise ValueError("the steady-state Gramian needs process noise")
    if tol <= 0:
        raise ValueError("tol must be positive")
    q_inv = spd_inverse(sys.q, "q")
    meas = measurement_info(sys.c, sys.r)
    f = symmetrize(meas)
    converged = False
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        f_new = backward_step(f, sys.phi, q_inv, meas, step=iterations)
        step = np.linalg.norm(f_new - f)
        scale = max(1.0, np.linalg.norm(f))
        f = f_new
        if not np.all(np.isfinite(f)):
            break
        if step <= tol * scale:
            converged = True
            break
    residual = riccati_residual(sys, f) if np.all(np.isfinite(f)) else float("inf")
    info = SymmetricInfoMatrix(f, iterations + 1, 0, "forward")
    return DareSolution(info, iterations, residual, converged)
