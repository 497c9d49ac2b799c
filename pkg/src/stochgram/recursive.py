"""Recursive stochastic Gramians using only ``n x n`` solves.

The observability recursion with process noise runs backward in time from
the last measurement of the window to ``x_0``. Each step folds the
information about ``x_{j+1}`` through ``x_{j+1} = phi_j x_j + w_j``:

    F_j = phi_j^T (Q_j^{-1} - Q_j^{-1} (F_{j+1} + Q_j^{-1})^{-1} Q_j^{-1}) phi_j
          + C_j^T R_j^{-1} C_j

which is the constructability recursion run on the dual system. The
constructability recursion runs forward:

    F_{k+1} = Q_k^{-1} - Q_k^{-1} phi_k (F_k + phi_k^T Q_k^{-1} phi_k)^{-1} phi_k^T Q_k^{-1}
              + C_{k+1}^T R_{k+1}^{-1} C_{k+1}

Every iterate is symmetrized, so traces are exactly symmetric.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .deterministic import check_window
from .info import RecursionTrace
from .linalg import ConditioningError, NotPositiveDefiniteError, chol_solve, cholesky, spd_inverse, symmetrize
from .system import TimeInvariantLinearSystem, TimeVaryingLinearSystem, checked_phi


def measurement_info(c: np.ndarray, r: np.ndarray) -> np.ndarray:
    """``C^T R^{-1} C`` through the Cholesky factor of ``R``."""
    x = solve_triangular(cholesky(r, "measurement covariance"), c, lower=True, check_finite=False)
    return x.T @ x


def _inner_solve(s: np.ndarray, rhs: np.ndarray, step: int) -> np.ndarray:
    try:
        factor = cholesky(s, "inner recursion matrix")
    except NotPositiveDefiniteError as exc:
        raise ConditioningError(f"inner matrix not positive definite at step {step}", step) from exc
    return chol_solve(factor, rhs)


def backward_step(f_next, phi, q_inv, meas, step: int = 0) -> np.ndarray:
    """Information about ``x_j`` from the information ``f_next`` about ``x_{j+1}``."""
    g = q_inv @ phi
    f = phi.T @ g - g.T @ _inner_solve(f_next + q_inv, g, step) + meas
    return symmetrize(f)


def forward_step(f_prev, phi, q_inv, meas, step: int = 0) -> np.ndarray:
    """Information about ``x_{k+1}`` from the information ``f_prev`` about ``x_k``."""
    g = q_inv @ phi
    f = q_inv - g @ _inner_solve(f_prev + phi.T @ g, g.T, step) + meas
    return symmetrize(f)


def _require_noise(sys) -> None:
    if sys.q is None:
        raise ValueError("system has no process noise; use the no-noise recursions")


def obs_recursion_no_noise(sys: TimeVaryingLinearSystem, w: int) -> RecursionTrace:
    """Observability Gramian of the first ``w`` measurements, adding one per step."""
    check_window(sys, w)
    f = measurement_info(sys.c[0], sys.r[0])
    out = [symmetrize(f)]
    transition = np.eye(sys.state_dim)
    for k in range(w - 1):
        transition = sys.phi[k] @ transition
        h = sys.c[k + 1] @ transition
        f = f + h.T @ _solve_r(sys.r[k + 1], h)
        out.append(symmetrize(f))
    return RecursionTrace(tuple(out), (0,) * w, "obs_no_noise", "forward")


def _solve_r(r: np.ndarray, h: np.ndarray) -> np.ndarray:
    return chol_solve(cholesky(r, "measurement covariance"), h)


def cons_recursion_no_noise(sys: TimeVaryingLinearSystem, w: int) -> RecursionTrace:
    """Constructability Gramian over the last ``w`` measurements, anchored at ``x_N``.

    The ``i``-th iterate is the Gramian of measurements ``N-w+1..N-w+1+i``
    with respect to the state at its newest measurement.
    """
    check_window(sys, w)
    start = sys.horizon - w + 1
    f = measurement_info(sys.c[start], sys.r[start])
    out = [symmetrize(f)]
    for k in range(start, sys.horizon):
        phi = checked_phi(sys, k)
        left = np.linalg.solve(phi.T, f)  # phi^{-T} F
        f = np.linalg.solve(phi.T, left.T).T + measurement_info(sys.c[k + 1], sys.r[k + 1])
        out.append(symmetrize(f))
        f = out[-1]
    return RecursionTrace(tuple(out), tuple(range(start, sys.horizon + 1)), "cons_no_noise", "reverse")


def cons_recursion(sys: TimeVaryingLinearSystem, w: int) -> RecursionTrace:
    """Constructability Gramian with process noise over the last ``w`` measurements."""
    _require_noise(sys)
    check_window(sys, w)
    start = sys.horizon - w + 1
    f = symmetrize(measurement_info(sys.c[start], sys.r[start]))
    out = [f]
    for k in range(start, sys.horizon):
        q_inv = spd_inverse(sys.q[k], f"q[{k}]")
        meas = measurement_info(sys.c[k + 1], sys.r[k + 1])
        f = forward_step(f, sys.phi[k], q_inv, meas, step=k)
        out.append(f)
    return RecursionTrace(tuple(out), tuple(range(start, sys.horizon + 1)), "cons_recursion", "reverse")


def obs_recursion_dual(sys: TimeVaryingLinearSystem, w: int) -> RecursionTrace:
    """Observability Gramian with process noise over measurements ``0..w-1``.

    Runs backward from ``x_{w-1}``; the ``i``-th iterate is the Gramian of
    measurements ``w-1-i..w-1`` with respect to ``x_{w-1-i}`` (equivalently,
    the constructability iterates of the dual of the window). The last
    iterate is the ``w``-step observability Gramian of ``x_0``.
    """
    _require_noise(sys)
    check_window(sys, w)
    last = w - 1
    f = symmetrize(measurement_info(sys.c[last], sys.r[last]))
    out = [f]
    for j in range(last - 1, -1, -1):
        q_inv = spd_inverse(sys.q[j], f"q[{j}]")
        meas = measurement_info(sys.c[j], sys.r[j])
        f = backward_step(f, sys.phi[j], q_inv, meas, step=j)
        out.append(f)
    return RecursionTrace(tuple(out), tuple(range(last, -1, -1)), "recursive_dual", "forward")


def obs_recursion_lti(sys: TimeInvariantLinearSystem, w: int) -> RecursionTrace:
    """Observability Gramians of ``x_0`` for windows ``1..w`` of a time-invariant system.

    Only ``n x n`` matrices are formed, so ``w`` can be large.
    """
    _require_noise(sys)
    if w < 1:
        raise ValueError("window must be at least 1")
    q_inv = spd_inverse(sys.q, "q")
    meas = measurement_info(sys.c, sys.r)
    f = symmetrize(meas)
    out = [f]
    for step in range(1, w):
        f = backward_step(f, sys.phi, q_inv, meas, step=step)
        out.append(f)
    return RecursionTrace(tuple(out), (0,) * w, "recursive_lti", "forward")

