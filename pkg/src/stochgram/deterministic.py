"""Noise-free observability/constructability matrices and Gramians."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .info import SymmetricInfoMatrix
from .linalg import HorizonError, RANK_RTOL, numerical_rank, sym_eigvalsh, symmetrize
from .system import TimeVaryingLinearSystem, state_transition


@dataclass(frozen=True, eq=False)
class StackedOutputMatrix:
    matrix: np.ndarray
    direction: str  # "from_initial" or "from_final"
    window: int
    anchor: int


def check_window(sys: TimeVaryingLinearSystem, w: int) -> None:
    if not 1 <= w <= sys.horizon + 1:
        raise HorizonError(f"window {w} outside 1..{sys.horizon + 1}")


def observability_matrix(sys: TimeVaryingLinearSystem, w: int) -> StackedOutputMatrix:
    """Rows ``C_t Phi_{t,0}`` for ``t = 0..w-1``."""
    check_window(sys, w)
    blocks = [sys.c[t] @ state_transition(sys, t, 0) for t in range(w)]
    return StackedOutputMatrix(np.vstack(blocks), "from_initial", w, 0)


def constructability_matrix(sys: TimeVaryingLinearSystem, w: int) -> StackedOutputMatrix:
    """Rows ``C_{N-t} Phi_{N-t,N}`` for ``t = 0..w-1``, newest measurement first."""
    check_window(sys, w)
    N = sys.horizon
    blocks = [sys.c[N - t] @ state_transition(sys, N - t, N) for t in range(w)]
    return StackedOutputMatrix(np.vstack(blocks), "from_final", w, N)


def deterministic_gramian(m: StackedOutputMatrix) -> SymmetricInfoMatrix:
    g = m.matrix.T @ m.matrix
    direction = "forward" if m.direction == "from_initial" else "reverse"
    return SymmetricInfoMatrix(symmetrize(g), m.window, m.anchor, direction)


def is_full_rank(m: StackedOutputMatrix, rtol: float = RANK_RTOL) -> bool:
    return numerical_rank(m.matrix, rtol) == m.matrix.shape[1]


@dataclass(frozen=True)
class UnobservabilityMeasures:
    condition_number: float
    inverse_min_eigenvalue: float


def unobservability_measures(g) -> UnobservabilityMeasures:
    """Condition number and reciprocal smallest eigenvalue; inf when singular."""
    eig = sym_eigvalsh(np.asarray(g))
    lo, hi = eig[0], eig[-1]
    if lo <= 0.0:
        return UnobservabilityMeasures(math.inf, math.inf)
    return UnobservabilityMeasures(float(hi / lo), float(1.0 / lo))
