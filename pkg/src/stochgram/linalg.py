"""Small dense linear-algebra helpers and the package's exception types."""

from __future__ import annotations

import numpy as np
from scipy.linalg import lapack, solve_triangular

SYMMETRY_RTOL = 1e-10
PHI_COND_CAP = 1e12
RANK_RTOL = 1e-10


class GramianError(Exception):
    """Base class for errors raised by this package."""


class HorizonError(GramianError, IndexError):
    """A time index or window lies outside the system horizon."""


class SingularMatrixError(GramianError, np.linalg.LinAlgError):
    """A matrix that must be inverted is numerically singular."""


class ConditioningError(SingularMatrixError):
    """An inner matrix of a recursion could not be factored.

    ``step`` is the recursion step at which the failure happened.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class NotPositiveDefiniteError(GramianError, np.linalg.LinAlgError):
    """Cholesky factorization failed; ``pivot`` is the 1-based failing minor."""

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def cholesky(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Lower Cholesky factor of the symmetrized ``a``.

    Raises NotPositiveDefiniteError with the index of the failing leading
    minor instead of a bare LinAlgError.
    """
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return a.copy()
    if not np.all(np.isfinite(a)):
        raise NotPositiveDefiniteError(f"{what} has non-finite entries")
    c, info = lapack.dpotrf(symmetrize(a), lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefiniteError(
            f"{what} is not positive definite (leading minor {info} failed)",
            pivot=int(info),
        )
    if info < 0:  # pragma: no cover - bad argument to LAPACK
        raise ValueError(f"dpotrf argument {-info} invalid")
    return c


def chol_solve(factor: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A x = b`` given the lower Cholesky factor of ``A``."""
    y = solve_triangular(factor, b, lower=True, check_finite=False)
    return solve_triangular(factor.T, y, lower=False, check_finite=False)


def spd_inverse(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Inverse of an SPD matrix via its Cholesky factor, exactly symmetric."""
    factor = cholesky(a, what)
    linv = solve_triangular(factor, np.eye(a.shape[0]), lower=True, check_finite=False)
    return linv.T @ linv


def is_symmetric(a: np.ndarray, rtol: float = SYMMETRY_RTOL) -> bool:
    scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
    return bool(np.max(np.abs(a - a.T), initial=0.0) <= rtol * scale)


def is_positive_definite(a: np.ndarray) -> bool:
    try:
        cholesky(a)
    except NotPositiveDefiniteError:
        return False
    return True


def symmetry_error(a: np.ndarray) -> float:
    """Relative asymmetry ||A - A^T||_F / ||A||_F (0 for the zero matrix)."""
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(a - a.T) / norm)


def sym_eigvalsh(a: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(symmetrize(np.asarray(a, dtype=float)))


def min_eig(a: np.ndarray) -> float:
    return float(sym_eigvalsh(a)[0])


def rel_err(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius-norm error of ``a`` relative to the reference ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = np.linalg.norm(b)
    diff = np.linalg.norm(a - b)
    if denom == 0.0:
        return float(diff)
    return float(diff / denom)


def loewner_slack(big: np.ndarray, small: np.ndarray) -> float:
    """Smallest eigenvalue of ``big - small`` scaled by ``max(||big||, ||small||)``.

    ``big >= small`` in the Loewner order holds up to rounding when the
    returned value is at least about ``-1e-9``.
    """
    scale = max(np.linalg.norm(big, 2), np.linalg.norm(small, 2), np.finfo(float).tiny)
    return min_eig(big - small) / scale


def numerical_rank(a: np.ndarray, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))
