"""Discrete-time linear stochastic systems and state-transition algebra.

A time-varying system over the horizon ``0..N`` is

    x[k+1] = phi[k] x[k] + w[k],    w[k] ~ N(0, q[k]),   k = 0..N-1
    y[k]   = c[k] x[k] + v[k],      v[k] ~ N(0, r[k]),   k = 0..N

where ``phi[k]`` is the one-step transition from ``k`` to ``k+1``. ``q`` may be
``None`` for a system without process noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import (
    PHI_COND_CAP,
    SYMMETRY_RTOL,
    HorizonError,
    SingularMatrixError,
    cholesky,
    NotPositiveDefiniteError,
)


def _frozen(m, ndim: int = 2) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1 and ndim == 2:
        a = a.reshape(1, -1)
    a.setflags(write=False)
    return a


def _frozen_seq(ms) -> tuple[np.ndarray, ...]:
    return tuple(_frozen(m) for m in ms)


@dataclass(frozen=True, eq=False)
class TimeVaryingLinearSystem:
    phi: tuple[np.ndarray, ...]
    c: tuple[np.ndarray, ...]
    q: Optional[tuple[np.ndarray, ...]]
    r: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "phi", _frozen_seq(self.phi))
        object.__setattr__(self, "c", _frozen_seq(self.c))
        object.__setattr__(self, "r", _frozen_seq(self.r))
        if self.q is not None:
            object.__setattr__(self, "q", _frozen_seq(self.q))
        self._check_shapes()

    def _check_shapes(self) -> None:
        N = len(self.phi)
        if len(self.c) != N + 1 or len(self.r) != N + 1:
            raise ValueError(
                f"expected {N + 1} output matrices and measurement covariances "
                f"for {N} transitions, got {len(self.c)} and {len(self.r)}"
            )
        if self.q is not None and len(self.q) != N:
            raise ValueError(f"expected {N} process covariances, got {len(self.q)}")
        n = self.c[0].shape[1]
        p = self.c[0].shape[0]
        for k, m in enumerate(self.phi):
            if m.shape != (n, n):
                raise ValueError(f"phi[{k}] has shape {m.shape}, expected {(n, n)}")
        for k, m in enumerate(self.c):
            if m.shape != (p, n):
                raise ValueError(f"c[{k}] has shape {m.shape}, expected {(p, n)}")
        for k, m in enumerate(self.r):
            if m.shape != (p, p):
                raise ValueError(f"r[{k}] has shape {m.shape}, expected {(p, p)}")
        for k, m in enumerate(self.q or ()):
            if m.shape != (n, n):
                raise ValueError(f"q[{k}] has shape {m.shape}, expected {(n, n)}")

    @property
    def horizon(self) -> int:
        return len(self.phi)

    N = horizon

    @property
    def state_dim(self) -> int:
        return self.c[0].shape[1]

    @property
    def meas_dim(self) -> int:
        return self.c[0].shape[0]

    @property
    def has_process_noise(self) -> bool:
        return self.q is not None

    def segment(self, start: int, stop: int) -> "TimeVaryingLinearSystem":
        """Restrict to time indices ``start..stop`` (inclusive), reindexed from 0."""
        if not 0 <= start <= stop <= self.horizon:
            raise HorizonError(f"segment [{start}, {stop}] outside horizon 0..{self.horizon}")
        return TimeVaryingLinearSystem(
            phi=self.phi[start:stop],
            c=self.c[start : stop + 1],
            q=None if self.q is None else self.q[start:stop],
            r=self.r[start : stop + 1],
        )

    def without_process_noise(self) -> "TimeVaryingLinearSystem":
        return TimeVaryingLinearSystem(phi=self.phi, c=self.c, q=None, r=self.r)

    def equals(self, other: "TimeVaryingLinearSystem", rtol: float = 0.0, atol: float = 0.0) -> bool:
        if self.horizon != other.horizon or (self.q is None) != (other.q is None):
            return False
        if self.state_dim != other.state_dim or self.meas_dim != other.meas_dim:
            return False
        pairs = [(self.phi, other.phi), (self.c, other.c), (self.r, other.r)]
        if self.q is not None:
            pairs.append((self.q, other.q))
        return all(
            np.allclose(a, b, rtol=rtol, atol=atol)
            for seq_a, seq_b in pairs
            for a, b in zip(seq_a, seq_b)
        )


@dataclass(frozen=True, eq=False)
class TimeInvariantLinearSystem:
    phi: np.ndarray
    c: np.ndarray
    q: Optional[np.ndarray]
    r: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi", _frozen(self.phi))
        object.__setattr__(self, "c", _frozen(self.c))
        object.__setattr__(self, "r", _frozen(self.r))
        if self.q is not None:
            object.__setattr__(self, "q", _frozen(self.q))
        n, p = self.state_dim, self.meas_dim
        if self.phi.shape != (n, n):
            raise ValueError(f"phi has shape {self.phi.shape}, expected {(n, n)}")
        if self.r.shape != (p, p):
            raise ValueError(f"r has shape {self.r.shape}, expected {(p, p)}")
        if self.q is not None and self.q.shape != (n, n):
            raise ValueError(f"q has shape {self.q.shape}, expected {(n, n)}")

    @property
    def state_dim(self) -> int:
        return self.c.shape[1]

    @property
    def meas_dim(self) -> int:
        return self.c.shape[0]

    @property
    def has_process_noise(self) -> bool:
        return self.q is not None


def lift_lti(sys: TimeInvariantLinearSystem, N: int) -> TimeVaryingLinearSystem:
    """Repeat the time-invariant matrices over a horizon of ``N`` transitions."""
    if N < 0:
        raise ValueError("horizon must be non-negative")
    return TimeVaryingLinearSystem(
        phi=(sys.phi,) * N,
        c=(sys.c,) * (N + 1),
        q=None if sys.q is None else (sys.q,) * N,
        r=(sys.r,) * (N + 1),
    )


def checked_phi(sys: TimeVaryingLinearSystem, k: int, cond_cap: float = PHI_COND_CAP) -> np.ndarray:
    m = sys.phi[k]
    if np.linalg.cond(m) > cond_cap:
        raise SingularMatrixError(f"phi[{k}] is numerically singular (condition > {cond_cap:g})")
    return m


def state_transition(sys: TimeVaryingLinearSystem, ell: int, k: int) -> np.ndarray:
    """Transition matrix taking the state at time ``k`` to time ``ell``.

    Backward transitions (``ell < k``) are built by successive solves with the
    one-step matrices, never by forming an explicit inverse.
    """
    N = sys.horizon
    if not (0 <= ell <= N and 0 <= k <= N):
        raise HorizonError(f"transition indices ({ell}, {k}) outside horizon 0..{N}")
    out = np.eye(sys.state_dim)
    if ell > k:
        for j in range(k, ell):
            out = sys.phi[j] @ out
    elif ell < k:
        for j in range(k - 1, ell - 1, -1):
            out = np.linalg.solve(checked_phi(sys, j), out)
    return out


def inverse_step(sys: TimeVaryingLinearSystem, k: int) -> np.ndarray:
    """``phi[k]^{-1}``, via a solve after the conditioning check."""
    return np.linalg.solve(checked_phi(sys, k), np.eye(sys.state_dim))


@dataclass
class ValidationReport:
    problems: list[str] = field(default_factory=list)
    indices: list[tuple[str, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def add(self, name: str, k: int, message: str) -> None:
        self.indices.append((name, k))
        self.problems.append(f"{name}[{k}]: {message}")

    def __str__(self) -> str:
        if self.ok:
            return "system valid"
        return "\n".join(self.problems)


def _check_covariance(report: ValidationReport, name: str, k: int, m: np.ndarray) -> None:
    scale = max(np.max(np.abs(m)), np.finfo(float).tiny)
    if np.max(np.abs(m - m.T)) > SYMMETRY_RTOL * scale:
        report.add(name, k, "not symmetric")
        return
    try:
        cholesky(m, f"{name}[{k}]")
    except NotPositiveDefiniteError as exc:
        report.add(name, k, f"not positive definite (leading minor {exc.pivot})")


def validate(sys, cond_cap: float = PHI_COND_CAP) -> ValidationReport:
    """Check covariances are symmetric positive definite and every phi is invertible."""
    report = ValidationReport()
    if isinstance(sys, TimeInvariantLinearSystem):
        sys = lift_lti(sys, 1)
    for name, seq in (("q", sys.q or ()), ("r", sys.r)):
        for k, m in enumerate(seq):
            if not np.all(np.isfinite(m)):
                report.add(name, k, "non-finite entries")
            else:
                _check_covariance(report, name, k, m)
    for k, m in enumerate(sys.phi):
        if not np.all(np.isfinite(m)):
            report.add("phi", k, "non-finite entries")
            continue
        cond = np.linalg.cond(m)
        if not cond <= cond_cap:
            report.add("phi", k, f"condition number {cond:.3g} exceeds {cond_cap:g}")
    for k, m in enumerate(sys.c):
        if not np.all(np.isfinite(m)):
            report.add("c", k, "non-finite entries")
    return report

