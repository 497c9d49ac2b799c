"""Result containers shared by the Gramian modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import min_eig, symmetrize, symmetry_error


@dataclass(frozen=True, eq=False)
class SymmetricInfoMatrix:
    """A Fisher information matrix (or Gramian) with its window metadata.

    ``matrix`` is exactly symmetric. ``raw`` is the matrix as the method
    produced it before symmetrization; the direct formulas can leave it
    slightly (or, for long windows, badly) asymmetric.
    """

    matrix: np.ndarray
    window: int
    anchor: int
    direction: str
    raw: Optional[np.ndarray] = None
    wall_ns: int = 0

    @classmethod
    def from_raw(cls, raw: np.ndarray, window: int, anchor: int, direction: str, wall_ns: int = 0):
        raw = np.array(raw, dtype=float)
        return cls(symmetrize(raw), window, anchor, direction, raw, wall_ns)

    @property
    def raw_matrix(self) -> np.ndarray:
        return self.matrix if self.raw is None else self.raw

    @property
    def sym_err(self) -> float:
        return symmetry_error(self.raw_matrix)

    @property
    def min_eig(self) -> float:
        return min_eig(self.matrix)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True, eq=False)
class RecursionTrace:
    """Iterates of a recursive Gramian computation, one per step.

    ``anchors[i]`` is the state index the ``i``-th iterate is taken with
    respect to; the iterate uses ``i + 1`` measurements.
    """

    matrices: tuple[np.ndarray, ...]
    anchors: tuple[int, ...]
    method: str
    direction: str = field(default="forward")

    def __len__(self) -> int:
        return len(self.matrices)

    @property
    def final(self) -> SymmetricInfoMatrix:
        return SymmetricInfoMatrix(
            self.matrices[-1], len(self.matrices), self.anchors[-1], self.direction
        )

    def info(self, i: int) -> SymmetricInfoMatrix:
        return SymmetricInfoMatrix(self.matrices[i], i + 1, self.anchors[i], self.direction)
