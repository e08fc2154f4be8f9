"""Indicator and attenuation masks for the weighted factorization loss.

The indicator mask marks which cells of the user-time matrix carry known
training information (1) versus held-out/missing cells (0).  The attenuation
mask gives each user a per-row ramp that is 1 at the first observed adoption
and decays toward 0 over the remaining time bins, encoding that a trend dies
out.  Both are always built from the post-masking training matrix so no test
information leaks into training.
"""

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .linalg import DenseMatrix, SparseBinaryMatrix

__all__ = ["HeldOutSet", "MaskPair", "build_indicator", "build_attenuation", "build_masks"]


@dataclass(frozen=True)
class HeldOutSet:
    """Coordinates of positive cells removed from the matrix for evaluation."""

    cells: frozenset[tuple[int, int]]

    @classmethod
    def of(cls, cells: Iterable[tuple[int, int]]) -> "HeldOutSet":
        return cls(frozenset((int(r), int(c)) for r, c in cells))

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __contains__(self, cell) -> bool:
        return cell in self.cells


@dataclass(frozen=True)
class MaskPair:
    """Indicator mask w (binary) and attenuation mask g (values in [0, 1])."""

    w: DenseMatrix
    g: DenseMatrix

    def __post_init__(self):
        if self.w.shape != self.g.shape:
            raise ValueError(f"mask shape mismatch {self.w.shape} vs {self.g.shape}")


def build_indicator(shape: tuple[int, int], held_out: HeldOutSet) -> DenseMatrix:
    """All-ones indicator with held-out cells zeroed.

    Training zeros count as known negatives, so only the held-out cells are
    marked unknown.
    """
    n, m = shape
    w = np.ones((n, m))
    for r, c in held_out:
        if not (0 <= r < n and 0 <= c < m):
            raise ValueError(f"held-out cell ({r}, {c}) out of range for shape {shape}")
        w[r, c] = 0.0
    return DenseMatrix(w)


def build_attenuation(x_train: SparseBinaryMatrix) -> DenseMatrix:
    """Per-row time-decay ramp anchored at each row's first training positive.

    For a row whose first positive sits at 0-based column j0 the row of g is
    0 before j0, exactly 1 at j0, and 1 - 1/(M - c) at each later column c,
    which decreases strictly to 0 at the last column.  Rows with no training
    positive stay all-zero: with no observed adoption there is no anchor time
    for the ramp.  Later positives in a row do not restart the ramp.
    """
    n, m = x_train.shape
    g = np.zeros((n, m))
    first: dict[int, int] = {}
    for r, c in x_train.entries:
        if r not in first or c < first[r]:
            first[r] = c
    for r, j0 in first.items():
        g[r, j0] = 1.0
        if j0 + 1 < m:
            tail = np.arange(j0 + 1, m)
            g[r, j0 + 1 :] = 1.0 - 1.0 / (m - tail)
    return DenseMatrix(g)


def build_masks(x_train: SparseBinaryMatrix, held_out: HeldOutSet) -> MaskPair:
    """Build both masks from the training matrix and the held-out cell set."""
    return MaskPair(
        w=build_indicator(x_train.shape, held_out),
        g=build_attenuation(x_train),
    )
