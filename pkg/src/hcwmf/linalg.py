"""Dense and sparse matrix primitives used by the trainer.

Everything here is a thin, shape-checked layer over numpy: matrices are
immutable after construction, operations are pure, and dimension mismatches
are rejected loudly instead of broadcast.
"""

from collections.abc import Iterable

import numpy as np

__all__ = [
    "DenseMatrix",
    "SparseBinaryMatrix",
    "hadamard",
    "frobenius_norm_sq",
    "low_rank_product",
]


class DenseMatrix:
    """Immutable row-major matrix of finite floats."""

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64, order="C", copy=True)
        if arr.ndim != 2:
            raise ValueError(f"DenseMatrix needs a 2-D array, got ndim={arr.ndim}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("DenseMatrix entries must all be finite")
        arr.flags.writeable = False
        self._data = arr

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "DenseMatrix":
        return cls(np.zeros((rows, cols)))

    @classmethod
    def ones(cls, rows: int, cols: int) -> "DenseMatrix":
        return cls(np.ones((rows, cols)))

    @property
    def data(self) -> np.ndarray:
        """Read-only 2-D view of the underlying storage."""
        return self._data

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def values(self) -> np.ndarray:
        """Entries as a flat row-major sequence."""
        return self._data.ravel()

    def __getitem__(self, key):
        return self._data[key]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    def __repr__(self) -> str:
        return f"DenseMatrix({self.rows}x{self.cols})"


class SparseBinaryMatrix:
    """Binary N x M matrix stored as the set of coordinates holding a 1."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int]]):
        if rows < 0 or cols < 0:
            raise ValueError(f"negative shape ({rows}, {cols})")
        cells = frozenset((int(r), int(c)) for r, c in entries)
        for r, c in cells:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(
                    f"entry ({r}, {c}) out of range for shape ({rows}, {cols})"
                )
        self.rows = rows
        self.cols = cols
        self.entries = cells

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        """Number of non-zero entries (the sparsity parameter of the cost model)."""
        return len(self.entries)

    @property
    def density(self) -> float:
        total = self.rows * self.cols
        return self.nnz / total if total else 0.0

    def to_dense(self) -> DenseMatrix:
        return DenseMatrix(self.to_array())

    def to_array(self) -> np.ndarray:
        """Writable float64 copy of the full matrix."""
        arr = np.zeros((self.rows, self.cols))
        if self.entries:
            idx = np.array(sorted(self.entries))
            arr[idx[:, 0], idx[:, 1]] = 1.0
        return arr

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseBinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __repr__(self) -> str:
        return f"SparseBinaryMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def _require_same_shape(a: DenseMatrix, b: DenseMatrix, op: str) -> None:
    if a.shape != b.shape:
        raise ValueError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def hadamard(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    """Entrywise product of two matrices of identical shape."""
    _require_same_shape(a, b, "hadamard")
    return DenseMatrix(a.data * b.data)


def frobenius_norm_sq(a: DenseMatrix) -> float:
    """Sum of squared entries (the squared Frobenius norm)."""
    return float(np.sum(a.data * a.data))


def low_rank_product(u: DenseMatrix, v: DenseMatrix) -> DenseMatrix:
    """N x M reconstruction U V^T from N x d and M x d factors."""
    if u.cols != v.cols:
        raise ValueError(
            f"low_rank_product: inner dimension mismatch {u.shape} vs {v.shape}"
        )
    return DenseMatrix(u.data @ v.data.T)
