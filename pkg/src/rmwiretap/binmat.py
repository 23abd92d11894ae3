"""Dense linear algebra over GF(2).

Matrices are stored as read-only ``uint8`` arrays holding 0/1 values, one
row per codeword or basis vector. The text format used for golden files is
one row per line, characters ``0``/``1``, no separators.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class SingularMatrixError(ValueError):
    """Matrix is not invertible over GF(2)."""


class BinMatrix:
    """Immutable binary matrix.

    Parameters
    ----------
    data : array_like
        2-D array of 0/1 values. A 1-D input is taken as a single row.
    cols : int, optional
        Column count, only needed to build an empty (0-row) matrix from an
        empty sequence.
    """

    __slots__ = ("_a",)

    def __init__(self, data, cols: int | None = None):
        a = np.array(data, dtype=np.int64, copy=True)
        if a.size == 0 and cols is not None:
            a = np.zeros((0, cols), dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got {a.ndim}-D")
        if np.any((a != 0) & (a != 1)):
            raise ValueError("matrix entries must be 0 or 1")
        a = a.astype(np.uint8)
        a.flags.writeable = False
        self._a = a

    @classmethod
    def from_rows(cls, rows: Iterable[str]) -> "BinMatrix":
        """Build from strings such as ``["0011", "1101"]``."""
        rows = [r.strip() for r in rows if r.strip()]
        if not rows:
            raise ShapeError("no rows given")
        if len({len(r) for r in rows}) != 1:
            raise ShapeError("rows have unequal length")
        bad = {c for r in rows for c in r} - {"0", "1"}
        if bad:
            raise ValueError(f"invalid characters {sorted(bad)!r}")
        return cls([[int(c) for c in r] for r in rows])

    @classmethod
    def from_text(cls, text: str) -> "BinMatrix":
        return cls.from_rows(text.splitlines())

    @classmethod
    def identity(cls, size: int) -> "BinMatrix":
        return cls(np.eye(size, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @property
    def array(self) -> np.ndarray:
        """Read-only ``uint8`` view of the entries."""
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def bits(self) -> tuple[int, ...]:
        """Row-major flat sequence of entries."""
        return tuple(int(b) for b in self._a.ravel())

    @property
    def T(self) -> "BinMatrix":
        return BinMatrix(self._a.T)

    def to_text(self) -> str:
        return "\n".join("".join(str(int(b)) for b in row) for row in self._a)

    def row_strings(self) -> list[str]:
        return ["".join(str(int(b)) for b in row) for row in self._a]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a.copy() if copy else self._a
        return self._a.astype(dtype)

    def __matmul__(self, other: "BinMatrix") -> "BinMatrix":
        return gf2_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        return hash((self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"BinMatrix({self.rows}x{self.cols}: {self.row_strings()!r})"


def _as_array(a) -> np.ndarray:
    if isinstance(a, BinMatrix):
        return a.array
    return BinMatrix(a).array


def vstack(blocks: Sequence[BinMatrix]) -> BinMatrix:
    cols = {b.cols for b in blocks}
    if len(cols) != 1:
        raise ShapeError(f"column counts differ: {sorted(cols)}")
    return BinMatrix(np.vstack([b.array for b in blocks]), cols=cols.pop())


def gf2_mul(a: BinMatrix, b: BinMatrix) -> BinMatrix:
    """Matrix product with arithmetic mod 2."""
    x, y = _as_array(a), _as_array(b)
    if x.shape[1] != y.shape[0]:
        raise ShapeError(f"cannot multiply {x.shape} by {y.shape}")
    prod = (x.astype(np.int64) @ y.astype(np.int64)) & 1
    return BinMatrix(prod, cols=y.shape[1])


def rref(a) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2).

    Pivoting takes the first row at or below the current position with a 1
    in the pivot column. Returns the reduced copy and the pivot columns.
    """
    m = np.array(_as_array(a), dtype=np.uint8, copy=True)
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(m[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        others = np.flatnonzero(m[:, c])
        others = others[others != r]
        m[others] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def gf2_rank(a: BinMatrix) -> int:
    return len(rref(a)[1])


def gf2_invert(a: BinMatrix) -> BinMatrix:
    x = _as_array(a)
    n, cols = x.shape
    if n != cols:
        raise ShapeError(f"cannot invert non-square {x.shape} matrix")
    aug = np.hstack([x, np.eye(n, dtype=np.uint8)])
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError(f"matrix has rank {sum(p < n for p in pivots)} < {n}")
    return BinMatrix(red[:, n:])


def gf2_nullspace(a: BinMatrix) -> BinMatrix:
    """Basis of ``{v : a @ v.T == 0}``, one vector per row.

    Rows come out in order of the free columns of the reduced echelon form,
    each with a single 1 among the free positions.
    """
    x = _as_array(a)
    cols = x.shape[1]
    red, pivots = rref(x)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = red[r, f]
    return BinMatrix(basis, cols=cols)
