"""Immutable dense matrices of unbounded Python integers."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class IntMatrix:
    """Dense ``rows x cols`` integer matrix.

    Entries are plain Python ints, so nothing ever overflows.  Instances are
    immutable and hashable; every operation returns a new matrix.  Empty
    shapes (``0 x n`` or ``m x 0``) are legal and stand for zero maps from or
    to the trivial group.
    """

    __slots__ = ("_rows", "_cols", "_data")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable[int]] = ()):
        data = tuple(tuple(int(x) for x in row) for row in data)
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(data) != rows or any(len(row) != cols for row in data):
            raise ValueError(f"data does not have shape {rows}x{cols}")
        self._rows = rows
        self._cols = cols
        self._data = data

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence[int]], rows: int | None = None) -> IntMatrix:
        cols = [list(c) for c in cols]
        if rows is None:
            rows = len(cols[0]) if cols else 0
        return cls(len(cols), rows, cols).T

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence[int], rows: int | None = None,
                 cols: int | None = None) -> IntMatrix:
        k = len(entries)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, e in enumerate(entries):
            out[i][i] = e
        return cls(rows, cols, out)

    # -- access -----------------------------------------------------------

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return (self._rows, self._cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self._data)

    def to_list(self) -> list[list[int]]:
        return [list(row) for row in self._data]

    def columns(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self._cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._data for x in row)

    # -- algebra ----------------------------------------------------------

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(self._cols, self._rows,
                         [[self._data[i][j] for i in range(self._rows)] for j in range(self._cols)])

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self._cols != other._rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        return IntMatrix(self._rows, other._cols,
                         [[sum(a * b for a, b in zip(row, c)) for c in ocols] for row in self._data])

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self._cols:
            raise ValueError(f"vector of length {len(v)} does not match {self.shape}")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self._data)

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self._rows, self._cols,
                         [[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)])

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self._rows, self._cols, [[-a for a in r] for r in self._data])

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        return self + (-other)

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix(self._rows, self._cols, [[k * a for a in r] for r in self._data])

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self._rows != other._rows:
            raise ValueError("hstack needs equal row counts")
        return IntMatrix(self._rows, self._cols + other._cols,
                         [a + b for a, b in zip(self._data, other._data)])

    def vstack(self, other: IntMatrix) -> IntMatrix:
        if self._cols != other._cols:
            raise ValueError("vstack needs equal column counts")
        return IntMatrix(self._rows + other._rows, self._cols, self._data + other._data)

    def select_rows(self, idx: Sequence[int]) -> IntMatrix:
        return IntMatrix(len(idx), self._cols, [self._data[i] for i in idx])

    def select_cols(self, idx: Sequence[int]) -> IntMatrix:
        return IntMatrix(self._rows, len(idx), [[row[j] for j in idx] for row in self._data])

    def reduce_rows(self, moduli: Sequence[int | None]) -> IntMatrix:
        """Reduce row ``i`` into ``[0, moduli[i])``; ``None`` leaves a row alone."""
        if len(moduli) != self._rows:
            raise ValueError("one modulus per row expected")
        return IntMatrix(self._rows, self._cols,
                         [r if m is None else [a % m for a in r] for r, m in zip(self._data, moduli)])

    def rank(self) -> int:
        return len(_fraction_echelon(self._data, self._cols)[1])

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self._rows != self._cols:
            raise ValueError("determinant of a non-square matrix")
        n = self._rows
        if n == 0:
            return 1
        a = [list(r) for r in self._data]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def inverse_unimodular(self) -> IntMatrix:
        """Inverse of a unimodular matrix; raises if the inverse is not integral."""
        n = self._rows
        if n != self._cols:
            raise ValueError("inverse of a non-square matrix")
        aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
               for i, row in enumerate(self._data)]
        red, pivots = _fraction_echelon(aug, n, reduced=True)
        if len(pivots) != n:
            raise ValueError("matrix is singular")
        out = []
        for row in red[:n]:
            if any(x.denominator != 1 for x in row[n:]):
                raise ValueError("matrix is not unimodular")
            out.append([int(x) for x in row[n:]])
        return IntMatrix(n, n, out)

    # -- dunder -----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self._rows, self._cols, self._data))

    def __repr__(self) -> str:
        return f"IntMatrix({self._rows}, {self._cols}, {self.to_list()!r})"


def _fraction_echelon(data, ncols: int, reduced: bool = False):
    """Row echelon form over Q of the first ``ncols`` columns.

    Returns the reduced rows and the list of pivot columns.
    """
    a = [[Fraction(x) for x in row] for row in data]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0 and (reduced or i > r):
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots
