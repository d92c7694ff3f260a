"""Exact integer linear algebra: Smith and Hermite forms, kernels, cokernels.

All pivoting is deterministic so that downstream normal forms (and the golden
tests built on them) are stable from run to run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .matrix import IntMatrix

if TYPE_CHECKING:
    from .abgroup import FgAbGroup


@dataclass(frozen=True)
class SmithDecomposition:
    """``D = U @ A @ V`` with ``U``, ``V`` unimodular and ``D`` in Smith form.

    ``U_inv`` is carried along because cokernel sections need it and it is
    free to track during elimination.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.shape))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


class _Elim:
    """Mutable working state for elimination with transform tracking."""

    def __init__(self, A: IntMatrix):
        self.m, self.n = A.shape
        self.a = A.to_list()
        self.U = IntMatrix.identity(self.m).to_list()
        self.Ui = IntMatrix.identity(self.m).to_list()
        self.V = IntMatrix.identity(self.n).to_list()

    def swap_rows(self, i, j):
        if i == j:
            return
        self.a[i], self.a[j] = self.a[j], self.a[i]
        self.U[i], self.U[j] = self.U[j], self.U[i]
        for row in self.Ui:
            row[i], row[j] = row[j], row[i]

    def add_row(self, dst, src, k):
        # row_dst += k * row_src
        if k == 0:
            return
        self.a[dst] = [x + k * y for x, y in zip(self.a[dst], self.a[src])]
        self.U[dst] = [x + k * y for x, y in zip(self.U[dst], self.U[src])]
        for row in self.Ui:
            row[src] -= k * row[dst]

    def negate_row(self, i):
        self.a[i] = [-x for x in self.a[i]]
        self.U[i] = [-x for x in self.U[i]]
        for row in self.Ui:
            row[i] = -row[i]

    def swap_cols(self, i, j):
        if i == j:
            return
        for mat in (self.a, self.V):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    def add_col(self, dst, src, k):
        # col_dst += k * col_src
        if k == 0:
            return
        for mat in (self.a, self.V):
            for row in mat:
                row[dst] += k * row[src]


def _smallest_nonzero(a, t):
    best = None
    for i in range(t, len(a)):
        for j in range(t, len(a[i])):
            x = a[i][j]
            if x != 0 and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return best


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form with unimodular transforms.

    Pivot rule: the smallest nonzero absolute value in the active submatrix,
    ties broken by row-major position.  Diagonal entries come out positive
    and form a divisibility chain, followed by zeros.
    """
    e = _Elim(A)
    a = e.a
    t = 0
    while t < min(e.m, e.n):
        best = _smallest_nonzero(a, t)
        if best is None:
            break
        while True:
            _, i, j = best
            e.swap_rows(t, i)
            e.swap_cols(t, j)
            p = a[t][t]
            for i in range(t + 1, e.m):
                if a[i][t]:
                    e.add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, e.n):
                if a[t][j]:
                    e.add_col(j, t, -(a[t][j] // p))
            clear = (all(a[i][t] == 0 for i in range(t + 1, e.m))
                     and all(a[t][j] == 0 for j in range(t + 1, e.n)))
            if clear:
                bad = next((i for i in range(t + 1, e.m)
                            for j in range(t + 1, e.n) if a[i][j] % p), None)
                if bad is None:
                    break
                e.add_row(t, bad, 1)
            best = _smallest_nonzero(a, t)
        if a[t][t] < 0:
            e.negate_row(t)
        t += 1
    return SmithDecomposition(
        U=IntMatrix(e.m, e.m, e.U),
        D=IntMatrix(e.m, e.n, a),
        V=IntMatrix(e.n, e.n, e.V),
        U_inv=IntMatrix(e.m, e.m, e.Ui),
    )


def hermite_normal_form(A: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form ``H = U @ A``.

    ``H`` is in echelon form, each pivot is positive, entries above a pivot
    lie in ``[0, pivot)`` and zero rows sit at the bottom.  This form is
    unique for the row lattice of ``A``, so the function is idempotent.
    """
    e = _Elim(A)
    a = e.a
    r = 0
    for c in range(e.n):
        if r == e.m:
            break
        while True:
            nz = [i for i in range(r, e.m) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(a[i][c]), i))
            e.swap_rows(r, piv)
            for i in range(r + 1, e.m):
                if a[i][c]:
                    e.add_row(i, r, -(a[i][c] // a[r][c]))
            if all(a[i][c] == 0 for i in range(r + 1, e.m)):
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            e.negate_row(r)
        for i in range(r):
            e.add_row(i, r, -(a[i][c] // a[r][c]))
        r += 1
    return IntMatrix(e.m, e.n, a), IntMatrix(e.m, e.m, e.U)


def solve_in_image(A: IntMatrix, b: Sequence[int]) -> tuple[int, ...] | None:
    """Some integer ``x`` with ``A @ x == b``, or ``None`` if ``b`` is not in the image."""
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {A.rows} rows")
    snf = smith_normal_form(A)
    c = snf.U.apply(b)
    diag = snf.diagonal
    y = [0] * A.cols
    for i, ci in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ci != 0:
                return None
        elif ci % d:
            return None
        else:
            y[i] = ci // d
    return snf.V.apply(y)


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Columns freely generating the integer kernel of ``A``, in Hermite-reduced form."""
    snf = smith_normal_form(A)
    r = snf.rank
    K = snf.V.select_cols(range(r, A.cols))
    if K.cols == 0:
        return K
    H, _ = hermite_normal_form(K.T)
    return H.select_rows(range(K.cols)).T


@dataclass(frozen=True)
class _Coker:
    rank: int
    torsion: tuple[int, ...]
    to_canonical: IntMatrix
    from_canonical: IntMatrix


def _cokernel(A: IntMatrix) -> _Coker:
    """Canonical coordinates on ``Z^rows / im(A)`` with a section back.

    Free coordinates come first and are Hermite-normalised; torsion
    coordinates follow with invariant factors ascending by divisibility.
    """
    m = A.rows
    snf = smith_normal_form(A)
    diag = snf.diagonal + [0] * max(0, m - min(A.shape))
    free_idx = [i for i in range(m) if diag[i] == 0]
    tors_idx = [i for i in range(m) if diag[i] >= 2]
    torsion = tuple(diag[i] for i in tors_idx)

    to_free = snf.U.select_rows(free_idx)
    from_free = snf.U_inv.select_cols(free_idx)
    if to_free.rows:
        H, W = hermite_normal_form(to_free)
        to_free = H
        from_free = from_free @ W.inverse_unimodular()
    to_tors = snf.U.select_rows(tors_idx).reduce_rows(torsion)
    from_tors = snf.U_inv.select_cols(tors_idx)
    return _Coker(
        rank=len(free_idx),
        torsion=torsion,
        to_canonical=to_free.vstack(to_tors),
        from_canonical=from_free.hstack(from_tors),
    )


def cokernel(A: IntMatrix) -> tuple[FgAbGroup, IntMatrix]:
    """Invariants of ``Z^rows / im(A)`` and the projection onto canonical coordinates."""
    from .abgroup import FgAbGroup

    c = _cokernel(A)
    return FgAbGroup(c.rank, c.torsion), c.to_canonical
