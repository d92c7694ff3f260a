import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricgerbe.abgroup import FgAbGroup
from toricgerbe.exactla import (
    cokernel,
    hermite_normal_form,
    kernel_basis,
    smith_normal_form,
    solve_in_image,
)
from toricgerbe.matrix import IntMatrix


@st.composite
def matrices(draw, max_dim=5, bound=9, min_dim=0):
    r = draw(st.integers(min_dim, max_dim))
    c = draw(st.integers(min_dim, max_dim))
    rows = draw(st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c),
                         min_size=r, max_size=r))
    return IntMatrix(r, c, rows)


@st.composite
def unimodular(draw, n, steps=6):
    M = IntMatrix.identity(n).to_list()
    if n < 2:
        return IntMatrix.from_rows(M, n) if n else IntMatrix.zeros(0, 0)
    for _ in range(steps):
        i, j = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if i == j:
            continue
        k = draw(st.integers(-3, 3))
        M[i] = [a + k * b for a, b in zip(M[i], M[j])]
    return IntMatrix.from_rows(M, n)


def test_snf_examples():
    assert smith_normal_form(IntMatrix.from_rows([[3, 3]])).D == IntMatrix.from_rows([[3, 0]])
    assert smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 3]])).diagonal == [1, 6]
    z = IntMatrix.zeros(2, 2)
    snf = smith_normal_form(z)
    assert snf.D == z and snf.rank == 0


def test_snf_known_invariants():
    A = IntMatrix.from_rows([[12, 6, 4], [3, 9, 6], [2, 16, 14]])
    assert smith_normal_form(A).diagonal == [1, 10, 30]


def test_snf_empty():
    snf = smith_normal_form(IntMatrix.zeros(0, 0))
    assert snf.diagonal == [] and snf.U.shape == (0, 0) and snf.V.shape == (0, 0)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_invariants(A):
    snf = smith_normal_form(A)
    assert snf.U @ A @ snf.V == snf.D
    assert abs(snf.U.det()) == 1 and abs(snf.V.det()) == 1
    assert snf.U @ snf.U_inv == IntMatrix.identity(A.rows)
    diag = snf.diagonal
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert diag == nz + [0] * (len(diag) - len(nz))
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    for i in range(A.rows):
        for j in range(A.cols):
            if i != j:
                assert snf.D[i, j] == 0
    assert smith_normal_form(A) == snf


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(matrices(min_dim=n, max_dim=n), unimodular(n))))
def test_snf_invariant_under_unimodular(pair):
    A, W = pair
    assert smith_normal_form(W @ A).diagonal == smith_normal_form(A).diagonal


def test_hnf_examples():
    H, _ = hermite_normal_form(IntMatrix.from_rows([[-3, -3]]))
    assert H == IntMatrix.from_rows([[3, 3]])
    H, _ = hermite_normal_form(IntMatrix.from_rows([[2, 4], [1, 3]]))
    assert H == IntMatrix.from_rows([[1, 1], [0, 2]])


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_hnf_properties(A):
    H, U = hermite_normal_form(A)
    assert U @ A == H
    assert abs(U.det()) == 1
    assert hermite_normal_form(H)[0] == H
    last = -1
    for i in range(H.rows):
        row = H.row(i)
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            assert all(not any(H.row(k)) for k in range(i, H.rows))
            break
        p = nz[0]
        assert p > last and row[p] > 0
        for k in range(i):
            assert 0 <= H[k, p] < row[p]
        last = p


def test_solve_in_image():
    A = IntMatrix.from_rows([[3, 3]])
    sol = solve_in_image(A, [6])
    assert A.apply(sol) == (6,)
    assert solve_in_image(A, [1]) is None
    with pytest.raises(ValueError):
        solve_in_image(A, [1, 2])


@settings(max_examples=100, deadline=None)
@given(matrices(min_dim=1), st.data())
def test_solve_iff_cokernel_unchanged(A, data):
    b = data.draw(st.lists(st.integers(-20, 20), min_size=A.rows, max_size=A.rows))
    sol = solve_in_image(A, b)
    extended, _ = cokernel(A.hstack(IntMatrix.from_cols([b], A.rows)))
    same = extended == cokernel(A)[0]
    assert (sol is not None) == same
    if sol is not None:
        assert A.apply(sol) == tuple(b)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_kernel_basis(A):
    K = kernel_basis(A)
    assert K.rows == A.cols
    assert (A @ K).is_zero()
    assert K.cols == A.cols - A.rank()
    # saturated: the kernel basis spans a direct summand
    if K.cols:
        assert smith_normal_form(K).diagonal == [1] * K.cols


def test_cokernel_examples():
    g, proj = cokernel(IntMatrix.from_rows([[3, 3]]))
    assert g == FgAbGroup(0, (3,))
    g, _ = cokernel(IntMatrix.from_rows([[6], [6]]))
    assert g == FgAbGroup(1, (6,))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(matrices(min_dim=n, max_dim=n), unimodular(n))))
def test_cokernel_invariant_under_unimodular(pair):
    A, W = pair
    assert cokernel(W @ A)[0] == cokernel(A)[0]


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_cokernel_projection_kills_image(A):
    g, proj = cokernel(A)
    assert proj.rows == g.ngens and proj.cols == A.rows
    for j in range(A.cols):
        assert g.reduce(proj.apply(A.col(j))) == (0,) * g.ngens
