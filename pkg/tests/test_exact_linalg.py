from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from mixedres.exact_linalg import (
    ChainComplexQ,
    ChainMapQ,
    LinAlgError,
    RationalMatrix,
    cohomology_dims,
    echelon,
    induced_rank,
    is_quasi_iso,
    kernel_basis,
    rank,
    solve,
)

fractions = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


@st.composite
def matrices(draw, max_dim=6):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    # sparse-ish entries so that rank deficiency actually occurs
    rows = [[draw(st.one_of(st.just(Fraction(0)), fractions)) for _ in range(c)] for _ in range(r)]
    return RationalMatrix.from_dense(rows, cols=c) if r else RationalMatrix.zero(0, c)


def to_sympy(m: RationalMatrix):
    return sympy.Matrix(m.rows, m.cols, lambda i, j: sympy.Rational(m[i, j].numerator, m[i, j].denominator))


@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == (to_sympy(m).rank() if m.rows and m.cols else 0)


@given(matrices())
def test_kernel_is_kernel_of_right_size(m):
    ker = kernel_basis(m)
    assert len(ker) == m.cols - rank(m)
    for v in ker:
        assert m.apply(list(v)) == {}


@given(matrices())
def test_rref_matches_sympy(m):
    if not (m.rows and m.cols):
        return
    e = echelon(m)
    _, piv = to_sympy(m).rref()
    assert tuple(e.pivots) == tuple(piv)


@given(matrices(), st.data())
def test_solve_consistent_systems(m, data):
    x = [data.draw(fractions) for _ in range(m.cols)]
    b = m.apply(x)
    sol = solve(m, b)
    assert sol is not None
    assert m.apply(sol) == b


def test_solve_reports_inconsistency():
    m = RationalMatrix.from_dense([[1, 1], [2, 2]])
    assert solve(m, {0: Fraction(1), 1: Fraction(3)}) is None


def test_matrix_algebra():
    a = RationalMatrix.from_dense([[1, 2], [0, 1]])
    b = RationalMatrix.from_dense([[0, 1], [1, 0]])
    assert (a @ b).to_dense() == [[2, 1], [1, 0]]
    assert (a - a).is_zero()
    assert a.transpose().transpose() == a
    with pytest.raises(LinAlgError):
        RationalMatrix(1, 1, {(1, 0): 1})


def test_complex_rejects_nonzero_square():
    d = RationalMatrix.from_dense([[1]])
    with pytest.raises(LinAlgError):
        ChainComplexQ({0: 1, 1: 1, 2: 1}, {0: d, 1: d})


def test_cohomology_and_quasi_iso():
    # Q --id--> Q is acyclic; the zero complex maps to it quasi-isomorphically
    c = ChainComplexQ({0: 1, 1: 1}, {0: RationalMatrix.identity(1)})
    assert cohomology_dims(c) == {0: 0, 1: 0}
    z = ChainComplexQ({}, {})
    assert is_quasi_iso(ChainMapQ(z, c, {}))
    # the circle: two vertices, two edges
    circ = ChainComplexQ({0: 2, 1: 2}, {0: RationalMatrix.from_dense([[-1, 1], [-1, 1]])})
    assert cohomology_dims(circ) == {0: 1, 1: 1}
    two = ChainMapQ(circ, circ, {0: RationalMatrix.identity(2).scale(2), 1: RationalMatrix.identity(2).scale(2)})
    assert induced_rank(two) == {0: 1, 1: 1}
    zero = ChainMapQ(circ, circ, {})
    assert not is_quasi_iso(zero)


def test_chain_map_check():
    c = ChainComplexQ({0: 1, 1: 1}, {0: RationalMatrix.identity(1)})
    with pytest.raises(LinAlgError):
        ChainMapQ(c, c, {0: RationalMatrix.identity(1)})
