from fractions import Fraction
from math import factorial

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from mixedres import delta_cat as dc
from mixedres.simplex_forms import (
    FormError,
    NormalizedCochain,
    PolyForm,
    coboundary,
    d,
    faces_of,
    integrate,
    phi,
    pullback,
    rho,
    wedge,
    whitney,
)


def volume_form(l):
    out = PolyForm.const(l)
    for k in range(1, l + 1):
        out = wedge(out, PolyForm.dt(l, k))
    return out


def sympy_simplex_integral(a):
    """Iterated integral of t^a over {t_k >= 0, Σ t_k <= 1}."""
    ts = sympy.symbols(f"t1:{len(a) + 1}")
    expr = sympy.Mul(*[t**e for t, e in zip(ts, a)])
    for k in reversed(range(len(ts))):
        expr = sympy.integrate(expr, (ts[k], 0, 1 - sum(ts[:k])))
    return Fraction(int(expr.p), int(expr.q))


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_volume_is_inverse_factorial(l):
    assert integrate(volume_form(l)) == Fraction(1, factorial(l))


@pytest.mark.parametrize("a", [(0,), (3,), (1, 0), (2, 1), (1, 1, 1), (0, 2, 1), (1, 0, 0, 2)])
def test_integration_matches_iterated_integral(a):
    l = len(a)
    u = PolyForm.monomial(l, a, tuple(range(1, l + 1)))
    assert integrate(u) == sympy_simplex_integral(a)


@st.composite
def forms(draw, l, degree=None, max_weight=3):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        a = tuple(draw(st.integers(0, max_weight)) for _ in range(l))
        q = draw(st.integers(0, l)) if degree is None else degree
        i = tuple(sorted(draw(st.sets(st.integers(1, l), min_size=q, max_size=q))))
        terms[(a, i)] = Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 3)))
    return PolyForm(l, terms)


@given(st.integers(1, 3).flatmap(lambda l: forms(l)))
def test_d_squared_zero(u):
    assert d(d(u)).is_zero()


@given(st.integers(1, 3).flatmap(lambda l: st.tuples(forms(l), forms(l))))
def test_leibniz_for_wedge(pair):
    u, v = pair
    for p in u.degrees():
        up = u.component(p)
        assert d(wedge(up, v)) == wedge(d(up), v) + wedge(up, d(v)).scale((-1) ** p)


@given(st.integers(1, 3).flatmap(lambda l: st.tuples(forms(l), forms(l))))
def test_graded_commutativity(pair):
    u, v = pair
    for p in u.degrees():
        for q in v.degrees():
            a, b = u.component(p), v.component(q)
            assert wedge(a, b) == wedge(b, a).scale((-1) ** (p * q))


@given(st.integers(1, 3).flatmap(lambda l: forms(l, degree=l - 1)))
def test_stokes(u):
    l = u.l
    boundary = Fraction(0)
    for k in range(l + 1):
        boundary += (-1) ** k * integrate(pullback(dc.face(k, l - 1), u))
    assert integrate(d(u)) == boundary


@pytest.mark.parametrize("l", [1, 2, 3])
def test_pullback_functorial(l):
    u = PolyForm.monomial(l, (1,) * l, (1,)) + PolyForm.t(l, 0)
    for a in dc.enumerate_maps(l - 1, l):
        for b in dc.enumerate_maps(l - 1, l - 1):
            assert pullback(b, pullback(a, u)) == pullback(dc.compose(a, b), u)
    for a in dc.enumerate_maps(l, l):
        assert d(pullback(a, u)) == pullback(a, d(u))


@pytest.mark.parametrize("l", [0, 1, 2, 3])
def test_rho_phi_identity_on_basis(l):
    for f in faces_of(l):
        c = NormalizedCochain.indicator(l, f)
        assert rho(phi(c)) == c


@pytest.mark.parametrize("l", [1, 2, 3])
def test_phi_and_rho_are_cochain_maps(l):
    for f in faces_of(l):
        c = NormalizedCochain.indicator(l, f)
        assert d(phi(c)) == phi(coboundary(c))
        u = whitney(f, l)
        assert rho(d(u)) == coboundary(rho(u))


def test_whitney_low_dimensions():
    assert whitney((0, 1), 1) == PolyForm.dt(1, 1)
    assert whitney((0,), 1) == PolyForm.t(1, 0)
    assert integrate(whitney((0, 1, 2), 2)) == 1


def test_bad_faces_rejected():
    with pytest.raises(FormError):
        whitney((1, 0), 2)
    with pytest.raises(FormError):
        PolyForm.t(1, 2)
