import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixedres.cech import p1_three_charts, p1_two_charts
from mixedres.mixres import MixData
from mixedres.simplex_forms import form_basis
from mixedres.simpsec import (
    b_add,
    b_d,
    b_mul,
    b_scale,
    broken_section,
    interpolation_section,
    section_images,
    thm33_suite,
    two_chart_interpolation,
    validate_section,
)

MD = MixData(p1_two_charts(0, window=1), 2)
KEYS = [k for p in range(2) for pc in MD.pieces(1) for k in MD.keys((0, 1), p, pc)]


@st.composite
def b_elements(draw, degree):
    """Homogeneous elements of B_1 over the overlap U_01."""
    out = {}
    for _ in range(draw(st.integers(0, 4))):
        kdeg = draw(st.integers(0, min(1, degree)))
        ed = draw(st.integers(0, min(1, degree - kdeg)))
        fq = degree - kdeg - ed
        if fq > 1:
            continue
        fk = draw(st.sampled_from(form_basis(1, fq, 2)))
        key = draw(st.sampled_from([k for k in KEYS if len(k[0]) == kdeg]))
        out[(fk, draw(st.integers(0, 2)), ed, key)] = Fraction(draw(st.integers(-3, 3)))
    return {k: v for k, v in out.items() if v}


@given(st.integers(0, 2).flatmap(b_elements))
def test_b_d_squared_zero(x):
    assert b_d(MD, 1, b_d(MD, 1, x)) == {}


@given(st.integers(0, 2).flatmap(lambda a: st.tuples(st.just(a), b_elements(a))), st.integers(0, 2).flatmap(b_elements))
def test_b_leibniz(xa, y):
    a, x = xa
    lhs = b_d(MD, 1, b_mul(MD, 1, x, y))
    rhs = b_add(b_mul(MD, 1, b_d(MD, 1, x), y), b_scale(b_mul(MD, 1, x, b_d(MD, 1, y)), (-1) ** a))
    assert lhs == rhs


def test_interpolation_section_validates():
    U = p1_two_charts(1, window=2)
    assert validate_section(two_chart_interpolation(U))["status"] == "PASS"
    assert validate_section(two_chart_interpolation(U, over=0))["status"] == "PASS"


def test_three_chart_interpolation_validates():
    U = p1_three_charts(0, window=3)
    sig = interpolation_section(U, {0: {(1,): Fraction(1)}, 1: {(-1,): Fraction(1)}, 2: {(0,): Fraction(2)}})
    assert validate_section(sig)["status"] == "PASS"


def test_broken_section_has_witness():
    rep = validate_section(broken_section(p1_two_charts(0, window=2)))
    assert rep["status"] == "FAIL"
    assert rep["witnesses"] and "condition" in rep["witnesses"][0]


def test_section_images_on_overlap():
    U = p1_two_charts(0, window=2)
    md = MixData(U, 2)
    sz, sdz = section_images(md, two_chart_interpolation(U), (0, 1))
    assert sz and sdz


@pytest.fixture(scope="module")
def suite():
    return thm33_suite(seed=0)


def test_suite_passes(suite):
    assert suite["status"] == "PASS", [c for c in suite["checks"] if c["status"] != "PASS"]


def test_suite_covers_all_fixtures(suite):
    names = [c["name"] for c in suite["checks"]]
    for want in ("negative-control", "property-ii-identity", "fiber-multiplication", "property-i-linear",
                 "property-i-composition", "mix-multilinear", "flat-element-found", "property-ii-pulled-back"):
        assert want in names
    assert sum("iii" in n for n in names) >= 4


def test_suite_is_deterministic(suite):
    assert thm33_suite(seed=0) == suite
