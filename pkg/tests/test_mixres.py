import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixedres.cech import affine_n, p1_three_charts, p1_two_charts, piecewise_betti
from mixedres.exact_linalg import cohomology_dims, is_quasi_iso
from mixedres.mixres import (
    MixData,
    MixError,
    ModuleComplex,
    build_mixed,
    d_mix,
    g_filtration,
    g_filtration_is_subcomplex,
    identity_map,
    matching_defects,
    multiplication_bijective,
    prop52_checks,
    random_element,
    rebuild_map,
    scalar_map,
    stabilized_cohomology,
    uniform_truncation_fixture,
    verify_cor41,
    verify_thm41,
)


@pytest.fixture(scope="module")
def two_chart():
    U = p1_two_charts(-2, window=3)
    return U, build_mixed(U, 1, 2), build_mixed(U, 1, 3)


def test_identities_on_every_piece(two_chart):
    _, c, _ = two_chart
    for pc in c.pieces.values():
        assert all(pc.identity_checks().values())


def test_stabilized_matches_standard(two_chart):
    U, lo, hi = two_chart
    st_ = stabilized_cohomology(lo, hi)
    assert (st_[0], st_[1]) == piecewise_betti(U, "standard") == (0, 1)
    with pytest.raises(MixError):
        stabilized_cohomology(lo, lo)


def test_unit_map_quasi_iso(two_chart):
    _, c, _ = two_chart
    for key, pc in c.pieces.items():
        if key[0] == "m":
            _, f = pc.unit_map()
            assert is_quasi_iso(f)


@pytest.mark.parametrize("U", [affine_n(1, window=3), p1_two_charts(1), p1_three_charts(-1)], ids=lambda U: U.name)
def test_report_passes(U):
    rep = verify_thm41(U, 1, 2)
    assert rep["status"] == "PASS", [c for c in rep["checks"] if c["status"] != "PASS"]
    assert "surrogate" in rep["note"]


def test_uniform_truncation_tail():
    for N in (2, 3, 4):
        fx = uniform_truncation_fixture(N)
        assert fx["raw"] == [1, 1]
        assert fx["stabilized"] == [1, 0]
        assert fx["tail_preimage_hits"]


def test_automorphisms_are_quasi_isos():
    U = p1_two_charts(1, window=2)
    for name, f in (("id", identity_map), ("two", scalar_map(2)), ("rebuild", rebuild_map)):
        assert verify_cor41(U, f, name=name)["status"] == "PASS"
    assert verify_cor41(U, scalar_map(0), name="zero")["status"] == "FAIL"


def test_g_filtration(two_chart):
    _, c, _ = two_chart
    g = g_filtration(c)
    whole = sum(pc.complex.total_dim() for pc in c.pieces.values())
    assert g.pieces[0].total_dim() == whole
    assert g.pieces[2].total_dim() == 0
    assert g.pieces[1].total_dim() <= g.pieces[0].total_dim()
    for pc in c.pieces.values():
        for i in range(3):
            assert g_filtration_is_subcomplex(pc, i)
    # gr^i carries only ±∇, which is exact in positive form degree
    for i, gr in g.gr.items():
        assert all(v == 0 for k, v in cohomology_dims(gr).items() if k != i)


@given(st.integers(0, 10**6))
def test_d_mix_squares_to_zero_on_elements(seed):
    U = p1_two_charts(0, window=2)
    c = build_mixed(U, 1, 2)
    md = MixData(U, 2)
    u = random_element(c, random.Random(seed))
    assert matching_defects(md, u) == []
    a, b = d_mix(md, u)
    da, db = d_mix(md, a), d_mix(md, b)
    assert da[0].is_zero()
    assert db[1].is_zero()
    assert (da[1] + db[0]).is_zero()


def test_products():
    rep = prop52_checks(p1_two_charts(2), seed=3)
    assert rep["status"] == "PASS", rep["checks"]
    witness = next(ch for ch in rep["checks"] if ch["name"] == "p1-unit-not-closed")["witness"]
    assert witness and "p_1^*(x)" in witness
    assert prop52_checks(affine_n(1, window=3))["status"] == "PASS"
    with pytest.raises(MixError):
        prop52_checks(p1_three_charts(0))


def test_multiplication_bijective():
    ok, bad = multiplication_bijective(p1_two_charts(-1), 1, 2, 2)
    assert ok and not bad


def test_module_complex_single():
    U = p1_two_charts(0, window=2)
    cx = ModuleComplex.single(U)
    assert build_mixed(cx, 1, 2).betti() == build_mixed(U, 1, 2).betti()


def test_window_below_minimum_fails_oracle_only():
    rep = verify_thm41(p1_two_charts(3, window=0), 1, 2)
    status = {c["name"]: c["status"] for c in rep["checks"]}
    assert status["oracle"] == "FAIL"
    assert status["stabilized-equals-standard"] == "PASS"
    assert rep["status"] == "FAIL"


def test_graded_pieces_are_additive():
    # gr^i of a direct sum is the sum of the gr^i (exactness of gr^i is not claimed)
    def gr(d):
        return g_filtration(build_mixed(p1_two_charts(d, window=3), 1, 2)).gr

    both, a, b = gr((1, -2)), gr(1), gr(-2)
    for i in both:
        for k in range(3):
            assert both[i].dim(k) == a[i].dim(k) + b[i].dim(k)
            hb, ha, hc = cohomology_dims(both[i]), cohomology_dims(a[i]), cohomology_dims(b[i])
            assert hb.get(k, 0) == ha.get(k, 0) + hc.get(k, 0)
