from fractions import Fraction

import pytest

from mixedres import delta_cat as dc
from mixedres.cech import cech_cosimplicial, p1_three_charts, p1_two_charts
from mixedres.cosimplicial import (
    TSComplex,
    comparison_maps,
    constant_module,
    full_matching_defects,
    integrate_ts,
    standard_normalization,
    standard_normalization_data,
    whitney_section,
)
from mixedres.exact_linalg import RationalMatrix, cohomology_dims, is_quasi_iso


@pytest.mark.parametrize("m", [0, 1, 2])
def test_constant_module_is_a_point(m):
    M = constant_module(m)
    for c in (standard_normalization(M), TSComplex(M, 1).complex):
        h = cohomology_dims(c)
        assert {k: v for k, v in h.items() if v} == {0: 1}


def test_structure_maps_functorial():
    # exhaustive over composable pairs [p] -> [q] -> [r] with levels up to 2
    M = cech_cosimplicial(p1_three_charts(1, window=3)).nonempty_pieces()[3]
    for p in range(3):
        for q in range(3):
            for r in range(3):
                for a in dc.enumerate_maps(p, q):
                    for b in dc.enumerate_maps(q, r):
                        assert M.structure_map(dc.compose(b, a)) == M.structure_map(b) @ M.structure_map(a)


def test_identity_structure_map():
    M = cech_cosimplicial(p1_two_charts(2, window=3))
    for p in range(3):
        assert M.structure_map(dc.identity(p)) == RationalMatrix.identity(M.level_dim(p))


@pytest.mark.parametrize("D", [1, 2])
def test_integration_inverts_whitney(D):
    U = p1_three_charts(-2, window=3)
    for M in cech_cosimplicial(U).nonempty_pieces():
        cm = comparison_maps(M, D)
        nz = cm.normalized
        for q in range(M.m + 1):
            assert cm.integration.f(q) @ cm.whitney.f(q) == RationalMatrix.identity(nz.complex.dim(q))
        assert is_quasi_iso(cm.integration)
        assert is_quasi_iso(cm.whitney)


def test_whitney_lift_is_compatible():
    U = p1_three_charts(0, window=2)
    for M in cech_cosimplicial(U).nonempty_pieces():
        nz = standard_normalization_data(M)
        for q in range(M.m + 1):
            for v in nz.basis.get(q, []):
                u = whitney_section(M, q, v)
                assert full_matching_defects(M, u, level_bound=3) == []
                assert integrate_ts(M, u) == {k: Fraction(x) for k, x in v.items() if x}


def test_ts_betti_stable_in_D():
    U = p1_three_charts(-3, window=4)
    for M in cech_cosimplicial(U).nonempty_pieces():
        assert cohomology_dims(TSComplex(M, 1).complex) == cohomology_dims(TSComplex(M, 2).complex)
