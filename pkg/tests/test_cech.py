import pytest
import sympy

from mixedres.cech import (
    CoveringError,
    affine_n,
    builtin,
    dimension_identity,
    documented_min_window,
    expected_betti,
    p1_oracle,
    p1_three_charts,
    p1_two_charts,
    piecewise_betti,
    standard_cech_complex,
    verify_thm31,
    window_stability,
)
from mixedres.exact_linalg import cohomology_dims

# (h0, h1) of O(d) on the projective line, frozen from the brute-force oracle below
ORACLE = {-3: (0, 2), -2: (0, 1), -1: (0, 0), 0: (1, 0), 1: (2, 0), 2: (3, 0), 3: (4, 0)}


def brute_force_cech(d, window):
    """Two-chart Čech difference map built directly from Laurent monomials.

    Sections of O(d) are x^k e0 on U0 (k >= 0) and y^b e1 = x^(d-b) e0 on U1
    (b >= 0); the overlap has every x^k.  All exponents stay in the window.
    """
    ks = range(-window, window + 1)
    c0 = [("U0", k) for k in ks if k >= 0] + [("U1", k) for k in ks if d - k >= 0]
    c1 = list(ks)
    mat = sympy.zeros(len(c1), len(c0))
    for col, (chart, k) in enumerate(c0):
        mat[c1.index(k), col] = 1 if chart == "U1" else -1
    r = mat.rank()
    return (len(c0) - r, len(c1) - r)


@pytest.mark.parametrize("d", range(-3, 4))
def test_oracle_table_is_derived(d):
    w = documented_min_window(p1_two_charts(d))
    assert brute_force_cech(d, w) == ORACLE[d]
    assert brute_force_cech(d, w + 1) == ORACLE[d]
    assert p1_oracle(d) == ORACLE[d]


@pytest.mark.parametrize("d", range(-3, 4))
@pytest.mark.parametrize("cover", [p1_two_charts, p1_three_charts])
def test_standard_pipeline_matches_oracle(cover, d):
    U = cover(d)
    h = piecewise_betti(U, "standard")
    assert h[:2] == ORACLE[d]
    assert all(v == 0 for v in h[2:])
    assert window_stability(U)["stable"]


@pytest.mark.parametrize("d", [-2, 0, 2])
def test_direct_sum_agrees_with_pieces(d):
    U = p1_two_charts(d, window=4)
    h = cohomology_dims(standard_cech_complex(U))
    assert (h.get(0, 0), h.get(1, 0)) == piecewise_betti(U, "standard")


@pytest.mark.parametrize("U", [affine_n(1), affine_n(2, window=2), p1_two_charts(-1), p1_three_charts(2)],
                         ids=lambda U: U.name)
def test_dimension_identity(U):
    for q, (lhs, rhs) in dimension_identity(U).items():
        assert lhs == rhs, q


@pytest.mark.parametrize("U", [affine_n(1), affine_n(3, window=2), p1_two_charts(-3), p1_three_charts(3)],
                         ids=lambda U: U.name)
def test_builtins_validate(U):
    assert all(r["status"] == "PASS" for r in U.validate())


@pytest.mark.parametrize("D", [1, 2])
def test_commutative_resolution_report(D):
    for U in (affine_n(1), p1_two_charts(-2), p1_three_charts(1)):
        rep = verify_thm31(U, D)
        assert rep["status"] == "PASS", rep


def test_affine_acyclic_and_no_oracle():
    U = affine_n(2, window=3)
    h = piecewise_betti(U, "thom-sullivan")
    assert h[0] == 16 and all(v == 0 for v in h[1:])
    assert expected_betti(U) is None


def test_builtin_lookup():
    assert builtin("p1_two_charts", d=2) == p1_two_charts(2)
    assert documented_min_window(p1_two_charts(-3)) == 7
    with pytest.raises(CoveringError):
        builtin("p2")
