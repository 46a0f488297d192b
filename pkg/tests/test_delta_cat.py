from itertools import product
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixedres import delta_cat as dc


def maps(p, q):
    return dc.enumerate_maps(p, q)


@pytest.mark.parametrize("p", range(0, 5))
def test_cosimplicial_identities(p):
    # faces: d_j d_i = d_i d_{j-1} for i < j
    for i, j in product(range(p + 2), range(p + 3)):
        if i < j:
            assert dc.compose(dc.face(j, p + 1), dc.face(i, p)) == dc.compose(dc.face(i, p + 1), dc.face(j - 1, p))
    # degeneracies: s_j s_i = s_i s_{j+1} for i <= j, as maps [p+2] -> [p]
    for i, j in product(range(p + 1), range(p + 1)):
        if i <= j:
            assert dc.compose(dc.degeneracy(j, p + 1), dc.degeneracy(i, p + 2)) == dc.compose(
                dc.degeneracy(i, p + 1), dc.degeneracy(j + 1, p + 2)
            )
    # mixed identities, s_j d_i : [p] -> [p+1] -> [p]
    for j, i in product(range(p + 1), range(p + 2)):
        lhs = dc.compose(dc.degeneracy(j, p + 1), dc.face(i, p))
        if i == j or i == j + 1:
            assert lhs == dc.identity(p)
        elif i < j:
            assert lhs == dc.compose(dc.face(i, p - 1), dc.degeneracy(j - 1, p))
        else:
            assert lhs == dc.compose(dc.face(i - 1, p - 1), dc.degeneracy(j, p))


@pytest.mark.parametrize("p,q", [(p, q) for p in range(5) for q in range(5)])
def test_map_count_is_binomial(p, q):
    assert dc.count_maps(p, q) == comb(p + q + 1, p + 1) == len(maps(p, q))


@pytest.mark.parametrize("p,q", [(p, q) for p in range(4) for q in range(4)])
def test_factorization_recomposes(p, q):
    for a in maps(p, q):
        assert dc.compose_word(dc.factorize(a), p) == a


def test_composition_is_associative():
    for a in maps(1, 2):
        for b in maps(2, 2):
            for c in maps(2, 3):
                assert dc.compose(c, dc.compose(b, a)) == dc.compose(dc.compose(c, b), a)


def test_bad_maps_rejected():
    with pytest.raises(dc.DeltaError):
        dc.SimplicialMap(1, 2, (2, 1))
    with pytest.raises(dc.DeltaError):
        dc.SimplicialMap(1, 1, (0, 2))


def test_multiindex_action():
    assert dc.act((0, 1, 2), dc.face(1, 1)) == (0, 2)
    assert dc.nondegenerate_multiindices(2, 1) == [(0, 1), (0, 2), (1, 2)]
    assert dc.all_multiindices(1, 1) == [(0, 0), (0, 1), (1, 1)]


@given(st.lists(st.integers(0, 3), min_size=1, max_size=5).map(sorted))
def test_degeneracy_decomposition(idx):
    idx = tuple(idx)
    nd, s = dc.degeneracy_decomposition(idx)
    assert dc.is_nondegenerate(nd)
    assert dc.act(nd, s) == idx
