"""Acceptance criteria 1-9 at their stated tolerances and runtime limits.

Each criterion prints one line ``criterion N: PASS|FAIL (elapsed / limit) detail``.
Run ``python tests/test_acceptance.py`` for the nine lines without pytest.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from itertools import product
from math import factorial

import pytest

from mixedres import delta_cat as dc
from mixedres.cech import (
    affine_n,
    cech_cosimplicial,
    dimension_identity,
    p1_oracle,
    p1_three_charts,
    p1_two_charts,
    piecewise_betti,
    standard_cech_complex,
    commutative_cech_complex,
    verify_thm31,
    window_stability,
)
from mixedres.cosimplicial import integrate_ts, standard_normalization_data, whitney_section
from mixedres.exact_linalg import LinAlgError
from mixedres.mixres import MixData, build_mixed, d_mix, prop52_checks, random_element, verify_thm41
from mixedres.principal_parts import Chart, flatness_defect, leibniz_defect, verify_thm15
from mixedres.principal_parts import random_element as pp_random
from mixedres.simplex_forms import NormalizedCochain, PolyForm, d, faces_of, integrate, phi, rho, wedge
from mixedres.simpsec import thm33_suite

TWISTS = range(-3, 4)
COVERS = (p1_two_charts, p1_three_charts)
# (h0, h1) frozen from the brute-force difference-map oracle in test_cech.py
ORACLE = {-3: (0, 2), -2: (0, 1), -1: (0, 0), 0: (1, 0), 1: (2, 0), 2: (3, 0), 3: (4, 0)}


def builtin_data():
    yield affine_n(1)
    yield affine_n(2)
    yield affine_n(3, window=2)
    for cover, t in product(COVERS, TWISTS):
        yield cover(t)


LINES: list[str] = []  # collected for the terminal summary (see conftest.py)


def report(n, ok, elapsed, limit, detail=""):
    ok = ok and elapsed < limit
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s / {limit:g}s) {detail}".rstrip()
    LINES.append(line)
    print(line, flush=True)
    return ok


def timed(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, time.perf_counter() - t0, detail


# ---------------------------------------------------------------------------


def criterion_1():
    vals = {}
    for l in range(1, 5):
        vol = PolyForm.const(l)
        for k in range(1, l + 1):
            vol = wedge(vol, PolyForm.dt(l, k))
        vals[l] = integrate(vol)
    ok = all(vals[l] == Fraction(1, factorial(l)) and isinstance(vals[l], Fraction) for l in vals)
    return ok, "integrals " + ", ".join(str(v) for v in vals.values())


def criterion_2():
    ok = True
    count = 0
    for l in range(4):
        for f in faces_of(l):
            c = NormalizedCochain.indicator(l, f)
            ok &= rho(phi(c)) == c
            count += 1
    data = 0
    for U in builtin_data():
        for M in cech_cosimplicial(U).nonempty_pieces():
            nz = standard_normalization_data(M)
            for q in range(M.m + 1):
                for v in nz.basis.get(q, []):
                    ok &= integrate_ts(M, whitney_section(M, q, v)) == {k: x for k, x in v.items() if x}
        data += 1
    return ok, f"{count} basis cochains, {data} builtin data"


def criterion_3():
    worst = 0.0
    ok = True
    bad = []
    for cover, t in product(COVERS, TWISTS):
        t0 = time.perf_counter()
        U = cover(t)
        bettis = []
        for D in (1, 2):
            rep = verify_thm31(U, D)
            qi = next(c for c in rep["checks"] if c["name"] == "integration-quasi-iso")
            if qi["status"] != "PASS" or rep["status"] != "PASS":
                ok = False
                bad.append(f"{U.name} d={t} D={D}")
            bettis.append(tuple(rep["betti"]))
        if bettis[0] != bettis[1]:
            ok = False
            bad.append(f"{U.name} d={t} unstable in D")
        worst = max(worst, time.perf_counter() - t0)
    ok &= worst < 60
    return ok, f"14 data x D in {{1,2}}, slowest datum {worst:.2f}s" + (f"; failing {bad}" if bad else "")


def criterion_4():
    ok = True
    for cover, t in product(COVERS, TWISTS):
        U = cover(t)
        h = piecewise_betti(U, "standard")
        ok &= h[:2] == ORACLE[t] == p1_oracle(t) and all(v == 0 for v in h[2:])
        ok &= window_stability(U)["stable"]
    return ok, "(h0, h1) = (max(d+1,0), max(-d-1,0)) for d=-3..3 on both coverings, window+1 stable"


def criterion_5():
    ok = True
    for n in (1, 2, 3):
        rep = verify_thm15(n, 5)
        ok &= rep["status"] == "PASS"
        ok &= rep["weights"][0]["betti"] == [1]
    rng = random.Random(20240101)
    trials = 0
    for n, order in product((1, 2, 3), range(1, 5)):
        C = Chart(n)
        for deg_x, deg_y in ((0, 0), (0, 1), (1, 1)):
            if deg_y > n:
                continue
            x = pp_random(C, order, rng, degree=deg_x)
            y = pp_random(C, order, rng, degree=deg_y)
            ok &= leibniz_defect(x, y).is_zero()
            ok &= flatness_defect(x).is_zero()
            trials += 1
    return ok, f"n<=3, weights 0..5 exact; {trials} Leibniz/flatness trials at orders 1..4"


def criterion_6():
    ok = True
    bad = []
    note = ""
    for cover, t, N, D in product(COVERS, TWISTS, (2, 3), (1, 2)):
        rep = verify_thm41(cover(t), D, N)
        status = {c["name"]: c["status"] for c in rep["checks"]}
        good = (
            status["d_mix-squared-zero"] == "PASS"
            and status["oracle"] == "PASS"
            and tuple(rep["betti"][:2]) == ORACLE[t]
            and rep["status"] == "PASS"
        )
        note = rep["note"]
        if not good:
            ok = False
            bad.append(f"{cover.__name__} d={t} N={N} D={D}")
    ok &= "surrogate" in note
    return ok, "56 configurations" + (f"; failing {bad}" if bad else "")


def criterion_7():
    ok = True
    witness = None
    for t in (0, -2, 1, 3):
        rep = prop52_checks(p1_two_charts(t), D=1, N=2, seed=11, trials=6)
        ok &= rep["status"] == "PASS"
        w = next(c for c in rep["checks"] if c["name"] == "p1-unit-not-closed")["witness"]
        ok &= bool(w)
        witness = witness or w
    ok &= prop52_checks(affine_n(1, window=3), seed=11)["status"] == "PASS"
    return ok, f"O and O(d) for d in -2,1,3; witness: {witness}"


def criterion_8():
    rep = thm33_suite(seed=0)
    failing = [c["name"] for c in rep["checks"] if c["status"] != "PASS"]
    iii = sum("iii" in c["name"] for c in rep["checks"])
    return rep["status"] == "PASS" and iii >= 3, f"{len(rep['checks'])} checks, {iii} derivation fixtures" + (
        f"; failing {failing}" if failing else ""
    )


def criterion_9():
    ok = True
    # d∘d = 0 on every complex the pipelines build
    complexes = 0
    for U in (affine_n(1), p1_two_charts(-2), p1_three_charts(1)):
        for c in (standard_cech_complex(U), commutative_cech_complex(U, 2)):
            try:
                c.assert_dd_zero()
            except LinAlgError:
                ok = False
            complexes += 1
        for pc in build_mixed(U, 1, 2).pieces.values():
            pc.complex.assert_dd_zero()
            ok &= all(pc.identity_checks().values())
            complexes += 1
    # simplicial identities, exhaustive for p <= 4
    for p in range(5):
        for i, j in product(range(p + 2), range(p + 3)):
            if i < j:
                ok &= dc.compose(dc.face(j, p + 1), dc.face(i, p)) == dc.compose(dc.face(i, p + 1), dc.face(j - 1, p))
        for i, j in product(range(p + 1), range(p + 1)):
            if i <= j:
                ok &= dc.compose(dc.degeneracy(j, p + 1), dc.degeneracy(i, p + 2)) == dc.compose(
                    dc.degeneracy(i, p + 1), dc.degeneracy(j + 1, p + 2))
        for j, i in product(range(p + 1), range(p + 2)):
            lhs = dc.compose(dc.degeneracy(j, p + 1), dc.face(i, p))
            if i in (j, j + 1):
                ok &= lhs == dc.identity(p)
            elif i < j:
                ok &= lhs == dc.compose(dc.face(i, p - 1), dc.degeneracy(j - 1, p))
            else:
                ok &= lhs == dc.compose(dc.face(i - 1, p - 1), dc.degeneracy(j, p))
    # Koszul signs with a fixed seed
    rng = random.Random(9)
    for _ in range(25):
        l = rng.randint(1, 3)
        u = PolyForm(l, {(tuple(rng.randint(0, 2) for _ in range(l)), tuple(sorted(rng.sample(range(1, l + 1), a)))):
                         rng.randint(-3, 3) for a in [rng.randint(0, l)]})
        v = PolyForm(l, {(tuple(rng.randint(0, 2) for _ in range(l)), tuple(sorted(rng.sample(range(1, l + 1), b)))):
                         rng.randint(-3, 3) for b in [rng.randint(0, l)]})
        for p in u.degrees():
            ok &= d(wedge(u, v)) == wedge(d(u), v) + wedge(u, d(v)).scale((-1) ** p)
    for _ in range(25):
        C = Chart(rng.randint(1, 2))
        x = pp_random(C, rng.randint(1, 4), rng, degree=rng.randint(0, 1))
        y = pp_random(C, x.order, rng, degree=rng.randint(0, 1))
        ok &= leibniz_defect(x, y).is_zero()
    U = p1_two_charts(1, window=2)
    c = build_mixed(U, 1, 2)
    md = MixData(U, 2)
    for _ in range(25):
        u = random_element(c, rng)
        a, b = d_mix(md, u)
        da, db = d_mix(md, a), d_mix(md, b)
        ok &= da[0].is_zero() and db[1].is_zero() and (da[1] + db[0]).is_zero()
    # dimension identity on all data
    for U in builtin_data():
        ok &= all(lhs == rhs for lhs, rhs in dimension_identity(U).values())
    return ok, f"{complexes} complexes, simplicial identities p<=4, 75 sign trials, dimension identity"


CRITERIA = [
    (1, criterion_1, 1),
    (2, criterion_2, 10),
    (3, criterion_3, 60 * 14),  # 60 s per datum, checked inside
    (4, criterion_4, 30),
    (5, criterion_5, 30),
    (6, criterion_6, 300),
    (7, criterion_7, 60),
    (8, criterion_8, 60),
    (9, criterion_9, 60),
]


@pytest.mark.parametrize("n,fn,limit", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(n, fn, limit, capsys):
    ok, elapsed, detail = timed(fn)
    with capsys.disabled():
        print()
        ok = report(n, ok, elapsed, limit, detail)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, fn, limit in CRITERIA:
        ok, elapsed, detail = timed(fn)
        results.append(report(n, ok, elapsed, limit, detail))
    sys.exit(0 if all(results) else 1)
