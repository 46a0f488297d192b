"""Covering data for toy schemes and their Čech complexes.

Every open ``U_i`` (``i`` a nondegenerate multi-index) carries a Laurent
monomial algebra described inside a common lattice of *global* exponents.
A variable is given by its exponent vector in that lattice, and a line
bundle summand by the exponent offset of the frame used on ``U_i``.  A basis
label is a global exponent (plus summand), so restriction maps are the
identity on shared labels and the whole Čech complex splits label by label.
The builtin three-chart datum also uses partial-fraction labels ``(x-1)^-b``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import delta_cat as dc
from .cosimplicial import (
    CosimplicialModuleQ,
    TSComplex,
    TSElement,
    comparison_maps,
    integrate_ts,
    standard_normalization_data,
)
from .exact_linalg import (
    ChainComplexQ,
    ChainMapQ,
    RationalMatrix,
    cohomology_dims,
    direct_sum,
    induced_map_on_cohomology,
    is_quasi_iso,
    kernel_basis_sparse,
    rank,
)

Index = tuple[int, ...]
Label = tuple


class CoveringError(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str
    invertible: bool
    exponent: tuple[int, ...]


@dataclass(frozen=True)
class OpenSpec:
    """Algebra of functions on one open plus the frames of the module summands."""

    variables: tuple[Variable, ...]
    frames: tuple[tuple[int, ...], ...]
    poles: bool = False
    coordinate: str | None = None


@dataclass(frozen=True)
class CoveringDatum:
    """A finite affine covering presented by monomial algebras on a lattice."""

    name: str
    m: int
    lattice: tuple[str, ...]
    opens: Mapping[Index, OpenSpec]
    window: int
    twists: tuple[int, ...] = (0,)
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for k in range(self.m + 1):
            for i in dc.nondegenerate_multiindices(self.m, k):
                if i not in self.opens:
                    raise CoveringError(f"no algebra declared for open {i}")
        if self.window < 0:
            raise CoveringError("window must be non-negative")

    @property
    def rank(self) -> int:
        return len(next(iter(self.opens.values())).frames)

    def nd_indices(self) -> list[Index]:
        return [i for k in range(self.m + 1) for i in dc.nondegenerate_multiindices(self.m, k)]

    # lattice points ---------------------------------------------------
    def contains(self, i: Index, label: Label) -> bool:
        """Whether ``label`` is a section of the module on ``U_i``."""
        spec = self.opens[i]
        if label[0] == "p":
            return spec.poles
        _, k, point = label
        rel = tuple(p - f for p, f in zip(point, spec.frames[k]))
        return _in_monoid(rel, spec.variables)

    def labels(self, i: Index) -> tuple[Label, ...]:
        w = self.window
        spec = self.opens[i]
        out = []
        for k in range(self.rank):
            for point in itertools.product(range(-w, w + 1), repeat=len(self.lattice)):
                lab = ("m", k, point)
                if self.contains(i, lab):
                    out.append(lab)
            if spec.poles:
                out.extend(("p", k, b) for b in range(1, w + 1))
        return tuple(sorted(out))

    def describe(self, i: Index, label: Label) -> str:
        spec = self.opens[i]
        if label[0] == "p":
            return f"(x-1)^-{label[2]}·e{label[1]}"
        _, k, point = label
        rel = tuple(p - f for p, f in zip(point, spec.frames[k]))
        exps = _monoid_solution(rel, spec.variables)
        mon = "·".join(f"{v.name}^{e}" if e != 1 else v.name for v, e in zip(spec.variables, exps or ()) if e)
        return f"{mon or '1'}·e{k}"

    def with_window(self, window: int) -> "CoveringDatum":
        return CoveringDatum(self.name, self.m, self.lattice, self.opens, window, self.twists, self.params)

    # validation -------------------------------------------------------
    def validate(self) -> list[dict]:
        """Structural checks; each record has name, status and witness."""
        records = []
        missing = None
        for i in self.nd_indices():
            for j in CosimplicialModuleQ.codim_one_faces(i):
                for lab in self.labels(j):
                    if not self.contains(i, lab):
                        missing = f"{self.describe(j, lab)} on {j} has no image on {i}"
                        break
                if missing:
                    break
            if missing:
                break
        gen_fail = None
        for i in self.nd_indices():
            if len(i) < 2:
                continue
            gens = [v for c in i for v in self.opens[(c,)].variables]
            for v in self.opens[i].variables:
                targets = [v.exponent] + ([tuple(-e for e in v.exponent)] if v.invertible else [])
                for t in targets:
                    if not _in_monoid(t, tuple(gens)):
                        sign = "" if t == v.exponent else "^-1"
                        gen_fail = (
                            f"{v.name}{sign} on {i} is not a product of functions restricted from the charts {i}"
                        )
                        break
                if gen_fail:
                    break
            if gen_fail:
                break
        module = cech_cosimplicial(self, validate=False)
        commute = module.check_restrictions_commute()
        witness = missing or gen_fail or (commute[0] if commute else None)
        records.append({
            "name": "restriction-commutation",
            "status": "FAIL" if witness else "PASS",
            "witness": witness,
        })
        return records


def _in_monoid(target: tuple[int, ...], variables: Sequence[Variable], bound: int | None = None) -> bool:
    return _monoid_solution(target, variables, bound) is not None


def _monoid_solution(target, variables, bound=None):
    """Exponents e (>= 0 unless invertible) with Σ e_v·exponent_v = target, small search."""
    if not variables:
        return () if all(t == 0 for t in target) else None
    b = bound if bound is not None else max([abs(t) for t in target] + [1]) * 2 + 2
    ranges = [range(-b, b + 1) if v.invertible else range(0, b + 1) for v in variables]
    best = None
    for exps in itertools.product(*ranges):
        pt = tuple(sum(e * v.exponent[c] for e, v in zip(exps, variables)) for c in range(len(target)))
        if pt == tuple(target):
            cand = tuple(exps)
            if best is None or sum(map(abs, cand)) < sum(map(abs, best)):
                best = cand
    return best


# ---------------------------------------------------------------------------
# builtins


def affine_n(n: int = 1, window: int = 4) -> CoveringDatum:
    lattice = tuple(f"s{k + 1}" for k in range(n)) if n > 1 else ("x",)
    vars_ = tuple(
        Variable(name, False, tuple(1 if c == k else 0 for c in range(n))) for k, name in enumerate(lattice)
    )
    opens = {(0,): OpenSpec(vars_, ((0,) * n,), coordinate="x" if n == 1 else None)}
    return CoveringDatum(f"affine_{n}", 0, lattice, opens, window, (0,), {"n": n})


def _p1_vars(kind: str) -> tuple[Variable, ...]:
    x = Variable("x", False, (1,))
    xi = Variable("x", True, (1,))
    y = Variable("y", False, (-1,))
    return {"x": (x,), "y": (y,), "xinv": (xi,)}[kind]


def p1_two_charts(d=0, window: int | None = None) -> CoveringDatum:
    """ℙ¹ = Spec Q[x] ∪ Spec Q[y], y = 1/x, with O(d) (or a direct sum) and e1 = x^d e0."""
    twists = tuple(d) if isinstance(d, (tuple, list)) else (int(d),)
    window = window if window is not None else max(abs(t) for t in twists) + 4
    f0 = tuple((0,) for _ in twists)
    f1 = tuple((t,) for t in twists)
    opens = {
        (0,): OpenSpec(_p1_vars("x"), f0, coordinate="x"),
        (1,): OpenSpec(_p1_vars("y"), f1, coordinate="y"),
        (0, 1): OpenSpec(_p1_vars("xinv"), f0, coordinate="x"),
    }
    return CoveringDatum("p1_two_charts", 1, ("x",), opens, window, twists, {"d": twists})


def p1_three_charts(d=0, window: int | None = None) -> CoveringDatum:
    """The two-chart datum plus U_2 = Spec Q[x, (x-1)^-1] inside U_0."""
    twists = tuple(d) if isinstance(d, (tuple, list)) else (int(d),)
    window = window if window is not None else max(abs(t) for t in twists) + 4
    f0 = tuple((0,) for _ in twists)
    f1 = tuple((t,) for t in twists)
    x, y, xi = _p1_vars("x"), _p1_vars("y"), _p1_vars("xinv")
    opens = {
        (0,): OpenSpec(x, f0, coordinate="x"),
        (1,): OpenSpec(y, f1, coordinate="y"),
        (2,): OpenSpec(x, f0, poles=True, coordinate="x"),
        (0, 1): OpenSpec(xi, f0, coordinate="x"),
        (0, 2): OpenSpec(x, f0, poles=True, coordinate="x"),
        (1, 2): OpenSpec(xi, f0, poles=True, coordinate="x"),
        (0, 1, 2): OpenSpec(xi, f0, poles=True, coordinate="x"),
    }
    return CoveringDatum("p1_three_charts", 2, ("x",), opens, window, twists, {"d": twists})


BUILTINS = {"affine_n": affine_n, "p1_two_charts": p1_two_charts, "p1_three_charts": p1_three_charts}


def builtin(name: str, **params) -> CoveringDatum:
    if name.startswith("affine_") and name[7:].isdigit():
        return affine_n(int(name[7:]), **params)
    if name not in BUILTINS:
        raise CoveringError(f"unknown builtin space {name!r}")
    return BUILTINS[name](**params)


def documented_min_window(U: CoveringDatum) -> int:
    return max(abs(t) for t in U.twists) + 4 if U.lattice == ("x",) and U.m > 0 else 0


# ---------------------------------------------------------------------------
# cosimplicial module and complexes


def cech_cosimplicial(U: CoveringDatum, validate: bool = True) -> CosimplicialModuleQ:
    """C^q(U, M) with restriction matrices on windowed sections; graded by label."""
    bases = {i: U.labels(i) for i in U.nd_indices()}
    restr = {}
    for i in U.nd_indices():
        pos = {lab: n for n, lab in enumerate(bases[i])}
        for j in CosimplicialModuleQ.codim_one_faces(i):
            ent = {}
            for c, lab in enumerate(bases[j]):
                if lab not in pos:
                    if validate:
                        raise CoveringError(
                            f"window too small or restriction undefined: {U.describe(j, lab)} from {j} to {i}"
                        )
                    continue
                ent[(pos[lab], c)] = Fraction(1)
            restr[(j, i)] = RationalMatrix(len(bases[i]), len(bases[j]), ent)
    grading = {i: tuple(_grade_key(lab) for lab in bases[i]) for i in bases}
    return CosimplicialModuleQ(U.m, bases, restr, grading)


def _grade_key(label: Label):
    kind, k, val = label
    return (k, kind, val)


def dimension_identity(U: CoveringDatum) -> dict[int, tuple[int, int]]:
    """dim N^q versus Σ_{nondegenerate i} dim M(U_i), per degree."""
    M = cech_cosimplicial(U)
    nz = standard_normalization_data(M)
    out = {}
    for q in range(U.m + 2):
        rhs = sum(M.dim(i) for i in dc.nondegenerate_multiindices(U.m, q))
        out[q] = (nz.complex.dim(q), rhs)
    return out


def standard_cech_complex(U: CoveringDatum) -> ChainComplexQ:
    M = cech_cosimplicial(U)
    return direct_sum(standard_normalization_data(p).complex for p in M.nonempty_pieces())


def commutative_cech_complex(U: CoveringDatum, D: int) -> ChainComplexQ:
    M = cech_cosimplicial(U)
    return direct_sum(TSComplex(p, D).complex for p in M.nonempty_pieces())


def betti(c: ChainComplexQ, top: int) -> tuple[int, ...]:
    h = cohomology_dims(c)
    return tuple(h.get(k, 0) for k in range(top + 1))


def piecewise_betti(U: CoveringDatum, pipeline: str, D: int = 1) -> tuple[int, ...]:
    """Betti numbers summed over graded pieces (cheaper than the direct sum)."""
    M = cech_cosimplicial(U)
    total = [0] * (U.m + 1)
    for p in M.nonempty_pieces():
        if pipeline == "standard":
            c = standard_normalization_data(p).complex
        elif pipeline == "thom-sullivan":
            c = TSComplex(p, D).complex
        else:
            raise CoveringError(f"unknown pipeline {pipeline!r}")
        h = cohomology_dims(c)
        for k in range(U.m + 1):
            total[k] += h.get(k, 0)
    return tuple(total)


def p1_oracle(d: int) -> tuple[int, int]:
    """Classical (h^0, h^1) of O(d) on the projective line."""
    return (max(d + 1, 0), max(-d - 1, 0))


def expected_betti(U: CoveringDatum) -> tuple[int, ...] | None:
    if U.name in ("p1_two_charts", "p1_three_charts"):
        h0 = sum(p1_oracle(t)[0] for t in U.twists)
        h1 = sum(p1_oracle(t)[1] for t in U.twists)
        return (h0, h1) + (0,) * (U.m - 1)
    if U.name.startswith("affine_"):
        return None
    return None


# ---------------------------------------------------------------------------
# comparison of the two normalizations


def global_sections(M: CosimplicialModuleQ) -> list[dict[int, Fraction]]:
    """Basis of H^0 of the standard complex as level-0 vectors."""
    nz = standard_normalization_data(M)
    basis, _ = kernel_basis_sparse(nz.complex.d(0))
    return [nz.embed(0, v) for v in basis]


def unit_embedding(M: CosimplicialModuleQ, section: Mapping[int, Fraction]) -> TSElement:
    """A global section as the constant Thom-Sullivan cochain 1 ⊗ s|U_i."""
    offs = M.level_offsets(0)
    comps = {}
    for i in M.nd_indices():
        l = len(i) - 1
        v0 = i[0]
        vec = {p: section[offs[(v0,)] + p] for p in range(M.dim((v0,))) if section.get(offs[(v0,)] + p)}
        res = M.restriction((v0,), i).apply(vec)
        comps[i] = {(((0,) * l, ()), p): c for p, c in res.items()}
    return TSElement(0, comps)


@dataclass
class PieceResult:
    key: object
    betti_ts: dict[int, int]
    betti_std: dict[int, int]
    quasi_iso: bool
    section_identity: bool
    unit_rank: int


def verify_piece(M: CosimplicialModuleQ, D: int) -> PieceResult:
    cm = comparison_maps(M, D)
    ts, nz = cm.ts, cm.normalized
    h_ts = cohomology_dims(ts.complex)
    h_std = cohomology_dims(nz.complex)
    qi = is_quasi_iso(cm.integration)
    ident = all(
        (cm.integration.f(q) @ cm.whitney.f(q)) == RationalMatrix.identity(nz.complex.dim(q))
        for q in range(M.m + 1)
    )
    # unit map: global sections -> H^0 of the Thom-Sullivan complex
    secs = global_sections(M)
    cols = []
    for s in secs:
        u = unit_embedding(M, s)
        cols.append(ts.element_coordinates(u))
        if integrate_ts(M, u) != {k: v for k, v in s.items() if v}:
            ident = False
    src = ChainComplexQ({0: len(secs)}, {})
    unit = ChainMapQ(src, ts.complex, {0: RationalMatrix.from_columns(ts.complex.dim(0), cols)})
    h_unit = induced_map_on_cohomology(unit)
    unit_rank = rank(h_unit[0]) if 0 in h_unit else 0
    key = M.grading[M.nd_indices()[0]][0] if M.grading and M.bases[M.nd_indices()[0]] else None
    return PieceResult(key, h_ts, h_std, qi, ident, unit_rank)


def verify_thm31(U: CoveringDatum, D: int = 1) -> dict:
    """∫_Δ : Ñ C(U,M) -> N C(U,M) is a quasi-isomorphism; unit map hits H^0."""
    M = cech_cosimplicial(U)
    top = U.m
    ts_total = [0] * (top + 1)
    std_total = [0] * (top + 1)
    qi = True
    ident = True
    unit_total = 0
    failures = []
    for piece in M.nonempty_pieces():
        r = verify_piece(piece, D)
        for k in range(top + 1):
            ts_total[k] += r.betti_ts.get(k, 0)
            std_total[k] += r.betti_std.get(k, 0)
        if not r.quasi_iso:
            qi = False
            failures.append(f"∫ not a quasi-isomorphism on piece {r.key}")
        if not r.section_identity:
            ident = False
            failures.append(f"∫∘W != id on piece {r.key}")
        unit_total += r.unit_rank
    expected = expected_betti(U)
    checks = [
        {"name": "integration-quasi-iso", "status": "PASS" if qi else "FAIL"},
        {"name": "whitney-section-identity", "status": "PASS" if ident else "FAIL"},
        {
            "name": "betti-agree",
            "status": "PASS" if ts_total == std_total else "FAIL",
            "thom_sullivan": ts_total,
            "standard": std_total,
        },
        {
            "name": "unit-map-h0",
            "status": "PASS" if unit_total == std_total[0] else "FAIL",
            "rank": unit_total,
        },
    ]
    if expected is not None:
        checks.append({
            "name": "oracle",
            "status": "PASS" if tuple(std_total) == expected else "FAIL",
            "expected": list(expected),
        })
    if U.name.startswith("affine_"):
        checks.append({
            "name": "affine-acyclic",
            "status": "PASS" if all(v == 0 for v in std_total[1:]) else "FAIL",
        })
    status = "PASS" if all(c["status"] == "PASS" for c in checks) else "FAIL"
    return {
        "name": "verify-thm31",
        "status": status,
        "space": U.name,
        "params": dict(U.params),
        "D": D,
        "window": U.window,
        "betti": ts_total,
        "checks": checks,
        "witnesses": failures,
    }


def window_stability(U: CoveringDatum, pipeline: str = "standard", D: int = 1) -> dict:
    """Compare Betti numbers at window W and W+1.

    On affine data H^0 counts the monomials in the window, so only the
    positive degrees are compared there.
    """
    a = piecewise_betti(U, pipeline, D)
    b = piecewise_betti(U.with_window(U.window + 1), pipeline, D)
    start = 1 if U.name.startswith("affine_") else 0
    return {"window": U.window, "betti": list(a), "betti_window_plus_1": list(b),
            "compared_from_degree": start, "stable": tuple(a)[start:] == tuple(b)[start:]}
