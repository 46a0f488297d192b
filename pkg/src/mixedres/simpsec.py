"""Simplicial sections of a trivial bundle Z = X × A^1 and the operators σ*(φ).

All computations happen in one graded-commutative algebra per index ``i``:
``B_l = Ω(Δ^l) ⊗ Q[z, dz] ⊗ (Ω ⊗ P ⊗ M)(U_i)``, with elements stored as
``{(simplex form key, z power, dz power, mix key): coeff}``.  The level l = 0
copy is the Z-level algebra on which operators φ are specified; a section
``σ_i`` is the DG algebra map sending z to a polynomial in the simplex
coordinates with chart-function coefficients.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import delta_cat as dc
from .cech import CoveringDatum
from .mixres import MixData, MixElement, MixError, MixedComplex, build_mixed, element_from_piece, matching_defects
from .principal_parts import Chart, PPElement
from .simplex_forms import PolyForm, d as form_d, pullback, wedge

Index = tuple[int, ...]
BKey = tuple  # ((a, J), ez, edz, key)


class SectionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# the algebra B_l


def _clean(x: Mapping) -> dict:
    return {k: v for k, v in x.items() if v}


def _key_deg(key) -> int:
    return len(key[0])


def b_mul(md: MixData, l: int, x: Mapping, y: Mapping) -> dict:
    """(ω1 ζ1 κ1)(ω2 ζ2 κ2) = ± ω1ω2 ζ1ζ2 κ1κ2 with Koszul signs."""
    out: dict = {}
    for (f1, e1, d1, k1), c1 in x.items():
        for (f2, e2, d2, k2), c2 in y.items():
            if d1 and d2:
                continue
            kp = md.multiply_keys(k1, k2)
            if not kp:
                continue
            w = wedge(PolyForm(l, {f1: 1}), PolyForm(l, {f2: 1}))
            if not w.terms:
                continue
            deg_f2 = len(f2[1])
            s = (d1 + _key_deg(k1)) * deg_f2 + _key_deg(k1) * d2
            sign = -1 if s % 2 else 1
            for fk, cw in w.terms.items():
                for kk, ck in kp.items():
                    key = (fk, e1 + e2, d1 + d2, kk)
                    out[key] = out.get(key, 0) + sign * c1 * c2 * cw * ck
    return _clean(out)


def b_add(*xs: Mapping) -> dict:
    out: dict = {}
    for x in xs:
        for k, v in x.items():
            out[k] = out.get(k, 0) + v
    return _clean(out)


def b_scale(x: Mapping, s) -> dict:
    return _clean({k: s * v for k, v in x.items()})


def b_d(md: MixData, l: int, x: Mapping) -> dict:
    """d(ωζκ) = dω ζκ + (-1)^{|ω|} ω dζ κ + (-1)^{|ω|+|ζ|} ωζ ∇κ."""
    out: dict = {}
    for (fk, e, ed, key), c in x.items():
        for gk, v in form_d(PolyForm(l, {fk: 1})).terms.items():
            k2 = (gk, e, ed, key)
            out[k2] = out.get(k2, 0) + c * v
        sw = -1 if len(fk[1]) % 2 else 1
        if e and not ed:
            k2 = (fk, e - 1, 1, key)
            out[k2] = out.get(k2, 0) + sw * e * c
        sz = sw * (-1 if ed else 1)
        for kk, v in md.nabla_key(key).items():
            k2 = (fk, e, ed, kk)
            out[k2] = out.get(k2, 0) + sz * c * v
    return _clean(out)


def b_degree(x: Mapping) -> set[int]:
    return {len(fk[1]) + ed + _key_deg(key) for (fk, e, ed, key) in x}


def one(md: MixData, l: int) -> dict:
    return {(((0,) * l, ()), 0, 0, ((), (0,) * md.n, ("m", 0, (0,) * md.n))): Fraction(1)}


def z_elem(md: MixData, power: int = 1, dz: int = 0) -> dict:
    return {(((), ()), power, dz, ((), (0,) * md.n, ("m", 0, (0,) * md.n))): Fraction(1)}


def key_elem(md: MixData, l: int, key, c=1) -> dict:
    return {(((0,) * l, ()), 0, 0, key): Fraction(c)}


def function_keys(md: MixData, i: Index, point: Sequence[int]) -> dict:
    """A chart function x^point (global exponents) acting through the first factor, as keys."""
    E = md.coords(i)
    exps = tuple(sum(g * e for g, e in zip(point, Ek)) for Ek in E)
    ch = Chart(md.n, tuple(True for _ in range(md.n)))
    el = PPElement.p1(ch, md.N, exps)
    out = {}
    for (J, b, c), v in el.terms.items():
        lab = tuple(sum(ck * Ek[x] for ck, Ek in zip(c, E)) for x in range(md.n))
        out[(J, b, ("m", 0, lab))] = v
    return out


# ---------------------------------------------------------------------------
# sections


@dataclass(frozen=True)
class SimplicialSectionDatum:
    """σ_i^*(z) for every nondegenerate i: {simplex exponent a: {global point: coeff}}.

    ``base_images`` optionally records where σ_i^* sends the base variables
    (condition (i) demands the identity).
    """

    base: CoveringDatum
    fiber: str
    sections: Mapping[Index, Mapping[tuple[int, ...], Mapping[tuple[int, ...], Fraction]]]
    over: int | None = None
    base_images: Mapping[Index, Mapping[str, str]] = field(default_factory=dict)

    def open_of(self, i: Index) -> Index:
        return i if self.over is None else tuple(sorted(set(i) | {self.over}))

    def component(self, i: Index) -> dict:
        """σ on an arbitrary (possibly degenerate) multi-index, via the surjection σ_*."""
        nd, sigma = dc.degeneracy_decomposition(tuple(i))
        comp = self.sections.get(nd, {})
        if sigma.source_dim == sigma.target_dim:
            return {a: dict(f) for a, f in comp.items()}
        return _pull_function_form(sigma, comp)


def _pull_function_form(alpha: dc.SimplicialMap, comp: Mapping) -> dict:
    by_point: dict = {}
    for a, f in comp.items():
        for g, c in f.items():
            by_point.setdefault(g, {})[(a, ())] = c
    out: dict = {}
    for g, terms in by_point.items():
        pf = pullback(alpha, PolyForm(alpha.target_dim, terms))
        for (a, _), c in pf.terms.items():
            out.setdefault(a, {})[g] = c
    return {a: _clean(f) for a, f in out.items() if _clean(f)}


def interpolation_section(U: CoveringDatum, values: Mapping[int, Mapping[tuple[int, ...], Fraction]],
                          over: int | None = None) -> SimplicialSectionDatum:
    """z ↦ Σ_k t_k·a_{i_k} on the index (i_0..i_l), with t_0 = 1 - t_1 - ... - t_l."""
    secs = {}
    for i in U.nd_indices():
        l = len(i) - 1
        comp: dict = {}
        for k, v in enumerate(i):
            if k == 0:
                terms = [((0,) * l, Fraction(1))] + [
                    (tuple(1 if j == c else 0 for j in range(l)), Fraction(-1)) for c in range(l)
                ]
            else:
                terms = [(tuple(1 if j == k - 1 else 0 for j in range(l)), Fraction(1))]
            for a, s in terms:
                for g, c in values[v].items():
                    comp.setdefault(a, {})
                    comp[a][g] = comp[a].get(g, 0) + s * Fraction(c)
        secs[i] = {a: _clean(f) for a, f in comp.items() if _clean(f)}
    return SimplicialSectionDatum(U, "z", secs, over)


def validate_section(sig: SimplicialSectionDatum, level_bound: int | None = None) -> dict:
    """Conditions (i) and (ii) for every α ∈ Δ^l_k with k, l up to the covering size."""
    U = sig.base
    witnesses = []
    for i, imgs in sig.base_images.items():
        for var, img in imgs.items():
            if img != var:
                witnesses.append(f"condition (i): σ_{i}^* sends base variable {var} to {img}")
    for i, comp in sig.sections.items():
        for a, f in comp.items():
            for g in f:
                if not U.contains(sig.open_of(i), ("m", 0, tuple(g))):
                    witnesses.append(f"x^{g} in σ_{i} is not a function on U{sig.open_of(i)}")
    top = U.m + 1 if level_bound is None else level_bound
    comps = {l: {i: sig.component(i) for i in dc.all_multiindices(U.m, l)} for l in range(top + 1)}
    for l in range(top + 1):
        for k in range(top + 1):
            for alpha in dc.enumerate_maps(k, l):
                for i in dc.all_multiindices(U.m, l):
                    j = dc.act(i, alpha)
                    lhs = comps[k][j]
                    rhs = _pull_function_form(alpha, comps[l][i])
                    if lhs != rhs:
                        witnesses.append(f"condition (ii) fails for alpha={alpha.values} at index {i}")
    return {"name": "validate-section", "status": "FAIL" if witnesses else "PASS", "witnesses": witnesses[:5]}


def section_images(md: MixData, sig: SimplicialSectionDatum, i: Index) -> tuple[dict, dict]:
    """σ_i^*(z) and σ_i^*(dz) = d_mix σ_i^*(z) as elements of B_l."""
    l = len(i) - 1
    sz: dict = {}
    for a, f in sig.sections.get(i, {}).items():
        for g, c in f.items():
            for key, v in function_keys(md, i, g).items():
                k = ((a, ()), 0, 0, key)
                sz[k] = sz.get(k, 0) + c * v
    sz = _clean(sz)
    return sz, b_d(md, l, sz)


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True)
class MultilinearOp:
    """Ω_Z-multilinear operator of arity r and degree k on π^*(Ω ⊗ P ⊗ M).

    ``fn(i, keys)`` gives φ on a tuple of basis keys as a Z-level element
    ``{((( ), ()), ez, edz, key): coeff}``; by construction φ is determined by
    these values.
    """

    arity: int
    degree: int
    fn: Callable[[Index, tuple], dict]
    name: str = "phi"

    def on_basis(self, i: Index, keys: tuple) -> dict:
        return self.fn(i, keys)


def _split(x: Mapping) -> list[tuple[dict, tuple, Fraction]]:
    """Write an element of B_l as Σ (coefficient part ω ζ) · κ."""
    out = []
    for (fk, e, ed, key), c in x.items():
        out.append((fk, e, ed, key, c))
    return out


def apply_op(md: MixData, l: int, i: Index, phi: MultilinearOp, args: Sequence[Mapping],
             subst: Callable[[Mapping], dict] | None = None) -> dict:
    """φ(u_1..u_r) on B_l using Ω-multilinearity; subst (if given) is applied to φ's values.

    Sign: moving the coefficient of u_j in front of φ and of κ_1..κ_{j-1}
    gives (-1)^{|c_j|(k + |κ_1| + ... + |κ_{j-1}|)}.
    """
    if len(args) != phi.arity:
        raise SectionError(f"{phi.name} takes {phi.arity} arguments")
    total: dict = {}

    def rec(j, coef, keys, sgn, kdeg):
        if j == len(args):
            val = phi.on_basis(i, tuple(keys))
            if subst is not None:
                val = subst(val)
            prod = b_mul(md, l, coef, val) if coef is not None else val
            for k, v in prod.items():
                total[k] = total.get(k, 0) + sgn * v
            return
        for fk, e, ed, key, c in _split(args[j]):
            cdeg = len(fk[1]) + ed
            s = -1 if (cdeg * (phi.degree + kdeg)) % 2 else 1
            cpart = {(fk, e, ed, ((), (0,) * md.n, ("m", 0, (0,) * md.n))): c}
            new = b_mul(md, l, coef, cpart) if coef is not None else cpart
            rec(j + 1, new, keys + [key], sgn * s, kdeg + _key_deg(key))

    rec(0, None, [], 1, 0)
    return _clean(total)


def substitution(md: MixData, l: int, sz: Mapping, sdz: Mapping) -> Callable[[Mapping], dict]:
    """The DG algebra map z ↦ sz, dz ↦ sdz from Z-level elements into B_l."""
    cache: dict = {}

    def power(e):
        if e not in cache:
            acc = one(md, l)
            for _ in range(e):
                acc = b_mul(md, l, acc, sz)
            cache[e] = acc
        return cache[e]

    def apply(x: Mapping) -> dict:
        out: dict = {}
        for (fk, e, ed, key), c in x.items():
            if fk[1]:
                raise SectionError("Z-level values must not carry simplex forms")
            term = power(e)
            if ed:
                term = b_mul(md, l, term, sdz)
            term = b_mul(md, l, term, key_elem(md, l, key, c))
            for k, v in term.items():
                out[k] = out.get(k, 0) + v
        return _clean(out)

    return apply


def base_change_multilinear(md: MixData, l: int, f: Callable[[Mapping], dict], phi: MultilinearOp,
                            i: Index) -> Callable[[Sequence[Mapping]], dict]:
    """f^*(φ) on B ⊗ M: evaluate φ on basis keys and push the coefficients through f."""
    return lambda args: apply_op(md, l, i, phi, args, subst=f)


def identity_subst(x: Mapping) -> dict:
    return dict(x)


# builders ---------------------------------------------------------------

def op_identity(md: MixData) -> MultilinearOp:
    return MultilinearOp(1, 0, lambda i, ks: {(((), ()), 0, 0, ks[0]): Fraction(1)}, "identity")


def op_multiply_z(md: MixData, power: int = 1, dz: int = 0, c=1) -> MultilinearOp:
    """m ↦ c·z^power (dz)^dz ∧ m."""
    return MultilinearOp(1, dz, lambda i, ks: {(((), ()), power, dz, ks[0]): Fraction(c)}, f"z^{power}dz^{dz}")


def op_multiply_element(md: MixData, element: Callable[[Index], Mapping], degree: int, name: str) -> MultilinearOp:
    """m ↦ e_i · m for a family of chart elements e_i of Ω ⊗ P (O-labels)."""

    def fn(i, ks):
        out: dict = {}
        for key, c in element(i).items():
            for k2, v in md.multiply_keys(key, ks[0]).items():
                out[(((), ()), 0, 0, k2)] = out.get((((), ()), 0, 0, k2), 0) + c * v
        return _clean(out)

    return MultilinearOp(1, degree, fn, name)


def op_product(md: MixData, arity: int = 2) -> MultilinearOp:
    """The r-fold product (first r-1 arguments in Ω ⊗ P ⊗ O)."""

    def fn(i, ks):
        acc = {ks[-1]: Fraction(1)}
        for k in reversed(ks[:-1]):
            new: dict = {}
            for kk, c in acc.items():
                for k2, v in md.multiply_keys(k, kk).items():
                    new[k2] = new.get(k2, 0) + c * v
            acc = new
        return _clean({(((), ()), 0, 0, k): v for k, v in acc.items()})

    return MultilinearOp(arity, 0, fn, f"product{arity}")


def op_sum(a: MultilinearOp, b: MultilinearOp) -> MultilinearOp:
    if (a.arity, a.degree) != (b.arity, b.degree):
        raise SectionError("can only add operators of equal arity and degree")
    return MultilinearOp(a.arity, a.degree, lambda i, ks: b_add(a.fn(i, ks), b.fn(i, ks)), f"{a.name}+{b.name}")


def op_scale(a: MultilinearOp, s) -> MultilinearOp:
    return MultilinearOp(a.arity, a.degree, lambda i, ks: b_scale(a.fn(i, ks), Fraction(s)), f"{s}*{a.name}")


def op_compose(md: MixData, phi: MultilinearOp, psis: Sequence[MultilinearOp]) -> MultilinearOp:
    """φ∘(ψ_1 × ... × ψ_r) for unary ψ_j, evaluated at Z level."""
    if len(psis) != phi.arity or any(p.arity != 1 for p in psis):
        raise SectionError("composition expects one unary operator per argument")
    deg = phi.degree + sum(p.degree for p in psis)

    def fn(i, ks):
        # (φ∘(ψ_1..ψ_r))(κ_1..κ_r) = ± φ(ψ_1 κ_1, ..., ψ_r κ_r); ψ_j moves past κ_1..κ_{j-1}
        sign = 1
        kd = 0
        vals = []
        for j, (psi, key) in enumerate(zip(psis, ks)):
            if (psi.degree * kd) % 2:
                sign = -sign
            kd += _key_deg(key)
            vals.append(psi.on_basis(i, (key,)))
        # φ is Ω_Z-multilinear of degree phi.degree; coefficients of ψ values move past φ
        shifted = MultilinearOp(phi.arity, phi.degree, phi.fn)
        return b_scale(apply_op(md, 0, i, shifted, vals), sign)

    return MultilinearOp(phi.arity, deg, fn, f"{phi.name}∘({','.join(p.name for p in psis)})")


# ---------------------------------------------------------------------------
# σ*(φ) on mixed resolutions


def mix_to_b(u: MixElement, i: Index) -> dict:
    return {(fk, 0, 0, key): v for (fk, key), v in u.components.get(i, {}).items()}


def b_to_mix(x: Mapping) -> dict[tuple[int, int], dict]:
    """Split a z-free element of B_l by bidegree (p, q)."""
    out: dict = {}
    for (fk, e, ed, key), v in x.items():
        if e or ed:
            raise SectionError("result still depends on the fiber coordinate")
        out.setdefault((len(key[0]), len(fk[1])), {})[(fk, key)] = v
    return out


@dataclass
class MixSum:
    """Finite sum of elements of different bidegrees, keyed by (p, q)."""

    parts: dict[tuple[int, int], MixElement] = field(default_factory=dict)

    def __add__(self, other: "MixSum") -> "MixSum":
        out = dict(self.parts)
        for k, v in other.parts.items():
            out[k] = out[k] + v if k in out else v
        return MixSum({k: v for k, v in out.items() if not v.is_zero()})

    def scale(self, s) -> "MixSum":
        return MixSum({k: v.scale(s) for k, v in self.parts.items() if not v.scale(s).is_zero()})

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.parts.values())

    def __eq__(self, other) -> bool:
        return (self + other.scale(-1)).is_zero()


def _assemble(per_index: Mapping[Index, dict]) -> MixSum:
    parts: dict = {}
    for i, x in per_index.items():
        for (p, q), comp in b_to_mix(x).items():
            parts.setdefault((p, q), MixElement(p, q, {})).components[i] = comp
    return MixSum({k: v.clean() for k, v in parts.items() if not v.is_zero()})


def sigma_pullback(md: MixData, sig: SimplicialSectionDatum, phi: MultilinearOp, check: bool = True
                   ) -> Callable[..., MixSum]:
    """σ*(φ): restrict φ along each σ_i and assemble the family; result is Mix(O)-multilinear of degree k."""
    subs = {}
    for i in md.U.nd_indices():
        sz, sdz = section_images(md, sig, i)
        subs[i] = substitution(md, len(i) - 1, sz, sdz)

    def op(*args: MixElement) -> MixSum:
        per = {}
        for i in md.U.nd_indices():
            per[i] = apply_op(md, len(i) - 1, i, phi, [mix_to_b(u, i) for u in args], subst=subs[i])
        out = _assemble(per)
        if check:
            for el in out.parts.values():
                bad = matching_defects(md, el)
                if bad:
                    raise SectionError(f"σ*({phi.name}) is not simplicially compatible at {bad[0]}")
        return out

    return op


def d_mix_sum(md: MixData, u: MixSum | MixElement) -> MixSum:
    parts = u.parts.values() if isinstance(u, MixSum) else [u]
    per: dict = {}
    for el in parts:
        for i in el.components:
            x = b_d(md, len(i) - 1, mix_to_b(el, i))
            per[i] = b_add(per.get(i, {}), x)
    return _assemble(per)


def apply_sum(op: Callable[..., MixSum], u: MixSum) -> MixSum:
    out = MixSum()
    for el in u.parts.values():
        out = out + op(el)
    return out


def cech_pullback(md: MixData, element: Callable[[Index], Mapping], degree: int, u: MixElement) -> MixSum:
    """Ñ C(U, φ_0) for φ_0 = multiplication by a chart element: act on keys, sign (-1)^{deg·q}."""
    comps = {}
    for i, c in u.components.items():
        e = element(i)
        new: dict = {}
        for (fk, key), v in c.items():
            for ek, ec in e.items():
                for k2, w in md.multiply_keys(ek, key).items():
                    new[(fk, k2)] = new.get((fk, k2), 0) + v * ec * w
        comps[i] = _clean(new)
    s = -1 if (degree * u.q) % 2 else 1
    el = MixElement(u.p + degree, u.q, comps).clean().scale(s)
    return MixSum({(el.p, el.q): el} if not el.is_zero() else {})


# ---------------------------------------------------------------------------
# fixtures and the derivation identity


def two_chart_interpolation(U: CoveringDatum, a0=(1,), a1=(-1,), over: int | None = None) -> SimplicialSectionDatum:
    """z ↦ a_j on chart j and t_0·a_0 + t_1·a_1 on the overlap (a_j given as global exponents)."""
    return interpolation_section(U, {0: {tuple(a0): Fraction(1)}, 1: {tuple(a1): Fraction(1)}}, over)


def broken_section(U: CoveringDatum) -> SimplicialSectionDatum:
    """Negative control: the overlap component ends at x^-2 instead of a_1 = y."""
    good = two_chart_interpolation(U)
    secs = dict(good.sections)
    secs[(0, 1)] = {(0,): {(1,): Fraction(1)}, (1,): {(1,): Fraction(-1), (-2,): Fraction(1)}}
    return SimplicialSectionDatum(U, "z", secs)


def spanning_set(c: MixedComplex) -> list[MixElement]:
    out = []
    for key, pc in sorted(c.pieces.items(), key=lambda kv: repr(kv[0])):
        for (j, p), ts in pc.ts.items():
            for q in range(pc.m + 1):
                for r in range(ts.complex.dim(q)):
                    out.append(element_from_piece(pc, j, p, q, {r: Fraction(1)}))
    return out


def z_level_hypothesis(md: MixData, phi: MultilinearOp, psi: MultilinearOp, piece_keys: Sequence) -> list[str]:
    """d∘φ - (-1)^k φ∘d = ψ on Z-level basis elements z^e dz^ε ⊗ κ (unary φ)."""
    bad = []
    k = phi.degree
    for i in md.U.nd_indices():
        for key in piece_keys(i):
            for e in range(3):
                for ed in (0, 1):
                    x = {(((), ()), e, ed, key): Fraction(1)}
                    lhs = b_add(b_d(md, 0, apply_op(md, 0, i, phi, [x])),
                                b_scale(apply_op(md, 0, i, phi, [b_d(md, 0, x)]), -((-1) ** k)))
                    rhs = apply_op(md, 0, i, psi, [x])
                    if lhs != rhs:
                        bad.append(f"hypothesis fails on z^{e} dz^{ed} ⊗ {key} over {i}")
    return bad


def verify_thm33_iii(md: MixData, sig: SimplicialSectionDatum, phi: MultilinearOp, psi: MultilinearOp,
                     span: Sequence[MixElement], hypothesis_keys=None) -> dict:
    """d_mix σ*(φ) - (-1)^k σ*(φ) d_mix = σ*(ψ) on a spanning set (after checking the hypothesis)."""
    k = phi.degree
    if hypothesis_keys is not None:
        bad = z_level_hypothesis(md, phi, psi, hypothesis_keys)
        if bad:
            raise SectionError(f"fixture invalid: {bad[0]}")
    sp = sigma_pullback(md, sig, phi)
    sq = sigma_pullback(md, sig, psi)
    witnesses = []
    for u in span:
        lhs = d_mix_sum(md, sp(u)) + apply_sum(sp, d_mix_sum(md, u)).scale(-((-1) ** k))
        rhs = sq(u)
        if not lhs == rhs:
            witnesses.append(f"identity fails on an element of bidegree ({u.p},{u.q})")
    return {
        "name": f"verify-thm33-iii:{phi.name}",
        "status": "FAIL" if witnesses else "PASS",
        "degree": k,
        "spanning_set": len(span),
        "witnesses": witnesses[:3],
    }


def flat_elements(md: MixData, i: Index, keys: Sequence) -> list[dict]:
    """Kernel of ∇_P on the span of the given keys (computed, not assumed)."""
    from .exact_linalg import RationalMatrix, kernel_basis_sparse

    keys = list(keys)
    imgs = [md.nabla_key(k) for k in keys]
    rows = sorted({k for img in imgs for k in img}, key=repr)
    pos = {k: r for r, k in enumerate(rows)}
    ent = {(pos[k], c): v for c, img in enumerate(imgs) for k, v in img.items()}
    basis, _ = kernel_basis_sparse(RationalMatrix(len(rows), len(keys), ent))
    return [{keys[c]: v for c, v in vec.items()} for vec in basis]


def thm33_suite(D: int = 1, N: int = 2, window: int = 1, d: int = 1, seed: int = 0, trials: int = 4) -> dict:
    """Pullback-of-operations checks on the two-chart interpolation fixture."""
    from .cech import p1_two_charts

    rng = random.Random(seed)
    U = p1_two_charts(d, window)
    O = p1_two_charts(0, window)
    checks = []
    sig = two_chart_interpolation(U)
    checks.append(validate_section(sig))
    neg = validate_section(broken_section(U))
    checks.append({"name": "negative-control", "status": "PASS" if neg["status"] == "FAIL" else "FAIL",
                   "witness": neg["witnesses"][0] if neg["witnesses"] else None})

    md = MixData(U, N)
    mdO = MixData(O, N)
    cM = build_mixed(U, D, N, window)
    cO = build_mixed(O, D, N, window)
    span = spanning_set(cM)
    ident = op_identity(md)
    zero = op_scale(ident, 0)

    # (ii): identity pulls back to the identity
    sp_id = sigma_pullback(md, sig, ident)
    ok = all(sp_id(u) == MixSum({(u.p, u.q): u}) for u in span)
    checks.append({"name": "property-ii-identity", "status": "PASS" if ok else "FAIL"})

    # fiber multiplication acts by a_j on charts and t_0 a_0 + t_1 a_1 on the overlap
    zop = op_multiply_z(md)
    sp_z = sigma_pullback(md, sig, zop)
    ok = True
    for u in span[:40]:
        got = sp_z(u)
        for i in md.U.nd_indices():
            sz, _ = section_images(md, sig, i)
            want = b_mul(md, len(i) - 1, sz, mix_to_b(u, i))
            have = b_add(*[mix_to_b(el, i) for el in got.parts.values()])
            if want != have:
                ok = False
    checks.append({"name": "fiber-multiplication", "status": "PASS" if ok else "FAIL"})

    # (i): sums, scalars and composition
    ok = True
    sum_op = op_sum(zop, ident)
    for _ in range(trials):
        u = rng.choice(span)
        if sigma_pullback(md, sig, sum_op)(u) != sp_z(u) + sp_id(u):
            ok = False
        if sigma_pullback(md, sig, op_scale(zop, 3))(u) != sp_z(u).scale(3):
            ok = False
    checks.append({"name": "property-i-linear", "status": "PASS" if ok else "FAIL"})

    ok = True
    mdO2 = MixData(O, N)
    prod = op_product(mdO2)
    dz = op_multiply_z(mdO2, 0, 1)
    zz = op_multiply_z(mdO2, 1, 0)
    sigO = two_chart_interpolation(O)
    spanO = spanning_set(cO)
    sp_prod = sigma_pullback(mdO2, sigO, prod)
    for psis in ((zz, dz), (dz, zz), (dz, dz)):
        comp = op_compose(mdO2, prod, psis)
        sp_comp = sigma_pullback(mdO2, sigO, comp)
        sp1, sp2 = (sigma_pullback(mdO2, sigO, p) for p in psis)
        for _ in range(trials):
            u, v = rng.choice(spanO), rng.choice(spanO)
            lhs = sp_comp(u, v)
            a, b = sp1(u), sp2(v)
            rhs = MixSum()
            sign_b = -1 if (psis[1].degree * u.degree) % 2 else 1
            for x in a.parts.values():
                for y in b.parts.values():
                    rhs = rhs + sp_prod(x, y).scale(sign_b)
            if lhs != rhs:
                ok = False
    checks.append({"name": "property-i-composition", "status": "PASS" if ok else "FAIL"})

    # multilinearity over Mix(O): σ*(z)(x·m) = (-1)^{k|x|} x·σ*(z)(m) for k = 0 and dz (k = 1)
    ok = True
    prodM = op_product(md)
    sp_prodM = sigma_pullback(md, sig, prodM)
    for op_ in (zop, op_multiply_z(md, 0, 1)):
        spo = sigma_pullback(md, sig, op_)
        for _ in range(trials):
            x = rng.choice(spanO)
            mm = rng.choice(span)
            lhs = apply_sum(spo, sp_prodM(x, mm))
            s = -1 if (op_.degree * x.degree) % 2 else 1
            rhs = MixSum()
            for y in spo(mm).parts.values():
                rhs = rhs + sp_prodM(x, y).scale(s)
            if lhs != rhs:
                ok = False
    checks.append({"name": "mix-multilinear", "status": "PASS" if ok else "FAIL"})

    # (iii) on the full covering: identity and fiber multiplication
    keys0 = lambda i: [k for p in range(md.n + 1) for piece in md.pieces(window) for k in md.keys(i, p, piece)][:12]
    checks.append(verify_thm33_iii(md, sig, ident, zero, span, keys0))
    checks.append(verify_thm33_iii(md, sig, zop, op_multiply_z(md, 0, 1), span, keys0))

    # over V = U_0, where t and r = p_2^*(x) are global: flat and non-flat multiplication
    mdV = MixData(U, N, over=0)
    sigV = two_chart_interpolation(U, over=0)
    cV = build_mixed(U, D, N, window, over=0)
    spanV = spanning_set(cV)
    n = mdV.n
    cand = [((), (0,), ("m", 0, (1,))), ((), (1,), ("m", 0, (0,)))]
    flats = flat_elements(mdV, (0,), cand)
    r_elem = flats[0] if flats else {}
    t_elem = {((), (1,), ("m", 0, (0,))): Fraction(1)}
    ds_elem = {((1,), (0,), ("m", 0, (0,))): Fraction(-1)}
    keysV = lambda i: [k for p in range(n + 1) for piece in mdV.pieces(window) for k in mdV.keys(i, p, piece)][:12]
    flat_op = op_multiply_element(mdV, lambda i: r_elem, 0, "flat")
    t_op = op_multiply_element(mdV, lambda i: t_elem, 0, "t1")
    psi_t = op_multiply_element(mdV, lambda i: ds_elem, 1, "nabla(t1)")
    checks.append({"name": "flat-element-found", "status": "PASS" if r_elem else "FAIL",
                   "element": repr(sorted(r_elem.items(), key=repr))})
    checks.append(verify_thm33_iii(mdV, sigV, flat_op, op_scale(op_multiply_element(mdV, lambda i: {}, 1, "0"), 0),
                                   spanV, keysV))
    checks.append(verify_thm33_iii(mdV, sigV, t_op, psi_t, spanV, keysV))

    # (ii) for φ = π^*(φ_0): σ*(φ) equals Ñ C(U, φ_0), computed independently
    ok = True
    spt = sigma_pullback(mdV, sigV, t_op)
    spd = sigma_pullback(mdV, sigV, psi_t)
    for u in spanV:
        if spt(u) != cech_pullback(mdV, lambda i: t_elem, 0, u):
            ok = False
        if spd(u) != cech_pullback(mdV, lambda i: ds_elem, 1, u):
            ok = False
    checks.append({"name": "property-ii-pulled-back", "status": "PASS" if ok else "FAIL"})

    status = "PASS" if all(c["status"] == "PASS" for c in checks) else "FAIL"
    return {"name": "verify-thm33", "status": status, "D": D, "N": N, "window": window, "d": d,
            "seed": seed, "checks": checks}
