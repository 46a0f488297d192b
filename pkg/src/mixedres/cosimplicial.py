"""Cosimplicial modules of covering type and their two normalizations.

A :class:`CosimplicialModuleQ` is given by finite section spaces on the
nondegenerate multi-indices of ``Δ^m`` together with restriction matrices for
codimension-one inclusions.  Level q is the product over *all* ``i`` in
``Δ^m_q`` of the space on the support of ``i``; structure maps reindex and
restrict.

Thom-Sullivan cochains are stored on nondegenerate indices only.  Forms on
``Δ^l`` are truncated by weight (coefficient degree plus form degree) at
``D + m``; this filtrand is closed under d and under every simplicial
pullback, and each weight piece satisfies the Poincaré lemma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Mapping, Sequence

from . import delta_cat as dc
from .exact_linalg import (
    ChainComplexQ,
    ChainMapQ,
    LinAlgError,
    RationalMatrix,
    kernel_basis_sparse,
    vstack,
)
from .simplex_forms import PolyForm, d as form_d, form_basis, integrate, pullback, whitney

Index = tuple[int, ...]
SparseVec = dict[int, Fraction]


class CosimplicialError(ValueError):
    pass


def _restrict_vec(mat: RationalMatrix, vec: Mapping[int, Fraction]) -> SparseVec:
    return mat.apply(vec) if vec else {}


@dataclass(frozen=True)
class CosimplicialModuleQ:
    """Cosimplicial Q-module of covering type over ``Δ^m``.

    ``bases[i]`` lists basis labels of the section space on ``U_i`` for every
    nondegenerate ``i``; ``restrictions[(j, i)]`` is the matrix of the
    restriction from ``U_j`` to ``U_i`` where ``j`` drops one vertex of ``i``.
    ``grading`` optionally assigns an integer degree to every label; all
    restrictions must be homogeneous of degree zero.
    """

    m: int
    bases: Mapping[Index, tuple[Hashable, ...]]
    restrictions: Mapping[tuple[Index, Index], RationalMatrix]
    grading: Mapping[Index, tuple[int, ...]] | None = None

    def __post_init__(self):
        for i in self.nd_indices():
            if i not in self.bases:
                raise CosimplicialError(f"missing section space for {i}")
        for i in self.nd_indices():
            for j in self.codim_one_faces(i):
                mat = self.restrictions.get((j, i))
                if mat is None:
                    raise CosimplicialError(f"missing restriction {j} -> {i}")
                if mat.shape != (self.dim(i), self.dim(j)):
                    raise CosimplicialError(f"restriction {j} -> {i} has wrong shape {mat.shape}")

    # indices ----------------------------------------------------------
    def nd_indices(self, q: int | None = None) -> list[Index]:
        if q is not None:
            return dc.nondegenerate_multiindices(self.m, q)
        return [i for k in range(self.m + 1) for i in dc.nondegenerate_multiindices(self.m, k)]

    @staticmethod
    def codim_one_faces(i: Index) -> list[Index]:
        if len(i) < 2:
            return []
        return [i[:k] + i[k + 1:] for k in range(len(i))]

    def dim(self, i: Index) -> int:
        return len(self.bases[dc.support(i)])

    # restrictions -----------------------------------------------------
    def restriction(self, sub: Index, sup: Index) -> RationalMatrix:
        """Restriction from ``U_sub`` to ``U_sup`` for nondegenerate ``sub ⊆ sup``."""
        return self._restriction(tuple(sub), tuple(sup))

    @cached_property
    def _cache(self) -> dict:
        return {}

    def _restriction(self, sub: Index, sup: Index) -> RationalMatrix:
        key = (sub, sup)
        if key in self._cache:
            return self._cache[key]
        if not set(sub) <= set(sup):
            raise CosimplicialError(f"{sub} is not contained in {sup}")
        if sub == sup:
            out = RationalMatrix.identity(self.dim(sup))
        elif len(sup) - len(sub) == 1:
            out = self.restrictions[(sub, sup)]
        else:
            extra = [v for v in sup if v not in sub]
            mid = tuple(v for v in sup if v != extra[-1])
            out = self._restriction(mid, sup) @ self._restriction(sub, mid)
        self._cache[key] = out
        return out

    def check_restrictions_commute(self) -> list[str]:
        """Witnesses of failed commutation among codimension-two chains (empty if fine)."""
        bad = []
        for i in self.nd_indices():
            if len(i) < 3:
                continue
            for a in range(len(i)):
                for b in range(a + 1, len(i)):
                    j = tuple(v for k, v in enumerate(i) if k not in (a, b))
                    ja = i[:a] + i[a + 1:]
                    jb = i[:b] + i[b + 1:]
                    p1 = self.restrictions[(ja, i)] @ self.restrictions[(j, ja)]
                    p2 = self.restrictions[(jb, i)] @ self.restrictions[(j, jb)]
                    if p1 != p2:
                        diff = (p1 - p2).entries
                        (r, c), _ = sorted(diff.items())[0]
                        bad.append(
                            f"restrictions {j}->{ja}->{i} and {j}->{jb}->{i} differ on "
                            f"{self.bases[j][c]!r} (component {self.bases[i][r]!r})"
                        )
        return bad

    # levels -----------------------------------------------------------
    def level_layout(self, q: int) -> list[tuple[Index, Hashable]]:
        return [(i, k) for i in dc.all_multiindices(self.m, q) for k in self.bases[dc.support(i)]]

    def level_offsets(self, q: int) -> dict[Index, int]:
        out, pos = {}, 0
        for i in dc.all_multiindices(self.m, q):
            out[i] = pos
            pos += self.dim(i)
        return out

    def level_dim(self, q: int) -> int:
        return sum(self.dim(i) for i in dc.all_multiindices(self.m, q))

    def structure_map(self, alpha: dc.SimplicialMap) -> RationalMatrix:
        """Matrix of ``alpha^*`` from level ``alpha.source_dim`` to level ``alpha.target_dim``."""
        p, q = alpha.source_dim, alpha.target_dim
        src_off = self.level_offsets(p)
        ent = {}
        row0 = 0
        for i in dc.all_multiindices(self.m, q):
            j = dc.act(i, alpha)
            res = self.restriction(dc.support(j), dc.support(i))
            c0 = src_off[j]
            for (r, c), v in res.entries.items():
                ent[(row0 + r, c0 + c)] = v
            row0 += self.dim(i)
        return RationalMatrix(self.level_dim(q), self.level_dim(p), ent)

    # grading ----------------------------------------------------------
    def degrees(self) -> list[int]:
        if self.grading is None:
            return [0]
        return sorted({g for gs in self.grading.values() for g in gs})

    def piece(self, g: int) -> "CosimplicialModuleQ":
        """Sub-module spanned by labels of degree g."""
        if self.grading is None:
            return self
        keep = {i: [k for k, gg in enumerate(self.grading[i]) if gg == g] for i in self.nd_indices()}
        bases = {i: tuple(self.bases[i][k] for k in keep[i]) for i in keep}
        restr = {}
        for (j, i), mat in self.restrictions.items():
            rpos = {k: n for n, k in enumerate(keep[i])}
            cpos = {k: n for n, k in enumerate(keep[j])}
            ent = {}
            for (r, c), v in mat.entries.items():
                if c in cpos:
                    if r not in rpos:
                        raise CosimplicialError(f"restriction {j}->{i} is not homogeneous")
                    ent[(rpos[r], cpos[c])] = v
            restr[(j, i)] = RationalMatrix(len(keep[i]), len(keep[j]), ent)
        grading = {i: tuple(g for _ in keep[i]) for i in keep}
        return CosimplicialModuleQ(self.m, bases, restr, grading)

    def nonempty_pieces(self) -> list["CosimplicialModuleQ"]:
        out = []
        for g in self.degrees():
            p = self.piece(g)
            if any(p.bases[i] for i in p.nd_indices()):
                out.append(p)
        return out


def constant_module(m: int = 0, dim: int = 1) -> CosimplicialModuleQ:
    """Constant cosimplicial module Q^dim with identity structure maps."""
    labels = tuple(range(dim))
    nds = [i for k in range(m + 1) for i in dc.nondegenerate_multiindices(m, k)]
    bases = {i: labels for i in nds}
    restr = {}
    for i in nds:
        for j in CosimplicialModuleQ.codim_one_faces(i):
            restr[(j, i)] = RationalMatrix.identity(dim)
    return CosimplicialModuleQ(m, bases, restr)


# ---------------------------------------------------------------------------
# standard normalization


@dataclass(frozen=True)
class NormalizedComplex:
    """``N M`` with the embedding of each ``N^q`` into level q."""

    module: CosimplicialModuleQ
    complex: ChainComplexQ
    basis: Mapping[int, list[SparseVec]]
    free: Mapping[int, tuple[int, ...]]

    def coordinates(self, q: int, vec: Mapping[int, Fraction]) -> SparseVec:
        return {n: vec[c] for n, c in enumerate(self.free[q]) if vec.get(c)}

    def embed(self, q: int, coords: Mapping[int, Fraction]) -> SparseVec:
        out: SparseVec = {}
        for n, x in coords.items():
            for c, v in self.basis[q][n].items():
                out[c] = out.get(c, 0) + x * v
        return {c: v for c, v in out.items() if v}


def coface_sum(M: CosimplicialModuleQ, q: int) -> RationalMatrix:
    """``Σ_i (-1)^i ∂^i`` from level q to level q+1."""
    total = RationalMatrix.zero(M.level_dim(q + 1), M.level_dim(q))
    for i in range(q + 2):
        total = total + M.structure_map(dc.face(i, q)).scale((-1) ** i)
    return total


def standard_normalization_data(M: CosimplicialModuleQ, top: int | None = None) -> NormalizedComplex:
    """Intersection of codegeneracy kernels with the alternating coface differential."""
    top = M.m + 1 if top is None else top
    basis, free, dims = {}, {}, {}
    for q in range(top + 1):
        if q == 0:
            n = M.level_dim(0)
            basis[0] = [{k: Fraction(1)} for k in range(n)]
            free[0] = tuple(range(n))
        else:
            s = vstack([M.structure_map(dc.degeneracy(i, q)) for i in range(q)], cols=M.level_dim(q))
            basis[q], free[q] = kernel_basis_sparse(s)
        dims[q] = len(basis[q])
    diffs = {}
    for q in range(top):
        delta = coface_sum(M, q)
        cols = []
        for v in basis[q]:
            img = delta.apply(v)
            coords = {n: img[c] for n, c in enumerate(free[q + 1]) if img.get(c)}
            cols.append(coords)
            # the image must already lie in N^{q+1}
        diffs[q] = RationalMatrix.from_columns(dims[q + 1], cols)
    cx = ChainComplexQ(dims, diffs)
    return NormalizedComplex(M, cx, basis, free)


def standard_normalization(M: CosimplicialModuleQ) -> ChainComplexQ:
    return standard_normalization_data(M).complex


def nondegenerate_cech_complex(M: CosimplicialModuleQ) -> ChainComplexQ:
    """Alternating Čech complex on nondegenerate indices (the right side of the iso N ≅ ⊕ M(U_i))."""
    dims, diffs, offs = {}, {}, {}
    for q in range(M.m + 1):
        pos = 0
        offs[q] = {}
        for i in M.nd_indices(q):
            offs[q][i] = pos
            pos += M.dim(i)
        dims[q] = pos
    for q in range(M.m):
        ent = {}
        for i in M.nd_indices(q + 1):
            for k in range(len(i)):
                j = i[:k] + i[k + 1:]
                for (r, c), v in M.restrictions[(j, i)].entries.items():
                    key = (offs[q + 1][i] + r, offs[q][j] + c)
                    ent[key] = ent.get(key, 0) + (-1) ** k * v
        diffs[q] = RationalMatrix(dims[q + 1], dims[q], ent)
    return ChainComplexQ(dims, diffs)


# ---------------------------------------------------------------------------
# Thom-Sullivan cochains


@dataclass
class TSElement:
    """Compatible family of form-valued components on nondegenerate indices.

    ``components[i]`` maps ``((a, I), label_position)`` to a coefficient, where
    ``(a, I)`` is a monomial ``t^a dt_I`` on ``Δ^{dim i}``.
    """

    form_degree: int
    components: dict[Index, dict[tuple, Fraction]] = field(default_factory=dict)

    def component_form(self, i: Index, pos: int) -> PolyForm:
        l = len(i) - 1
        return PolyForm(l, {fk: c for (fk, p), c in self.components.get(i, {}).items() if p == pos})

    def is_zero(self) -> bool:
        return not any(self.components.values())

    def __add__(self, other: "TSElement") -> "TSElement":
        out = {i: dict(c) for i, c in self.components.items()}
        for i, comp in other.components.items():
            tgt = out.setdefault(i, {})
            for k, v in comp.items():
                w = tgt.get(k, 0) + v
                if w:
                    tgt[k] = w
                else:
                    tgt.pop(k, None)
        return TSElement(self.form_degree, out)

    def scale(self, s) -> "TSElement":
        s = Fraction(s)
        return TSElement(
            self.form_degree,
            {i: {k: s * v for k, v in c.items() if s * v} for i, c in self.components.items()},
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TSElement):
            return NotImplemented
        a = {i: c for i, c in self.components.items() if c}
        b = {i: c for i, c in other.components.items() if c}
        return a == b


def _apply_restriction(M: CosimplicialModuleQ, sub: Index, sup: Index, comp: Mapping[tuple, Fraction]) -> dict:
    """Apply ``1 ⊗ res`` to a component living on ``sub``."""
    if sub == sup:
        return dict(comp)
    mat = M.restriction(sub, sup)
    cols = mat.col_dicts()
    out: dict[tuple, Fraction] = {}
    for (fk, p), c in comp.items():
        for r, v in cols[p].items():
            key = (fk, r)
            out[key] = out.get(key, 0) + c * v
    return {k: v for k, v in out.items() if v}


def _apply_pullback(alpha: dc.SimplicialMap, comp: Mapping[tuple, Fraction]) -> dict:
    """Apply ``alpha_* ⊗ 1`` to a component."""
    by_pos: dict[int, dict] = {}
    for (fk, p), c in comp.items():
        by_pos.setdefault(p, {})[fk] = c
    out: dict[tuple, Fraction] = {}
    for p, terms in by_pos.items():
        f = pullback(alpha, PolyForm(alpha.target_dim, terms))
        for fk, c in f.terms.items():
            out[(fk, p)] = c
    return out


def matching_defects(M: CosimplicialModuleQ, u: TSElement) -> list[str]:
    """Face conditions on nondegenerate indices; returns witnesses of failure."""
    bad = []
    for i in M.nd_indices():
        l = len(i) - 1
        if l < 1:
            continue
        ui = u.components.get(i, {})
        for k in range(l + 1):
            j = i[:k] + i[k + 1:]
            lhs = _apply_pullback(dc.face(k, l - 1), ui)
            rhs = _apply_restriction(M, j, i, u.components.get(j, {}))
            if lhs != rhs:
                bad.append(f"face {k} of index {i}")
    return bad


def reconstruct(M: CosimplicialModuleQ, u: TSElement, i: Index) -> dict:
    """Component on any (possibly degenerate) multi-index ``i``."""
    nd, sigma = dc.degeneracy_decomposition(tuple(i))
    comp = u.components.get(nd, {})
    if sigma.source_dim == sigma.target_dim:
        return dict(comp)
    return _apply_pullback(sigma, comp)


def full_matching_defects(M: CosimplicialModuleQ, u: TSElement, level_bound: int | None = None) -> list[str]:
    """Check the matching condition for every α ∈ Δ^l_k with k, l <= level_bound."""
    top = M.m + 1 if level_bound is None else level_bound
    bad = []
    comps = {l: {i: reconstruct(M, u, i) for i in dc.all_multiindices(M.m, l)} for l in range(top + 1)}
    for l in range(top + 1):
        for k in range(top + 1):
            for alpha in dc.enumerate_maps(k, l):
                for i in dc.all_multiindices(M.m, l):
                    j = dc.act(i, alpha)
                    lhs = _apply_restriction(M, dc.support(j), dc.support(i), comps[k][j])
                    rhs = _apply_pullback(alpha, comps[l][i])
                    if lhs != rhs:
                        bad.append(f"alpha={alpha.values} index={i}")
    return bad


class TSComplex:
    """The complete Thom-Sullivan normalization of M at weight budget D + m."""

    def __init__(self, M: CosimplicialModuleQ, D: int):
        if D < 1:
            raise CosimplicialError("D must be at least 1 (Whitney forms have coefficient degree 1)")
        self.M = M
        self.D = D
        self.weight = D + M.m
        self.layout: dict[int, list[tuple[Index, tuple, int]]] = {}
        self.index: dict[int, dict[tuple[Index, tuple, int], int]] = {}
        self.basis: dict[int, list[SparseVec]] = {}
        self.free: dict[int, tuple[int, ...]] = {}
        for q in range(M.m + 1):
            self._build_degree(q)
        diffs = {q: self._differential(q) for q in range(M.m)}
        dims = {q: len(self.basis[q]) for q in range(M.m + 1)}
        self.complex = ChainComplexQ(dims, diffs)

    # assembly ---------------------------------------------------------
    def _build_degree(self, q: int) -> None:
        M = self.M
        lay = []
        for i in M.nd_indices():
            l = len(i) - 1
            for fk in form_basis(l, q, self.weight):
                for p in range(M.dim(i)):
                    lay.append((i, fk, p))
        idx = {x: n for n, x in enumerate(lay)}
        self.layout[q], self.index[q] = lay, idx
        rows: dict[tuple, dict[int, Fraction]] = {}
        for n, (i, fk, p) in enumerate(lay):
            l = len(i) - 1
            if l < 1:
                continue
            for k in range(l + 1):
                if l - 1 < q:
                    continue
                img = _apply_pullback(dc.face(k, l - 1), {(fk, p): Fraction(1)})
                for (gk, pp), c in img.items():
                    row = rows.setdefault((i, k, gk, pp), {})
                    row[n] = row.get(n, 0) + c
        for n, (j, fk, p) in enumerate(lay):
            for i in M.nd_indices(len(j)):
                if not set(j) <= set(i):
                    continue
                k = next(t for t in range(len(i)) if i[t] not in j)
                col = M.restrictions[(j, i)].col_dicts()[p]
                for r, v in col.items():
                    key = (i, k, fk, r)
                    row = rows.setdefault(key, {})
                    row[n] = row.get(n, 0) - v
        ent = {}
        for rn, key in enumerate(sorted(rows, key=repr)):
            for c, v in rows[key].items():
                if v:
                    ent[(rn, c)] = v
        cons = RationalMatrix(len(rows), len(lay), ent)
        self.basis[q], self.free[q] = kernel_basis_sparse(cons)

    def _differential(self, q: int) -> RationalMatrix:
        cols = []
        for v in self.basis[q]:
            img = self.apply_form_map(q, q + 1, v, lambda f: form_d(f))
            cols.append(self.coordinates(q + 1, img))
        return RationalMatrix.from_columns(len(self.basis[q + 1]), cols)

    # conversions ------------------------------------------------------
    def coordinates(self, q: int, vec: Mapping[int, Fraction]) -> SparseVec:
        """Coordinates of an ambient vector known to lie in Ñ^q."""
        if q not in self.free:
            if any(vec.values()):
                raise CosimplicialError(f"nonzero vector in degree {q} outside the complex")
            return {}
        return {n: vec[c] for n, c in enumerate(self.free[q]) if vec.get(c)}

    def ambient(self, q: int, coords: Mapping[int, Fraction]) -> SparseVec:
        out: SparseVec = {}
        for n, x in coords.items():
            for c, v in self.basis[q][n].items():
                out[c] = out.get(c, 0) + x * v
        return {c: v for c, v in out.items() if v}

    def to_element(self, q: int, vec: Mapping[int, Fraction]) -> TSElement:
        comps: dict[Index, dict] = {}
        for c, v in vec.items():
            i, fk, p = self.layout[q][c]
            comps.setdefault(i, {})[(fk, p)] = v
        return TSElement(q, comps)

    def from_element(self, u: TSElement) -> SparseVec:
        """Ambient vector of u; raises if u leaves the weight budget."""
        q = u.form_degree
        if q not in self.index:
            if u.is_zero():
                return {}
            raise CosimplicialError(f"no Thom-Sullivan cochains in degree {q}")
        idx = self.index[q]
        out = {}
        for i, comp in u.components.items():
            for (fk, p), c in comp.items():
                key = (i, fk, p)
                if key not in idx:
                    raise CosimplicialError(f"term {key} exceeds weight budget {self.weight}")
                out[idx[key]] = c
        return out

    def element(self, q: int, coords: Mapping[int, Fraction]) -> TSElement:
        return self.to_element(q, self.ambient(q, coords))

    def element_coordinates(self, u: TSElement) -> SparseVec:
        vec = self.from_element(u)
        coords = self.coordinates(u.form_degree, vec)
        if self.ambient(u.form_degree, coords) != vec:
            raise CosimplicialError("element violates the matching condition")
        return coords

    def apply_form_map(self, q: int, q2: int, vec: Mapping[int, Fraction], fn: Callable[[PolyForm], PolyForm]) -> SparseVec:
        """Apply a form operator ``fn`` (degree q -> q2) componentwise to an ambient vector."""
        if q2 not in self.index:
            return {}
        idx2 = self.index[q2]
        grouped: dict[tuple[Index, int], dict] = {}
        for c, v in vec.items():
            i, fk, p = self.layout[q][c]
            grouped.setdefault((i, p), {})[fk] = v
        out: SparseVec = {}
        for (i, p), terms in grouped.items():
            img = fn(PolyForm(len(i) - 1, terms))
            for fk, c in img.terms.items():
                n = idx2[(i, fk, p)]
                out[n] = out.get(n, 0) + c
        return {c: v for c, v in out.items() if v}

    def differential(self, u: TSElement) -> TSElement:
        comps = {}
        for i, comp in u.components.items():
            by_pos: dict[int, dict] = {}
            for (fk, p), c in comp.items():
                by_pos.setdefault(p, {})[fk] = c
            new = {}
            for p, terms in by_pos.items():
                for fk, c in form_d(PolyForm(len(i) - 1, terms)).terms.items():
                    new[(fk, p)] = c
            comps[i] = new
        return TSElement(u.form_degree + 1, comps)


def ts_complex(M: CosimplicialModuleQ, D: int) -> ChainComplexQ:
    return TSComplex(M, D).complex


# ---------------------------------------------------------------------------
# integration and the Whitney section


def integrate_ts(M: CosimplicialModuleQ, u: TSElement) -> SparseVec:
    """∫_Δ u as a vector in level ``u.form_degree`` (zero on degenerate indices)."""
    q = u.form_degree
    offs = M.level_offsets(q)
    out: SparseVec = {}
    for i in M.nd_indices(q):
        comp = u.components.get(i, {})
        by_pos: dict[int, dict] = {}
        for (fk, p), c in comp.items():
            by_pos.setdefault(p, {})[fk] = c
        for p, terms in by_pos.items():
            val = integrate(PolyForm(q, terms))
            if val:
                out[offs[i] + p] = val
    return out


def whitney_section(M: CosimplicialModuleQ, q: int, cochain: Mapping[int, Fraction]) -> TSElement:
    """Whitney lift of a normalized cochain given as a level-q vector."""
    offs = M.level_offsets(q)
    values = {}
    for i in M.nd_indices(q):
        vec = {p: cochain[offs[i] + p] for p in range(M.dim(i)) if cochain.get(offs[i] + p)}
        if vec:
            values[i] = vec
    comps: dict[Index, dict] = {}
    for i in M.nd_indices():
        l = len(i) - 1
        if l < q:
            continue
        acc: dict[tuple, Fraction] = {}
        for face in dc.nondegenerate_multiindices(l, q):
            sub = tuple(i[v] for v in face)
            if sub not in values:
                continue
            res = M.restriction(sub, i).apply(values[sub])
            w = whitney(face, l)
            for fk, c in w.terms.items():
                for p, x in res.items():
                    acc[(fk, p)] = acc.get((fk, p), 0) + c * x
        comps[i] = {k: v for k, v in acc.items() if v}
    return TSElement(q, comps)


@dataclass
class ComparisonMaps:
    ts: TSComplex
    normalized: NormalizedComplex
    integration: ChainMapQ
    whitney: ChainMapQ


def comparison_maps(M: CosimplicialModuleQ, D: int, ts: TSComplex | None = None,
                    normalized: NormalizedComplex | None = None) -> ComparisonMaps:
    """∫_Δ : Ñ M -> N M and the Whitney section W : N M -> Ñ M as chain maps."""
    ts = ts or TSComplex(M, D)
    nz = normalized or standard_normalization_data(M)
    integ, whit = {}, {}
    for q in range(M.m + 1):
        cols = []
        for v in ts.basis[q]:
            u = ts.to_element(q, v)
            cols.append(nz.coordinates(q, integrate_ts(M, u)))
        integ[q] = RationalMatrix.from_columns(nz.complex.dim(q), cols)
        cols = []
        for v in nz.basis.get(q, []):
            u = whitney_section(M, q, v)
            cols.append(ts.element_coordinates(u))
        whit[q] = RationalMatrix.from_columns(ts.complex.dim(q), cols)
    return ComparisonMaps(
        ts,
        nz,
        ChainMapQ(ts.complex, nz.complex, integ),
        ChainMapQ(nz.complex, ts.complex, whit),
    )


# ---------------------------------------------------------------------------
# multilinear assembly


def assemble_multilinear(
    M_out: CosimplicialModuleQ,
    family: Callable[[Index, Sequence[dict]], dict],
    args: Sequence[TSElement],
    degree: int = 0,
) -> TSElement:
    """Apply a per-index family to r Thom-Sullivan cochains and verify the result matches.

    ``family(i, comps)`` receives the components of the arguments at the
    nondegenerate index ``i`` and returns the output component.  The output
    form degree is the sum of the argument degrees plus ``degree``.
    """
    q = sum(u.form_degree for u in args) + degree
    comps = {}
    for i in M_out.nd_indices():
        comps[i] = family(i, [u.components.get(i, {}) for u in args])
    out = TSElement(q, comps)
    bad = matching_defects(M_out, out)
    if bad:
        raise CosimplicialError(f"family is not simplicially compatible at {bad[0]}")
    return out


def wedge_components(
    l: int,
    a: Mapping[tuple, Fraction],
    b: Mapping[tuple, Fraction],
    label_product: Callable[[int, int], Mapping[int, Fraction]],
    label_degree: Callable[[int], int] = lambda p: 0,
) -> dict:
    """(ω ⊗ x)(η ⊗ y) = (-1)^{|x||η|} (ω ∧ η) ⊗ xy on one index."""
    from .simplex_forms import wedge

    out: dict[tuple, Fraction] = {}
    for (fa, pa), ca in a.items():
        for (fb, pb), cb in b.items():
            prod = label_product(pa, pb)
            if not prod:
                continue
            sign = -1 if (label_degree(pa) * len(fb[1])) % 2 else 1
            w = wedge(PolyForm(l, {fa: 1}), PolyForm(l, {fb: 1}))
            for fk, cw in w.terms.items():
                for p, cp in prod.items():
                    key = (fk, p)
                    out[key] = out.get(key, 0) + sign * ca * cb * cw * cp
    return {k: v for k, v in out.items() if v}


__all__ = [
    "CosimplicialError",
    "CosimplicialModuleQ",
    "ComparisonMaps",
    "LinAlgError",
    "NormalizedComplex",
    "TSComplex",
    "TSElement",
    "assemble_multilinear",
    "comparison_maps",
    "constant_module",
    "full_matching_defects",
    "integrate_ts",
    "matching_defects",
    "nondegenerate_cech_complex",
    "reconstruct",
    "standard_normalization",
    "standard_normalization_data",
    "ts_complex",
    "wedge_components",
    "whitney_section",
]
