"""Adically truncated principal parts on a chart with étale coordinates.

On a chart with coordinates ``s_1..s_n`` write ``r_i = 1 ⊗ s_i`` (second
factor) and ``t_i = r_i - s_i``.  An element of ``Ω^p ⊗ P`` is stored as a
combination of ``ds_I · t^a · r^c`` where ``r^c`` is a coefficient pulled back
along the second projection.  In this basis the Grothendieck connection is
``r``-linear and sends ``t_i`` to ``-ds_i``.

Order N keeps the terms with ``|a| + |I| <= N``.  That is the quotient of
``Ω ⊗ P`` by the subcomplex ``Σ_p Ω^p ⊗ I^{N+1-p}``, which is stable under
∇ and is an ideal, so the order-N object is again a DG algebra.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Mapping

from .exact_linalg import ChainComplexQ, RationalMatrix, cohomology_dims
from .simplex_forms import exponents

PKey = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]  # (I, a, c)


class PrincipalPartsError(ValueError):
    pass


def _merge(i: tuple[int, ...], j: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    if set(i) & set(j):
        return 0, ()
    inv = sum(1 for x in i for y in j if x > y)
    return (-1 if inv % 2 else 1), tuple(sorted(i + j))


def _binom(e: int, k: int) -> Fraction:
    """Generalized binomial coefficient e choose k for any integer e."""
    num = Fraction(1)
    for j in range(k):
        num *= Fraction(e - j, j + 1)
    return num


@dataclass(frozen=True)
class Chart:
    """Chart with n étale coordinates; ``invertible[i]`` allows negative powers of s_i."""

    n: int
    invertible: tuple[bool, ...] = ()
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.invertible:
            object.__setattr__(self, "invertible", (False,) * self.n)
        if not self.names:
            object.__setattr__(self, "names", tuple(f"s{k + 1}" for k in range(self.n)))


@dataclass(frozen=True)
class PPElement:
    """Element of the order-N truncation of ``Ω ⊗ P`` on a chart."""

    chart: Chart
    order: int
    terms: Mapping[PKey, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        n = self.chart.n
        for (i, a, c), v in self.terms.items():
            if len(a) != n or len(c) != n:
                raise PrincipalPartsError(f"bad exponent lengths in {(i, a, c)}")
            for k, e in enumerate(c):
                if e < 0 and not self.chart.invertible[k]:
                    raise PrincipalPartsError(f"negative power of r{k + 1} on a chart where it is not invertible")
            if sum(a) + len(i) > self.order:
                continue
            if v:
                clean[(tuple(i), tuple(a), tuple(c))] = Fraction(v)
        object.__setattr__(self, "terms", clean)

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart, order: int) -> "PPElement":
        return cls(chart, order, {})

    @classmethod
    def one(cls, chart: Chart, order: int) -> "PPElement":
        z = (0,) * chart.n
        return cls(chart, order, {((), z, z): Fraction(1)})

    @classmethod
    def t(cls, chart: Chart, order: int, k: int) -> "PPElement":
        z = (0,) * chart.n
        a = tuple(1 if j == k else 0 for j in range(chart.n))
        return cls(chart, order, {((), a, z): Fraction(1)})

    @classmethod
    def r(cls, chart: Chart, order: int, k: int, power: int = 1) -> "PPElement":
        """``p_2^*(s_k^power)``."""
        z = (0,) * chart.n
        c = tuple(power if j == k else 0 for j in range(chart.n))
        return cls(chart, order, {((), z, c): Fraction(1)})

    @classmethod
    def ds(cls, chart: Chart, order: int, k: int) -> "PPElement":
        z = (0,) * chart.n
        return cls(chart, order, {((k + 1,), z, z): Fraction(1)})

    @classmethod
    def p1(cls, chart: Chart, order: int, exps: tuple[int, ...]) -> "PPElement":
        """``p_1^*(s^exps) = (r - t)^exps`` expanded to adic order."""
        out = cls.one(chart, order)
        for k, e in enumerate(exps):
            if e:
                out = out * _p1_power(chart, order, k, e)
        return out

    @classmethod
    def p2(cls, chart: Chart, order: int, exps: tuple[int, ...]) -> "PPElement":
        z = (0,) * chart.n
        return cls(chart, order, {((), z, tuple(exps)): Fraction(1)})

    # structure --------------------------------------------------------
    def _same(self, other: "PPElement") -> None:
        if self.chart != other.chart:
            raise PrincipalPartsError("elements live on different charts")

    def with_order(self, order: int) -> "PPElement":
        return PPElement(self.chart, order, self.terms)

    def __add__(self, other: "PPElement") -> "PPElement":
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PPElement(self.chart, min(self.order, other.order), out)

    def __neg__(self) -> "PPElement":
        return PPElement(self.chart, self.order, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "PPElement") -> "PPElement":
        return self + (-other)

    def scale(self, s) -> "PPElement":
        s = Fraction(s)
        return PPElement(self.chart, self.order, {k: s * v for k, v in self.terms.items()})

    def __mul__(self, other: "PPElement") -> "PPElement":
        self._same(other)
        order = min(self.order, other.order)
        out: dict[PKey, Fraction] = {}
        for (i, a, c), v in self.terms.items():
            for (j, b, e), w in other.terms.items():
                sgn, ij = _merge(i, j)
                if not sgn:
                    continue
                ab = tuple(x + y for x, y in zip(a, b))
                if sum(ab) + len(ij) > order:
                    continue
                key = (ij, ab, tuple(x + y for x, y in zip(c, e)))
                out[key] = out.get(key, 0) + sgn * v * w
        return PPElement(self.chart, order, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PPElement):
            return NotImplemented
        return self.chart == other.chart and self.order == other.order and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.chart, self.order, frozenset(self.terms.items())))

    def degrees(self) -> set[int]:
        return {len(i) for (i, _, _) in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = self.chart.names
        parts = []
        for (i, a, c), v in sorted(self.terms.items()):
            bits = []
            bits += [f"t{k + 1}^{e}" if e != 1 else f"t{k + 1}" for k, e in enumerate(a) if e]
            bits += [f"r{k + 1}^{e}" if e != 1 else f"r{k + 1}" for k, e in enumerate(c) if e]
            bits += [f"d{names[x - 1]}" for x in i]
            parts.append(f"{v}*{'·'.join(bits) or '1'}")
        return " + ".join(parts)


def _p1_power(chart: Chart, order: int, k: int, e: int) -> PPElement:
    """``(r_k - t_k)^e`` with a t-adic expansion when e < 0."""
    n = chart.n
    z = (0,) * n
    terms = {}
    top = e if e >= 0 else order
    for j in range(min(top, order) + 1):
        coef = _binom(e, j) * (-1) ** j
        if coef:
            a = tuple(j if q == k else 0 for q in range(n))
            c = tuple(e - j if q == k else 0 for q in range(n))
            terms[((), a, c)] = coef
    return PPElement(chart, order, terms)


# ---------------------------------------------------------------------------
# connection


def grothendieck_connection(x: PPElement) -> PPElement:
    """∇_P, extended to forms: ∇(ds_I t^a r^c) = (-1)^{|I|} ds_I ∧ Σ_k a_k t^{a-e_k} (-ds_k) r^c.

    The result is taken at the same order; terms that fall outside it are the
    ones the quotient discards.
    """
    out: dict[PKey, Fraction] = {}
    for (i, a, c), v in x.terms.items():
        sign_i = -1 if len(i) % 2 else 1
        for k, e in enumerate(a):
            if not e:
                continue
            sgn, ik = _merge(i, (k + 1,))
            if not sgn:
                continue
            b = a[:k] + (e - 1,) + a[k + 1:]
            key = (ik, b, c)
            out[key] = out.get(key, 0) + sign_i * sgn * (-e) * v
    return PPElement(x.chart, x.order, out)


def first_factor_form(chart: Chart, order: int, form: Mapping[tuple[tuple[int, ...], tuple[int, ...]], Fraction]) -> PPElement:
    """A chart form Σ f s^e ds_I (coefficients in the first factor) as an element of Ω ⊗ P."""
    out = PPElement.zero(chart, order)
    z = (0,) * chart.n
    for (e, i), v in form.items():
        piece = PPElement.p1(chart, order, e) * PPElement(chart, order, {(tuple(i), z, z): Fraction(1)})
        out = out + piece.scale(v)
    return out


def de_rham_d(chart: Chart, form: Mapping[tuple[tuple[int, ...], tuple[int, ...]], Fraction]) -> dict:
    """Exterior derivative of a chart form given as {(exponent, I): coeff}."""
    out: dict = {}
    for (e, i), v in form.items():
        for k, x in enumerate(e):
            if not x:
                continue
            sgn, ki = _merge((k + 1,), i)
            if not sgn:
                continue
            f = e[:k] + (x - 1,) + e[k + 1:]
            key = (f, ki)
            out[key] = out.get(key, 0) + sgn * x * v
    return {k: v for k, v in out.items() if v}


def extend_to_forms(chart: Chart, order: int, alpha: Mapping, b: PPElement) -> PPElement:
    """∇(α ⊗ b) = dα ⊗ b + (-1)^{|α|} α ∧ ∇b for a homogeneous chart form α."""
    degs = {len(i) for (_, i) in alpha}
    if len(degs) > 1:
        raise PrincipalPartsError("α must be homogeneous")
    deg = degs.pop() if degs else 0
    da = first_factor_form(chart, order, de_rham_d(chart, alpha))
    a = first_factor_form(chart, order, alpha)
    return da * b + (a * grothendieck_connection(b)).scale((-1) ** deg)


def two_level(fn, *args: PPElement) -> PPElement:
    """Evaluate fn on lifts to order N+1 and project the result back to order N."""
    order = min(x.order for x in args)
    lifted = [x.with_order(order + 1) for x in args]
    return fn(*lifted).with_order(order)


def leibniz_defect(x: PPElement, y: PPElement) -> PPElement:
    """∇(xy) - ∇(x)y - (-1)^{|x|} x∇(y) via the two-level protocol (zero when Leibniz holds)."""
    degs = x.degrees()
    sx = (-1) ** (degs.pop() if len(degs) == 1 else 0)
    lhs = two_level(lambda u, v: grothendieck_connection(u * v), x, y)
    rhs = two_level(
        lambda u, v: grothendieck_connection(u) * v + (u * grothendieck_connection(v)).scale(sx), x, y
    )
    return lhs - rhs


def flatness_defect(x: PPElement) -> PPElement:
    return two_level(lambda u: grothendieck_connection(grothendieck_connection(u)), x)


def random_element(chart: Chart, order: int, rng: random.Random, degree: int = 0, density: float = 0.4,
                   coeff_range: int = 2) -> PPElement:
    terms = {}
    for i in combinations(range(1, chart.n + 1), degree):
        for a in exponents(chart.n, order - degree):
            for c in exponents(chart.n, coeff_range):
                if rng.random() < density:
                    terms[(i, a, c)] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return PPElement(chart, order, terms)


# ---------------------------------------------------------------------------
# weight pieces and their exactness


@dataclass(frozen=True)
class WeightComplexQ:
    """Koszul piece of weight w: ``(t-monomials of weight w-p) ⊗ ds_I`` with ``|I| = p``.

    Degree -1 holds the augmentation ``M -> P`` (nonzero only at weight 0).
    """

    n: int
    w: int
    bases: Mapping[int, tuple]
    complex: ChainComplexQ


def weight_piece(n: int, w: int, augmented: bool = True) -> WeightComplexQ:
    bases = {}
    for p in range(0, min(n, w) + 1):
        bases[p] = tuple(
            (i, a) for i in combinations(range(1, n + 1), p) for a in exponents(n, w - p) if sum(a) == w - p
        )
    dims = {p: len(b) for p, b in bases.items()}
    diffs = {}
    for p in range(0, min(n, w)):
        pos = {k: r for r, k in enumerate(bases[p + 1])}
        ent = {}
        for col, (i, a) in enumerate(bases[p]):
            img = grothendieck_connection(PPElement(Chart(n), w, {(i, a, (0,) * n): Fraction(1)}))
            for (j, b, _), v in img.terms.items():
                ent[(pos[(j, b)], col)] = v
        diffs[p] = RationalMatrix(dims[p + 1], dims[p], ent)
    if augmented and w == 0:
        dims[-1] = 1
        diffs[-1] = RationalMatrix(dims[0], 1, {(0, 0): Fraction(1)})
    return WeightComplexQ(n, w, bases, ChainComplexQ(dims, diffs))


def weight_pieces(n: int, w_max: int, augmented: bool = False) -> list[WeightComplexQ]:
    if n < 1:
        raise PrincipalPartsError("need at least one coordinate")
    return [weight_piece(n, w, augmented) for w in range(w_max + 1)]


def expected_piece_dims(n: int, w: int) -> dict[int, int]:
    """comb(n, p) · #monomials of degree w-p in n variables."""
    return {p: comb(n, p) * comb(w - p + n - 1, n - 1) for p in range(0, min(n, w) + 1)}


def verify_thm15(n: int, w_max: int) -> dict:
    """Weight-by-weight exactness of 0 -> M -> P -> Ω¹⊗P -> ... on a chart with n coordinates."""
    if n < 1:
        raise PrincipalPartsError("need at least one coordinate")
    rows = []
    ok = True
    for w in range(w_max + 1):
        plain = weight_piece(n, w, augmented=False)
        aug = weight_piece(n, w, augmented=True)
        h = cohomology_dims(plain.complex)
        h_aug = cohomology_dims(aug.complex)
        exact = all(v == 0 for v in h_aug.values())
        expected = {0: 1} if w == 0 else {}
        matches = all(h.get(k, 0) == expected.get(k, 0) for k in set(h) | set(expected))
        good = exact and matches
        ok = ok and good
        rows.append({
            "weight": w,
            "dims": [plain.complex.dim(p) for p in range(0, min(n, w) + 1)],
            "betti": [h.get(p, 0) for p in range(0, min(n, w) + 1)],
            "augmented_exact": exact,
            "status": "PASS" if good else "FAIL",
        })
    return {
        "name": "verify-thm15",
        "status": "PASS" if ok else "FAIL",
        "n": n,
        "w_max": w_max,
        "weights": rows,
        "note": "exactness uses that each weight w >= 1 is invertible in Q (characteristic 0)",
    }
