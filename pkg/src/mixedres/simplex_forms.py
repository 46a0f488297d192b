"""Polynomial differential forms on the geometric simplices.

A form on ``Δ^l`` is kept in reduced coordinates: ``t_0 = 1 - (t_1 + ... + t_l)``
and ``dt_0 = -(dt_1 + ... + dt_l)`` are substituted away, so every form is a
unique Q-combination of ``t^a dt_I`` with ``a`` an exponent vector over
``t_1..t_l`` and ``I`` a strictly increasing subset of ``{1..l}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Iterator, Mapping

from .delta_cat import SimplicialMap, face_inclusion

Key = tuple[tuple[int, ...], tuple[int, ...]]


class FormError(ValueError):
    pass


def _merge_sign(i: tuple[int, ...], j: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign and sorted union of dt_I ∧ dt_J; sign 0 when I and J overlap."""
    if set(i) & set(j):
        return 0, ()
    inversions = sum(1 for x in i for y in j if x > y)
    return (-1 if inversions % 2 else 1), tuple(sorted(i + j))


@dataclass(frozen=True)
class PolyForm:
    """A polynomial form on ``Δ^l``; terms map ``(a, I)`` to a nonzero rational."""

    l: int
    terms: Mapping[Key, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (a, i), c in self.terms.items():
            if len(a) != self.l or any(x < 1 or x > self.l for x in i):
                raise FormError(f"bad term {(a, i)} on Δ^{self.l}")
            if c:
                clean[(tuple(a), tuple(i))] = Fraction(c)
        object.__setattr__(self, "terms", clean)

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, l: int) -> "PolyForm":
        return cls(l, {})

    @classmethod
    def const(cls, l: int, c=1) -> "PolyForm":
        return cls(l, {((0,) * l, ()): Fraction(c)})

    @classmethod
    def monomial(cls, l: int, a: tuple[int, ...], i: tuple[int, ...] = (), c=1) -> "PolyForm":
        return cls(l, {(tuple(a), tuple(i)): Fraction(c)})

    @classmethod
    def t(cls, l: int, i: int) -> "PolyForm":
        """The barycentric coordinate t_i (t_0 is stored reduced)."""
        if not 0 <= i <= l:
            raise FormError(f"t_{i} undefined on Δ^{l}")
        if i == 0:
            terms = {((0,) * l, ()): Fraction(1)}
            for k in range(l):
                terms[(tuple(1 if j == k else 0 for j in range(l)), ())] = Fraction(-1)
            return cls(l, terms)
        return cls.monomial(l, tuple(1 if j == i - 1 else 0 for j in range(l)))

    @classmethod
    def dt(cls, l: int, i: int) -> "PolyForm":
        if not 0 <= i <= l:
            raise FormError(f"dt_{i} undefined on Δ^{l}")
        z = (0,) * l
        if i == 0:
            return cls(l, {(z, (k,)): Fraction(-1) for k in range(1, l + 1)})
        return cls(l, {(z, (i,)): Fraction(1)})

    # structure --------------------------------------------------------
    def degrees(self) -> set[int]:
        return {len(i) for (_, i) in self.terms}

    @property
    def form_degree(self) -> int | None:
        """The common form degree, or None for zero / inhomogeneous forms."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def component(self, q: int) -> "PolyForm":
        return PolyForm(self.l, {k: c for k, c in self.terms.items() if len(k[1]) == q})

    def weight(self) -> int:
        """Largest coefficient degree plus form degree among the terms (-1 for zero)."""
        return max((sum(a) + len(i) for (a, i) in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> Iterator[tuple[Key, Fraction]]:
        return iter(sorted(self.terms.items()))

    # linear structure -------------------------------------------------
    def _check(self, other: "PolyForm") -> None:
        if self.l != other.l:
            raise FormError(f"simplex dimension mismatch {self.l} vs {other.l}")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return PolyForm(self.l, out)

    def __neg__(self) -> "PolyForm":
        return PolyForm(self.l, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, s) -> "PolyForm":
        s = Fraction(s)
        return PolyForm(self.l, {k: s * c for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        return self.l == other.l and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.l, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"PolyForm(Δ^{self.l}, 0)"
        parts = []
        for (a, i), c in self.items():
            mon = "·".join(f"t{k + 1}^{e}" if e > 1 else f"t{k + 1}" for k, e in enumerate(a) if e)
            dif = "∧".join(f"dt{x}" for x in i)
            body = " ".join(x for x in (mon, dif) if x) or "1"
            parts.append(f"{c}*{body}")
        return f"PolyForm(Δ^{self.l}, " + " + ".join(parts) + ")"

    # algebra ----------------------------------------------------------
    def wedge(self, other: "PolyForm") -> "PolyForm":
        return wedge(self, other)

    def __mul__(self, other: "PolyForm") -> "PolyForm":
        return wedge(self, other)


def wedge(u: PolyForm, v: PolyForm) -> PolyForm:
    """Graded-commutative product."""
    u._check(v)
    out: dict[Key, Fraction] = {}
    for (a, i), c in u.terms.items():
        for (b, j), e in v.terms.items():
            sgn, ij = _merge_sign(i, j)
            if not sgn:
                continue
            key = (tuple(x + y for x, y in zip(a, b)), ij)
            out[key] = out.get(key, 0) + sgn * c * e
    return PolyForm(u.l, out)


def d(u: PolyForm) -> PolyForm:
    """Exterior derivative."""
    out: dict[Key, Fraction] = {}
    for (a, i), c in u.terms.items():
        for k, e in enumerate(a):
            if not e or (k + 1) in i:
                continue
            sgn, ki = _merge_sign((k + 1,), i)
            b = a[:k] + (e - 1,) + a[k + 1:]
            key = (b, ki)
            out[key] = out.get(key, 0) + sgn * e * c
    return PolyForm(u.l, out)


def power(u: PolyForm, n: int) -> PolyForm:
    out = PolyForm.const(u.l)
    for _ in range(n):
        out = wedge(out, u)
    return out


# ---------------------------------------------------------------------------
# simplicial structure


@lru_cache(maxsize=None)
def _coordinate_images(alpha: SimplicialMap) -> tuple[tuple[PolyForm, ...], tuple[PolyForm, ...]]:
    """Images of t_1..t_l and dt_1..dt_l under the map induced by alpha."""
    k = alpha.source_dim
    ts, dts = [], []
    for i in range(1, alpha.target_dim + 1):
        img = PolyForm.zero(k)
        for j, v in enumerate(alpha.values):
            if v == i:
                img = img + PolyForm.t(k, j)
        ts.append(img)
        dts.append(d(img))
    return tuple(ts), tuple(dts)


@lru_cache(maxsize=None)
def _pullback_monomial(alpha: SimplicialMap, a: tuple[int, ...], i: tuple[int, ...]) -> PolyForm:
    ts, dts = _coordinate_images(alpha)
    out = PolyForm.const(alpha.source_dim)
    for k, e in enumerate(a):
        if e:
            out = wedge(out, power(ts[k], e))
            if out.is_zero():
                return out
    for x in i:
        out = wedge(out, dts[x - 1])
        if out.is_zero():
            return out
    return out


def pullback(alpha: SimplicialMap, u: PolyForm) -> PolyForm:
    """Pull a form on ``Δ^l`` back along the affine map ``Δ^k -> Δ^l`` induced by alpha."""
    if u.l != alpha.target_dim:
        raise FormError(f"form lives on Δ^{u.l}, map targets Δ^{alpha.target_dim}")
    out: dict[Key, Fraction] = {}
    for (a, i), c in u.terms.items():
        for key, e in _pullback_monomial(alpha, a, i).terms.items():
            out[key] = out.get(key, 0) + c * e
    return PolyForm(alpha.source_dim, out)


def integrate(u: PolyForm) -> Fraction:
    """Integral over ``Δ^l``; only the top-degree part contributes."""
    l = u.l
    top = tuple(range(1, l + 1))
    total = Fraction(0)
    for (a, i), c in u.terms.items():
        if i != top:
            continue
        num = 1
        for e in a:
            num *= factorial(e)
        total += c * Fraction(num, factorial(l + sum(a)))
    return total


# ---------------------------------------------------------------------------
# bases with a weight budget


@lru_cache(maxsize=None)
def exponents(n: int, max_total: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of length n with total degree <= max_total, sorted."""
    if max_total < 0:
        return ()
    if n == 0:
        return ((),)
    out = []
    for first in range(max_total + 1):
        for rest in exponents(n - 1, max_total - first):
            out.append((first,) + rest)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def form_basis(l: int, q: int, weight: int) -> tuple[Key, ...]:
    """Basis of degree-q forms on ``Δ^l`` with coefficient degree + q <= weight."""
    if q > l:
        return ()
    out = []
    for i in combinations(range(1, l + 1), q):
        for a in exponents(l, weight - q):
            out.append((a, i))
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# normalized cochains, Whitney forms and the comparison maps


def faces_of(l: int, p: int | None = None) -> list[tuple[int, ...]]:
    """Nondegenerate faces of ``Δ^l`` (of dimension p, or all), lexicographic by size."""
    dims = range(l + 1) if p is None else [p]
    return [f for k in dims for f in combinations(range(l + 1), k + 1)]


@dataclass(frozen=True)
class NormalizedCochain:
    """A Q-valued function on the nondegenerate faces of ``Δ^l``."""

    l: int
    values: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for f, v in self.values.items():
            f = tuple(f)
            if not f or any(a >= b for a, b in zip(f, f[1:])) or f[0] < 0 or f[-1] > self.l:
                raise FormError(f"{f} is not a face of Δ^{self.l}")
            if v:
                clean[f] = Fraction(v)
        object.__setattr__(self, "values", clean)

    def __add__(self, other: "NormalizedCochain") -> "NormalizedCochain":
        out = dict(self.values)
        for f, v in other.values.items():
            out[f] = out.get(f, 0) + v
        return NormalizedCochain(self.l, out)

    @classmethod
    def indicator(cls, l: int, f: tuple[int, ...]) -> "NormalizedCochain":
        return cls(l, {tuple(f): Fraction(1)})


def coboundary(c: NormalizedCochain) -> NormalizedCochain:
    """Simplicial coboundary: (δc)(F) = Σ_j (-1)^j c(F without its j-th vertex)."""
    out: dict[tuple[int, ...], Fraction] = {}
    for f in faces_of(c.l):
        if len(f) < 2:
            continue
        s = Fraction(0)
        for j in range(len(f)):
            s += (-1) ** j * c.values.get(f[:j] + f[j + 1:], 0)
        if s:
            out[f] = s
    return NormalizedCochain(c.l, out)


@lru_cache(maxsize=None)
def whitney(face: tuple[int, ...], l: int) -> PolyForm:
    """Whitney form p! Σ_j (-1)^j t_{i_j} dt_{i_0} ∧ ... (omit j) ... ∧ dt_{i_p}."""
    face = tuple(face)
    if not face or any(a >= b for a, b in zip(face, face[1:])) or face[0] < 0 or face[-1] > l:
        raise FormError(f"{face} is not a face of Δ^{l}")
    p = len(face) - 1
    out = PolyForm.zero(l)
    for j, v in enumerate(face):
        term = PolyForm.t(l, v)
        for k, w in enumerate(face):
            if k != j:
                term = wedge(term, PolyForm.dt(l, w))
        out = out + term.scale((-1) ** j)
    return out.scale(factorial(p))


def rho(u: PolyForm) -> NormalizedCochain:
    """Integrate u over every nondegenerate face of ``Δ^l``."""
    out = {}
    for f in faces_of(u.l):
        p = len(f) - 1
        inc = face_inclusion(f, tuple(range(u.l + 1)))
        val = integrate(pullback(inc, u.component(p)))
        if val:
            out[f] = val
    return NormalizedCochain(u.l, out)


def phi(c: NormalizedCochain) -> PolyForm:
    """Σ_F c(F) ω_F."""
    out = PolyForm.zero(c.l)
    for f, v in sorted(c.values.items()):
        out = out + whitney(f, c.l).scale(v)
    return out
