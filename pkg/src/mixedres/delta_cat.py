"""Combinatorics of the simplex category.

A monotone map ``[p] -> [q]`` is stored by its list of values.  Cofaces,
codegeneracies, composition and the epi-mono factorization all work on that
representation, so two maps are equal exactly when their value tuples agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from math import comb


class DeltaError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SimplicialMap:
    """Order preserving map ``[source_dim] -> [target_dim]``."""

    source_dim: int
    target_dim: int
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != self.source_dim + 1:
            raise DeltaError(f"need {self.source_dim + 1} values, got {len(vals)}")
        if any(v < 0 or v > self.target_dim for v in vals):
            raise DeltaError(f"values {vals} out of range [0,{self.target_dim}]")
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise DeltaError(f"values {vals} are not weakly increasing")

    def __call__(self, j: int) -> int:
        return self.values[j]

    @property
    def is_injective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.values)) == self.target_dim + 1

    def __repr__(self) -> str:
        return f"SimplicialMap([{self.source_dim}]->[{self.target_dim}], {self.values})"


def identity(p: int) -> SimplicialMap:
    return SimplicialMap(p, p, tuple(range(p + 1)))


def face(i: int, p: int) -> SimplicialMap:
    """Coface ``[p] -> [p+1]`` omitting the value i."""
    if not 0 <= i <= p + 1:
        raise DeltaError(f"face index {i} out of range for p={p}")
    return SimplicialMap(p, p + 1, tuple(j if j < i else j + 1 for j in range(p + 1)))


def degeneracy(i: int, p: int) -> SimplicialMap:
    """Codegeneracy ``[p] -> [p-1]`` taking the value i twice."""
    if p < 1 or not 0 <= i <= p - 1:
        raise DeltaError(f"degeneracy index {i} out of range for p={p}")
    return SimplicialMap(p, p - 1, tuple(j if j <= i else j - 1 for j in range(p + 1)))


def compose(g: SimplicialMap, f: SimplicialMap) -> SimplicialMap:
    """The composite g∘f (apply f first)."""
    if f.target_dim != g.source_dim:
        raise DeltaError(f"cannot compose {g} after {f}")
    return SimplicialMap(f.source_dim, g.target_dim, tuple(g.values[v] for v in f.values))


def enumerate_maps(p: int, q: int) -> list[SimplicialMap]:
    """All monotone maps ``[p] -> [q]`` in lexicographic order."""
    return [SimplicialMap(p, q, v) for v in combinations_with_replacement(range(q + 1), p + 1)]


def count_maps(p: int, q: int) -> int:
    return comb(p + q + 1, p + 1)


def factorize(alpha: SimplicialMap) -> list[SimplicialMap]:
    """Write alpha as cofaces after codegeneracies.

    Returns generators in order of application, so that composing them left to
    right (each new one applied after the previous) reproduces alpha.
    """
    degs: list[SimplicialMap] = []
    vals = list(alpha.values)
    while True:
        j = next((k for k in range(len(vals) - 1) if vals[k] == vals[k + 1]), None)
        if j is None:
            break
        degs.append(degeneracy(j, len(vals) - 1))
        del vals[j + 1]
    faces: list[SimplicialMap] = []
    top = alpha.target_dim
    while len(vals) < top + 1:
        missing = max(set(range(top + 1)) - set(vals))
        faces.append(face(missing, top - 1))
        vals = [v if v < missing else v - 1 for v in vals]
        top -= 1
    return degs + faces[::-1]


def compose_word(word: list[SimplicialMap], p: int) -> SimplicialMap:
    out = identity(p)
    for g in word:
        out = compose(g, out)
    return out


# ---------------------------------------------------------------------------
# multi-indices


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Weakly increasing sequence ``(i_0, ..., i_q)`` with entries in ``[0, m]``."""

    m: int
    entries: tuple[int, ...]

    def __post_init__(self):
        ent = tuple(int(e) for e in self.entries)
        object.__setattr__(self, "entries", ent)
        if any(e < 0 or e > self.m for e in ent):
            raise DeltaError(f"multi-index {ent} outside [0,{self.m}]")
        if any(a > b for a, b in zip(ent, ent[1:])):
            raise DeltaError(f"multi-index {ent} not weakly increasing")

    @property
    def dim(self) -> int:
        return len(self.entries) - 1

    @property
    def nondegenerate(self) -> bool:
        return is_nondegenerate(self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        return support(self.entries)

    def pullback(self, alpha: SimplicialMap) -> "MultiIndex":
        return MultiIndex(self.m, act(self.entries, alpha))


def is_nondegenerate(i: tuple[int, ...]) -> bool:
    return all(a < b for a, b in zip(i, i[1:]))


def support(i: tuple[int, ...]) -> tuple[int, ...]:
    """The nondegenerate multi-index with the same entry set."""
    return tuple(sorted(set(i)))


def act(i: tuple[int, ...], alpha: SimplicialMap) -> tuple[int, ...]:
    """``i ∘ alpha``: the multi-index at level ``alpha.source_dim``."""
    if len(i) != alpha.target_dim + 1:
        raise DeltaError(f"multi-index {i} does not match {alpha}")
    return tuple(i[v] for v in alpha.values)


def all_multiindices(m: int, q: int) -> list[tuple[int, ...]]:
    """Every ``i`` in ``Δ^m_q`` (degenerate ones included), lexicographic."""
    return list(combinations_with_replacement(range(m + 1), q + 1))


def nondegenerate_multiindices(m: int, q: int) -> list[tuple[int, ...]]:
    """Strictly increasing ``(i_0 < ... < i_q)`` in ``[0, m]``; empty if q > m."""
    return list(combinations(range(m + 1), q + 1))


def degeneracy_decomposition(i: tuple[int, ...]) -> tuple[tuple[int, ...], SimplicialMap]:
    """Write ``i = nd ∘ sigma`` with nd nondegenerate and sigma surjective."""
    nd = support(i)
    pos = {v: k for k, v in enumerate(nd)}
    sigma = SimplicialMap(len(i) - 1, len(nd) - 1, tuple(pos[v] for v in i))
    return nd, sigma


def face_inclusion(sub: tuple[int, ...], sup: tuple[int, ...]) -> SimplicialMap:
    """The injective map ``[len(sub)-1] -> [len(sup)-1]`` with ``sup ∘ map = sub``."""
    pos = {v: k for k, v in enumerate(sup)}
    try:
        return SimplicialMap(len(sub) - 1, len(sup) - 1, tuple(pos[v] for v in sub))
    except KeyError as exc:
        raise DeltaError(f"{sub} is not a face of {sup}") from exc
