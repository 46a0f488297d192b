"""Exact sparse linear algebra over the rationals.

Matrices are stored as sparse maps ``(row, col) -> Fraction``.  Elimination
works on primitive integer rows (fraction-free, content removed after every
row operation), so no floating point value is ever produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence


class LinAlgError(ValueError):
    """Raised for shape mismatches and invalid complexes."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class RationalMatrix:
    """Sparse ``rows x cols`` matrix with nonzero Fraction entries."""

    rows: int
    cols: int
    entries: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise LinAlgError(f"entry ({r},{c}) outside {self.rows}x{self.cols}")
            v = _frac(v)
            if v:
                clean[(r, c)] = v
        object.__setattr__(self, "entries", clean)

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], cols: int | None = None) -> "RationalMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        ent = {}
        for r, row in enumerate(data):
            if len(row) != cols:
                raise LinAlgError("ragged dense matrix")
            for c, v in enumerate(row):
                if v:
                    ent[(r, c)] = _frac(v)
        return cls(rows, cols, ent)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, Fraction]]) -> "RationalMatrix":
        ent = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                if v:
                    ent[(r, c)] = v
        return cls(rows, len(columns), ent)

    # views ------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def col_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            out[c][r] = v
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def __getitem__(self, rc: tuple[int, int]) -> Fraction:
        return self.entries.get(rc, Fraction(0))

    # arithmetic -------------------------------------------------------
    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise LinAlgError(f"cannot multiply {self.shape} by {other.shape}")
        rows_b = other.row_dicts()
        acc: dict[tuple[int, int], Fraction] = {}
        for (r, k), v in self.entries.items():
            for c, w in rows_b[k].items():
                key = (r, c)
                acc[key] = acc.get(key, 0) + v * w
        return RationalMatrix(self.rows, other.cols, acc)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise LinAlgError(f"cannot add {self.shape} and {other.shape}")
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = acc.get(k, 0) + v
        return RationalMatrix(self.rows, self.cols, acc)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def scale(self, s) -> "RationalMatrix":
        s = _frac(s)
        return RationalMatrix(self.rows, self.cols, {k: s * v for k, v in self.entries.items()})

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def apply(self, vec: Mapping[int, Fraction] | Sequence) -> dict[int, Fraction]:
        """Multiply by a (sparse or dense) column vector; returns a sparse vector."""
        if not isinstance(vec, Mapping):
            vec = {i: _frac(v) for i, v in enumerate(vec) if v}
        cols = self.col_dicts()
        out: dict[int, Fraction] = {}
        for c, x in vec.items():
            for r, v in cols[c].items():
                out[r] = out.get(r, 0) + v * x
        return {r: v for r, v in out.items() if v}

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, frozenset(self.entries.items())))


def block_diagonal(blocks: Sequence[RationalMatrix]) -> RationalMatrix:
    ent = {}
    r0 = c0 = 0
    for b in blocks:
        for (r, c), v in b.entries.items():
            ent[(r0 + r, c0 + c)] = v
        r0 += b.rows
        c0 += b.cols
    return RationalMatrix(r0, c0, ent)


def vstack(blocks: Sequence[RationalMatrix], cols: int | None = None) -> RationalMatrix:
    if cols is None:
        cols = blocks[0].cols if blocks else 0
    ent = {}
    r0 = 0
    for b in blocks:
        if b.cols != cols:
            raise LinAlgError("vstack column mismatch")
        for (r, c), v in b.entries.items():
            ent[(r0 + r, c)] = v
        r0 += b.rows
    return RationalMatrix(r0, cols, ent)


# ---------------------------------------------------------------------------
# fraction-free elimination


def _primitive(row: Mapping[int, Fraction]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row."""
    den = 1
    for v in row.values():
        den = den * v.denominator // gcd(den, v.denominator)
    ints = {c: int(v * den) for c, v in row.items() if v}
    return _normalize(ints)


def _normalize(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {c: v // g for c, v in row.items()}
    return row


def _combine(target: dict[int, int], pivot_row: dict[int, int], col: int) -> dict[int, int]:
    """Return a*target - b*pivot_row with the entry at ``col`` cancelled."""
    a = pivot_row[col]
    b = target[col]
    g = gcd(a, b)
    a //= g
    b //= g
    out = {c: a * v for c, v in target.items()}
    for c, v in pivot_row.items():
        w = out.get(c, 0) - b * v
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    return _normalize(out)


@dataclass(frozen=True)
class Echelon:
    """Reduced row echelon data: integer pivot rows and pivot columns."""

    rows: tuple[dict[int, int], ...]
    pivots: tuple[int, ...]
    ncols: int

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def free_columns(self) -> tuple[int, ...]:
        piv = set(self.pivots)
        return tuple(c for c in range(self.ncols) if c not in piv)


def echelon(m: RationalMatrix, reduced: bool = True) -> Echelon:
    """Row-reduce ``m``; pivots are the lexicographically first independent columns."""
    pending = [_primitive(r) for r in m.row_dicts() if r]
    by_col: dict[int, list[int]] = {}
    for idx, r in enumerate(pending):
        for c in r:
            by_col.setdefault(c, []).append(idx)
    alive = [True] * len(pending)
    pivot_rows: list[dict[int, int]] = []
    pivots: list[int] = []
    for col in range(m.cols):
        cands = [i for i in dict.fromkeys(by_col.get(col, ())) if alive[i] and col in pending[i]]
        if not cands:
            continue
        best = min(cands, key=lambda i: (abs(pending[i][col]), len(pending[i]), i))
        prow = pending[best]
        alive[best] = False
        if prow[col] < 0:
            prow = {c: -v for c, v in prow.items()}
        for i in cands:
            if i == best:
                continue
            new = _combine(pending[i], prow, col)
            pending[i] = new
            if not new:
                alive[i] = False
                continue
            for c in new:
                lst = by_col.setdefault(c, [])
                if not lst or lst[-1] != i:
                    lst.append(i)
        pivot_rows.append(prow)
        pivots.append(col)
    if reduced:
        for k in range(len(pivot_rows) - 1, -1, -1):
            pc = pivots[k]
            for j in range(k):
                if pc in pivot_rows[j]:
                    new = _combine(pivot_rows[j], pivot_rows[k], pc)
                    if new[pivots[j]] < 0:
                        new = {c: -v for c, v in new.items()}
                    pivot_rows[j] = new
    return Echelon(tuple(pivot_rows), tuple(pivots), m.cols)


def rank(m: RationalMatrix) -> int:
    """Rank over Q by fraction-free elimination."""
    return echelon(m, reduced=False).rank


def kernel_basis_sparse(m: RationalMatrix) -> tuple[list[dict[int, Fraction]], tuple[int, ...]]:
    """Kernel basis plus the free columns.

    The i-th basis vector is 1 at ``free[i]`` and 0 at every other free column,
    so coordinates of a kernel vector in this basis are its free-column values.
    """
    e = echelon(m, reduced=True)
    free = e.free_columns
    basis: list[dict[int, Fraction]] = []
    for f in free:
        v = {f: Fraction(1)}
        for prow, pc in zip(e.rows, e.pivots):
            x = prow.get(f)
            if x:
                v[pc] = Fraction(-x, prow[pc])
        basis.append(v)
    return basis, free


def kernel_basis(m: RationalMatrix) -> list[tuple[Fraction, ...]]:
    basis, _ = kernel_basis_sparse(m)
    return [tuple(v.get(i, Fraction(0)) for i in range(m.cols)) for v in basis]


def solve(m: RationalMatrix, b: Mapping[int, Fraction]) -> dict[int, Fraction] | None:
    """One solution x of m x = b (sparse), or None if inconsistent."""
    aug_cols = m.cols + 1
    ent = dict(m.entries)
    for r, v in b.items():
        if v:
            ent[(r, m.cols)] = _frac(v)
    e = echelon(RationalMatrix(m.rows, aug_cols, ent), reduced=True)
    if m.cols in e.pivots:
        return None
    x: dict[int, Fraction] = {}
    for prow, pc in zip(e.rows, e.pivots):
        rhs = prow.get(m.cols)
        if rhs:
            x[pc] = Fraction(rhs, prow[pc])
    return x


def column_space_basis(m: RationalMatrix) -> list[int]:
    """Indices of a maximal set of independent columns (lexicographically first)."""
    return list(echelon(m, reduced=False).pivots)


# ---------------------------------------------------------------------------
# cochain complexes


@dataclass(frozen=True)
class ChainComplexQ:
    """Bounded cochain complex of finite-dimensional Q-spaces.

    ``diffs[k]`` maps degree k to degree k+1.  Missing differentials are zero.
    """

    dims: Mapping[int, int]
    diffs: Mapping[int, RationalMatrix] = field(default_factory=dict)
    check: bool = True

    def __post_init__(self):
        dims = {int(k): int(v) for k, v in self.dims.items()}
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "diffs", dict(self.diffs))
        for k, dk in self.diffs.items():
            if dk.shape != (self.dim(k + 1), self.dim(k)):
                raise LinAlgError(
                    f"differential {k} has shape {dk.shape}, expected {(self.dim(k + 1), self.dim(k))}"
                )
        if self.check:
            self.assert_dd_zero()

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    @property
    def degrees(self) -> list[int]:
        ks = [k for k, v in self.dims.items() if v]
        return list(range(min(ks), max(ks) + 1)) if ks else []

    def d(self, k: int) -> RationalMatrix:
        m = self.diffs.get(k)
        return m if m is not None else RationalMatrix.zero(self.dim(k + 1), self.dim(k))

    def assert_dd_zero(self) -> None:
        for k in self.diffs:
            if (k + 1) in self.diffs:
                comp = self.diffs[k + 1] @ self.diffs[k]
                if not comp.is_zero():
                    (r, c), v = next(iter(sorted(comp.entries.items())))
                    raise LinAlgError(f"d∘d != 0 at degree {k}: entry ({r},{c}) = {v}")

    def total_dim(self) -> int:
        return sum(self.dims.values())


def cohomology_dims(c: ChainComplexQ) -> dict[int, int]:
    """Betti numbers dim ker d_k - rank d_{k-1} for every degree with a nonzero space."""
    c.assert_dd_zero()
    ranks = {k: rank(c.d(k)) for k in c.degrees}
    return {k: c.dim(k) - ranks.get(k, 0) - ranks.get(k - 1, 0) for k in c.degrees}


def direct_sum(complexes: Iterable[ChainComplexQ]) -> ChainComplexQ:
    complexes = list(complexes)
    degs = sorted({k for c in complexes for k in c.dims})
    dims = {k: sum(c.dim(k) for c in complexes) for k in degs}
    diffs = {k: block_diagonal([c.d(k) for c in complexes]) for k in degs if (k + 1) in dims}
    return ChainComplexQ(dims, diffs, check=False)


@dataclass(frozen=True)
class CohomologyBasis:
    """Cocycle representatives for H^k plus what is needed to read off classes."""

    degree: int
    boundaries: list[dict[int, Fraction]]
    representatives: list[dict[int, Fraction]]
    ambient: int

    def coordinates(self, z: Mapping[int, Fraction]) -> tuple[Fraction, ...]:
        """Class of cocycle z in the representative basis."""
        cols = self.boundaries + self.representatives
        if not self.representatives:
            return ()
        mat = RationalMatrix.from_columns(self.ambient, cols)
        x = solve(mat, z)
        if x is None:
            raise LinAlgError("vector is not a cocycle of this complex")
        nb = len(self.boundaries)
        return tuple(x.get(nb + i, Fraction(0)) for i in range(len(self.representatives)))


def cohomology_basis(c: ChainComplexQ, k: int) -> CohomologyBasis:
    cycles, _ = kernel_basis_sparse(c.d(k))
    prev = c.d(k - 1)
    bcols = [prev.col_dicts()[j] for j in column_space_basis(prev)] if prev.cols else []
    # extend the boundary basis to a cycle basis
    stack = RationalMatrix.from_columns(c.dim(k), bcols + cycles)
    keep = column_space_basis(stack)
    reps = [cycles[j - len(bcols)] for j in keep if j >= len(bcols)]
    return CohomologyBasis(k, bcols, reps, c.dim(k))


@dataclass(frozen=True)
class ChainMapQ:
    """Degreewise matrices ``source^k -> target^k`` commuting with differentials."""

    source: ChainComplexQ
    target: ChainComplexQ
    components: Mapping[int, RationalMatrix]
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "components", dict(self.components))
        if self.check:
            self.assert_chain_map()

    def f(self, k: int) -> RationalMatrix:
        m = self.components.get(k)
        return m if m is not None else RationalMatrix.zero(self.target.dim(k), self.source.dim(k))

    def assert_chain_map(self) -> None:
        degs = set(self.source.degrees) | set(self.target.degrees)
        for k in degs:
            lhs = self.target.d(k) @ self.f(k)
            rhs = self.f(k + 1) @ self.source.d(k)
            if lhs != rhs:
                raise LinAlgError(f"not a chain map in degree {k}")


def induced_map_on_cohomology(f: ChainMapQ) -> dict[int, RationalMatrix]:
    """Matrices of H^k(f) in the representative bases of ``cohomology_basis``."""
    out = {}
    degs = sorted(set(f.source.degrees) | set(f.target.degrees))
    for k in degs:
        hs = cohomology_basis(f.source, k)
        ht = cohomology_basis(f.target, k)
        cols = []
        fk = f.f(k)
        for z in hs.representatives:
            img = fk.apply(z)
            coords = ht.coordinates(img)
            cols.append({i: v for i, v in enumerate(coords) if v})
        out[k] = RationalMatrix.from_columns(len(ht.representatives), cols)
    return out


def is_quasi_iso(f: ChainMapQ) -> bool:
    for m in induced_map_on_cohomology(f).values():
        if m.rows != m.cols or rank(m) != m.rows:
            return False
    return True


def induced_rank(f: ChainMapQ) -> dict[int, int]:
    """Rank of H^k(f) in each degree."""
    return {k: rank(m) for k, m in induced_map_on_cohomology(f).items()}
