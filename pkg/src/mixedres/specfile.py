"""Plain-text covering spec files (grammar in docs/spec_format.md).

Sections are ``[space]``, ``[charts]``, ``[overlaps]``, ``[module]``,
``[bundle]`` and ``[sections]``; each body line is ``key = value`` and ``#``
starts a comment.  Errors carry the line and column of the offending token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import delta_cat as dc
from .cech import CoveringDatum, OpenSpec, Variable

SECTIONS = ("space", "charts", "overlaps", "module", "bundle", "sections")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class SpecParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int, path: str = "<spec>"):
        super().__init__(f"{path}:{line}:{col}: {msg}")
        self.line, self.col, self.path = line, col, path


@dataclass(frozen=True)
class _Line:
    section: str
    key: str
    value: str
    line: int
    key_col: int
    value_col: int


@dataclass
class ParsedSpec:
    covering: CoveringDatum
    fiber: str | None
    sections: dict | None  # index -> {simplex exponent: {point: coeff}}, or None
    interpolate: dict | None  # chart -> {point: coeff} when overlaps say "interpolate"


def _lines(text: str, path: str) -> list[_Line]:
    out = []
    section = None
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        stripped = body.strip()
        col0 = len(body) - len(body.lstrip()) + 1
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise SpecParseError("unterminated section header", n, col0, path)
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise SpecParseError(f"unknown section [{name}]", n, col0 + 1, path)
            section = name
            continue
        if section is None:
            raise SpecParseError("key outside of any section", n, col0, path)
        if "=" not in body:
            raise SpecParseError("expected 'key = value'", n, col0, path)
        k, v = body.split("=", 1)
        vcol = len(k) + 2 + (len(v) - len(v.lstrip()))
        out.append(_Line(section, k.strip(), v.strip(), n, col0, vcol))
    return out


def _index(s: str, ln: _Line, path: str) -> tuple[int, ...]:
    try:
        idx = tuple(int(x) for x in s.split(","))
    except ValueError:
        raise SpecParseError(f"bad chart index {s!r}", ln.line, ln.key_col, path) from None
    if list(idx) != sorted(set(idx)):
        raise SpecParseError(f"index {s!r} must be strictly increasing", ln.line, ln.key_col, path)
    return idx


def _monomial(expr: str, exps: dict[str, tuple[int, ...]], dim: int, ln: _Line, path: str) -> tuple[int, ...]:
    """x^a*y^b... in known variables, returned as a lattice exponent."""
    out = [0] * dim
    expr = expr.replace(" ", "")
    if expr == "1":
        return tuple(out)
    for fac in expr.split("*"):
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?", fac)
        if not m:
            raise SpecParseError(f"non-monomial transition {expr!r}", ln.line, ln.value_col, path)
        name, e = m.group(1), int(m.group(2) or 1)
        if name not in exps:
            col = ln.value_col + ln.value.find(name)
            raise SpecParseError(f"unknown variable {name!r}", ln.line, col, path)
        for c in range(dim):
            out[c] += e * exps[name][c]
    return tuple(out)


def _polynomial(expr: str, exps, dim: int, ln: _Line, path: str) -> dict:
    """Expanded Σ c·t1^a·...·x^b into {simplex exponent (t1..tl): {point: coeff}} (l inferred)."""
    s = expr.replace(" ", "")
    if not s:
        raise SpecParseError("empty expression", ln.line, ln.value_col, path)
    terms, cur = [], ""
    for pos, ch in enumerate(s):
        if ch in "+-" and cur and s[pos - 1] != "^":
            terms.append(cur)
            cur = ""
        cur += ch
    terms.append(cur)
    if any(t in ("+", "-") for t in terms):
        raise SpecParseError(f"cannot read {expr!r}", ln.line, ln.value_col, path)
    out: dict = {}
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        term = term.lstrip("+-")
        coef = Fraction(sign)
        t_exp: dict[int, int] = {}
        point = [0] * dim
        for fac in term.split("*"):
            if re.fullmatch(r"\d+(/\d+)?", fac):
                coef *= Fraction(fac)
                continue
            m = re.fullmatch(r"t(\d+)(?:\^(\d+))?", fac)
            if m:
                k = int(m.group(1))
                if k < 1:
                    raise SpecParseError("use t1..tl (t0 = 1 - t1 - ... - tl)", ln.line, ln.value_col, path)
                t_exp[k] = t_exp.get(k, 0) + int(m.group(2) or 1)
                continue
            mono = _monomial(fac, exps, dim, ln, path)
            point = [a + b for a, b in zip(point, mono)]
        out.setdefault(tuple(sorted(t_exp.items())), {})
        key = tuple(point)
        out[tuple(sorted(t_exp.items()))][key] = out[tuple(sorted(t_exp.items()))].get(key, 0) + coef
    return out


def parse_spec_text(text: str, path: str = "<spec>") -> ParsedSpec:
    lines = _lines(text, path)
    if not lines:
        raise SpecParseError("empty spec file", 1, 1, path)
    by = {s: [ln for ln in lines if ln.section == s] for s in SECTIONS}
    space = {ln.key: ln for ln in by["space"]}
    for req in ("name", "lattice", "charts"):
        if req not in space:
            raise SpecParseError(f"[space] needs '{req}'", lines[0].line, 1, path)
    name = space["name"].value
    lattice = tuple(x.strip() for x in space["lattice"].value.split(","))
    for v in lattice:
        if not _NAME.fullmatch(v):
            raise SpecParseError(f"bad lattice name {v!r}", space["lattice"].line, space["lattice"].value_col, path)
    dim = len(lattice)
    try:
        ncharts = int(space["charts"].value)
        window = int(space["window"].value) if "window" in space else 4
    except ValueError as exc:
        ln = space["charts"]
        raise SpecParseError(f"expected an integer ({exc})", ln.line, ln.value_col, path) from None
    if ncharts < 1:
        raise SpecParseError("need at least one chart", space["charts"].line, space["charts"].value_col, path)
    if window < 0:
        raise SpecParseError("inconsistent window: must be non-negative", space["window"].line,
                             space["window"].value_col, path)
    m = ncharts - 1
    exps = {v: tuple(1 if c == k else 0 for c in range(dim)) for k, v in enumerate(lattice)}

    # substitutions first, so chart variables may use them
    algebras: dict[tuple[int, ...], tuple[list[tuple[str, bool]], _Line]] = {}
    coords: dict[tuple[int, ...], str] = {}
    poles: set[int] = set()
    for ln in by["overlaps"]:
        if _NAME.fullmatch(ln.key):
            if ln.key in exps:
                raise SpecParseError(f"{ln.key!r} is a lattice variable", ln.line, ln.key_col, path)
            exps[ln.key] = _monomial(ln.value, exps, dim, ln, path)
    for ln in by["charts"] + by["overlaps"]:
        if _NAME.fullmatch(ln.key):
            continue
        parts = ln.key.split()
        if len(parts) == 2 and parts[0] == "coordinate":
            coords[_index(parts[1], ln, path)] = ln.value
            continue
        if len(parts) == 2 and parts[0] == "poles":
            if ln.value.replace(" ", "") != "x-1":
                raise SpecParseError("only the pole x - 1 is supported", ln.line, ln.value_col, path)
            poles.update(_index(parts[1], ln, path))
            continue
        idx = _index(ln.key, ln, path)
        if any(c > m for c in idx):
            raise SpecParseError(f"index {idx} exceeds the {ncharts} charts", ln.line, ln.key_col, path)
        if idx in algebras:
            raise SpecParseError(f"algebra of {idx} declared twice", ln.line, ln.key_col, path)
        gens = []
        for tok in (x.strip() for x in ln.value.split(",")):
            inv = tok.endswith("^±1") or tok.endswith("^+-1")
            nm = tok.split("^")[0]
            if not _NAME.fullmatch(nm) or ("^" in tok and not inv):
                raise SpecParseError(f"bad variable {tok!r} (use name or name^±1)", ln.line,
                                     ln.value_col + ln.value.find(tok), path)
            if nm not in exps:
                raise SpecParseError(f"unknown variable {nm!r}", ln.line, ln.value_col + ln.value.find(tok), path)
            gens.append((nm, inv))
        algebras[idx] = (gens, ln)

    # module: twists and frames
    twists = (0,)
    frames_decl: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for ln in by["module"]:
        if ln.key == "twists":
            try:
                twists = tuple(int(x) for x in ln.value.split(","))
            except ValueError:
                raise SpecParseError("twists must be integers", ln.line, ln.value_col, path) from None
        elif ln.key.startswith("frame"):
            parts = ln.key.split()
            if len(parts) != 2:
                raise SpecParseError("expected 'frame <index> = monomial, ...'", ln.line, ln.key_col, path)
            frames_decl[_index(parts[1], ln, path)] = [
                _monomial(x.strip(), exps, dim, ln, path) for x in ln.value.split(",")
            ]
        else:
            raise SpecParseError(f"unknown key {ln.key!r} in [module]", ln.line, ln.key_col, path)
    rank = len(twists)
    for idx, fr in frames_decl.items():
        if len(fr) != rank:
            ln = next(x for x in by["module"] if x.key.startswith("frame"))
            raise SpecParseError(f"frame {idx} lists {len(fr)} monomials for {rank} summands", ln.line, ln.value_col, path)
        if any(abs(e) > window for f in fr for e in f):
            ln = next(x for x in by["module"] if x.key.startswith("frame"))
            raise SpecParseError("inconsistent window: a frame exponent lies outside the window", ln.line,
                                 ln.value_col, path)

    opens = {}
    for k in range(m + 1):
        for idx in dc.nondegenerate_multiindices(m, k):
            if idx not in algebras:
                raise SpecParseError(f"no algebra declared for {','.join(map(str, idx))}",
                                     by["charts"][-1].line if by["charts"] else 1, 1, path)
            gens, ln = algebras[idx]
            variables = tuple(Variable(nm, inv, exps[nm]) for nm, inv in gens)
            frames = frames_decl.get(idx) or frames_decl.get((idx[0],)) or [(0,) * dim] * rank
            coord = coords.get(idx) or coords.get((idx[0],))
            opens[idx] = OpenSpec(variables, tuple(tuple(f) for f in frames), bool(poles & set(idx)), coord)
    params = {"d": twists} if name.startswith("p1") else ({"n": dim} if name.startswith("affine") else {})
    cov = CoveringDatum(name, m, lattice, opens, window, twists, params)

    fiber = None
    for ln in by["bundle"]:
        if ln.key != "fiber":
            raise SpecParseError(f"unknown key {ln.key!r} in [bundle]", ln.line, ln.key_col, path)
        fiber = ln.value
    sections = interpolate = None
    if by["sections"]:
        if fiber is None:
            ln = by["sections"][0]
            raise SpecParseError("[sections] needs a [bundle] fiber", ln.line, ln.key_col, path)
        sections, interpolate = {}, {}
        pending = []
        for ln in by["sections"]:
            idx = _index(ln.key, ln, path)
            if ln.value == "interpolate":
                pending.append(idx)
                continue
            poly = _polynomial(ln.value, exps, dim, ln, path)
            l = len(idx) - 1
            comp = {}
            for t_exp, f in poly.items():
                if any(k > l for k, _ in t_exp):
                    raise SpecParseError(f"t{max(k for k, _ in t_exp)} does not exist on a {l}-simplex",
                                         ln.line, ln.value_col, path)
                a = tuple(dict(t_exp).get(k, 0) for k in range(1, l + 1))
                comp[a] = {g: c for g, c in f.items() if c}
            sections[idx] = {a: f for a, f in comp.items() if f}
            if l == 0:
                interpolate[idx[0]] = next(iter(sections[idx].values()), {})
        for idx in pending:
            if any(c not in interpolate for c in idx):
                ln = next(x for x in by["sections"] if x.value == "interpolate")
                raise SpecParseError("interpolate needs values on every vertex", ln.line, ln.value_col, path)
    return ParsedSpec(cov, fiber, sections, interpolate if sections is not None else None)


def parse_spec(path: str | Path) -> ParsedSpec:
    p = Path(path)
    return parse_spec_text(p.read_text(), str(p))


def section_datum(spec: ParsedSpec):
    """The simplicial section described by [sections] (interpolated indices filled in)."""
    from .simpsec import SimplicialSectionDatum, interpolation_section

    if spec.sections is None:
        return None
    secs = {}
    if all(c in spec.interpolate for c in range(spec.covering.m + 1)):
        secs.update(interpolation_section(spec.covering, spec.interpolate).sections)
    secs.update(spec.sections)
    missing = [i for i in spec.covering.nd_indices() if i not in secs]
    if missing:
        raise ValueError(f"no section given on {missing[0]}")
    return SimplicialSectionDatum(spec.covering, spec.fiber, secs)
