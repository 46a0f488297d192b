"""Command-line front end.

    mixedres --space p1_two_charts:d=2 --task cohomology --pipelines all

Exit status is 0 when every record passes, 1 when any check fails and 2 for
usage or spec-file errors.  The JSON report is byte-stable for a fixed
configuration; wall-clock timings go to the text table only (or into the
JSON with ``--timing``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from ._parallel import ENV_VAR
from .cech import (
    CoveringDatum,
    CoveringError,
    builtin,
    expected_betti,
    piecewise_betti,
    verify_thm31,
    window_stability,
)
from .mixres import MixError, build_mixed, prop52_checks, stabilized_cohomology, verify_thm41
from .principal_parts import verify_thm15
from .specfile import SpecParseError, parse_spec, section_datum

TASKS = ("cohomology", "verify-thm31", "verify-thm15", "verify-thm41", "verify-prop52", "verify-thm33", "all")
PIPELINES = ("standard", "thom-sullivan", "mixed")

# builtin fixtures used by --task all when no space is given
FIXTURES = (
    ("affine_1", {}),
    ("p1_two_charts", {"d": -2}),
    ("p1_two_charts", {"d": 0}),
    ("p1_two_charts", {"d": 2}),
    ("p1_three_charts", {"d": -2}),
    ("p1_three_charts", {"d": 1}),
)


class UsageError(Exception):
    pass


def parse_space(text: str):
    """``name`` or ``name:key=val,...`` (also ``name key=val``) or a spec-file path."""
    if Path(text).is_file():
        spec = parse_spec(text)
        return spec.covering, spec
    head, _, rest = text.replace(" ", ":", 1).partition(":")
    params = {}
    for item in filter(None, rest.replace(" ", ",").split(",")):
        k, eq, v = item.partition("=")
        if not eq:
            raise UsageError(f"bad space parameter {item!r} (expected key=value)")
        try:
            params[k] = int(v)
        except ValueError:
            raise UsageError(f"space parameter {k} must be an integer") from None
    try:
        return builtin(head, **params), None
    except (CoveringError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _status(records) -> str:
    return "PASS" if all(r["status"] == "PASS" for r in records) else "FAIL"


def task_cohomology(U: CoveringDatum, pipelines, D: int, N: int) -> dict:
    tables = {}
    for p in pipelines:
        if p == "mixed":
            lo, hi = build_mixed(U, D, N), build_mixed(U, D, N + 1)
            st = stabilized_cohomology(lo, hi)
            tables[p] = [st.get(k, 0) for k in range(U.m + 1)]
            extra = [st.get(k, 0) for k in range(U.m + 1, lo.top + 1)]
            if any(extra):
                tables[p] += extra
        else:
            tables[p] = list(piecewise_betti(U, p, D))
    vals = list(tables.values())
    agree = all(v == vals[0] for v in vals)
    checks = [{"name": "pipelines-agree", "status": "PASS" if agree else "FAIL"}]
    exp = expected_betti(U)
    if exp is not None:
        checks.append({"name": "oracle", "status": "PASS" if tuple(vals[0]) == tuple(exp) else "FAIL",
                       "expected": list(exp)})
    if "standard" in pipelines:
        ws = window_stability(U, "standard", D)
        checks.append({"name": "window-stability", "status": "PASS" if ws["stable"] else "FAIL",
                       "betti_window_plus_1": ws["betti_window_plus_1"]})
    return {"name": "cohomology", "status": _status(checks), "space": U.name, "params": dict(U.params),
            "window": U.window, "betti": tables, "checks": checks}


def task_validate(U: CoveringDatum) -> dict:
    recs = U.validate()
    return {"name": "validate", "status": _status(recs), "space": U.name, "checks": recs}


class _Records(list):
    """List of report records that remembers how long each one took."""

    def __init__(self):
        super().__init__()
        self.seconds = []
        self._t = time.perf_counter()

    def append(self, rec):
        now = time.perf_counter()
        self.seconds.append(now - self._t)
        self._t = now
        super().append(rec)


def run_tasks(task: str, U: CoveringDatum | None, spec, D: int, N: int, pipelines, seed: int) -> list[dict]:
    from .simpsec import thm33_suite, validate_section

    targets = [(U, spec)] if U is not None else [(builtin(n, **p), None) for n, p in FIXTURES]
    out = _Records()
    for cov, sp in targets:
        val = task_validate(cov)
        out.append(val)
        if val["status"] != "PASS":
            continue
        if task in ("cohomology", "all"):
            out.append(task_cohomology(cov, pipelines, D, N))
        if task in ("verify-thm31", "all"):
            out.append(verify_thm31(cov, D))
        if task in ("verify-thm41", "all"):
            out.append(verify_thm41(cov, D, N))
        if task == "verify-prop52" or (task == "all" and cov.name == "p1_two_charts"):
            if cov.name != "p1_two_charts" and not cov.name.startswith("affine_"):
                raise UsageError("verify-prop52 supports p1_two_charts and affine data")
            out.append(prop52_checks(cov, D, N, seed=seed))
        if task == "verify-thm15":
            out.append(verify_thm15(len(cov.lattice), 5))
        if task == "verify-thm33" and sp is not None and sp.sections is not None:
            out.append(validate_section(section_datum(sp)))
    if task in ("verify-thm15", "all") and U is None:
        for n in (1, 2, 3):
            out.append(verify_thm15(n, 5))
    if task == "verify-thm33" or (task == "all" and U is None):
        out.append(thm33_suite(D, N, seed=seed))
    return out


def render_table(report: dict, timings: dict[str, float]) -> str:
    rows = [("record", "space", "status", "betti", "time[s]")]
    for n, r in enumerate(report["records"]):
        betti = r.get("betti", "")
        if isinstance(betti, dict):
            betti = " ".join(f"{k}={tuple(v)}" for k, v in betti.items())
        elif betti != "":
            betti = str(tuple(betti))
        rows.append((r["name"], str(r.get("space", "")), r["status"], betti, f"{timings.get(n, 0):.2f}"))
        for c in r.get("checks", []):
            if c["status"] != "PASS":
                rows.append(("  " + c["name"], "", c["status"], str(c.get("witness") or ""), ""))
    widths = [max(len(row[k]) for row in rows) for k in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.append(f"overall: {report['status']}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mixedres", description="Exact desk-scale checks for mixed resolutions.")
    ap.add_argument("--space", help="builtin (e.g. p1_two_charts:d=2, affine_2) or a spec file")
    ap.add_argument("--task", choices=TASKS, default="cohomology")
    ap.add_argument("--form-degree", "-D", dest="D", type=int, default=1, help="form budget D (>= 1)")
    ap.add_argument("--adic-order", "-N", dest="N", type=int, default=2, help="adic order N (>= 1)")
    ap.add_argument("--window", "-W", type=int, default=None, help="Laurent window N_w")
    ap.add_argument("--pipelines", default="all", help="comma list of standard,thom-sullivan,mixed or 'all'")
    ap.add_argument("--out", help="write the JSON report here")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--timing", action="store_true", help="include timings in the JSON report")
    ap.add_argument("--quiet", action="store_true", help="no text table on stdout")
    ap.add_argument("--version", action="version", version=f"mixedres {__version__}")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.D < 1 or args.N < 1 or (args.window is not None and args.window < 0):
            raise UsageError("truncations must be positive: D >= 1, N >= 1, window >= 0")
        pipes = PIPELINES if args.pipelines == "all" else tuple(p.strip() for p in args.pipelines.split(","))
        for p in pipes:
            if p not in PIPELINES:
                raise UsageError(f"unknown pipeline {p!r}")
        U, spec = (None, None)
        if args.space:
            U, spec = parse_space(args.space)
            if args.window is not None:
                U = U.with_window(args.window)
        elif args.task not in ("all", "verify-thm15", "verify-thm33"):
            raise UsageError(f"--task {args.task} needs --space")
        t0 = time.perf_counter()
        records = run_tasks(args.task, U, spec, args.D, args.N, list(pipes), args.seed)
        elapsed = time.perf_counter() - t0
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, MixError, CoveringError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        hint = " (raise --window or --adic-order)" if isinstance(exc, MixError) else ""
        if hint:
            print(hint.strip(), file=sys.stderr)
        return 2
    config = {
        "space": args.space,
        "task": args.task,
        "D": args.D,
        "N": args.N,
        "window": args.window,
        "pipelines": list(pipes),
        "seed": args.seed,
    }
    report = {"artifact": "mixedres", "version": __version__, "config": config, "records": records,
              "status": _status(records)}
    timings = dict(enumerate(records.seconds))
    if args.timing:
        report["elapsed_seconds"] = round(elapsed, 3)
        for r, t in zip(records, records.seconds):
            r["seconds"] = round(t, 3)
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    if not args.quiet:
        print(render_table(report, timings))
        print(f"elapsed: {elapsed:.2f}s  threads: {os.environ.get(ENV_VAR, '1')}")
    return 0 if report["status"] == "PASS" else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
