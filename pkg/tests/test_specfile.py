from pathlib import Path

import pytest

from mixedres.cech import p1_three_charts, p1_two_charts
from mixedres.simpsec import validate_section
from mixedres.specfile import SpecParseError, parse_spec, parse_spec_text, section_datum

EXAMPLES = Path(__file__).resolve().parents[1] / "docs" / "examples"

MINIMAL = """\
[space]
name = tiny
lattice = x
charts = 2
window = 3

[charts]
0 = x
1 = y

[overlaps]
y = x^-1
0,1 = x^±1
"""


def test_two_chart_example_matches_builtin():
    spec = parse_spec(EXAMPLES / "p1_two_charts.spec")
    assert spec.covering == p1_two_charts(2, 6)
    assert spec.fiber == "z"
    assert validate_section(section_datum(spec))["status"] == "PASS"


def test_three_chart_example_matches_builtin():
    assert parse_spec(EXAMPLES / "p1_three_charts.spec").covering == p1_three_charts(-2, 6)


def test_bad_overlap_parses_but_fails_validation():
    U = parse_spec(EXAMPLES / "bad_overlap.spec").covering
    recs = U.validate()
    assert recs[0]["status"] == "FAIL"
    assert "x^-1 on (0, 1)" in recs[0]["witness"]


def test_minimal_defaults():
    U = parse_spec_text(MINIMAL).covering
    assert U.window == 3 and U.twists == (0,)
    assert all(r["status"] == "PASS" for r in U.validate())


@pytest.mark.parametrize("text,where,msg", [
    ("", (1, 1), "empty"),
    (MINIMAL.replace("1 = y", "1 = w"), (9, 5), "unknown variable 'w'"),
    (MINIMAL.replace("y = x^-1", "y = x+1"), (12, 5), "non-monomial"),
    (MINIMAL.replace("window = 3", "window = -1"), (5, 10), "inconsistent window"),
    (MINIMAL + "[module]\ntwists = 2\nframe 1 = x^9\n", (16, 11), "inconsistent window"),
    (MINIMAL.replace("[charts]", "[chart]"), (7, 2), "unknown section"),
    (MINIMAL.replace("0,1 = x^±1", "1,0 = x^±1"), (13, 1), "strictly increasing"),
    (MINIMAL.replace("0,1 = x^±1\n", ""), None, "no algebra declared"),
    (MINIMAL + "[sections]\n0 = x\n", None, "needs a [bundle]"),
], ids=["empty", "unknown-variable", "non-monomial", "negative-window", "frame-outside-window",
        "unknown-section", "unordered-index", "missing-algebra", "sections-without-bundle"])
def test_parse_errors_carry_position(text, where, msg):
    with pytest.raises(SpecParseError) as exc:
        parse_spec_text(text, "f.spec")
    assert msg in str(exc.value)
    if where is not None:
        assert (exc.value.line, exc.value.col) == where
        assert str(exc.value).startswith(f"f.spec:{where[0]}:{where[1]}:")


def test_sections_with_simplex_coordinates():
    text = MINIMAL + "[bundle]\nfiber = z\n[sections]\n0 = x\n1 = x^-1\n0,1 = x - t1*x + t1*x^-1\n"
    spec = parse_spec_text(text)
    assert spec.sections[(0, 1)] == {(0,): {(1,): 1}, (1,): {(1,): -1, (-1,): 1}}
    assert validate_section(section_datum(spec))["status"] == "PASS"
