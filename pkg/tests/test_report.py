import json
import math

from heavenly.report import VerificationReport, render_reports, strip_timestamp


def make(check, defect, tol=1.0, **kw):
    return VerificationReport(check=check, case="mp", params={"b": 1, "a": 2}, defect=defect, tolerance=tol, **kw)


def test_pass_requires_secondary():
    assert make("x", 0.5).passed
    assert not make("x", 0.5, secondary=(("other", 2.0, 1.0),)).passed
    assert not make("x", math.nan).passed


def test_render_is_sorted_and_null_safe():
    text = render_reports([make("b", math.inf), make("a", 0.1, sign=-1)], timestamp=False)
    doc = json.loads(text)
    assert [r["check"] for r in doc["reports"]] == ["a", "b"]
    assert doc["reports"][1]["defect"] is None and doc["reports"][0]["sign"] == -1
    assert list(doc["reports"][0]["params"]) == ["a", "b"]


def test_timestamp_is_the_only_difference():
    r = [make("a", 0.1)]
    assert strip_timestamp(render_reports(r)) == json.loads(render_reports(r, timestamp=False))


def test_line_format():
    line = make("a", 0.25, secondary=(("s", 0.0, 1.0),)).line()
    assert line.startswith("[PASS] a (mp)") and "s=0.000e+00" in line
