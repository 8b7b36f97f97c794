import math

import pytest
from hypothesis import given, strategies as st

from bergkern.reports import CheckReport, ReportBuilder, evaluate_margin

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_at_least_and_close():
    b = ReportBuilder("x", "s", {}, 0.1)
    b.q("a", 2.0)
    b.q("b", 1.0)
    assert b.at_least("ge", "a", "b", scale="b") == 1.0
    assert b.close("cl", "a", "b") == -1.0
    rep = b.build()
    assert not rep.passed and rep.worst_margin == -1.0


def test_duplicate_labels_rejected():
    b = ReportBuilder("x", "s", {}, 0.0)
    b.q("a", 1.0)
    with pytest.raises(ValueError):
        b.q("a", 2.0)


def test_fail_forces_failure():
    b = ReportBuilder("x", "s", {}, 0.0)
    b.fail("boom")
    rep = b.build()
    assert not rep.passed and rep.notes == ["boom"] and rep.worst_margin == math.inf


def test_nonfinite_margin_fails():
    b = ReportBuilder("x", "s", {}, 1.0)
    b.q("a", math.inf)
    b.margin("m", [(1, "a")])
    assert not b.build().passed


@given(a=finite, b=finite, s=st.floats(1e-3, 1e3), tol=st.floats(0, 10), absolute=st.booleans())
def test_margin_soundness_and_verdict(a, b, s, tol, absolute):
    bld = ReportBuilder("x", "s", {}, tol)
    bld.q("a", a)
    bld.q("b", b)
    bld.q("s", s)
    bld.margin("m", [(1, "a"), (-2.5, "b")], "s", absolute)
    rep = bld.build()
    assert rep.recompute_margins()[0] == pytest.approx(rep.margins[0].value, abs=1e-12, rel=1e-12)
    assert rep.passed == (rep.margins[0].value >= -tol)
    again = CheckReport.from_dict(rep.to_dict())
    assert again.to_dict() == rep.to_dict()


def test_absorb_prefixes_everything():
    inner = ReportBuilder("in", "s", {}, 0.0)
    inner.q("a", 1.0)
    inner.q("b", 3.0)
    inner.at_least("m", "a", "b", scale="b")
    inner.note("n")
    outer = ReportBuilder("out", "s", {}, 0.0)
    outer.absorb(inner.build(), "p")
    rep = outer.build()
    assert [q.label for q in rep.quantities] == ["p.a", "p.b"]
    assert rep.margins[0].terms == ((1.0, "p.a"), (-1.0, "p.b")) and rep.margins[0].scale == "p.b"
    assert rep.recompute_margins() == [m.value for m in rep.margins]
    assert rep.notes == ["p: n"]


def test_timing_isolated():
    d = ReportBuilder("x", "s", {}, 0.0).build().to_dict()
    assert set(d["timing"]) == {"runtime_ms"}
    assert "runtime_ms" not in {k for k in d if k != "timing"}


def test_evaluate_margin_direct():
    assert evaluate_margin(((1.0, "a"),), "s", True, {"a": 3.0, "s": -2.0}) == -1.5
