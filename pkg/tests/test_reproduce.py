from __future__ import annotations

import json

import pytest

from agentreg.agentsim.reference import DISCLOSURE_EFFECTS, LABEL_KAPPA
from agentreg.reproduce import TABLES, disclosure_multipliers, power_n, reproduce


@pytest.fixture(scope="module")
def tables():
    return {t: reproduce(t, seed=0) for t in TABLES}


def rows(report, **match):
    return [r for r in report.rows if all(r[k] == v for k, v in match.items())]


def test_kappa_table_within_15_percent(tables):
    for r in tables["kappa-table"].rows:
        assert abs(r["deviation_pct"]) <= 15, r
    (o4,) = rows(tables["kappa-table"], model="o4-mini", level="L1")
    assert o4["sim_kappa"] == pytest.approx(15.7, rel=0.15)


def test_multitool_step_models_exact(tables):
    for r in tables["multitool-table"].rows:
        if r["model"] != "claude":
            assert r["sim_rsa"] == 5.0


def test_legal_table_pooled(tables):
    (pooled,) = rows(tables["legal-table"], model="pooled")
    assert pooled["illegal_increment"] == pytest.approx(-0.02, abs=0.05)
    assert pooled["capture_pct"] == pytest.approx(106.5, abs=0.5)
    (claude,) = rows(tables["legal-table"], model="claude")
    assert claude["capture_pct"] is None


def test_disclosure_table_label_probability(tables):
    for r in rows(tables["disclosure-table"], condition="label"):
        published_p = 0.5 + DISCLOSURE_EFFECTS[r["model"]]["sbc0"] + DISCLOSURE_EFFECTS[r["model"]]["label"] / 100
        assert 0.5 + r["sim_sbc"] == pytest.approx(published_p, abs=0.02)


def test_dose_response_shape(tables):
    by = {r["level"]: r for r in tables["dose-response"].rows}
    assert abs(by["L0"]["sim_sbc"]) <= 0.03
    assert by["L0"]["ci_low"] <= 0 <= by["L0"]["ci_high"]
    assert by["L1"]["sim_sbc"] - by["L0"]["sim_sbc"] > 0.25


def test_reports_render_and_are_deterministic(tables):
    for t in TABLES:
        text = tables[t].render("table")
        assert text.startswith(t)
        for line in tables[t].render("records").splitlines():
            assert json.loads(line)["table"] == t
    assert reproduce("dose-response", seed=0).rows == tables["dose-response"].rows


def test_unknown_table():
    with pytest.raises(ValueError, match="kappa-table"):
        reproduce("table-9")


def test_disclosure_multipliers():
    m = disclosure_multipliers()
    for model, kd in LABEL_KAPPA.items():
        assert m[model]["label"] == pytest.approx(kd, abs=0.2 if kd > 5 else 0.1)
    assert [k for k, v in m.items() if v["label"] <= 1] == ["claude"]
    assert all(v["none"] > 1 for v in m.values())


def test_power_n():
    assert power_n(0.5) % 2 == 0
    assert power_n(0.5) == 2846
    assert power_n(0.9) > power_n(0.5)
