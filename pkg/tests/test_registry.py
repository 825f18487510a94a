from __future__ import annotations

import dataclasses

import pytest
from fastapi.testclient import TestClient
from session_script import PERSUASION_ONLY, WEATHER, fixed_clock, run_session

from agentreg.corpus import web_search_pair
from agentreg.metrics import Requirement
from agentreg.normalizer import Constraint
from agentreg.registry import (
    SCHEMA_VERSION,
    AccessDenied,
    CallEvent,
    ConflictError,
    EmptyWindow,
    EventStore,
    RegistrationRejected,
    Registry,
    UnknownToolError,
    description_to_dict,
    marketing_leaks,
)
from agentreg.registry.app import create_app
from agentreg.rhetoric import FramingLevel, classify_level, default_lexicon, detect_features, find_spans


@pytest.fixture
def reg():
    return Registry(clock=fixed_clock())


@pytest.fixture
def client(reg):
    return TestClient(create_app(reg))


def test_register_optimized_and_neutral(reg):
    neutral, optimized = web_search_pair()
    e = reg.register_tool(optimized)
    assert classify_level(detect_features(e.card(), default_lexicon())) == FramingLevel.L0
    assert e.normalized.marketing.original_body == optimized.body
    assert e.normalized.normalization_log
    assert reg.register_tool(neutral).normalized.normalization_log == ()


def test_rejections_and_conflicts(reg):
    with pytest.raises(RegistrationRejected) as err:
        reg.register_tool(PERSUASION_ONLY)
    assert "empty schema" in err.value.diagnosis
    assert reg.store.events == []
    _, optimized = web_search_pair()
    reg.register_tool(optimized)
    with pytest.raises(ConflictError):
        reg.register_tool(optimized)


def test_list_tools_views(reg):
    assert reg.list_tools() == []
    for i in range(5):
        neutral, optimized = web_search_pair(f"t{i}")
        reg.register_tool(optimized if i % 2 else neutral)
    cards = reg.list_tools("selection", "agent")
    assert [c["tool_id"] for c in cards] == ["t0-neutral", "t1-optimized", "t2-neutral", "t3-optimized", "t4-neutral"]
    lex = default_lexicon()
    assert all(find_spans(c["card"], lex) == [] for c in cards)
    with pytest.raises(AccessDenied):
        reg.list_tools("marketing", "agent")
    assert reg.list_tools("marketing", "user", "sess") == []
    reg.log_call(CallEvent("e1", "t1-optimized", selected=True, session="sess"))
    (m,) = reg.list_tools("marketing", "user", "sess")
    assert m["body"] == web_search_pair("t1")[1].body
    assert reg.marketing_copy("t1-optimized", "sess")["body"] == m["body"]
    with pytest.raises(AccessDenied):
        reg.marketing_copy("t1-optimized", "other")


def test_log_call_counts_and_idempotence(reg):
    neutral, optimized = web_search_pair()
    reg.register_tool(optimized)
    reg.register_tool(neutral)
    for i in range(100):
        reg.log_call(CallEvent(f"e{i}", optimized.id if i < 83 else neutral.id, selected=True))
    assert reg.selection_shares() == {optimized.id: pytest.approx(0.83), neutral.id: pytest.approx(0.17)}
    before = reg.digest()
    assert reg.log_call(CallEvent("e5", optimized.id, selected=True))["duplicate"] is True
    assert reg.digest() == before
    with pytest.raises(UnknownToolError):
        reg.log_call(CallEvent("x", "ghost", selected=True))
    assert reg.digest() == before


def test_aaqs_reports(reg):
    neutral, optimized = web_search_pair()
    reg.register_tool(optimized)
    reg.register_tool(neutral)
    assert isinstance(reg.aaqs_report(optimized.id), EmptyWindow)
    for i in range(10):
        reg.log_call(CallEvent(f"a{i}", optimized.id, (Requirement.parse("result_cap>=10 results"),), True))
    assert reg.aaqs_report(optimized.id).aaqs == 1.0
    for i in range(10):
        reg.log_call(CallEvent(f"b{i}", neutral.id, (Requirement.parse("result_cap>=50 results"),), True))
    rec = reg.aaqs_report(neutral.id)
    assert rec.aaqs == 0.0 and rec.coasting
    w = Registry()
    w.register_tool(WEATHER)
    for i in range(10):
        req = ("coverage=us-only",) if i % 2 == 0 else ("coverage=international",)
        w.log_call(CallEvent(f"c{i}", "weather", tuple(map(Requirement.parse, req)), i < 8))
    rec = w.aaqs_report("weather")
    assert rec.selection_rate == 0.8 and rec.capability_match == 0.5 and rec.aaqs == pytest.approx(0.4)


def test_aaqs_window(reg):
    _, optimized = web_search_pair()
    reg.register_tool(optimized)
    reg.log_call(CallEvent("a", optimized.id, (), True, "2026-02-01T00:00:00+00:00"))
    rep = reg.aaqs_report(optimized.id, since="2026-03-01")
    assert isinstance(rep, EmptyWindow) and rep.to_dict()["status"] == "empty-window"


def test_attestation(reg):
    reg.register_tool(WEATHER)
    with pytest.raises(AccessDenied):
        reg.attest("weather", Constraint.parse("coverage", "us-only"), token="wrong")
    body = reg.entries["weather"].normalized.marketing.original_body
    e = reg.attest("weather", Constraint.parse("coverage", "us-only"), token="operator")
    assert "coverage" in e.normalized.selection.verified_fields
    assert e.normalized.marketing.original_body == body
    assert e.verification_attestations[0].attester == "registry-operator"


def test_file_store_persistence_and_snapshot(tmp_path):
    path = tmp_path / "events.jsonl"
    reg = Registry(EventStore(path, snapshot_every=5), clock=fixed_clock())
    neutral, optimized = web_search_pair()
    reg.register_tool(optimized)
    reg.register_tool(neutral)
    for i in range(12):
        reg.log_call(CallEvent(f"e{i}", optimized.id, selected=i % 3 == 0))
    assert (tmp_path / "events.jsonl.snapshot").exists()
    reopened = Registry(EventStore(path, snapshot_every=5))
    assert reopened.digest() == reg.digest()
    assert Registry.replay(reg.store.events).digest() == reg.digest()


def test_replay_prefix_determinism(reg):
    neutral, optimized = web_search_pair()
    digests = []
    reg.register_tool(optimized)
    digests.append(reg.digest())
    reg.register_tool(neutral)
    digests.append(reg.digest())
    for i in range(6):
        reg.log_call(CallEvent(f"e{i}", neutral.id, selected=True, session="s"))
        digests.append(reg.digest())
    for k, d in enumerate(digests, start=1):
        assert Registry.replay(reg.store.events[:k]).digest() == d


def test_audit_and_renormalize_policy(reg):
    _, optimized = web_search_pair()
    reg.register_tool(optimized)
    reg.register_tool(WEATHER)
    assert reg.audit() == []
    newer = dataclasses.replace(default_lexicon(), version="next")
    before = reg.entries["weather"].normalized
    reg.audit(newer)
    assert reg.audit_versions["weather"]["new"] == "next"
    assert reg.entries["weather"].normalized is before
    served = Registry(serve_renormalized=True)
    served.register_tool(WEATHER)
    old = served.entries["weather"].normalized
    served.audit(newer)
    assert served.entries["weather"].normalized is not old
    assert served.audit() == []


def test_http_session(reg):
    out = run_session(reg)
    codes = [r.status_code for r in out["register"]]
    assert codes == [201, 201, 201, 422]
    assert "empty schema" in out["register"][3].json()["diagnosis"]
    assert all(r.status_code == 200 for r in out["calls"])
    assert out["calls"][-1].json()["duplicate"] is True
    assert len(reg.calls) == 199
    for r in out["agent_responses"]:
        assert r.json()["schema_version"] == SCHEMA_VERSION
        assert marketing_leaks(r.text, reg) == []


def test_http_errors(client, reg):
    _, optimized = web_search_pair()
    client.post("/register", json={"tool": description_to_dict(optimized)})
    r = client.post("/register", json={"tool": description_to_dict(optimized)})
    assert r.status_code == 409 and r.json()["schema_version"] == SCHEMA_VERSION
    assert client.get("/tools", params={"view": "marketing", "role": "agent"}).status_code == 403
    assert client.post("/calls", json={"event_id": "x", "tool_id": "ghost"}).status_code == 404
    assert client.post("/calls", json={"tool_id": optimized.id}).status_code == 400
    assert client.post("/register", json={"tool": {"id": "x"}}).status_code == 400
    assert client.get(f"/tools/{optimized.id}/aaqs").json()["status"] == "empty-window"
    r = client.post("/admin/attest", json={"tool_id": optimized.id, "constraint": {"name": "coverage", "value": "global"}},
                    headers={"X-Operator-Token": "nope"})
    assert r.status_code == 403
    r = client.post("/admin/attest", json={"tool_id": optimized.id, "constraint": {"name": "coverage", "value": "global"}},
                    headers={"X-Operator-Token": "operator"})
    assert r.status_code == 200 and "coverage" in r.json()["verified_fields"]


def test_http_marketing_gating(client):
    _, optimized = web_search_pair()
    client.post("/register", json={"tool": description_to_dict(optimized)})
    assert client.get(f"/tools/{optimized.id}/marketing", headers={"X-Session": "u1"}).status_code == 403
    client.post("/calls", json={"event_id": "1", "tool_id": optimized.id, "selected": True, "session": "u1"})
    r = client.get(f"/tools/{optimized.id}/marketing", headers={"X-Session": "u1"})
    assert r.status_code == 200 and r.json()["body"] == optimized.body
    r = client.get("/tools", params={"view": "marketing", "role": "user"}, headers={"X-Session": "u1"})
    assert [t["tool_id"] for t in r.json()["tools"]] == [optimized.id]


def test_marketing_leaks_word_bounded(reg):
    _, optimized = web_search_pair()
    reg.register_tool(optimized)
    assert marketing_leaks("a premium plan", reg)
    assert marketing_leaks("premiumness", reg) == []
