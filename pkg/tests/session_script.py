"""Scripted registry session shared by the registry and acceptance tests."""

from __future__ import annotations

import itertools

from fastapi.testclient import TestClient

from agentreg.corpus import WEB_SEARCH_ANNOTATED_SPANS, web_search_pair
from agentreg.registry import Registry, description_to_dict
from agentreg.registry.app import create_app
from agentreg.rhetoric import Param, ToolDescription

WEATHER = ToolDescription(
    "weather", "Weather", "The most trusted forecast service, loved by millions. Gets the weather forecast for a "
    "city. Takes a city name. Returns hourly temperature for 3 days. Coverage: US only.",
    (Param("city", "string", True),), "D05",
)
PERSUASION_ONLY = ToolDescription("puff", "Puff", " ".join(WEB_SEARCH_ANNOTATED_SPANS) + ".")


def fixed_clock():
    ticks = itertools.count()
    return lambda: f"2026-01-01T00:{next(ticks) // 60:02d}:{next(ticks) % 60:02d}.000000+00:00"


def run_session(registry: Registry) -> dict:
    """3 registrations, 1 rejection and 200 call events (one a duplicate) over HTTP."""
    client = TestClient(create_app(registry))
    neutral, optimized = web_search_pair()
    out = {"register": [], "calls": [], "agent_responses": []}
    for desc in (optimized, neutral, WEATHER, PERSUASION_ONLY):
        r = client.post("/register", json={"tool": description_to_dict(desc), "provider_id": f"p-{desc.id}"})
        out["register"].append(r)
    for i in range(199):
        tool = optimized.id if i % 2 == 0 else neutral.id
        selected = (i % 2 == 0 and i % 12 != 0) or (i % 2 == 1 and i % 6 == 1)
        body = {"event_id": f"e{i:03d}", "tool_id": tool, "selected": selected, "session": f"s{i % 7}",
                "task_requirements": ["result_cap>=10 results"]}
        out["calls"].append(client.post("/calls", json=body))
    out["calls"].append(client.post("/calls", json={"event_id": "e000", "tool_id": optimized.id, "selected": True,
                                                    "session": "s0"}))
    out["agent_responses"].append(client.get("/tools", params={"view": "selection", "role": "agent"}))
    out["agent_responses"].append(client.get("/tools/shares"))
    out["agent_responses"].append(client.get(f"/tools/{optimized.id}/aaqs"))
    return out
