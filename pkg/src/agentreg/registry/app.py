"""HTTP front end for the registry (JSON bodies, every document versioned)."""

from __future__ import annotations

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse

from agentreg.normalizer import Constraint
from agentreg.registry.service import (
    SCHEMA_VERSION,
    CallEvent,
    EmptyWindow,
    Registry,
    RegistryError,
    RegistrationRejected,
    description_from_dict,
)


def _doc(**body) -> dict:
    return {"schema_version": SCHEMA_VERSION, **body}


def create_app(registry: Registry) -> FastAPI:
    app = FastAPI(title="agentreg registry")
    app.state.registry = registry

    @app.exception_handler(RegistryError)
    async def _registry_error(request: Request, exc: RegistryError):
        body = _doc(error=type(exc).__name__, detail=str(exc))
        if isinstance(exc, RegistrationRejected):
            body["diagnosis"] = exc.diagnosis
        return JSONResponse(body, status_code=exc.status)

    @app.post("/register", status_code=201)
    async def register(doc: dict):
        desc = description_from_dict(doc.get("tool") or {})
        entry = registry.register_tool(desc, doc.get("provider_id", ""))
        return _doc(
            tool_id=entry.tool_id,
            card=entry.card(),
            registration_time=entry.registration_time,
            normalization_log=entry.to_dict()["normalized"]["normalization_log"],
        )

    @app.get("/tools")
    async def tools(view: str = "selection", role: str = "agent", x_session: str | None = Header(default=None)):
        return _doc(view=view, tools=registry.list_tools(view, role, x_session))

    @app.get("/tools/shares")
    async def shares(since: str | None = None, until: str | None = None):
        return _doc(shares=registry.selection_shares(since, until))

    @app.get("/tools/{tool_id}/marketing")
    async def marketing(tool_id: str, x_session: str | None = Header(default=None)):
        return _doc(**registry.marketing_copy(tool_id, x_session))

    @app.post("/calls")
    async def calls(doc: dict):
        try:
            event = CallEvent.from_dict(doc)
        except (KeyError, ValueError) as exc:
            raise RegistryError(f"malformed call event: {exc}") from exc
        return registry.log_call(event)

    @app.get("/tools/{tool_id}/aaqs")
    async def aaqs(tool_id: str, since: str | None = None, until: str | None = None):
        rec = registry.aaqs_report(tool_id, since, until)
        if isinstance(rec, EmptyWindow):
            return rec.to_dict()
        return _doc(status="ok", tool_id=rec.tool_id, selection_rate=rec.selection_rate,
                    capability_match=rec.capability_match, aaqs=rec.aaqs, coasting=rec.coasting)

    @app.post("/admin/attest")
    async def attest(doc: dict, x_operator_token: str = Header(default="")):
        c = doc.get("constraint") or {}
        constraint = Constraint.parse(c["name"], c["value"]) if "value" in c and "kind" not in c else Constraint.from_dict(c)
        entry = registry.attest(doc["tool_id"], constraint, x_operator_token, doc.get("attester", "registry-operator"))
        return _doc(tool_id=entry.tool_id, card=entry.card(),
                    verified_fields=list(entry.normalized.selection.verified_fields))

    @app.get("/admin/audit")
    async def audit():
        findings = registry.audit()
        return _doc(findings=[f.__dict__ for f in findings], digest=registry.digest())

    return app
