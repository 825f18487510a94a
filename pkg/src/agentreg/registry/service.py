"""Two-tier tool registry: normalize at the door, serve cards to agents.

Agents only ever see the selection-facing card; provider copy is released
to a user session after that session has logged a selection of the tool.
All state changes go through the event store, so replaying the log
rebuilds the same state.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import re
import threading
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable

from agentreg.metrics import AaqsRecord, Requirement, aaqs, capability_match_binary
from agentreg.normalizer import (
    Constraint,
    NormalizationFailure,
    NormalizedEntry,
    normalize,
    render_selection_text,
)
from agentreg.registry.store import EventStore
from agentreg.rhetoric import FeatureLexicon, FramingLevel, Param, ToolDescription, default_lexicon, detect_features
from agentreg.rhetoric import classify_level, find_spans

SCHEMA_VERSION = "agentreg-registry/1"
ROLES = ("agent", "user")
VIEWS = ("selection", "marketing")


class RegistryError(Exception):
    status = 400


class RegistrationRejected(RegistryError):
    status = 422

    def __init__(self, tool_id: str, diagnosis: str, log=()):
        super().__init__(f"registration of {tool_id!r} rejected: {diagnosis}")
        self.tool_id = tool_id
        self.diagnosis = diagnosis
        self.log = log


class ConflictError(RegistryError):
    status = 409


class UnknownToolError(RegistryError):
    status = 404


class AccessDenied(RegistryError):
    status = 403


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


def description_to_dict(desc: ToolDescription) -> dict:
    return {
        "id": desc.id, "name": desc.name, "body": desc.body,
        "param_schema": [asdict(p) for p in desc.param_schema], "domain_tag": desc.domain_tag,
        "declared_constraints": [c.to_dict() for c in desc.declared_constraints],
    }


def description_from_dict(d: dict) -> ToolDescription:
    if not d.get("id") or not d.get("body"):
        raise RegistryError("a tool document needs an id and a body")
    return ToolDescription(
        d["id"], d.get("name", d["id"]), d["body"],
        tuple(Param(**p) for p in d.get("param_schema", ())), d.get("domain_tag"),
        tuple(Constraint.from_dict(c) for c in d.get("declared_constraints", ())),
    )


@dataclass(frozen=True)
class Attestation:
    constraint: str
    value: str
    attester: str
    time: str


@dataclass
class RegistryEntry:
    tool_id: str
    provider_id: str
    normalized: NormalizedEntry
    registration_time: str
    verification_attestations: list[Attestation] = field(default_factory=list)

    def card(self) -> str:
        return render_selection_text(self.normalized.selection)

    def to_dict(self) -> dict:
        return {
            "tool_id": self.tool_id,
            "provider_id": self.provider_id,
            "normalized": self.normalized.to_dict(),
            "registration_time": self.registration_time,
            "verification_attestations": [asdict(a) for a in self.verification_attestations],
        }

    @classmethod
    def from_dict(cls, d: dict) -> RegistryEntry:
        return cls(d["tool_id"], d["provider_id"], NormalizedEntry.from_dict(d["normalized"]),
                   d["registration_time"], [Attestation(**a) for a in d["verification_attestations"]])


@dataclass(frozen=True)
class CallEvent:
    """One exposure of a tool in an agent's selection episode."""

    event_id: str
    tool_id: str
    task_requirements: tuple[Requirement, ...] = ()
    selected: bool = False
    timestamp: str = ""
    session: str | None = None

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id, "tool_id": self.tool_id,
            "task_requirements": [r.to_dict() for r in self.task_requirements],
            "selected": self.selected, "timestamp": self.timestamp, "session": self.session,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CallEvent:
        return cls(d["event_id"], d["tool_id"], tuple(Requirement.from_obj(r) for r in d.get("task_requirements", ())),
                   bool(d.get("selected", False)), d.get("timestamp", ""), d.get("session"))


@dataclass(frozen=True)
class EmptyWindow:
    tool_id: str
    since: str | None
    until: str | None

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "status": "empty-window", "tool_id": self.tool_id,
                "since": self.since, "until": self.until, "events": 0}


@dataclass(frozen=True)
class AuditFinding:
    tool_id: str
    level: str
    matches: tuple[str, ...]
    lexicon_version: str


class Registry:
    def __init__(self, store: EventStore | None = None, lexicon: FeatureLexicon | None = None,
                 operator_token: str = "operator", clock: Callable[[], str] = utc_now,
                 serve_renormalized: bool = False):
        self.lexicon = lexicon or default_lexicon()
        self.store = store or EventStore()
        self.operator_token = operator_token
        self.clock = clock
        self.serve_renormalized = serve_renormalized
        self._lock = threading.RLock()
        self.entries: dict[str, RegistryEntry] = {}
        self.calls: list[CallEvent] = []
        self._event_ids: set[str] = set()
        self.sessions: dict[str, list[str]] = {}
        self.audit_versions: dict[str, dict] = {}
        self._rebuild()

    # -- state ------------------------------------------------------------

    def _rebuild(self) -> None:
        snap = self.store.read_snapshot()
        start = 0
        if snap and snap["seq"] <= len(self.store.events):
            self._load_state(snap["state"])
            start = snap["seq"]
        for event in self.store.events[start:]:
            self._apply(event)

    def _load_state(self, state: dict) -> None:
        self.entries = {e["tool_id"]: RegistryEntry.from_dict(e) for e in state["entries"]}
        self.calls = [CallEvent.from_dict(c) for c in state["calls"]]
        self._event_ids = {c.event_id for c in self.calls}
        self.sessions = {k: list(v) for k, v in state["sessions"].items()}

    def _apply(self, event: dict) -> None:
        kind, p = event["type"], event["payload"]
        if kind == "register":
            entry = RegistryEntry.from_dict(p["entry"])
            self.entries[entry.tool_id] = entry
        elif kind == "attest":
            entry = self.entries[p["tool_id"]]
            c = Constraint.from_dict(p["constraint"])
            entry.normalized = _replace_selection(entry.normalized, entry.normalized.selection.with_attestation(c))
            entry.verification_attestations.append(Attestation(**p["attestation"]))
        elif kind == "call":
            call = CallEvent.from_dict(p)
            self.calls.append(call)
            self._event_ids.add(call.event_id)
            if call.selected and call.session:
                picks = self.sessions.setdefault(call.session, [])
                if call.tool_id not in picks:
                    picks.append(call.tool_id)
        else:
            raise ValueError(f"unknown event type {kind!r}")

    def _commit(self, kind: str, payload: dict) -> dict:
        event = self.store.append(kind, payload)
        self._apply(event)
        if self.store.due_for_snapshot():
            self.store.write_snapshot(event["seq"], self.state(), self.digest())
        return event

    def state(self) -> dict:
        with self._lock:
            return {
                "entries": [e.to_dict() for e in self.entries.values()],
                "calls": [c.to_dict() for c in self.calls],
                "sessions": {k: list(v) for k, v in sorted(self.sessions.items())},
            }

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.state(), sort_keys=True).encode()).hexdigest()

    @classmethod
    def replay(cls, events: Iterable[dict], **kwargs) -> Registry:
        """Fresh in-memory registry rebuilt from an event sequence."""
        store = EventStore()
        store.events = [dict(e) for e in events]
        return cls(store=store, **kwargs)

    # -- operations --------------------------------------------------------

    def register_tool(self, desc: ToolDescription, provider_id: str = "") -> RegistryEntry:
        if not desc.body.strip():
            raise RegistrationRejected(desc.id, "empty description body")
        with self._lock:
            if desc.id in self.entries:
                raise ConflictError(f"tool id {desc.id!r} is already registered")
            try:
                normalized = normalize(desc, self.lexicon)
            except NormalizationFailure as exc:
                raise RegistrationRejected(desc.id, exc.diagnosis, exc.log) from exc
            entry = RegistryEntry(desc.id, provider_id or desc.id, normalized, self.clock())
            self._commit("register", {"entry": entry.to_dict(), "lexicon_version": self.lexicon.version})
            return self.entries[desc.id]

    def _agent_card(self, entry: RegistryEntry) -> dict:
        return {"tool_id": entry.tool_id, "card": entry.card(), "schema": entry.normalized.selection.to_dict()}

    def list_tools(self, view: str = "selection", requester_role: str = "agent",
                   session: str | None = None) -> list[dict]:
        if view not in VIEWS or requester_role not in ROLES:
            raise RegistryError(f"view must be one of {VIEWS}, role one of {ROLES}")
        with self._lock:
            if view == "selection":
                return [self._agent_card(e) for e in self.entries.values()]
            if requester_role == "agent":
                raise AccessDenied("agents may request the selection view only")
            picked = self.sessions.get(session or "", [])
            return [self._marketing(self.entries[t]) for t in picked if t in self.entries]

    def _marketing(self, entry: RegistryEntry) -> dict:
        return {"tool_id": entry.tool_id, "body": entry.normalized.marketing.original_body}

    def marketing_copy(self, tool_id: str, session: str | None) -> dict:
        with self._lock:
            self._require(tool_id)
            if tool_id not in self.sessions.get(session or "", []):
                raise AccessDenied(f"marketing copy for {tool_id!r} is shown only after a selection in this session")
            return self._marketing(self.entries[tool_id])

    def _require(self, tool_id: str) -> RegistryEntry:
        if tool_id not in self.entries:
            raise UnknownToolError(f"unknown tool {tool_id!r}")
        return self.entries[tool_id]

    def log_call(self, event: CallEvent) -> dict:
        with self._lock:
            self._require(event.tool_id)
            if event.event_id in self._event_ids:
                return {"schema_version": SCHEMA_VERSION, "event_id": event.event_id, "duplicate": True}
            if not event.timestamp:
                event = CallEvent(event.event_id, event.tool_id, event.task_requirements, event.selected,
                                  self.clock(), event.session)
            self._commit("call", event.to_dict())
            return {"schema_version": SCHEMA_VERSION, "event_id": event.event_id, "duplicate": False}

    def _window(self, tool_id: str | None, since: str | None, until: str | None) -> list[CallEvent]:
        return [c for c in self.calls
                if (tool_id is None or c.tool_id == tool_id)
                and (since is None or c.timestamp >= since) and (until is None or c.timestamp < until)]

    def aaqs_report(self, tool_id: str, since: str | None = None, until: str | None = None) -> AaqsRecord | EmptyWindow:
        """Selection rate and mean binary capability match over the tool's logged exposures."""
        with self._lock:
            entry = self._require(tool_id)
            events = self._window(tool_id, since, until)
            if not events:
                return EmptyWindow(tool_id, since, until)
            rate = sum(e.selected for e in events) / len(events)
            schema = entry.normalized.selection
            match = sum(capability_match_binary(schema, e.task_requirements).score for e in events) / len(events)
            return aaqs(rate, match, tool_id)

    def selection_shares(self, since: str | None = None, until: str | None = None) -> dict[str, float]:
        """Each tool's fraction of all logged selections in the window."""
        with self._lock:
            picks = [c.tool_id for c in self._window(None, since, until) if c.selected]
            return {t: (picks.count(t) / len(picks) if picks else 0.0) for t in self.entries}

    def attest(self, tool_id: str, constraint: Constraint, token: str, attester: str = "registry-operator") -> RegistryEntry:
        """Mark a constraint as verified; the provider's copy is never touched."""
        if not hmac.compare_digest(token, self.operator_token):
            raise AccessDenied("invalid operator credential")
        with self._lock:
            self._require(tool_id)
            att = Attestation(constraint.name, constraint.render_value(), attester, self.clock())
            self._commit("attest", {"tool_id": tool_id, "constraint": constraint.to_dict(), "attestation": asdict(att)})
            return self.entries[tool_id]

    def audit(self, lexicon: FeatureLexicon | None = None) -> list[AuditFinding]:
        """Re-check every served card; return those not at L0 or carrying lexicon matches.

        With a newer lexicon, each entry is also re-normalized from its
        provider copy and both versions are recorded; whether the new card is
        served is an operator setting.
        """
        lex = lexicon or self.lexicon
        findings = []
        with self._lock:
            for entry in self.entries.values():
                card = entry.card()
                level = classify_level(detect_features(card, lex))
                matches = tuple(s.text for s in find_spans(card, lex))
                if level != FramingLevel.L0 or matches:
                    findings.append(AuditFinding(entry.tool_id, str(level), matches, lex.version))
                if lexicon is not None and lexicon.version != self.lexicon.version:
                    self._renormalize(entry, lexicon)
        return findings

    def _renormalize(self, entry: RegistryEntry, lex: FeatureLexicon) -> None:
        body = entry.normalized.marketing.original_body
        desc = ToolDescription(entry.tool_id, entry.tool_id, body, entry.normalized.selection.input_spec)
        try:
            fresh = normalize(desc, lex)
        except NormalizationFailure as exc:
            self.audit_versions[entry.tool_id] = {"old": self.lexicon.version, "new": lex.version, "error": exc.diagnosis}
            return
        self.audit_versions[entry.tool_id] = {
            "old": self.lexicon.version, "new": lex.version,
            "old_card": entry.card(), "new_card": render_selection_text(fresh.selection),
        }
        if self.serve_renormalized:
            entry.normalized = fresh


def _replace_selection(entry: NormalizedEntry, selection) -> NormalizedEntry:
    return NormalizedEntry(entry.tool_id, selection, entry.marketing, entry.normalization_log)


def marketing_leaks(text: str, registry: Registry) -> list[tuple[str, str]]:
    """(tool_id, span) pairs whose stripped persuasion text appears in ``text``.

    Matching is case-insensitive on word boundaries, so a span "premium"
    does not fire on an unrelated longer word containing it.
    """
    leaks = []
    for entry in registry.entries.values():
        for span in entry.normalized.marketing.stripped_spans:
            if re.search(r"(?<!\w)" + re.escape(span.text) + r"(?!\w)", text, re.IGNORECASE):
                leaks.append((entry.tool_id, span.text))
    return leaks
