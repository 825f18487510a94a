"""Tool registry that normalizes descriptions at ingestion."""

from agentreg.registry.service import (
    SCHEMA_VERSION,
    AccessDenied,
    Attestation,
    AuditFinding,
    CallEvent,
    ConflictError,
    EmptyWindow,
    RegistrationRejected,
    Registry,
    RegistryEntry,
    RegistryError,
    UnknownToolError,
    description_from_dict,
    description_to_dict,
    marketing_leaks,
)
from agentreg.registry.store import EventStore

__all__ = [
    "SCHEMA_VERSION", "AccessDenied", "Attestation", "AuditFinding", "CallEvent", "ConflictError", "EmptyWindow",
    "RegistrationRejected", "Registry", "RegistryEntry", "RegistryError", "UnknownToolError",
    "description_from_dict", "description_to_dict", "marketing_leaks", "EventStore",
]
