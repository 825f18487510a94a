"""Trial records and their two interchange formats.

NDJSON: one JSON object per line; an optional first line with
``"record_type": "header"`` carries log metadata.

Columnar: comma-separated text with a header row naming ``FIELDS`` in order;
empty cells mean "none", booleans are ``true``/``false``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields

CONDITIONS = ("ON", "NN", "OO")
DISCLOSURES = ("none", "label", "rating", "sysprompt")
LOG_SCHEMA = "trial-log/1"


@dataclass(frozen=True)
class TrialRecord:
    trial_id: str
    domain_tag: str
    agent_id: str
    condition: str
    disclosure: str
    slot_of_optimized: int | None
    selected_slot: int
    selected_optimized: bool
    n_tools: int
    focal_slot: int
    focal_level: str = "L0"
    other_level: str = "L0"
    cell_id: str = ""

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ValueError(f"unknown condition {self.condition!r}")
        if self.disclosure not in DISCLOSURES:
            raise ValueError(f"unknown disclosure {self.disclosure!r}")
        if self.n_tools < 2:
            raise ValueError("n_tools must be at least 2")
        if not 0 <= self.selected_slot < self.n_tools:
            raise ValueError(f"selected_slot {self.selected_slot} outside 0..{self.n_tools - 1}")
        if self.condition == "ON":
            if self.slot_of_optimized is None:
                raise ValueError("ON trials need slot_of_optimized")
            if self.selected_optimized != (self.selected_slot == self.slot_of_optimized):
                raise ValueError("selected_optimized disagrees with slot fields")

    @property
    def selected_focal(self) -> bool:
        return self.selected_slot == self.focal_slot


FIELDS = tuple(f.name for f in fields(TrialRecord))


@dataclass
class TrialLog:
    records: list[TrialRecord]
    header: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def filter(self, **criteria) -> TrialLog:
        keep = [r for r in self.records if all(getattr(r, k) == v for k, v in criteria.items())]
        return TrialLog(keep, dict(self.header))

    def cells(self) -> dict[str, list[TrialRecord]]:
        out: dict[str, list[TrialRecord]] = {}
        for r in self.records:
            out.setdefault(r.cell_id, []).append(r)
        return out


def to_ndjson(log: TrialLog) -> str:
    lines = []
    if log.header:
        lines.append(json.dumps({"record_type": "header", "schema_version": LOG_SCHEMA, **log.header}, sort_keys=True))
    lines.extend(json.dumps(asdict(r), sort_keys=True) for r in log.records)
    return "\n".join(lines) + "\n"


def from_ndjson(text: str) -> TrialLog:
    header: dict = {}
    records = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if obj.get("record_type") == "header":
            header = {k: v for k, v in obj.items() if k not in ("record_type", "schema_version")}
            continue
        records.append(TrialRecord(**{k: obj[k] for k in FIELDS if k in obj}))
    return TrialLog(records, header)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def to_columnar(log: TrialLog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in log.records:
        w.writerow([_cell(getattr(r, f)) for f in FIELDS])
    return buf.getvalue()


_INT_FIELDS = {"slot_of_optimized", "selected_slot", "n_tools", "focal_slot"}


def from_columnar(text: str) -> TrialLog:
    reader = csv.DictReader(io.StringIO(text))
    records = []
    for row in reader:
        kw = {}
        for k, v in row.items():
            if k in _INT_FIELDS:
                kw[k] = int(v) if v != "" else None
            elif k == "selected_optimized":
                kw[k] = v == "true"
            else:
                kw[k] = v
        records.append(TrialRecord(**kw))
    return TrialLog(records)


def read_log(text: str) -> TrialLog:
    """Sniff the format: NDJSON lines start with ``{``."""
    stripped = text.lstrip()
    return from_ndjson(text) if stripped.startswith("{") else from_columnar(text)
