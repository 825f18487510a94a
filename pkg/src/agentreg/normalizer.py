"""Registry-side normalization into a two-tier description.

The selection-facing tier is a structured card built only from functional
content (capability, I/O, constraint phrases, declared constraints). The
provider's original text is kept untouched as the marketing-facing tier.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field, replace
from typing import Protocol

from agentreg.rhetoric import (
    FeatureLexicon,
    FramingLevel,
    Param,
    Span,
    ToolDescription,
    classify_level,
    default_lexicon,
    detect_features,
    find_spans,
)

SCHEMA_VERSION = "normalized-entry/1"
CATEGORICAL = "categorical"
QUANTITATIVE = "quantitative"
# Units rendered without a separating space ("230ms", "99%").
_TIGHT_UNITS = {"ms", "s", "%", "kb", "mb", "gb"}

_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")
_OUTPUT_VERBS = re.compile(r"\b(?:returns?|outputs?|produces?|yields?|responds with)\b\s*(.*)", re.IGNORECASE)
_INPUT_VERBS = re.compile(r"^\s*(?:takes|accepts|requires|expects)\b", re.IGNORECASE)
_CAPABILITY_VERBS = re.compile(
    r"^\s*(?:queries|searches|gets|fetches|retrieves|looks up|finds|executes|runs|converts|translates|"
    r"sends|creates|lists|books|computes|calculates|checks|generates|summarizes|extracts|reads|writes|"
    r"schedules|tracks|monitors|validates|resolves|parses|analyzes|locates|answers)\b",
    re.IGNORECASE,
)
_STOPWORDS = {
    "a", "an", "the", "and", "or", "of", "for", "with", "from", "to", "in", "on", "by", "at", "is",
    "are", "be", "it", "its", "this", "that", "our", "your", "you", "we", "all", "any",
}
_LANGUAGES = (
    "english", "spanish", "french", "german", "italian", "portuguese", "dutch", "chinese", "japanese",
    "korean", "arabic", "hindi", "russian", "turkish", "polish", "swedish",
)
_LANG = "(?:" + "|".join(_LANGUAGES) + ")"
_RESULT_CAP = re.compile(
    r"\b(?:up to|at most|maximum of|max\.?)\s+(\d+)\s+(results|items|records|rows|entries|matches|products|listings|headlines|itineraries|articles|documents|pages|images|quotes)\b",
    re.IGNORECASE,
)
_RATE_LIMIT = re.compile(
    r"\b(\d[\d,]*)\s+(requests|calls)\s+(?:per|/|an?)\s*(second|minute|hour|day)\b", re.IGNORECASE
)
_REGION_ONLY = re.compile(r"\b(us|u\.s\.|united states|eu|uk|canada|north america)[- ]only\b", re.IGNORECASE)
_REGION_ANY = re.compile(r"\b(global|worldwide|international)\s+coverage\b", re.IGNORECASE)
_COVERAGE_FIELD = re.compile(r"\bcoverage\s*:\s*([a-z][\w -]*)", re.IGNORECASE)
_LANGS = re.compile(
    rf"\b(?:supports?|available in|languages?:)\s+({_LANG}(?:(?:\s*,\s*|\s+and\s+|\s+or\s+|,\s+and\s+){_LANG})*)",
    re.IGNORECASE,
)
_CARD_LINE = re.compile(r"^([a-z_][\w]*):\s*(.*)$")
_PARAM_ITEM = re.compile(r"([A-Za-z_][\w]*)\s*\(([^,()]+)(,\s*optional)?\)")
_QUANT_VALUE = re.compile(r"^(\d+(?:\.\d+)?)\s*([^\d\s].*)$")
_VERIFIED = " (verified)"


class NormalizationFailure(Exception):
    """No functional content could be extracted; carries the diagnosis."""

    def __init__(self, tool_id: str, diagnosis: str, log: tuple = ()):
        super().__init__(f"{tool_id}: {diagnosis}")
        self.tool_id = tool_id
        self.diagnosis = diagnosis
        self.log = log


@dataclass(frozen=True)
class Constraint:
    name: str
    kind: str
    values: tuple[str, ...] = ()
    value: float | None = None
    unit: str | None = None

    def __post_init__(self):
        if self.kind == CATEGORICAL:
            if not self.values:
                raise ValueError(f"categorical constraint {self.name!r} needs a value set")
            vals = tuple(sorted({v.strip().lower() for v in self.values if v.strip()}))
            object.__setattr__(self, "values", vals)
        elif self.kind == QUANTITATIVE:
            if self.value is None or not self.unit:
                raise ValueError(f"quantitative constraint {self.name!r} needs a value and a unit")
            object.__setattr__(self, "value", float(self.value))
        else:
            raise ValueError(f"unknown constraint kind {self.kind!r}")

    def render_value(self) -> str:
        if self.kind == CATEGORICAL:
            return ", ".join(self.values)
        num = f"{self.value:g}"
        sep = "" if self.unit.lower() in _TIGHT_UNITS else " "
        return f"{num}{sep}{self.unit}"

    @classmethod
    def parse(cls, name: str, text: str) -> Constraint:
        m = _QUANT_VALUE.match(text.strip())
        if m:
            return cls(name, QUANTITATIVE, value=float(m.group(1)), unit=m.group(2).strip())
        return cls(name, CATEGORICAL, values=tuple(v for v in text.split(",")))

    def to_dict(self) -> dict:
        return asdict(self) | {"values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> Constraint:
        return cls(d["name"], d["kind"], tuple(d.get("values") or ()), d.get("value"), d.get("unit"))


@dataclass(frozen=True)
class SelectionFacingSchema:
    function_name: str
    input_spec: tuple[Param, ...]
    output_spec: str
    constraints: tuple[Constraint, ...] = ()
    verified_fields: tuple[str, ...] = ()

    def __post_init__(self):
        merged: dict[str, Constraint] = {}
        for c in self.constraints:
            merged[c.name] = c
        object.__setattr__(self, "input_spec", tuple(self.input_spec))
        object.__setattr__(self, "constraints", tuple(merged[k] for k in sorted(merged)))
        unknown = set(self.verified_fields) - set(merged)
        if unknown:
            raise ValueError(f"verified fields without a constraint: {sorted(unknown)}")
        object.__setattr__(self, "verified_fields", tuple(sorted(set(self.verified_fields))))

    def constraint(self, name: str) -> Constraint | None:
        for c in self.constraints:
            if c.name == name:
                return c
        return None

    def with_attestation(self, constraint: Constraint) -> SelectionFacingSchema:
        others = tuple(c for c in self.constraints if c.name != constraint.name)
        return replace(
            self,
            constraints=others + (constraint,),
            verified_fields=self.verified_fields + (constraint.name,),
        )

    def to_dict(self) -> dict:
        return {
            "function_name": self.function_name,
            "input_spec": [asdict(p) for p in self.input_spec],
            "output_spec": self.output_spec,
            "constraints": [c.to_dict() for c in self.constraints],
            "verified_fields": list(self.verified_fields),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SelectionFacingSchema:
        return cls(
            d["function_name"],
            tuple(Param(**p) for p in d["input_spec"]),
            d["output_spec"],
            tuple(Constraint.from_dict(c) for c in d.get("constraints", ())),
            tuple(d.get("verified_fields", ())),
        )


@dataclass(frozen=True)
class MarketingCopy:
    original_body: str
    stripped_spans: tuple[Span, ...] = ()


@dataclass(frozen=True)
class LogEntry:
    span: str
    category: str
    action: str


@dataclass(frozen=True)
class NormalizedEntry:
    tool_id: str
    selection: SelectionFacingSchema
    marketing: MarketingCopy
    normalization_log: tuple[LogEntry, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_id": self.tool_id,
            "selection": self.selection.to_dict(),
            "marketing": {
                "original_body": self.marketing.original_body,
                "stripped_spans": [asdict(s) for s in self.marketing.stripped_spans],
            },
            "normalization_log": [asdict(e) for e in self.normalization_log],
        }

    @classmethod
    def from_dict(cls, d: dict) -> NormalizedEntry:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {d.get('schema_version')!r}")
        return cls(
            d["tool_id"],
            SelectionFacingSchema.from_dict(d["selection"]),
            MarketingCopy(d["marketing"]["original_body"], tuple(Span(**s) for s in d["marketing"]["stripped_spans"])),
            tuple(LogEntry(**e) for e in d["normalization_log"]),
        )


class Sanitizer(Protocol):
    """Adapter slot for an external, model-based rewriting service (not shipped)."""

    def sanitize(self, desc: ToolDescription) -> SelectionFacingSchema: ...


class ExternalSanitizer:
    def sanitize(self, desc: ToolDescription) -> SelectionFacingSchema:
        raise NotImplementedError("model-based sanitization is not bundled; use normalize()")


def render_selection_text(schema: SelectionFacingSchema) -> str:
    lines = [f"function: {schema.function_name}", f"input: {_render_params(schema.input_spec)}"]
    if schema.output_spec:
        lines.append(f"output: {schema.output_spec}")
    verified = set(schema.verified_fields)
    for c in schema.constraints:
        mark = _VERIFIED if c.name in verified else ""
        lines.append(f"{c.name}: {c.render_value()}{mark}")
    return "\n".join(lines)


def _render_params(params) -> str:
    if not params:
        return "none"
    return ", ".join(f"{p.name} ({p.type})" if p.required else f"{p.name} ({p.type}, optional)" for p in params)


def _parse_params(text: str) -> tuple[Param, ...]:
    if text.strip() == "none":
        return ()
    return tuple(Param(m.group(1), m.group(2).strip(), m.group(3) is None) for m in _PARAM_ITEM.finditer(text))


def is_card(body: str) -> bool:
    return body.lstrip().startswith("function:")


def snake_case(name: str) -> str:
    name = re.sub(r"([a-z0-9])([A-Z])", r"\1_\2", name)
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_") or "tool"


def split_sentences(body: str) -> list[tuple[int, str]]:
    """Split on terminal punctuation + whitespace; returns (offset, sentence)."""
    out, pos = [], 0
    for m in _SENTENCE_END.finditer(body):
        out.append((pos, body[pos : m.start()]))
        pos = m.end()
    if pos < len(body):
        out.append((pos, body[pos:]))
    return [(off, s) for off, s in out if s.strip()]


def _strip(sentence: str, offset: int, spans: list[Span]) -> str:
    chars = list(sentence)
    for s in spans:
        lo, hi = max(s.start - offset, 0), min(s.end - offset, len(sentence))
        for i in range(lo, hi):
            chars[i] = " "
    return _tidy("".join(chars))


def _tidy(text: str) -> str:
    text = re.sub(r"\s+", " ", text)
    text = re.sub(r"\s+([,.;:!?])", r"\1", text)
    text = re.sub(r"([,;:])(?:\s*[,;:])+", r"\1", text)
    text = re.sub("^[\\s,;:\u2014\u2013-]+|[\\s,;:\u2014\u2013-]+$", "", text)
    return text.strip()


def _content_words(text: str) -> list[str]:
    return [w for w in re.findall(r"[a-z0-9][\w'-]*", text.lower()) if w not in _STOPWORDS]


def extract_constraints(text: str) -> list[Constraint]:
    found: list[Constraint] = []
    for m in _RESULT_CAP.finditer(text):
        found.append(Constraint("result_cap", QUANTITATIVE, value=int(m.group(1)), unit=m.group(2).lower()))
    for m in _RATE_LIMIT.finditer(text):
        value = int(m.group(1).replace(",", ""))
        found.append(Constraint("rate_limit", QUANTITATIVE, value=value, unit=f"{m.group(2).lower()}/{m.group(3).lower()}"))
    regions = [re.sub(r"[.\s]+", "", m.group(1).lower()) + "-only" for m in _REGION_ONLY.finditer(text)]
    regions = ["us-only" if r in ("u.s-only", "unitedstates-only") else r for r in regions]
    if _REGION_ANY.search(text):
        regions.append("global")
    for m in _COVERAGE_FIELD.finditer(text):
        regions.append(re.sub(r"\s+", "-", m.group(1).strip().lower()))
    if regions:
        found.append(Constraint("coverage", CATEGORICAL, values=tuple(regions)))
    for m in _LANGS.finditer(text):
        langs = re.findall(_LANG, m.group(1), re.IGNORECASE)
        found.append(Constraint("languages", CATEGORICAL, values=tuple(langs)))
    return found


def _pick_output(candidates: list[str]) -> str:
    if not candidates:
        return ""
    with_digits = [c for c in candidates if re.search(r"\d", c)]
    pool = with_digits or candidates
    return max(pool, key=len)


def normalize(desc: ToolDescription, lex: FeatureLexicon | None = None) -> NormalizedEntry:
    """Rewrite a description into its selection-facing schema.

    Raises NormalizationFailure when no sentence carries functional content.
    """
    lex = lex or default_lexicon()
    if is_card(desc.body):
        return _normalize_card(desc, lex)
    report = detect_features(desc, lex)
    spans = list(report.matched_spans)
    log: list[LogEntry] = []
    outputs: list[str] = []
    capabilities: list[str] = []
    constraints: list[Constraint] = []
    functional = False

    for offset, sentence in split_sentences(desc.body):
        end = offset + len(sentence)
        local = [s for s in spans if s.start >= offset and s.end <= end]
        residual = _strip(sentence, offset, local)
        found = extract_constraints(residual)
        out_match = _OUTPUT_VERBS.search(residual)
        is_io = bool(out_match) or bool(_INPUT_VERBS.search(residual)) or bool(_CAPABILITY_VERBS.search(residual))
        keep = (is_io or found) and _content_words(residual)
        action = "removed" if keep else "dropped"
        for s in local:
            log.append(LogEntry(s.text, s.category, action))
        if not keep:
            if _content_words(residual):
                log.append(LogEntry(residual, "prose", "omitted"))
            continue
        functional = True
        constraints.extend(found)
        if out_match:
            clause = _tidy(out_match.group(1).rstrip("."))
            if clause:
                outputs.append(clause)
        elif _CAPABILITY_VERBS.search(residual) and not _INPUT_VERBS.search(residual):
            capabilities.append(_tidy(_CAPABILITY_VERBS.sub("", residual).rstrip(".")))

    if not functional:
        raise NormalizationFailure(
            desc.id,
            "empty schema: no sentence carries capability, input/output or constraint content "
            f"after removing {len(spans)} persuasion span(s)",
            tuple(log),
        )

    schema = SelectionFacingSchema(
        function_name=_function_name(desc, lex),
        input_spec=desc.param_schema,
        output_spec=_pick_output(outputs or capabilities),
        constraints=tuple(constraints) + tuple(desc.declared_constraints),
    )
    schema = _scrub(schema, lex, log)
    return NormalizedEntry(desc.id, schema, MarketingCopy(desc.body, tuple(spans)), tuple(log))


def _function_name(desc: ToolDescription, lex: FeatureLexicon) -> str:
    if desc.domain_tag and desc.domain_tag in lex.domain_functions:
        return lex.domain_functions[desc.domain_tag]
    name = desc.name
    for s in reversed(find_spans(name, lex)):
        name = name[: s.start] + " " + name[s.end :]
    return snake_case(name)


def _scrub(schema: SelectionFacingSchema, lex: FeatureLexicon, log: list[LogEntry]) -> SelectionFacingSchema:
    """Repeat span removal on the rendered fields until nothing matches."""
    out = schema.output_spec
    for _ in range(8):
        spans = find_spans(out, lex)
        if not spans:
            break
        for s in reversed(spans):
            log.append(LogEntry(s.text, s.category, "removed"))
            out = out[: s.start] + " " + out[s.end :]
        out = _tidy(out)
    return replace(schema, output_spec=out)


def _normalize_card(desc: ToolDescription, lex: FeatureLexicon) -> NormalizedEntry:
    spans = find_spans(desc.body, lex)
    log: list[LogEntry] = []
    fields: dict[str, str] = {}
    constraints = []
    offset = 0
    for raw in desc.body.splitlines(keepends=True):
        local = [s for s in spans if s.start >= offset and s.end <= offset + len(raw)]
        log.extend(LogEntry(s.text, s.category, "removed") for s in local)
        line = _strip(raw, offset, local) if local else raw.strip()
        offset += len(raw)
        m = _CARD_LINE.match(line)
        if not m:
            continue
        key, value = m.group(1), m.group(2).strip()
        if key in ("function", "input", "output"):
            fields[key] = value
            continue
        # verification marks are registry-issued, never accepted from submitted text
        if value.endswith(_VERIFIED.strip()):
            value = value[: -len(_VERIFIED.strip())].strip()
        if value:
            constraints.append(Constraint.parse(key, value))
    schema = SelectionFacingSchema(
        function_name=snake_case(fields.get("function") or desc.name),
        input_spec=desc.param_schema or _parse_params(fields.get("input", "none")),
        output_spec=fields.get("output", ""),
        constraints=tuple(constraints) + tuple(desc.declared_constraints),
    )
    return NormalizedEntry(desc.id, schema, MarketingCopy(desc.body, tuple(spans)), tuple(log))


def selection_level(schema: SelectionFacingSchema, lex: FeatureLexicon | None = None) -> FramingLevel:
    return classify_level(detect_features(render_selection_text(schema), lex))


def renormalize(entry: NormalizedEntry, lex: FeatureLexicon | None = None) -> NormalizedEntry:
    card = ToolDescription(entry.tool_id, entry.selection.function_name, render_selection_text(entry.selection),
                           entry.selection.input_spec)
    return normalize(card, lex)

