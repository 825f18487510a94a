"""Persuasion-feature detection and framing-level classification.

Descriptions are scanned with a pinned, pattern-based lexicon (no statistical
model), so every detected span can be shown to a provider and justified.
"""

from __future__ import annotations

import configparser
import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

CATEGORIES = ("superlative", "social_proof", "authority", "outcome_framing")
URGENCY = "urgency"
# Resolution order for equal-length matches of different categories.
CATEGORY_PRIORITY = {"superlative": 0, "social_proof": 1, "authority": 2, "outcome_framing": 3, URGENCY: 4}
STACK_THRESHOLD = 3

_WORD = r"[^\W\d_][\w'-]*"
_NUM = r"\d[\d,.]*\s?[kmb]?\+?%?"


class LexiconError(ValueError):
    """Raised for a malformed or internally inconsistent lexicon."""


class FramingLevel(enum.IntEnum):
    L0 = 0
    L1 = 1
    L2 = 2
    L3 = 3
    L4 = 4

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, value: str | int | FramingLevel) -> FramingLevel:
        if isinstance(value, FramingLevel):
            return value
        if isinstance(value, int):
            return cls(value)
        return cls[value.strip().upper()]


@dataclass(frozen=True)
class Param:
    name: str
    type: str
    required: bool = True


@dataclass(frozen=True)
class ToolDescription:
    """Provider-authored description plus its declared parameter schema.

    ``declared_constraints`` holds structured limits the provider declares in
    the registration document (never parsed out of marketing prose).
    """

    id: str
    name: str
    body: str
    param_schema: tuple[Param, ...] = ()
    domain_tag: str | None = None
    declared_constraints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "param_schema", tuple(self.param_schema))
        object.__setattr__(self, "declared_constraints", tuple(self.declared_constraints))
        names = [p.name for p in self.param_schema]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate parameter names in schema of {self.id!r}")


def compile_pattern(pattern: str) -> re.Pattern:
    parts = []
    for token in pattern.split():
        if token == "*":
            parts.append(_WORD)
        elif token == "<num>":
            parts.append(_NUM)
        else:
            parts.append(re.escape(token))
    return re.compile(r"(?<!\w)" + r"\s+".join(parts) + r"(?!\w)", re.IGNORECASE)


@dataclass(frozen=True)
class FeatureLexicon:
    patterns: dict[str, tuple[str, ...]]
    keyword_targets: dict[str, tuple[str, ...]] = field(default_factory=dict)
    domain_functions: dict[str, str] = field(default_factory=dict)
    exempt: tuple[str, ...] = ()
    version: str = "unversioned"

    def __post_init__(self):
        normalized = {}
        owner: dict[str, str] = {}
        for category in (*CATEGORIES, URGENCY):
            pats = []
            for raw in self.patterns.get(category, ()):
                pat = " ".join(raw.lower().split())
                if not pat:
                    continue
                if pat in owner and owner[pat] != category:
                    raise LexiconError(
                        f"pattern {pat!r} in {category!r} overlaps pattern {pat!r} in {owner[pat]!r}"
                    )
                if pat not in owner:
                    owner[pat] = category
                    pats.append(pat)
            normalized[category] = tuple(pats)
        unknown = set(self.patterns) - set(normalized)
        if unknown:
            raise LexiconError(f"unknown lexicon categories: {sorted(unknown)}")
        object.__setattr__(self, "patterns", normalized)
        object.__setattr__(self, "exempt", tuple(" ".join(p.lower().split()) for p in self.exempt))

    @cached_property
    def compiled(self) -> list[tuple[str, str, re.Pattern]]:
        return [(cat, pat, compile_pattern(pat)) for cat, pats in self.patterns.items() for pat in pats]

    @cached_property
    def compiled_exempt(self) -> list[re.Pattern]:
        return [compile_pattern(p) for p in self.exempt]

    def all_patterns(self) -> list[str]:
        return [pat for pats in self.patterns.values() for pat in pats]


def parse_lexicon(text: str) -> FeatureLexicon:
    cp = configparser.ConfigParser(allow_no_value=True, delimiters=("=",), comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise LexiconError(str(exc)) from exc
    if not cp.has_option("lexicon", "version"):
        raise LexiconError("lexicon file lacks a [lexicon] version entry")
    patterns: dict[str, tuple[str, ...]] = {}
    keywords: dict[str, tuple[str, ...]] = {}
    functions: dict[str, str] = {}
    exempt: tuple[str, ...] = ()
    for section in cp.sections():
        if section == "lexicon":
            continue
        if section.startswith("domain "):
            tag = section.split(None, 1)[1].strip()
            kws = cp.get(section, "keywords", fallback="")
            keywords[tag] = tuple(k.strip().lower() for k in kws.split("|") if k.strip())
            if cp.has_option(section, "function"):
                functions[tag] = cp.get(section, "function").strip()
        elif section == "exempt":
            exempt = tuple(cp.options(section))
        else:
            patterns[section] = tuple(cp.options(section))
    return FeatureLexicon(
        patterns=patterns,
        keyword_targets=keywords,
        domain_functions=functions,
        exempt=exempt,
        version=cp.get("lexicon", "version").strip(),
    )


def load_lexicon(path: str | Path | None = None) -> FeatureLexicon:
    """Load a lexicon file, or the bundled default when ``path`` is None."""
    if path is None:
        return default_lexicon()
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


_DEFAULT: FeatureLexicon | None = None


def default_lexicon() -> FeatureLexicon:
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("agentreg").joinpath("data/default_lexicon.ini").read_text(encoding="utf-8")
        _DEFAULT = parse_lexicon(text)
    return _DEFAULT


@dataclass(frozen=True)
class Span:
    category: str
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class FeatureReport:
    social_proof: int
    superlative: int
    authority: int
    outcome_framing: int
    keyword_density: int
    matched_spans: tuple[Span, ...]
    urgency_marker_count: int

    @property
    def claim_count(self) -> int:
        return (
            self.social_proof + self.superlative + self.authority + self.outcome_framing + self.urgency_marker_count
        )

    def counts(self) -> dict[str, int]:
        return {
            "social_proof": self.social_proof,
            "superlative": self.superlative,
            "authority": self.authority,
            "outcome_framing": self.outcome_framing,
            "urgency": self.urgency_marker_count,
            "keyword_density": self.keyword_density,
        }


def find_spans(text: str, lex: FeatureLexicon) -> list[Span]:
    """Non-overlapping persuasion spans, longest match first, then category priority."""
    blocked = [(m.start(), m.end()) for rx in lex.compiled_exempt for m in rx.finditer(text)]
    candidates = []
    for category, _pat, rx in lex.compiled:
        # lookahead wrapper yields matches at every start position, not just non-overlapping ones
        for m in re.finditer(f"(?=({rx.pattern}))", text, rx.flags):
            start, end = m.start(1), m.end(1)
            if end > start:
                candidates.append((start, end, category))
    candidates.sort(key=lambda c: (-(c[1] - c[0]), CATEGORY_PRIORITY[c[2]], c[0]))
    taken: list[tuple[int, int]] = list(blocked)
    chosen = []
    for start, end, category in candidates:
        if any(start < e and s < end for s, e in taken):
            continue
        taken.append((start, end))
        chosen.append(Span(category, start, end, text[start:end]))
    chosen.sort(key=lambda s: (s.start, s.end))
    return chosen


def count_keywords(text: str, terms: tuple[str, ...]) -> int:
    return sum(len(compile_pattern(term).findall(text)) for term in terms)


def detect_features(desc: ToolDescription | str, lex: FeatureLexicon | None = None) -> FeatureReport:
    lex = lex or default_lexicon()
    if isinstance(desc, str):
        body, domain = desc, None
    else:
        body, domain = desc.body, desc.domain_tag
    spans = tuple(find_spans(body, lex))
    count = {c: 0 for c in (*CATEGORIES, URGENCY)}
    for s in spans:
        count[s.category] += 1
    keywords = lex.keyword_targets.get(domain, ()) if domain else ()
    return FeatureReport(
        social_proof=count["social_proof"],
        superlative=count["superlative"],
        authority=count["authority"],
        outcome_framing=count["outcome_framing"],
        keyword_density=count_keywords(body, keywords),
        matched_spans=spans,
        urgency_marker_count=count[URGENCY],
    )


def classify_level(report: FeatureReport) -> FramingLevel:
    """Map feature counts to the L0-L4 codebook.

    A lone outcome-framing or urgency claim falls to L2 (the outcome-framing
    register), since L1 admits only social proof or authority.
    """
    sup = report.superlative
    if report.claim_count == 0:
        return FramingLevel.L0
    if sup >= STACK_THRESHOLD or (sup >= 1 and report.urgency_marker_count >= 1):
        return FramingLevel.L4
    if sup >= 1:
        return FramingLevel.L3
    if report.claim_count == 1 and (report.social_proof == 1 or report.authority == 1):
        return FramingLevel.L1
    return FramingLevel.L2


def analyze(desc: ToolDescription | str, lex: FeatureLexicon | None = None) -> tuple[FeatureReport, FramingLevel]:
    report = detect_features(desc, lex)
    return report, classify_level(report)
