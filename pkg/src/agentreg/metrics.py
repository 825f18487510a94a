"""Selection-bias statistics computed from trial logs."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable

from agentreg.trials import TrialRecord

Z95 = 1.96
COASTING_FRACTION = 0.5
UNIVERSAL_VALUES = frozenset({"global", "any", "all", "worldwide"})


class AggregationError(ValueError):
    """Records that cannot be pooled into one estimate."""


@dataclass(frozen=True)
class SbcEstimate:
    n: int
    successes: float
    center: float
    sbc: float
    ci_low: float
    ci_high: float
    z: float = Z95

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2

    @property
    def proportion(self) -> float:
        return self.successes / self.n

    def spans_zero(self) -> bool:
        return self.ci_low <= 0.5 <= self.ci_high

    @classmethod
    def from_sbc(cls, sbc: float, n: int, z: float = Z95) -> SbcEstimate:
        """Rebuild an estimate from a published point value and its cell size.

        The published value is taken as the centre; bounds are Wilson bounds
        evaluated at that proportion.
        """
        p = 0.5 + sbc
        lo, _, hi = wilson_bounds(p, n, z)
        return cls(n, p * n, p, sbc, lo, hi, z)


def wilson_bounds(p_hat: float, n: int, z: float = Z95) -> tuple[float, float, float]:
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p_hat + z2 / (2 * n)) / denom
    margin = z * math.sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom
    return center - margin, center, center + margin


def wilson(successes: int, n: int, z: float = Z95) -> SbcEstimate:
    """Wilson-score interval; the SBC is the centre minus one half."""
    if n < 1:
        raise ValueError("Wilson interval needs n >= 1")
    if not 0 <= successes <= n:
        raise ValueError(f"successes must lie in 0..{n}")
    if z <= 0:
        raise ValueError("z must be positive")
    lo, center, hi = wilson_bounds(successes / n, n, z)
    return SbcEstimate(n, successes, center, center - 0.5, lo, hi, z)


def stopping_n(outcomes: Iterable[bool], target: float = 0.10, min_n: int = 1, step: int = 2,
               z: float = Z95) -> int | None:
    """First n (a multiple of ``step``, at least ``min_n``) with half-width below ``target``."""
    hits = n = 0
    for hit in outcomes:
        n += 1
        hits += bool(hit)
        if n >= min_n and n % step == 0 and wilson(hits, n, z).half_width < target:
            return n
    return None


def ceiling_stopping_n(target: float = 0.10, step: int = 2, z: float = Z95, limit: int = 100_000) -> int:
    """Stopping n for an unbroken run of successes (true P = 1)."""
    n = stopping_n((True for _ in range(limit)), target, 1, step, z)
    if n is None:
        raise ValueError("no crossing within limit")
    return n


def _check_condition(records: list[TrialRecord], condition: str) -> None:
    seen = {r.condition for r in records}
    if seen - {condition}:
        raise AggregationError(f"mixed conditions {sorted(seen)}; expected only {condition}")


def sbc(records: Iterable[TrialRecord], condition: str = "ON", z: float = Z95) -> SbcEstimate:
    """Pooled (micro-averaged) SBC.

    ON trials count selections of the optimized tool; NN/OO trials count
    selections of the designated focal tool.
    """
    records = list(records)
    if not records:
        raise ValueError("empty trial log")
    _check_condition(records, condition)
    if condition == "ON":
        hits = sum(r.selected_optimized for r in records)
    else:
        hits = sum(r.selected_focal for r in records)
    return wilson(hits, len(records), z)


def sbc_by_slot(records: Iterable[TrialRecord], condition: str = "ON", z: float = Z95) -> dict[int, SbcEstimate]:
    records = list(records)
    _check_condition(records, condition)
    by_slot: dict[int, list[TrialRecord]] = {}
    for r in records:
        by_slot.setdefault(r.focal_slot, []).append(r)
    return {slot: sbc(rs, condition, z) for slot, rs in sorted(by_slot.items())}


def slot_shares(records: Iterable[TrialRecord]) -> dict[int, float]:
    """Fraction of trials selecting each slot, regardless of description."""
    records = list(records)
    counts: dict[int, int] = {}
    for r in records:
        counts[r.selected_slot] = counts.get(r.selected_slot, 0) + 1
    return {s: counts.get(s, 0) / len(records) for s in range(records[0].n_tools)} if records else {}


def rsa_from_probability(p: float, n_tools: int) -> float:
    if n_tools < 2:
        raise ValueError("RSA needs at least two tools")
    return p * n_tools


def rsa(records: Iterable[TrialRecord], n_tools: int) -> float:
    """Selection rate of the optimized tool over its fair share 1/n_tools."""
    records = list(records)
    if not records:
        raise ValueError("empty trial log")
    if any(r.n_tools != n_tools for r in records):
        raise AggregationError(f"records do not all have n_tools = {n_tools}")
    p = sum(r.selected_optimized for r in records) / len(records)
    return rsa_from_probability(p, n_tools)


@dataclass(frozen=True)
class FramingMultiplier:
    kappa: float
    source_probability: float
    capped: bool = False
    level: str | None = None


def kappa_from_probability(p: float, n: int | None = None, cap_policy: str = "wilson-centre",
                           level: str | None = None, z: float = Z95) -> FramingMultiplier:
    """Odds ratio p/(1-p) against a neutral baseline weight of one.

    At p in {0, 1} the odds are infinite or zero; the wilson-centre policy
    substitutes the Wilson centre for the cell of size ``n``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability outside [0, 1]")
    if 0.0 < p < 1.0:
        return FramingMultiplier(p / (1.0 - p), p, False, level)
    if cap_policy != "wilson-centre":
        raise ValueError(f"unknown cap policy {cap_policy!r}")
    if n is None:
        raise ValueError("capping a boundary probability needs the cell size n")
    center = wilson(round(p * n), n, z).center
    return FramingMultiplier(center / (1.0 - center), p, True, level)


def probability_from_kappa(kappa: float) -> float:
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return kappa / (1.0 + kappa)


@dataclass(frozen=True)
class AaqsRecord:
    tool_id: str
    selection_rate: float
    capability_match: float
    aaqs: float
    coasting: bool


def aaqs(selection_rate: float, capability_match: float, tool_id: str = "",
         coasting_fraction: float = COASTING_FRACTION) -> AaqsRecord:
    for name, v in (("selection_rate", selection_rate), ("capability_match", capability_match)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} outside [0, 1]")
    score = selection_rate * capability_match
    coasting = selection_rate > 0 and score < coasting_fraction * selection_rate
    return AaqsRecord(tool_id, selection_rate, capability_match, score, coasting)


@dataclass(frozen=True)
class Requirement:
    """A task requirement in the constraint vocabulary.

    ``op`` is "in" (categorical: every value must be supported), ">=" or "<="
    (quantitative: the schema's declared value must meet the bound).
    """

    name: str
    op: str
    values: tuple[str, ...] = ()
    value: float | None = None
    unit: str | None = None

    @classmethod
    def parse(cls, text: str) -> Requirement:
        m = re.match(r"^\s*([a-z_]\w*)\s*(>=|<=|=)\s*(.+?)\s*$", text)
        if not m:
            raise ValueError(f"cannot parse requirement {text!r}")
        name, op, rest = m.groups()
        q = re.match(r"^(\d+(?:\.\d+)?)\s*(\S.*)?$", rest)
        if op in (">=", "<="):
            if not q:
                raise ValueError(f"quantitative requirement {text!r} needs a number")
            return cls(name, op, value=float(q.group(1)), unit=(q.group(2) or "").strip() or None)
        return cls(name, "in", values=tuple(v.strip().lower() for v in rest.split(",") if v.strip()))

    def to_dict(self) -> dict:
        return {"name": self.name, "op": self.op, "values": list(self.values), "value": self.value, "unit": self.unit}

    @classmethod
    def from_obj(cls, obj) -> Requirement:
        if isinstance(obj, Requirement):
            return obj
        if isinstance(obj, str):
            return cls.parse(obj)
        return cls(obj["name"], obj["op"], tuple(obj.get("values") or ()), obj.get("value"), obj.get("unit"))


@dataclass(frozen=True)
class MatchResult:
    score: float
    diagnostics: tuple[str, ...] = field(default=())

    def __float__(self) -> float:
        return self.score


def capability_match_binary(schema, requirements: Iterable) -> MatchResult:
    """1.0 when the schema's declared constraints satisfy every requirement, else 0.0."""
    notes = []
    for raw in requirements:
        req = Requirement.from_obj(raw)
        declared = schema.constraint(req.name)
        if declared is None:
            notes.append(f"{req.name}: not declared by the tool")
            continue
        if req.op == "in":
            if declared.kind != "categorical":
                notes.append(f"{req.name}: declared as quantitative, required categorically")
                continue
            supported = set(declared.values)
            if supported & UNIVERSAL_VALUES:
                continue
            missing = [v for v in req.values if v not in supported]
            if missing:
                notes.append(f"{req.name}: needs {missing}, tool declares {sorted(supported)}")
        else:
            if declared.kind != "quantitative":
                notes.append(f"{req.name}: declared as categorical, required quantitatively")
                continue
            if req.unit and declared.unit != req.unit:
                notes.append(f"{req.name}: unit {declared.unit!r} does not match {req.unit!r}")
                continue
            ok = declared.value >= req.value if req.op == ">=" else declared.value <= req.value
            if not ok:
                notes.append(f"{req.name}: declared {declared.value:g} fails {req.op} {req.value:g}")
    return MatchResult(0.0 if notes else 1.0, tuple(notes))


@dataclass(frozen=True)
class LegalBoundaryReport:
    legal_uplift: float
    normalization_effect: float
    capture_ratio: float | None
    illegal_increment: float


def _dec(x: float) -> Decimal:
    return Decimal(repr(x))


def legal_boundary(structured_vs_legal: SbcEstimate | float,
                   structured_vs_full: SbcEstimate | float) -> LegalBoundaryReport:
    """Share of the full optimization effect reproduced by legal puffery alone.

    Differences are taken in decimal on the shortest float representation so
    published two-digit values subtract exactly. The capture ratio (percent)
    is None when the normalization effect is not positive or its interval
    includes zero; a share of a null or negative effect has no meaning.
    """
    legal = structured_vs_legal.sbc if isinstance(structured_vs_legal, SbcEstimate) else structured_vs_legal
    full = structured_vs_full.sbc if isinstance(structured_vs_full, SbcEstimate) else structured_vs_full
    increment = float(_dec(full) - _dec(legal))
    undefined = full <= 0 or (isinstance(structured_vs_full, SbcEstimate) and structured_vs_full.spans_zero())
    capture = None if undefined else float(_dec(legal) / _dec(full) * 100)
    return LegalBoundaryReport(legal, full, capture, increment)


@dataclass(frozen=True)
class TrafficProjection:
    share: float
    redirect_points: float
    annual_redirect: float


def traffic_projection(estimate: SbcEstimate | float, daily_calls: float, revenue_per_call: float,
                       days: int = 365) -> TrafficProjection:
    """Revenue redirected to the optimizer above its 50% fair share in a two-tool registry."""
    value = estimate.sbc if isinstance(estimate, SbcEstimate) else estimate
    if daily_calls <= 0 or revenue_per_call <= 0:
        raise ValueError("call volume and revenue must be positive")
    return TrafficProjection(
        share=0.5 + value,
        redirect_points=value * 100,
        annual_redirect=value * daily_calls * revenue_per_call * days,
    )
