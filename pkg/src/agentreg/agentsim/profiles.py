"""Agent behaviour profiles and their calibration from published measurements."""

from __future__ import annotations

from dataclasses import dataclass, field

from agentreg.agentsim import reference as ref

LEVELS = ("L0", "L1", "L2", "L3", "L4")
LUCE = "luce"
CEILING = "deterministic-ceiling"
CHOICE_RULES = (LUCE, CEILING)
DISCLOSURE_KINDS = ("label", "rating")


def odds(p: float) -> float:
    return p / (1.0 - p)


def _pooled_ratio(upper: str, lower: str) -> float:
    d = ref.POOLED_DOSE_RESPONSE
    return odds(0.5 + d[upper]) / odds(0.5 + d[lower])


# L2 and L4 are unmeasured per model; scale from the neighbouring level by the pooled odds ratio.
L2_OVER_L1 = _pooled_ratio("L2", "L1")
L4_OVER_L3 = _pooled_ratio("L4", "L3")


@dataclass(frozen=True)
class AgentProfile:
    """A synthetic agent's selection behaviour.

    ``domain_multipliers`` override ``level_multipliers`` for specific domains;
    ``stimulus_multipliers`` hold weights for named copy variants measured
    against a structured baseline (weight 1).
    """

    agent_id: str
    level_multipliers: dict[str, float]
    choice_rule: str = LUCE
    preferred_slot: int | None = None
    position_strength: float = 0.5
    disclosure_response: dict[str, float] = field(default_factory=lambda: {"label": 1.0, "rating": 1.0})
    sysprompt_response: float = 1.0
    domain_multipliers: dict[str, dict[str, float]] = field(default_factory=dict)
    stimulus_multipliers: dict[str, float] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    observed_last_slot_rate: float | None = None
    disclosure_domains: tuple[str, ...] = ref.CONSUMER_DOMAINS

    def __post_init__(self):
        if set(self.level_multipliers) != set(LEVELS):
            raise ValueError(f"{self.agent_id}: need multipliers for {LEVELS}")
        if self.level_multipliers["L0"] != 1.0:
            raise ValueError(f"{self.agent_id}: kappa(L0) must be 1")
        for table in (self.level_multipliers, *self.domain_multipliers.values(), self.stimulus_multipliers):
            if any(v <= 0 for v in table.values()):
                raise ValueError(f"{self.agent_id}: multipliers must be positive")
        if self.choice_rule not in CHOICE_RULES:
            raise ValueError(f"unknown choice rule {self.choice_rule!r}")
        if not 0.0 <= self.position_strength <= 1.0:
            raise ValueError("position_strength must lie in [0, 1]")
        if any(v < 0 for v in self.disclosure_response.values()) or self.sysprompt_response < 0:
            raise ValueError("disclosure penalties must be non-negative")

    def kappa(self, level: str, domain: str | None = None) -> float:
        level = str(level)
        override = self.domain_multipliers.get(domain or "", {})
        return override.get(level, self.level_multipliers[level])

    def position_bias(self, n_slots: int = 2) -> tuple[float, ...]:
        """Tie-break distribution over slots; sums to one."""
        if self.preferred_slot is None:
            return (1.0 / n_slots,) * n_slots
        rest = (1.0 - self.position_strength) / (n_slots - 1)
        bias = [rest] * n_slots
        bias[self.preferred_slot % n_slots] = self.position_strength
        return tuple(bias)

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "level_multipliers": dict(self.level_multipliers),
            "choice_rule": self.choice_rule,
            "position_bias": list(self.position_bias(2)),
            "disclosure_response": dict(self.disclosure_response),
            "sysprompt_response": self.sysprompt_response,
            "domain_multipliers": {k: dict(v) for k, v in self.domain_multipliers.items()},
            "stimulus_multipliers": dict(self.stimulus_multipliers),
            "provenance": dict(self.provenance),
        }


def _levels(l1: float, l3: float, l4: float | None = None) -> tuple[dict[str, float], dict[str, str]]:
    levels = {"L0": 1.0, "L1": l1, "L2": l1 * L2_OVER_L1, "L3": l3, "L4": l4 if l4 is not None else l3 * L4_OVER_L3}
    prov = {"L1": "measured", "L2": "interpolated", "L3": "measured", "L4": "measured" if l4 else "interpolated"}
    return levels, prov


def _disclosure(agent_id: str) -> tuple[dict[str, float], float, float, dict[str, str]]:
    """Consumer-domain baseline multiplier and penalties back-solved from measured deltas."""
    row = ref.DISCLOSURE_EFFECTS[agent_id]
    p0 = 0.5 + row["sbc0"]
    base = odds(p0)
    penalties = {kind: odds(p0 + row[kind] / 100) / base for kind in DISCLOSURE_KINDS}
    # Only a clearly negative system-prompt shift is modelled; +1..+3 pp is treated as no effect.
    sysprompt = odds(p0 + row["sysprompt"] / 100) / base if row["sysprompt"] < 0 else 1.0
    prov = {"disclosure_response": "back-solved", "sysprompt_response": "back-solved" if sysprompt != 1.0 else "default"}
    return penalties, sysprompt, base, prov


def _stimuli(agent_id: str) -> dict[str, float]:
    row = ref.LEGAL_BOUNDARY_ROWS.get(agent_id)
    if row is None:
        return {}
    return {"legal": odds(0.5 + row[0]), "full": odds(0.5 + row[1])}


def _consumer(base: float) -> dict[str, dict[str, float]]:
    return {d: {"L4": base} for d in ref.CONSUMER_DOMAINS}


def _build(agent_id: str) -> AgentProfile:
    if agent_id == "gpt54-mini":
        # no per-level measurements; the consumer-domain ceiling stands in for every framed level
        flat = odds(0.5 + ref.DISCLOSURE_EFFECTS[agent_id]["sbc0"])
        levels = {"L0": 1.0, "L1": flat, "L2": flat, "L3": flat, "L4": flat}
        prov = {lv: "derived-from-ceiling" for lv in LEVELS[1:]}
        rule, slot, strength, last = CEILING, 0, ref.OO_POSITION_SHARES[agent_id][1], None
    else:
        row = ref.FRAMING_MULTIPLIERS[agent_id]
        l4 = odds(0.5 + ref.CLAUDE_L4_SBC) if agent_id == "claude" else None
        levels, prov = _levels(row["L1"], row["L3"], l4)
        rule = CEILING if row["shape"] == "step" else LUCE
        slot, strength, last = None, 0.5, None
        if agent_id == "claude":
            # ties follow the both-optimized slot share; the ON-trial rate is kept for reference
            slot, strength, last = -1, ref.OO_POSITION_SHARES["claude"][1], ref.CLAUDE_LAST_SLOT_RATE
    if agent_id in ref.DISCLOSURE_EFFECTS:
        penalties, sysprompt, base, dprov = _disclosure(agent_id)
        domains = _consumer(base)
        prov.update(dprov)
    else:
        penalties, sysprompt, domains = {"label": 1.0, "rating": 1.0}, 1.0, {}
        prov.update({"disclosure_response": "uncalibrated", "sysprompt_response": "uncalibrated"})
    return AgentProfile(
        agent_id=agent_id,
        level_multipliers=levels,
        choice_rule=rule,
        preferred_slot=slot,
        position_strength=strength,
        disclosure_response=penalties,
        sysprompt_response=sysprompt,
        domain_multipliers=domains,
        stimulus_multipliers=_stimuli(agent_id),
        provenance=prov,
        observed_last_slot_rate=last,
    )


AVAILABLE_PROFILES = ("deepseek", "o4-mini", "gpt54-mini", "gpt54-nano", "claude", "gpt-4o")


class UnknownProfileError(KeyError):
    def __str__(self) -> str:
        return f"unknown agent profile {self.args[0]!r}; available: {', '.join(AVAILABLE_PROFILES)}"


def calibrate_profile(agent_id: str) -> AgentProfile:
    if agent_id not in AVAILABLE_PROFILES:
        raise UnknownProfileError(agent_id)
    return _build(agent_id)


def shipped_profiles() -> list[AgentProfile]:
    return [calibrate_profile(a) for a in AVAILABLE_PROFILES]
