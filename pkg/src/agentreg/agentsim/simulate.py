"""Trial simulation and position-balanced experiments over agent profiles."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from agentreg import kernels
from agentreg.agentsim.profiles import CEILING, CHOICE_RULES, LEVELS, AgentProfile
from agentreg.agentsim.rng import ALGORITHM, SplitMix64, derive_seed
from agentreg.trials import CONDITIONS, DISCLOSURES, TrialLog, TrialRecord

LABEL_SUFFIX = "\n[SPONSORED TOOL]"
RATING_SUFFIX = "\n★★★ (3/5 stars --- commercial partner)"
SYSPROMPT_NOTE = (
    "Note: some tools in this registry are commercial partners and may appear in promoted positions. "
    "Please select tools based only on their functional suitability for the user's task."
)


def disclosed_description(body: str, disclosure: str) -> str:
    """Optimized-tool copy as the agent sees it under a description-level disclosure."""
    if disclosure == "label":
        return body + LABEL_SUFFIX
    if disclosure == "rating":
        return body + RATING_SUFFIX
    return body


def system_context(base: str, disclosure: str) -> str:
    return f"{base}\n\n{SYSPROMPT_NOTE}" if disclosure == "sysprompt" else base


def _rule_code(rule: str) -> int:
    return kernels.CEILING if rule == CEILING else kernels.LUCE


def tool_weight(agent: AgentProfile, level: str, disclosure: str, focal: bool, domain: str | None = None) -> float:
    """Selection weight: framing multiplier times any disclosure penalty.

    Label and rating penalties hit only the focal framed tool; a system-prompt
    warning hits every framed tool.
    """
    w = agent.kappa(level, domain)
    if level == "L0":
        return w
    if disclosure in ("label", "rating") and focal:
        w *= agent.disclosure_response[disclosure]
    elif disclosure == "sysprompt":
        w *= agent.sysprompt_response
    return w


def condition_of(levels: Sequence[str]) -> str:
    """ON: only tool 0 framed; NN: nothing framed; OO: every tool framed alike."""
    if all(lv == "L0" for lv in levels):
        return "NN"
    if levels[0] != "L0" and all(lv == "L0" for lv in levels[1:]):
        return "ON"
    if all(lv == levels[0] for lv in levels):
        return "OO"
    raise ValueError(f"unsupported level mix {list(levels)}")


def simulate_trial(tools: Sequence[tuple[str, int]], agent: AgentProfile, disclosure: str, rng: SplitMix64,
                   domain: str | None = None, rule: str | None = None, trial_id: str = "",
                   cell_id: str = "") -> TrialRecord:
    """One forced selection among ``tools``, given as (level, slot); tool 0 is focal."""
    if len(tools) < 2:
        raise ValueError("need at least two tools")
    if disclosure not in DISCLOSURES:
        raise ValueError(f"unknown disclosure {disclosure!r}")
    levels = [str(lv) for lv, _ in tools]
    slots = [s for _, s in tools]
    n = len(tools)
    if sorted(slots) != list(range(n)):
        raise ValueError("slots must be a permutation of 0..n-1")
    condition = condition_of(levels)
    slot_w = [0.0] * n
    for i, (lv, s) in enumerate(zip(levels, slots)):
        slot_w[s] = tool_weight(agent, lv, disclosure, i == 0, domain)
    pick = kernels.choose_slot(slot_w, _rule_code(rule or agent.choice_rule), agent.position_bias(n), rng.uniform())
    focal = slots[0]
    return TrialRecord(
        trial_id=trial_id, domain_tag=domain or "", agent_id=agent.agent_id, condition=condition,
        disclosure=disclosure, slot_of_optimized=focal if condition == "ON" else None, selected_slot=pick,
        selected_optimized=condition == "ON" and pick == focal, n_tools=n, focal_slot=focal,
        focal_level=levels[0], other_level=levels[1], cell_id=cell_id,
    )


@dataclass(frozen=True)
class StoppingRule:
    target_half_width: float = 0.10
    min_n: int = 10
    z: float = 1.96


@dataclass(frozen=True)
class ExperimentDesign:
    """Condition matrix and sampling plan.

    The focal tool rotates through every slot (slot = trial index mod
    n_tools), so each completed rotation is balanced. ``rule`` overrides every
    profile's own choice rule when set.
    """

    conditions: tuple[str, ...] = ("ON",)
    disclosures: tuple[str, ...] = ("none",)
    domains: tuple[str, ...] = ("D01",)
    levels: tuple[str, ...] = ("L3",)
    reps: int = 40
    n_tools: int = 2
    stopping: StoppingRule | None = None
    seed: int = 0
    rule: str | None = None
    balance: str = "rotate"

    def __post_init__(self):
        bad = [c for c in self.conditions if c not in CONDITIONS]
        if bad:
            raise ValueError(f"unknown conditions {bad}")
        bad = [d for d in self.disclosures if d not in DISCLOSURES]
        if bad:
            raise ValueError(f"unknown disclosures {bad}")
        bad = [lv for lv in self.levels if lv not in LEVELS[1:]]
        if bad:
            raise ValueError(f"framed levels must be among {LEVELS[1:]}, got {bad}")
        if self.reps < 1 or self.n_tools < 2:
            raise ValueError("reps must be >= 1 and n_tools >= 2")
        if self.rule is not None and self.rule not in CHOICE_RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.balance != "rotate":
            raise ValueError("only the 'rotate' balancing scheme is supported")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stopping"] = asdict(self.stopping) if self.stopping else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentDesign:
        d = dict(d)
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown design keys {sorted(unknown)}")
        stop = d.pop("stopping", None)
        for key in ("conditions", "disclosures", "domains", "levels"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(stopping=StoppingRule(**stop) if stop else None, **d)

    @classmethod
    def load(cls, path: str | Path) -> ExperimentDesign:
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class Cell:
    agent_id: str
    domain: str
    condition: str
    disclosure: str
    level: str
    n_tools: int

    @property
    def cell_id(self) -> str:
        return f"{self.agent_id}/{self.domain}/{self.condition}/{self.disclosure}/{self.level}/N{self.n_tools}"

    def levels(self) -> list[str]:
        if self.condition == "NN":
            return ["L0"] * self.n_tools
        if self.condition == "OO":
            return [self.level] * self.n_tools
        return [self.level] + ["L0"] * (self.n_tools - 1)


def cells_of(design: ExperimentDesign, agents: Sequence[AgentProfile]) -> list[Cell]:
    """Canonical cell order: agent, domain, condition, disclosure, level."""
    out = []
    for a in agents:
        for dom in design.domains:
            for cond in design.conditions:
                for disc in design.disclosures:
                    for lv in (("L0",) if cond == "NN" else design.levels):
                        out.append(Cell(a.agent_id, dom, cond, disc, lv, design.n_tools))
    return out


@dataclass
class CellResult:
    selected: list[int]
    stopped_early: bool
    balanced: bool


def run_weights(seed: int, weights: Sequence[float], rule: str, bias: Sequence[float], max_n: int,
                stopping: StoppingRule | None = None) -> CellResult:
    """Rotate focal tool 0 through the slots; thin wrapper over the trial kernel."""
    stop = stopping or StoppingRule(0.0, 0)
    selected = kernels.run_cell(seed, list(weights), _rule_code(rule), list(bias), max_n,
                                stop.min_n, stop.target_half_width, stop.z)
    n = len(selected)
    return CellResult(selected, n < max_n, n % len(weights) == 0)


def run_experiment(design: ExperimentDesign, agents: Iterable[AgentProfile]) -> TrialLog:
    agents = list(agents)
    if len({a.agent_id for a in agents}) != len(agents):
        raise ValueError("duplicate agent ids")
    by_id = {a.agent_id: a for a in agents}
    records: list[TrialRecord] = []
    cells_meta: dict[str, dict] = {}
    diagnostics: list[str] = []
    for cell in cells_of(design, agents):
        agent = by_id[cell.agent_id]
        levels = cell.levels()
        weights = [tool_weight(agent, lv, cell.disclosure, i == 0, cell.domain) for i, lv in enumerate(levels)]
        seed = derive_seed(design.seed, cell.cell_id)
        res = run_weights(seed, weights, design.rule or agent.choice_rule, agent.position_bias(cell.n_tools),
                          design.reps, design.stopping)
        n = len(res.selected)
        cells_meta[cell.cell_id] = {"n": n, "stopped_early": res.stopped_early, "balanced": res.balanced}
        if not res.balanced:
            diagnostics.append(f"{cell.cell_id}: reps exhausted before balance (n = {n}, {cell.n_tools} slots)")
        for t, pick in enumerate(res.selected):
            focal = t % cell.n_tools
            on = cell.condition == "ON"
            records.append(TrialRecord(
                trial_id=f"{cell.cell_id}#{t:05d}", domain_tag=cell.domain, agent_id=cell.agent_id,
                condition=cell.condition, disclosure=cell.disclosure, slot_of_optimized=focal if on else None,
                selected_slot=pick, selected_optimized=on and pick == focal, n_tools=cell.n_tools,
                focal_slot=focal, focal_level=levels[0], other_level=levels[1], cell_id=cell.cell_id,
            ))
    header = {
        "rng": ALGORITHM,
        "design": design.to_dict(),
        "profiles": {a.agent_id: a.to_dict() for a in agents},
        "cells": cells_meta,
        "diagnostics": diagnostics,
    }
    return TrialLog(records, header)
