"""Binary description-investment game among tool providers.

Each provider either leaves its description neutral (0) or optimizes it (1).
Selection follows a Luce rule over framing weights (1 for neutral, kappa for
optimized); provider i earns r * sigma_i - c * q_i.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field, replace
from typing import Sequence

MAX_ENUMERATION_N = 20
TOL = 1e-12


@dataclass(frozen=True)
class GameConfig:
    n_providers: int
    revenue: float = 1.0
    cost: float = 0.0
    kappa: float = 1.0
    value_per_use: float = 1.0
    normalized: bool = False

    def __post_init__(self):
        if self.n_providers < 2:
            raise ValueError("need at least two providers")
        if self.revenue <= 0:
            raise ValueError("revenue must be positive")
        if self.cost < 0:
            raise ValueError("cost must be non-negative")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")

    @property
    def effective_kappa(self) -> float:
        return 1.0 if self.normalized else self.kappa

    def to_dict(self) -> dict:
        return {
            "n_providers": self.n_providers, "revenue": self.revenue, "cost": self.cost,
            "kappa": self.kappa, "value_per_use": self.value_per_use, "normalized": self.normalized,
        }


Profile = tuple[int, ...]


@dataclass(frozen=True)
class PayoffVector:
    payoffs: tuple[float, ...]
    selection_probs: tuple[float, ...]


@dataclass(frozen=True)
class Deviation:
    provider: int
    alternative: int
    gain: float


@dataclass(frozen=True)
class EquilibriumReport:
    profile: Profile
    is_nash: bool
    profitable_deviations: tuple[Deviation, ...]
    threshold: float
    pareto_dominated_by: Profile | None = None
    kappa: float | None = None
    class_size: int = 1
    unique_ne: Profile | None = None


@dataclass(frozen=True)
class WelfareReport:
    expected_value_selected: float
    total_framing_cost: float
    welfare: float


def luce_probs(weights: Sequence[float]) -> tuple[float, ...]:
    if not weights:
        raise ValueError("no alternatives")
    if any(w <= 0 for w in weights):
        raise ValueError("Luce weights must be strictly positive")
    total = math.fsum(weights)
    return tuple(w / total for w in weights)


def _validate(profile: Sequence[int], cfg: GameConfig) -> Profile:
    profile = tuple(int(q) for q in profile)
    if len(profile) != cfg.n_providers:
        raise ValueError(f"profile length {len(profile)} != {cfg.n_providers} providers")
    if any(q not in (0, 1) for q in profile):
        raise ValueError("strategies are binary: 0 (neutral) or 1 (optimized)")
    return profile


def payoffs(profile: Sequence[int], cfg: GameConfig) -> PayoffVector:
    profile = _validate(profile, cfg)
    k = cfg.effective_kappa
    sigma = luce_probs([k if q else 1.0 for q in profile])
    pi = tuple(cfg.revenue * s - cfg.cost * q for s, q in zip(sigma, profile))
    return PayoffVector(pi, sigma)


def ne_threshold(cfg: GameConfig) -> float:
    """Largest optimization cost at which all-optimize is still an equilibrium.

    Returns 0 when kappa <= 1 (optimizing never strictly pays).
    """
    k, n, r = cfg.effective_kappa, cfg.n_providers, cfg.revenue
    if k <= 1:
        return 0.0
    return r * (k - 1) * (n - 1) / (n * (k * (n - 1) + 1))


def verify_nash(profile: Sequence[int], cfg: GameConfig) -> EquilibriumReport:
    """Check every unilateral deviation; ties keep the profile (weak equilibrium)."""
    profile = _validate(profile, cfg)
    base = payoffs(profile, cfg).payoffs
    devs = []
    for i, q in enumerate(profile):
        alt = 1 - q
        moved = profile[:i] + (alt,) + profile[i + 1 :]
        gain = payoffs(moved, cfg).payoffs[i] - base[i]
        if gain > TOL * cfg.revenue:
            devs.append(Deviation(i, alt, gain))
    n = cfg.n_providers
    zero = (0,) * n
    dominated = None
    if any(profile) and welfare(zero, cfg).welfare > welfare(profile, cfg).welfare:
        dominated = zero
    return EquilibriumReport(profile, not devs, tuple(devs), ne_threshold(cfg), dominated, cfg.effective_kappa)


def _class_profile(n: int, k: int) -> Profile:
    return (1,) * k + (0,) * (n - k)


def symmetric_classes(cfg: GameConfig) -> list[EquilibriumReport]:
    """Equilibrium verdict for each symmetry class (k optimizers), any N."""
    n = cfg.n_providers
    out = []
    for k in range(n + 1):
        report = verify_nash(_class_profile(n, k), cfg) if n <= 64 else _class_report(cfg, k)
        out.append(replace(report, class_size=math.comb(n, k)))
    return out


def _class_report(cfg: GameConfig, k: int) -> EquilibriumReport:
    # closed-form payoffs by class; avoids O(N) profiles for very large N
    n, kap, r, c = cfg.n_providers, cfg.effective_kappa, cfg.revenue, cfg.cost
    devs = []

    def share(weight, k_opt):
        return weight / (kap * k_opt + (n - k_opt))

    if k > 0:
        gain = r * share(1.0, k - 1) - (r * share(kap, k) - c)
        if gain > TOL * r:
            devs.append(Deviation(0, 0, gain))
    if k < n:
        gain = (r * share(kap, k + 1) - c) - r * share(1.0, k)
        if gain > TOL * r:
            devs.append(Deviation(k, 1, gain))
    dominated = (0,) * n if k and c > 0 else None
    return EquilibriumReport(_class_profile(n, k), not devs, tuple(devs), ne_threshold(cfg), dominated, kap)


def enumerate_equilibria(cfg: GameConfig) -> list[EquilibriumReport]:
    """All pure-strategy equilibria, expanded from symmetry-class verdicts."""
    n = cfg.n_providers
    if n > MAX_ENUMERATION_N:
        raise ValueError(
            f"N = {n} exceeds the enumeration bound {MAX_ENUMERATION_N}; use symmetric_classes() instead"
        )
    out = []
    for cls in symmetric_classes(cfg):
        if not cls.is_nash:
            continue
        k = sum(cls.profile)
        for chosen in itertools.combinations(range(n), k):
            profile = tuple(1 if i in chosen else 0 for i in range(n))
            out.append(replace(cls, profile=profile, class_size=1))
    return out


def brute_force_equilibria(cfg: GameConfig) -> list[Profile]:
    """Unreduced 2^N scan; independent cross-check for small N."""
    return [p for p in itertools.product((0, 1), repeat=cfg.n_providers) if verify_nash(p, cfg).is_nash]


def kappa_from_label_probability(p_label: float) -> float:
    if not 0.0 < p_label < 1.0:
        raise ValueError("label-condition probability must lie in (0, 1)")
    return p_label / (1.0 - p_label)


def disclosure_game(cfg: GameConfig, p_label: float) -> EquilibriumReport:
    """All-optimize verdict once a disclosure moves the multiplier to its post-label odds."""
    kd = kappa_from_label_probability(p_label)
    dcfg = replace(cfg, kappa=kd)
    report = verify_nash((1,) * cfg.n_providers, dcfg)
    unique = None
    if cfg.n_providers <= MAX_ENUMERATION_N:
        eqs = enumerate_equilibria(dcfg)
        if len(eqs) == 1:
            unique = eqs[0].profile
    return replace(report, kappa=kd, unique_ne=unique)


def welfare(profile: Sequence[int], cfg: GameConfig) -> WelfareReport:
    """Identical tools: every selection is worth v, framing spend is waste."""
    profile = _validate(profile, cfg)
    cost = cfg.cost * sum(profile)
    return WelfareReport(cfg.value_per_use, cost, cfg.value_per_use - cost)


@dataclass
class DynamicsResult:
    trajectory: list[tuple[int, int, Profile]] = field(default_factory=list)
    final: Profile = ()
    converged: bool = False
    cycle: list[Profile] | None = None
    rounds: int = 0


def best_response(profile: Profile, i: int, cfg: GameConfig) -> int:
    """Strict improvement only; indifference keeps the current choice."""
    current = payoffs(profile, cfg).payoffs[i]
    alt = 1 - profile[i]
    moved = profile[:i] + (alt,) + profile[i + 1 :]
    return alt if payoffs(moved, cfg).payoffs[i] - current > TOL * cfg.revenue else profile[i]


def best_response_dynamics(start: Sequence[int], cfg: GameConfig, max_rounds: int = 100,
                           update: str = "simultaneous", order: str = "round-robin",
                           seed: int = 0) -> DynamicsResult:
    """Iterated best responses from ``start``.

    Each round visits providers round-robin by index (or in a seeded shuffle
    with ``order="random"``). Under ``update="simultaneous"`` every provider
    inspects the round-start profile and all switches land together; under
    ``"sequential"`` each switch is visible to the providers after it. Stops at
    a round with no switch (a fixed point, hence an equilibrium) or reports a
    cycle when a round-start profile repeats.
    """
    if update not in ("simultaneous", "sequential"):
        raise ValueError(f"unknown update rule {update!r}")
    if order not in ("round-robin", "random"):
        raise ValueError(f"unknown order {order!r}")
    profile = _validate(start, cfg)
    rng = random.Random(seed)
    result = DynamicsResult(final=profile)
    seen = {profile: 0}
    history = [profile]
    for rnd in range(1, max_rounds + 1):
        idx = list(range(cfg.n_providers))
        if order == "random":
            rng.shuffle(idx)
        inspected = profile
        moved = False
        for i in idx:
            basis = inspected if update == "simultaneous" else profile
            choice = best_response(basis, i, cfg)
            if choice != profile[i]:
                profile = profile[:i] + (choice,) + profile[i + 1 :]
                result.trajectory.append((rnd, i, profile))
                moved = True
        result.final = profile
        if not moved:
            result.converged = True
            return result
        result.rounds = rnd
        if profile in seen and order == "round-robin":
            result.cycle = history[seen[profile]:] + [profile]
            return result
        seen[profile] = rnd
        history.append(profile)
    return result
