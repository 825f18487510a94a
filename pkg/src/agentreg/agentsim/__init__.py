"""Calibrated synthetic agents that regenerate tool-selection trial logs."""

from agentreg.agentsim.profiles import (
    AVAILABLE_PROFILES,
    CEILING,
    LUCE,
    AgentProfile,
    UnknownProfileError,
    calibrate_profile,
    shipped_profiles,
)
from agentreg.agentsim.rng import SplitMix64, derive_seed
from agentreg.agentsim.simulate import (
    LABEL_SUFFIX,
    RATING_SUFFIX,
    SYSPROMPT_NOTE,
    Cell,
    ExperimentDesign,
    StoppingRule,
    disclosed_description,
    run_experiment,
    run_weights,
    simulate_trial,
    system_context,
    tool_weight,
)

__all__ = [
    "AVAILABLE_PROFILES", "CEILING", "LUCE", "AgentProfile", "UnknownProfileError", "calibrate_profile",
    "shipped_profiles", "SplitMix64", "derive_seed", "LABEL_SUFFIX", "RATING_SUFFIX", "SYSPROMPT_NOTE", "Cell",
    "ExperimentDesign", "StoppingRule", "disclosed_description", "run_experiment", "run_weights",
    "simulate_trial", "system_context", "tool_weight",
]
