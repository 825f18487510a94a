"""Published behavioural measurements the shipped profiles are calibrated to.

Values are kept verbatim; derived quantities live in ``profiles``.
"""

from __future__ import annotations

# Framing multiplier at L1 and L3 against an L0 baseline, with response shape.
FRAMING_MULTIPLIERS = {
    "deepseek": {"L1": 4.4, "L3": 9.0, "shape": "step"},
    "o4-mini": {"L1": 15.7, "L3": 27.6, "shape": "step"},
    "claude": {"L1": 1.4, "L3": 2.2, "shape": "gradual"},
    "gpt54-nano": {"L1": 7.0, "L3": 6.6, "shape": "plateau"},
    "gpt-4o": {"L1": 2.5, "L3": 2.4, "shape": "moderate"},
}
AGGREGATE_KAPPA = {"L1": 4.4, "L3": 5.8}

# Consumer-domain baseline SBC and disclosure deltas (percentage points).
CONSUMER_DOMAINS = ("D01", "D03", "D05")
DISCLOSURE_EFFECTS = {
    "deepseek": {"sbc0": 0.463, "label": -3, "rating": -13, "sysprompt": 1},
    "o4-mini": {"sbc0": 0.477, "label": -33, "rating": -41, "sysprompt": 0},
    "gpt54-mini": {"sbc0": 0.484, "label": -25, "rating": -31, "sysprompt": 0},
    "gpt54-nano": {"sbc0": 0.341, "label": -26, "rating": -13, "sysprompt": 3},
    "claude": {"sbc0": 0.125, "label": -28, "rating": -15, "sysprompt": -12},
}
# Post-label multipliers quoted in the equilibrium discussion.
LABEL_KAPPA = {"deepseek": 13.9, "o4-mini": 1.8, "claude": 0.5}
BASELINE_KAPPA = {"deepseek": 26.0, "o4-mini": 42.5, "claude": 1.7}

# Pooled SBC by framing level, all models.
POOLED_DOSE_RESPONSE = {"L0": -0.009, "L1": 0.316, "L2": 0.219, "L3": 0.352, "L4": 0.111}
CLAUDE_L4_SBC = -0.206

# Legal uplift, normalization effect, capture ratio (percent), illegal increment.
LEGAL_BOUNDARY_ROWS = {
    "deepseek": (0.47, 0.48, 97.9, 0.01),
    "o4-mini": (0.48, 0.45, 106.7, -0.03),
    "gpt54-mini": (0.46, 0.34, 135.3, -0.12),
    "claude": (-0.09, -0.03, None, 0.06),
    "pooled": (0.33, 0.31, 106.5, -0.02),
}

# Relative selection advantage in a five-tool registry, by domain.
MULTITOOL_RSA = {
    "D01": {"deepseek": 5.00, "o4-mini": 5.00, "gpt54-mini": 5.00, "claude": 1.17},
    "D03": {"deepseek": 5.00, "o4-mini": 5.00, "gpt54-mini": 5.00, "claude": 1.33},
    "D05": {"deepseek": 5.00, "o4-mini": 5.00, "gpt54-mini": 5.00, "claude": 4.50},
}

# Slot shares when both tools carry optimized copy.
OO_POSITION_SHARES = {"gpt54-mini": (0, 0.995), "claude": (1, 0.78)}
CLAUDE_LAST_SLOT_RATE = 0.74

CEILING_SBC = 0.456
CEILING_N = 40
