"""Pure-Python trial kernels; the reference the compiled twin must match bit for bit.

Random stream: SplitMix64 (Steele, Lea & Flood 2014). A uniform draw is the top
53 bits of the output scaled by 2**-53. One draw is consumed per trial.
"""

from __future__ import annotations

import math

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

LUCE = 0
CEILING = 1


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance ``state``; return (new_state, 64-bit output)."""
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def uniforms(seed: int, count: int) -> list[float]:
    state = seed & _MASK
    out = []
    for _ in range(count):
        state, z = splitmix64_next(state)
        out.append((z >> 11) * _INV53)
    return out


def choose_slot(weights, rule: int, bias, u: float) -> int:
    """Pick a slot from per-slot weights with one uniform draw ``u``."""
    n = len(weights)
    wmax = weights[0]
    wmin = weights[0]
    for s in range(1, n):
        if weights[s] > wmax:
            wmax = weights[s]
        if weights[s] < wmin:
            wmin = weights[s]
    if rule == LUCE and wmin != wmax:
        total = 0.0
        for s in range(n):
            total += weights[s]
        x = u * total
        acc = 0.0
        for s in range(n):
            acc += weights[s]
            if x < acc:
                return s
        return n - 1
    # tie-break among maximal slots by position preference
    total = 0.0
    ntied = 0
    last = 0
    for s in range(n):
        if weights[s] == wmax:
            total += bias[s]
            ntied += 1
            last = s
    if ntied == 1:
        return last
    if total <= 0.0:
        k = int(u * ntied)
        for s in range(n):
            if weights[s] == wmax:
                if k == 0:
                    return s
                k -= 1
        return last
    x = u * total
    acc = 0.0
    for s in range(n):
        if weights[s] == wmax:
            acc += bias[s]
            if x < acc:
                return s
    return last


def wilson_halfwidth(successes: int, n: int, z: float) -> float:
    p = successes / n
    z2 = z * z
    return z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n)


def run_cell(
    seed: int,
    tool_weights,
    rule: int,
    bias,
    max_n: int,
    min_n: int = 0,
    target: float = 0.0,
    z: float = 1.96,
) -> list[int]:
    """Simulate one position-balanced cell; return the selected slot of each trial.

    Tool 0 is the focal tool; in trial ``t`` it sits in slot ``t % n_tools`` and
    the remaining tools fill the other slots in index order. When ``target`` is
    positive the cell stops at the first balanced ``n >= min_n`` whose Wilson
    half-width for the focal tool falls below ``target``.
    """
    n_tools = len(tool_weights)
    state = seed & _MASK
    slot_w = [0.0] * n_tools
    selected = []
    hits = 0
    for t in range(max_n):
        focal = t % n_tools
        slot_w[focal] = tool_weights[0]
        k = 1
        for s in range(n_tools):
            if s != focal:
                slot_w[s] = tool_weights[k]
                k += 1
        state, z64 = splitmix64_next(state)
        u = (z64 >> 11) * _INV53
        pick = choose_slot(slot_w, rule, bias, u)
        selected.append(pick)
        if pick == focal:
            hits += 1
        n = t + 1
        if target > 0.0 and n >= min_n and n % n_tools == 0:
            if wilson_halfwidth(hits, n, z) < target:
                break
    return selected
