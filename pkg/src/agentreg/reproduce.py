"""Regenerate the published summary tables from the calibrated simulator.

Each report puts simulated values next to the reference values with a
deviation column. Graded probabilities (multipliers, disclosure effects,
legal stimuli) are probed under the Luce rule, because a deterministic
ceiling rule can only ever produce 0 or 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from agentreg.agentsim import reference as ref
from agentreg.agentsim.profiles import LUCE, calibrate_profile, odds, shipped_profiles
from agentreg.agentsim.rng import derive_seed
from agentreg.agentsim.simulate import ExperimentDesign, run_experiment, run_weights
from agentreg.metrics import kappa_from_probability, legal_boundary, rsa, sbc, wilson

TABLES = ("kappa-table", "disclosure-table", "legal-table", "multitool-table", "dose-response")
# (4 sigma / 15%)^2: trials per unit of p(1-p) for a multiplier within 15% at ~4 standard errors
KAPPA_PRECISION = (4 / 0.15) ** 2


@dataclass
class Report:
    table_id: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def render(self, fmt: str = "table") -> str:
        if fmt == "records":
            return "\n".join(json.dumps({"table": self.table_id, **r}, sort_keys=True) for r in self.rows) + "\n"
        cells = [[_fmt(r.get(c)) for c in self.columns] for r in self.rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c) for i, c in enumerate(self.columns)]
        line = "  ".join(c.ljust(w) for c, w in zip(self.columns, widths))
        out = [self.table_id, line, "-" * len(line)]
        out += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
        out += [f"note: {n}" for n in self.notes]
        return "\n".join(out) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, float):
        return f"{v:.3f}"
    return str(v)


def power_n(p: float) -> int:
    """Even trial count resolving p/(1-p) to within 15% at about four standard errors."""
    n = math.ceil(KAPPA_PRECISION / (p * (1 - p)))
    return n + n % 2


def _proportion(seed: int, weights, n: int, rule: str = LUCE, bias=None) -> float:
    bias = bias or [1.0 / len(weights)] * len(weights)
    res = run_weights(seed, weights, rule, bias, n)
    hits = sum(1 for t, pick in enumerate(res.selected) if pick == t % len(weights))
    return hits / len(res.selected)


def kappa_table(seed: int = 0) -> Report:
    rep = Report("kappa-table", ["model", "level", "published_kappa", "sim_kappa", "n", "deviation_pct"])
    for model, row in ref.FRAMING_MULTIPLIERS.items():
        prof = calibrate_profile(model)
        for level in ("L1", "L3"):
            k = prof.kappa(level)
            n = power_n(k / (1 + k))
            p = _proportion(derive_seed(seed, f"kappa/{model}/{level}"), [k, 1.0], n)
            sim = kappa_from_probability(p, n).kappa
            rep.rows.append({"model": model, "level": level, "published_kappa": row[level], "sim_kappa": sim, "n": n,
                             "deviation_pct": 100 * (sim - row[level]) / row[level]})
    rep.notes.append("ON cells probed under the Luce rule with n sized for a 15% multiplier tolerance")
    return rep


def disclosure_table(seed: int = 0, n_per_domain: int = 4000) -> Report:
    rep = Report("disclosure-table", ["model", "condition", "published_sbc", "sim_sbc", "published_delta_pp", "sim_delta_pp",
                                      "sim_kappa_d", "published_kappa_d"])
    for model, row in ref.DISCLOSURE_EFFECTS.items():
        design = ExperimentDesign(conditions=("ON",), disclosures=("none", "label", "rating", "sysprompt"),
                                  domains=ref.CONSUMER_DOMAINS, levels=("L4",), reps=n_per_domain, seed=seed, rule=LUCE)
        log = run_experiment(design, [calibrate_profile(model)])
        base = sbc(log.filter(disclosure="none").records).sbc
        for cond in ("none", "label", "rating", "sysprompt"):
            est = sbc(log.filter(disclosure=cond).records)
            published_delta = None if cond == "none" else row[cond]
            published_sbc = row["sbc0"] + (published_delta or 0) / 100
            entry = {"model": model, "condition": cond, "published_sbc": published_sbc, "sim_sbc": est.sbc,
                     "published_delta_pp": published_delta, "sim_delta_pp": None if cond == "none" else 100 * (est.sbc - base)}
            if cond == "label":
                entry["sim_kappa_d"] = odds(est.center)
                entry["published_kappa_d"] = ref.LABEL_KAPPA.get(model)
            rep.rows.append(entry)
    rep.notes.append("optimized copy at L4 against L0 on the three consumer domains, Luce rule")
    return rep


def legal_table(seed: int = 0, n: int = 2000) -> Report:
    rep = Report("legal-table", ["model", "legal_uplift", "published_legal", "norm_effect", "published_norm",
                                 "capture_pct", "published_capture_pct", "illegal_increment", "published_increment"])
    pooled: dict[str, list[int]] = {"legal": [0, 0], "full": [0, 0]}
    for model, published in ref.LEGAL_BOUNDARY_ROWS.items():
        if model == "pooled":
            continue
        prof = calibrate_profile(model)
        est = {}
        for stim in ("legal", "full"):
            p = _proportion(derive_seed(seed, f"legal/{model}/{stim}"), [prof.stimulus_multipliers[stim], 1.0], n)
            hits = round(p * n)
            pooled[stim][0] += hits
            pooled[stim][1] += n
            est[stim] = wilson(hits, n)
        rep.rows.append(_legal_row(model, est["legal"], est["full"], published))
    rep.rows.append(_legal_row("pooled", wilson(*pooled["legal"]), wilson(*pooled["full"]),
                               ref.LEGAL_BOUNDARY_ROWS["pooled"]))
    rep.notes.append("each copy variant against the structured card, Luce rule; pooled is micro-averaged")
    return rep


def _legal_row(model, legal, full, published) -> dict:
    lb = legal_boundary(round(legal.sbc, 2), full if full.spans_zero() else round(full.sbc, 2))
    return {"model": model, "legal_uplift": legal.sbc, "published_legal": published[0], "norm_effect": full.sbc,
            "published_norm": published[1], "capture_pct": lb.capture_ratio, "published_capture_pct": published[2],
            "illegal_increment": lb.illegal_increment, "published_increment": published[3]}


def multitool_table(seed: int = 0, n: int = 30) -> Report:
    rep = Report("multitool-table", ["domain", "model", "rule", "published_rsa", "sim_rsa", "deviation"])
    for domain, row in ref.MULTITOOL_RSA.items():
        for model, published in row.items():
            prof = calibrate_profile(model)
            design = ExperimentDesign(domains=(domain,), levels=("L4",), reps=n, n_tools=5, seed=seed)
            log = run_experiment(design, [prof])
            sim = rsa(log.records, 5)
            rep.rows.append({"domain": domain, "model": model, "rule": prof.choice_rule, "published_rsa": published,
                             "sim_rsa": sim, "deviation": sim - published})
    rep.notes.append("five-tool registry, optimized copy at L4, each profile's own choice rule")
    return rep


def dose_response(seed: int = 0, n: int = 400) -> Report:
    rep = Report("dose-response", ["level", "published_sbc", "sim_sbc", "ci_low", "ci_high", "deviation"])
    profiles = shipped_profiles()
    nn = run_experiment(ExperimentDesign(conditions=("NN",), domains=("D02",), reps=n, seed=seed), profiles)
    on = run_experiment(ExperimentDesign(conditions=("ON",), domains=("D02",), levels=("L1", "L2", "L3", "L4"),
                                         reps=n, seed=seed), profiles)
    for level, published in ref.POOLED_DOSE_RESPONSE.items():
        recs = nn.records if level == "L0" else [r for r in on.records if r.focal_level == level]
        est = sbc(recs, "NN" if level == "L0" else "ON")
        rep.rows.append({"level": level, "published_sbc": published, "sim_sbc": est.sbc, "ci_low": est.ci_low - 0.5,
                         "ci_high": est.ci_high - 0.5, "deviation": est.sbc - published})
    rep.notes.append(f"pooled over {len(profiles)} profiles, n = {n} per cell, each profile's own choice rule")
    return rep


def disclosure_multipliers() -> dict[str, dict[str, float]]:
    """Post-disclosure multiplier p/(1-p) per model and mechanism, straight from the measured deltas."""
    out = {}
    for model, row in ref.DISCLOSURE_EFFECTS.items():
        p0 = 0.5 + row["sbc0"]
        out[model] = {"none": odds(p0)} | {k: odds(p0 + row[k] / 100) for k in ("label", "rating", "sysprompt")}
    return out


def reproduce(table_id: str, seed: int = 0) -> Report:
    builders = {"kappa-table": kappa_table, "disclosure-table": disclosure_table, "legal-table": legal_table,
                "multitool-table": multitool_table, "dose-response": dose_response}
    if table_id not in builders:
        raise ValueError(f"unknown table {table_id!r}; choose from {', '.join(TABLES)}")
    return builders[table_id](seed=seed)
