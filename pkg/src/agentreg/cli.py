"""Command-line entry point: ``agentreg <command> [options]``.

Every option listed in ``ENV_OVERRIDES`` can also come from an environment
variable (``AGENTREG_SEED``, ``AGENTREG_LEXICON``, ...); an explicit flag wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from agentreg import __version__, kernels
from agentreg.rhetoric import LexiconError, ToolDescription, analyze, load_lexicon

ENV_PREFIX = "AGENTREG_"
ENV_OVERRIDES = ("seed", "lexicon", "format", "out", "store_path", "port", "operator_token")


class CliError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    # SUPPRESS keeps nested subparsers from resetting a flag given at an outer level
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--lexicon", help="persuasion lexicon file (default: bundled)")
    p.add_argument("--format", choices=("table", "records"), help="human table or JSON records")
    p.add_argument("--out", help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="agentreg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="store_true", help="print toolkit and lexicon versions")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("analyze", parents=[common], help="persuasion features and framing level")
    p.add_argument("input", nargs="?", default="-", help="text or JSON tool document ('-' for stdin)")

    p = sub.add_parser("normalize", parents=[common], help="rewrite a description into its selection card")
    p.add_argument("input", nargs="?", default="-")

    p = sub.add_parser("metrics", parents=[common], help="selection statistics")
    msub = p.add_subparsers(dest="metric", required=True)
    m = msub.add_parser("sbc", parents=[common])
    m.add_argument("log")
    m.add_argument("--condition", default="ON", choices=("ON", "NN", "OO"))
    m.add_argument("--by-slot", action="store_true")
    m = msub.add_parser("rsa", parents=[common])
    m.add_argument("log")
    m.add_argument("--n-tools", type=int, required=True)
    m = msub.add_parser("kappa", parents=[common])
    m.add_argument("--p", type=float, required=True, help="selection probability of the framed tool")
    m.add_argument("--n", type=int, help="cell size (needed when p is 0 or 1)")
    m = msub.add_parser("wilson", parents=[common])
    m.add_argument("--successes", type=int, required=True)
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--z", type=float, default=1.96)
    m = msub.add_parser("aaqs", parents=[common])
    m.add_argument("--selection-rate", type=float, required=True)
    m.add_argument("--capability-match", type=float, required=True)
    m = msub.add_parser("legal", parents=[common])
    m.add_argument("--legal", type=float, required=True, help="SBC of structured vs legal-puffery copy")
    m.add_argument("--full", type=float, required=True, help="SBC of structured vs fully optimized copy")
    m = msub.add_parser("traffic", parents=[common])
    m.add_argument("--sbc", type=float, required=True)
    m.add_argument("--calls", type=float, required=True, help="calls per day")
    m.add_argument("--revenue", type=float, required=True, help="revenue per call")

    p = sub.add_parser("simulate", parents=[common], help="run a simulated experiment")
    p.add_argument("--design", help="JSON experiment design")
    p.add_argument("--agents", default="all", help="comma-separated profile ids or 'all'")
    p.add_argument("--log-format", choices=("ndjson", "columnar"), default="ndjson")

    p = sub.add_parser("equilibrium", parents=[common], help="provider game equilibria")
    p.add_argument("--config", help="JSON game config")
    p.add_argument("--kappa", default="5.8", help="value or comma-separated grid")
    p.add_argument("--providers", default="5", help="N, comma list, or range a:b")
    p.add_argument("--cost", default="0.1", help="cost as a fraction of revenue; value or grid")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--p-label", type=float, help="evaluate all-optimize under a disclosure's post-label probability")
    p.add_argument("--dynamics", action="store_true", help="run best-response dynamics from all-zero")

    p = sub.add_parser("serve", parents=[common], help="run the registry service")
    p.add_argument("--port", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store-path")
    p.add_argument("--operator-token")

    p = sub.add_parser("reproduce", parents=[common], help="regenerate a reference table from the simulator")
    p.add_argument("table", choices=("kappa-table", "disclosure-table", "legal-table", "multitool-table", "dose-response"))
    return parser


def _apply_env(args: argparse.Namespace) -> None:
    defaults = {"seed": 0, "lexicon": None, "format": "table", "out": None, "store_path": None, "port": 8080,
                "operator_token": "operator"}
    args.explicit = set()
    for name in ENV_OVERRIDES:
        if getattr(args, name, None) is not None:
            args.explicit.add(name)
            continue
        env = os.environ.get(ENV_PREFIX + name.upper())
        if env is not None:
            setattr(args, name, int(env) if name in ("seed", "port") else env)
            args.explicit.add(name)
        else:
            setattr(args, name, defaults[name])
    if args.format not in ("table", "records"):
        raise CliError(f"format must be 'table' or 'records', got {args.format!r}")


def _read(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    path = Path(source)
    if not path.exists():
        raise CliError(f"no such file: {source}")
    return path.read_text()


def _description(text: str) -> ToolDescription:
    from agentreg.registry.service import description_from_dict

    stripped = text.strip()
    if stripped.startswith("{"):
        return description_from_dict(json.loads(stripped))
    return ToolDescription("input", "input", stripped)


def _emit(args, table: str, records: list[dict]) -> None:
    text = table if args.format == "table" else "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _kv_table(rows: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def cmd_analyze(args, lex) -> None:
    desc = _description(_read(args.input))
    report, level = analyze(desc, lex)
    counts = report.counts()
    rows = [("level", str(level)), *counts.items(), ("spans", "; ".join(f"{s.category}:{s.text}" for s in report.matched_spans))]
    _emit(args, _kv_table(rows), [{"tool_id": desc.id, "level": str(level), **counts,
                                   "spans": [asdict(s) for s in report.matched_spans]}])


def cmd_normalize(args, lex) -> None:
    from agentreg.normalizer import normalize, render_selection_text

    desc = _description(_read(args.input))
    entry = normalize(desc, lex)
    log = "".join(f"  {e.action}: [{e.category}] {e.span}\n" for e in entry.normalization_log)
    _emit(args, render_selection_text(entry.selection) + "\n" + (f"log:\n{log}" if log else ""), [entry.to_dict()])


def cmd_metrics(args, lex) -> None:
    from agentreg import metrics as mx
    from agentreg.trials import read_log

    kind = args.metric
    if kind in ("sbc", "rsa"):
        log = read_log(_read(args.log))
        if kind == "rsa":
            value = mx.rsa(log.filter(condition="ON").records, args.n_tools)
            _emit(args, _kv_table([("rsa", f"{value:.3f}")]), [{"rsa": value, "n_tools": args.n_tools}])
            return
        recs = log.filter(condition=args.condition).records
        ests = mx.sbc_by_slot(recs, args.condition) if args.by_slot else {"all": mx.sbc(recs, args.condition)}
        rows, out = [], []
        for key, est in ests.items():
            rows.append((f"slot {key}" if args.by_slot else "pooled",
                         f"SBC {est.sbc:+.3f} [{est.ci_low - 0.5:+.3f}, {est.ci_high - 0.5:+.3f}] n={est.n}"))
            out.append({"group": key, **asdict(est)})
        _emit(args, _kv_table(rows), out)
        return
    if kind == "wilson":
        est = mx.wilson(args.successes, args.n, args.z)
        rec = asdict(est)
    elif kind == "kappa":
        rec = asdict(mx.kappa_from_probability(args.p, args.n))
    elif kind == "aaqs":
        rec = asdict(mx.aaqs(args.selection_rate, args.capability_match))
    elif kind == "legal":
        rec = asdict(mx.legal_boundary(args.legal, args.full))
    else:
        rec = asdict(mx.traffic_projection(args.sbc, args.calls, args.revenue))
    _emit(args, _kv_table(list(rec.items())), [rec])


def cmd_simulate(args, lex) -> None:
    from dataclasses import replace

    from agentreg.agentsim import AVAILABLE_PROFILES, ExperimentDesign, calibrate_profile, run_experiment
    from agentreg.trials import to_columnar, to_ndjson

    design = ExperimentDesign.load(args.design) if args.design else ExperimentDesign()
    if "seed" in args.explicit:
        design = replace(design, seed=args.seed)
    ids = AVAILABLE_PROFILES if args.agents == "all" else [a.strip() for a in args.agents.split(",") if a.strip()]
    log = run_experiment(design, [calibrate_profile(a) for a in ids])
    text = to_ndjson(log) if args.log_format == "ndjson" else to_columnar(log)
    if args.out:
        Path(args.out).write_text(text)
        for d in log.header["diagnostics"]:
            print(f"warning: {d}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _grid(text: str, cast=float) -> list:
    text = str(text)
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [cast(v) for v in text.split(",") if v.strip()]


def cmd_equilibrium(args, lex) -> None:
    from agentreg import strategic as st

    if args.config:
        base = json.loads(_read(args.config))
        configs = [st.GameConfig(**base)]
    else:
        configs = [
            st.GameConfig(n_providers=n, revenue=1.0, cost=c, kappa=k, normalized=args.normalized)
            for k in _grid(args.kappa) for n in _grid(args.providers, int) for c in _grid(args.cost)
        ]
    rows, out = [], []
    for cfg in configs:
        rec = {"kappa": cfg.kappa, "n": cfg.n_providers, "cost": cfg.cost, "normalized": cfg.normalized,
               "threshold": st.ne_threshold(cfg)}
        if args.p_label is not None:
            rep = st.disclosure_game(cfg, args.p_label)
            rec.update(kappa_d=rep.kappa, all_optimize_nash=rep.is_nash,
                       unique_ne="".join(map(str, rep.unique_ne)) if rep.unique_ne else None)
        elif cfg.n_providers <= st.MAX_ENUMERATION_N:
            rec["equilibria"] = ["".join(map(str, e.profile)) for e in st.enumerate_equilibria(cfg)]
        else:
            rec["equilibrium_classes"] = [sum(e.profile) for e in st.symmetric_classes(cfg) if e.is_nash]
        if args.dynamics:
            dyn = st.best_response_dynamics((0,) * cfg.n_providers, cfg)
            rec["dynamics_final"] = "".join(map(str, dyn.final))
            rec["dynamics_converged"] = dyn.converged
        rec["welfare_all_optimize"] = st.welfare((1,) * cfg.n_providers, cfg).welfare
        out.append(rec)
        rows.append(rec)
    cols = list(out[0]) if out else []
    lines = ["  ".join(cols)] + ["  ".join(_cell(r.get(c)) for c in cols) for r in rows]
    _emit(args, "\n".join(lines) + "\n", out)


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    if isinstance(v, list):
        return ",".join(map(str, v)) or "-"
    return str(v)


def cmd_serve(args, lex) -> None:
    import uvicorn

    from agentreg.registry import EventStore, Registry
    from agentreg.registry.app import create_app

    store = EventStore(args.store_path, snapshot_every=500) if args.store_path else EventStore()
    registry = Registry(store, lex, operator_token=args.operator_token)
    uvicorn.run(create_app(registry), host=args.host, port=args.port)


def cmd_reproduce(args, lex) -> None:
    from agentreg.reproduce import reproduce

    report = reproduce(args.table, seed=args.seed)
    text = report.render(args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


COMMANDS = {
    "analyze": cmd_analyze, "normalize": cmd_normalize, "metrics": cmd_metrics, "simulate": cmd_simulate,
    "equilibrium": cmd_equilibrium, "serve": cmd_serve, "reproduce": cmd_reproduce,
}


def main(argv: list[str] | None = None) -> int:
    from agentreg.agentsim import UnknownProfileError
    from agentreg.metrics import AggregationError
    from agentreg.normalizer import NormalizationFailure
    from agentreg.registry import RegistryError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_env(args)
        lex = load_lexicon(getattr(args, "lexicon", None))
        if args.version:
            print(f"agentreg {__version__} (lexicon {lex.version}, kernels {kernels.BACKEND_NAME})")
            return 0
        if not args.command:
            parser.print_help(sys.stderr)
            return 2
        COMMANDS[args.command](args, lex)
    except (CliError, ValueError, LexiconError, NormalizationFailure, AggregationError, RegistryError,
            UnknownProfileError, OSError, KeyError, TypeError) as exc:
        print(f"agentreg: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
