"""Time the compiled trial kernel against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--trials 200000] [--repeat 3]

Both backends must return identical selections; the script aborts otherwise.
"""

from __future__ import annotations

import argparse
import sys
import time

from agentreg import _pykernels, kernels

WORKLOADS = [
    ("2 tools, luce", [27.6, 1.0], _pykernels.LUCE, [0.5, 0.5]),
    ("2 tools, tie by position", [2.2, 2.2], _pykernels.LUCE, [0.22, 0.78]),
    ("5 tools, ceiling", [9.0, 1.0, 1.0, 1.0, 1.0], _pykernels.CEILING, [0.2] * 5),
    ("5 tools, luce", [1.667, 1.0, 1.0, 1.0, 1.0], _pykernels.LUCE, [0.2] * 5),
]


def best_of(fn, repeat: int) -> tuple[float, list[int]]:
    best, out = float("inf"), []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args(argv)
    compiled = kernels.compiled_backend
    if compiled is None:
        print("compiled extension not built; only the Python fallback is available", file=sys.stderr)
        return 1
    print(f"{'workload':<26}{'python s':>10}{'compiled s':>12}{'speedup':>9}")
    for name, weights, rule, bias in WORKLOADS:
        def run(mod):
            return lambda: mod.run_cell(args.seed, weights, rule, bias, args.trials)
        t_py, out_py = best_of(run(_pykernels), args.repeat)
        t_c, out_c = best_of(run(compiled), args.repeat)
        if out_py != out_c:
            print(f"{name}: backends disagree", file=sys.stderr)
            return 2
        print(f"{name:<26}{t_py:>10.3f}{t_c:>12.4f}{t_py / t_c:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
