"""Compare the compiled core against the pure-Python fallback.

    python3 benchmarks/bench_core.py [--repeat N]

Times scalar f/g evaluations across both branches and one cavity mode-sum
block, and checks that the two backends agree.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from cp_dynamics import _purepy

try:
    from cp_dynamics import _core
except ImportError:  # pragma: no cover
    _core = None


def _best(fn, repeat: int) -> float:
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_aux(mod, xs: np.ndarray) -> None:
    aux = mod.aux_fg
    for x in xs:
        aux(float(x))


def bench_cavity(mod, n_max: int) -> tuple[float, float]:
    return mod.cavity_block(0, n_max + 1, n_max, 5.0, 1.0, 0.3, 1.0, 0.8, True)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n-aux", type=int, default=20000)
    ap.add_argument("--n-max", type=int, default=48)
    args = ap.parse_args()

    xs = np.geomspace(1e-3, 1e3, args.n_aux)
    rows = []
    backends = [("purepy", _purepy)] + ([("cython", _core)] if _core else [])
    results = {}
    for name, mod in backends:
        t_aux = _best(lambda: bench_aux(mod, xs), args.repeat)
        t_cav = _best(lambda: bench_cavity(mod, args.n_max), args.repeat)
        results[name] = bench_cavity(mod, args.n_max)
        rows.append((name, t_aux / len(xs) * 1e6, t_cav))

    print(f"{'backend':<8} {'aux_fg [us/call]':>18} {'cavity n_max=' + str(args.n_max) + ' [s]':>22}")
    for name, us, sec in rows:
        print(f"{name:<8} {us:>18.3f} {sec:>22.4f}")
    if len(rows) == 2:
        print(f"speedup  {rows[0][1] / rows[1][1]:>18.1f} {rows[0][2] / rows[1][2]:>22.1f}")
        a, b = results["purepy"], results["cython"]
        rel = max(abs(a[i] - b[i]) / abs(a[i]) for i in range(2))
        worst = max(
            abs(_purepy.aux_fg(float(x))[0] - _core.aux_fg(float(x))[0]) / _purepy.aux_fg(float(x))[0]
            for x in xs[:: max(len(xs) // 200, 1)]
        )
        print(f"agreement: cavity block rel diff {rel:.2e}, f(x) rel diff {worst:.2e}")
    else:
        print("compiled core not built; only the fallback was timed")


if __name__ == "__main__":
    main()
