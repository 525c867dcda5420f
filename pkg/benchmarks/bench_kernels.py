"""Compare the numba and pure-numpy Fock kernels.

    python3 benchmarks/bench_kernels.py [--cutoff L] [--repeat N]

Times one full F_TD sandwich per backend (after a warm-up call, so the
numba compile is excluded) and checks that both agree.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from tracechsh.matrixlab import kernels
from tracechsh.matrixlab.realization import RealizationConfig, build_realization


def run(cutoff: int, repeat: int, epsilon: float = 0.1, seed: int = 0) -> dict:
    r = build_realization(RealizationConfig(cutoff, epsilon, seed))
    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    out = {}
    for b in backends:
        value = kernels.sandwich(r.T4, r.chi, cutoff, b)
        t = min(timeit.repeat(lambda: kernels.sandwich(r.T4, r.chi, cutoff, b), number=1, repeat=repeat))
        out[b] = {"seconds": t, "value": value}
    if "numba" in out:
        a, b = out["numpy"]["value"], out["numba"]["value"]
        out["max_abs_difference"] = max(abs(a[0] - b[0]), abs(a[1] - b[1]))
        out["speedup"] = out["numpy"]["seconds"] / out["numba"]["seconds"]
    return out


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cutoff", type=int, nargs="+", default=[4, 5, 6])
    p.add_argument("--repeat", type=int, default=20)
    args = p.parse_args(argv)
    print(f"{'L':>3} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8} {'|diff|':>10}")
    for L in args.cutoff:
        res = run(L, args.repeat)
        nb = res.get("numba", {}).get("seconds", np.nan) * 1e3
        print(f"{L:>3} {res['numpy']['seconds'] * 1e3:>11.3f} {nb:>11.3f} "
              f"{res.get('speedup', np.nan):>8.1f} {res.get('max_abs_difference', np.nan):>10.2e}")


if __name__ == "__main__":
    main()
