"""Compare the compiled kernels with the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from rlplift import _kernels_py
from rlplift.corpus.generators import planted_lp
from rlplift.lifting import build_coefficient_graph

try:
    from rlplift import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1e3


def bench_refine(mod, g, repeat):
    indptr, indices, ecol = g.csr()
    colors = np.ascontiguousarray(g.colors, dtype=np.int64)

    def go():
        c, k = colors, -1
        while True:
            c2, k2 = mod.refine_round(c, indptr, indices, ecol)
            if k2 == k:
                break
            c, k = c2, k2
    return _best(go, repeat)


def bench_pivot(mod, m, n, pivots, repeat):
    rng = np.random.default_rng(1)
    T0 = rng.standard_normal((m, n)) + 5.0
    rhs0 = rng.random(m)
    d0 = rng.standard_normal(n)

    def go():
        T, rhs, d = T0.copy(), rhs0.copy(), d0.copy()
        for k in range(pivots):
            mod.pivot_dense(T, rhs, d, k % m, k % n)
    return _best(go, repeat)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    mods = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    if _kernels_c is None:
        print("compiled extension not available; timing the fallback only")

    graphs = []
    rng = np.random.default_rng(0)
    for size in (50, 200):
        lp = planted_lp(rng, size, size)
        graphs.append((f"color refinement n={lp.n} m={lp.m}", build_coefficient_graph(lp)))
    print(f"{'kernel':44s} " + " ".join(f"{name:>10s}" for name, _ in mods) + "   speedup")
    for label, g in graphs:
        t = [bench_refine(mod, g, args.repeat) for _, mod in mods]
        _row(label, t)
    for m, n in ((100, 300), (400, 1200)):
        t = [bench_pivot(mod, m, n, 200, args.repeat) for _, mod in mods]
        _row(f"200 dense pivots {m}x{n}", t)


def _row(label, t):
    speed = f"{t[0] / t[1]:8.2f}x" if len(t) > 1 and t[1] > 0 else ""
    print(f"{label:44s} " + " ".join(f"{v:8.2f}ms" for v in t) + "  " + speed)


if __name__ == "__main__":
    main()
