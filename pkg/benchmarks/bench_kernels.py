"""Time the compiled bitset kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--sizes 200 800] [--repeat 3] [--csv out.csv]

Inputs are random role sets shaped like mining candidates: sparse
permission and user bitsets drawn from a seeded generator.
"""
import argparse
import csv
import sys
import time

import numpy as np

from trbacminer import kernels


def random_bitsets(rng, n, universe, density):
    out = []
    for _ in range(n):
        k = max(1, rng.binomial(universe, density))
        out.append(sum(1 << int(i) for i in rng.choice(universe, size=k, replace=False)))
    return out


def best_time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 800])
    ap.add_argument("--universe", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv")
    args = ap.parse_args(argv)
    if kernels.native is None:
        print("compiled kernels unavailable; build with `pip install -e . --no-build-isolation`")
        return 1
    rows = []
    for n in args.sizes:
        rng = np.random.default_rng([args.seed, n])
        pbits = random_bitsets(rng, n, args.universe, 0.03)
        ubits = random_bitsets(rng, n, args.universe, 0.05)
        adj = kernels.fallback.subset_relation(pbits, ubits)
        cases = {
            "subset_relation": lambda m: m.subset_relation(pbits, ubits),
            "hasse_edges": lambda m: m.hasse_edges(n, adj),
            "overlap_pairs": lambda m: m.overlap_pairs(pbits),
        }
        for name, call in cases.items():
            t_py, r_py = best_time(lambda: call(kernels.fallback), args.repeat)
            t_c, r_c = best_time(lambda: call(kernels.native), args.repeat)
            if sorted(map(tuple, r_py) if name == "subset_relation" else r_py) != \
                    sorted(map(tuple, r_c) if name == "subset_relation" else r_c):
                print(f"MISMATCH in {name} at n={n}", file=sys.stderr)
                return 1
            rows.append({"kernel": name, "n": n, "python_s": t_py, "native_s": t_c,
                         "speedup": t_py / t_c if t_c else float("inf")})
    print(f"{'kernel':<16} {'n':>6} {'python s':>10} {'native s':>10} {'speedup':>8}")
    for r in rows:
        print(f"{r['kernel']:<16} {r['n']:>6} {r['python_s']:>10.4f} {r['native_s']:>10.4f} {r['speedup']:>8.1f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
