"""Time the pure-Python and compiled kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each kernel is checked for agreement between backends before it is timed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import timeit

import numpy as np

from superkvn import kernels


def _supernumber(rng, gens, terms):
    return {rng.randrange(1 << gens): rng.randint(-9, 9) or 1 for _ in range(terms)}


def cases(seed=0):
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    a = _supernumber(rng, 12, 200)
    b = _supernumber(rng, 12, 200)
    grid = nrng.standard_normal((256, 256))
    xi = nrng.uniform(-2, 257, (256, 256))
    yi = nrng.uniform(-2, 257, (256, 256))
    n = 4095
    diag = np.full(n, 2.0 - 1e-6)
    off = np.full(n - 1, -1.0)
    rhs = nrng.standard_normal(n)
    return {
        "graded_mul": lambda k: k.graded_mul(a, b),
        "cubic_interp2d": lambda k: k.cubic_interp2d(grid, xi, yi),
        "gelfand_yaglom": lambda k: k.gelfand_yaglom(diag, off),
        "tridiag_solve": lambda k: k.tridiag_solve(diag, off, rhs),
    }


def _same(x, y):
    if isinstance(x, dict):
        return x == y
    return np.allclose(x, y, rtol=1e-12, atol=1e-12)


def run(repeat=5, number=3):
    impls = kernels.backends()
    rows = []
    for name, call in cases().items():
        outs = {b: call(m) for b, m in impls.items()}
        ref = outs["python"]
        agree = all(_same(ref, o) for o in outs.values())
        row = {"kernel": name, "agree": agree}
        for b, m in impls.items():
            t = min(timeit.repeat(lambda: call(m), repeat=repeat, number=number)) / number
            row[b] = t
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=3)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    if not kernels.compiled_available():
        print("compiled extension not built; timing the Python backend only", file=sys.stderr)
    rows = run(args.repeat, args.number)
    print(f"{'kernel':<16}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}  agree")
    for r in rows:
        cy = f"{1e3 * r['cython']:14.3f}" if "cython" in r else f"{'-':>14}"
        sp = f"{r['speedup']:10.1f}" if "speedup" in r else f"{'-':>10}"
        print(f"{r['kernel']:<16}{1e3 * r['python']:14.3f}{cy}{sp}  {r['agree']}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
    return 0 if all(r["agree"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
