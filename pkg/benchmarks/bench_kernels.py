"""Time the numba kernels against their numpy twins on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each kernel is called once untimed so numba compilation (or the on-disk
cache load) is excluded; outputs are compared before timing is reported.
"""
from __future__ import annotations

import argparse
import json
import time
from fractions import Fraction as F

import numpy as np

from dslab import kernels
from dslab.bclab import _fixed, _parse_mode, _point_rows
from dslab.dynsim import DynSystem, TargetSequence, _target_arrays
from dslab.numtheory import prime_factor_table
from dslab.unitcircle import _split_int
from dslab import rng


def cases():
    ptr, val = prime_factor_table(2000)
    yield "iq_counts q<=2000 B=7", "iq_counts", (2000, 3, 7, ptr, val)
    p5, v5 = prime_factor_table(500)
    yield "f_table q<=500 |h|<=50 B=6", "f_table", (500, 50, 1, 6, p5, v5)
    p6, v6 = prime_factor_table(60)
    yield "hc_sweep q,r<=60 B=4", "hc_sweep", (60, 1, 4, p6, v6)

    r = np.random.default_rng(0)
    n = 200_000
    den = r.integers(1000, 2**31, n)
    lo = r.integers(0, 2**31, n) % den
    hi = lo + den // r.integers(50, 5000, n)
    yield "arc_components 200k arcs", "arc_components", _split_int(lo, hi, den)

    Q = 20_000
    W1, W2 = _point_rows(1, 200, 256, 0)
    qs = np.arange(1, Q + 1)
    fx = [_fixed(F(1, 2 * q)) for q in range(1, Q + 1)]
    gi, glo, ghi = _fixed(F(1, 3))
    code, A, B, cr, ct, cs, cu = _parse_mode(("residue", 1, 3))
    pq, vq = prime_factor_table(Q)
    yield ("mc_hits Q=2e4 x 200 samples", "mc_hits",
           (W1, W2, qs, np.array([f[0] for f in fx]), np.array([f[1] for f in fx]), np.array([f[2] for f in fx]),
            gi, glo, ghi, code, A, B, cr, ct, cu, cs, pq, vq))

    N = 20_000
    t = TargetSequence.from_rule("1/(4n)", seed=3)
    W = rng.point_words(3, 100, (N + 64) // 64 + 2)
    yield "orbit_hits N=2e4 x 100 samples", "orbit_hits", (W, 1, *_target_arrays(t, N))


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def timed(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write the timings here")
    args = ap.parse_args()
    nb, npk = kernels.backend("numba"), kernels.backend("numpy")
    rows = []
    print(f"{'kernel':34s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}  equal")
    for label, name, kargs in cases():
        getattr(nb, name)(*kargs)  # compile / load cache
        t_nb, o_nb = timed(getattr(nb, name), kargs, args.repeat)
        t_np, o_np = timed(getattr(npk, name), kargs, max(1, args.repeat - 2))
        if name == "arc_components":
            eq = len(o_nb[0]) == len(o_np[0])  # tie-breaking may pick different indices
        else:
            eq = same(o_nb, o_np)
        rows.append({"kernel": label, "numba_s": t_nb, "numpy_s": t_np, "speedup": t_np / t_nb, "equal": bool(eq)})
        print(f"{label:34s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}  {eq}", flush=True)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
