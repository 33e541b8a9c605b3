"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

Kernel timings call both implementations directly on the same inputs.  With
``--end-to-end`` a block-vector classification is also run in a fresh
process per backend, selected through ``CHAOSCOPE_BACKEND``.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from chaoscope import _kernels as K

E2E = ("import time; from chaoscope import *; from chaoscope.criteria import block_vector; "
       "T = parse_operator('2B'); x = block_vector(2.0); classify_point(T, x, cfg=ClassifierConfig(N=256)); "
       "t = time.perf_counter(); classify_point(T, x, cfg=ClassifierConfig(N=1 << 14)); "
       "print(time.perf_counter() - t)")


def shift_case(L=20000, S=40, seed=0):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.5, 2.0, L + 1)
    lam = np.concatenate([[0.0, 0.0], np.cumsum(np.log2(w[1:-1]))])
    zc = np.zeros(L + 1, dtype=np.int64)
    idx = np.sort(rng.choice(np.arange(1, L + 1), S, replace=False)).astype(np.int64)
    la = rng.normal(0.0, 4.0, S)
    coef = rng.uniform(0.5, 1.0, S)
    ex = np.zeros(S, dtype=np.int64)
    return idx, la, lam, zc, w, coef, ex


def cases():
    idx, la, lam, zc, w, coef, ex = shift_case()
    n = 1 << 14
    s = np.random.default_rng(1).exponential(1.0, 1 << 18)
    return {
        "shift_norm_log": (idx, la, lam, zc, n, 2.0),
        "shift_window_log": (idx, la, lam, zc, 4096, 64),
        "shift_iterate": (idx, coef, ex, w, 4096),
        "diag_norm_log": (la, np.full(la.size, 0.01), np.zeros(la.size, dtype=bool), n, 2.0),
        "diag_iterate": (coef, ex, np.full(coef.size, 1.01), 4096),
        "cesaro": (s,),
    }


def best(fn, args, repeat):
    fn(*args)  # compile or warm caches
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)

    print(f"{'kernel':<18}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, a in cases().items():
        tn = best(K.NUMBA_KERNELS[name], a, args.repeat)
        tp = best(K.NUMPY_KERNELS[name], a, args.repeat)
        print(f"{name:<18}{tn * 1e3:>12.2f}{tp * 1e3:>12.2f}{tp / tn:>10.1f}")

    if args.end_to_end:
        for backend in ("numba", "numpy"):
            env = dict(os.environ, CHAOSCOPE_BACKEND=backend)
            out = subprocess.run([sys.executable, "-c", E2E], env=env, check=True,
                                 capture_output=True, text=True).stdout.strip()
            print(f"classify block vector, N=2^14, {backend}: {float(out):.2f} s")


if __name__ == "__main__":
    main()
