"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from zetasize import _kernels as K


def cases(rng):
    c = rng.normal(size=13) + 1j * rng.normal(size=13)
    z = rng.normal(size=200_000) + 1j * rng.normal(size=200_000)
    r = rng.normal(size=8) + 1j * rng.normal(size=8)
    pts = {(m, N): 0.4 * (rng.normal(size=(m, N)) + 1j * rng.normal(size=(m, N)))
           for m, N in ((1, 6), (100, 8), (2000, 3), (2000, 6), (2000, 10))}
    yield "horner deg 12, 2e5 points", lambda: K.horner_numpy(c, z), lambda: K.horner_numba(c, z)
    yield "abs_product 8 roots, 2e5 points", lambda: K.abs_product_numpy(z, r), lambda: K.abs_product_numba(z, r)
    for (m, N), P in pts.items():
        yield (f"scale_table {m} sets, N={N}", lambda P=P: K.scale_table_numpy(P),
               lambda P=P: K.scale_table_numba(P))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<36}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, f_np, f_nb in cases(rng):
        f_nb()  # compile
        t_np = min(timeit.repeat(f_np, number=10, repeat=args.repeat)) * 1e2
        t_nb = min(timeit.repeat(f_nb, number=10, repeat=args.repeat)) * 1e2
        print(f"{name:<36}{t_np:>12.3f}{t_nb:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
