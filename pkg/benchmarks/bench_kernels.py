"""Wall-clock comparison of the numba and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs once untimed (numba compilation, caches) and is then timed
``--repeat`` times; the best time is reported.  Full ``shoot`` solves are timed
with the result cache cleared.
"""

import argparse
import math
import time

import numpy as np

from nashlab import kernels, shooting
from nashlab.kernels import get_kernels


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    nodes = np.linspace(1e-4, 10.0, 20001)
    hs = np.linspace(1.2, 4.0, 8)
    x = np.linspace(0.01, 15.0, 20001)
    g0 = 1.0 / math.gamma(1.5)
    u = np.random.default_rng(0).random(4001)
    k = np.exp(-np.linspace(-5, 5, 2001) ** 2)

    def shoot_case(name):
        def run():
            shooting._shoot_cached.cache_clear()
            shooting.shoot(1.5, 2, backend=name)
        return run

    return {
        "el_shoot (8 centers, 20k nodes)": lambda K: (lambda: K.el_shoot(hs, 1.5, 2, nodes)),
        "el_path (20k nodes)": lambda K: (lambda: K.el_path(1.9, 1.5, 2, nodes)),
        "series_terms (20k points)": lambda K: (lambda: K.series_terms(0.5, -0.25 * x * x, x, 1, g0)),
        # the numba backend reuses np.convolve; this row times the jitted loop instead
        "convolve loop (4001 x 2001)": lambda K: (
            (lambda: kernels._convolve_numba(u, k)) if K.name == "numba"
            else (lambda: K.convolve_1d(u, k))),
        "shoot(p=1.5, d=2)": lambda K: shoot_case(K.name),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    names = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])
    print(f"{'kernel':34s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, make in cases().items():
        t = [best_of(make(get_kernels(n)), args.repeat) for n in names]
        row = f"{label:34s}" + "".join(f"{x * 1e3:10.2f}ms" for x in t)
        if len(t) == 2:
            row += f"{t[0] / t[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
