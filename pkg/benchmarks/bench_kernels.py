"""Compare the compiled and NumPy kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-``repeat`` wall times per kernel and backend, plus the
maximum deviation between backends on the same inputs.
"""
import argparse
import timeit

import numpy as np

from orbiquant.kernels import available_backends
from orbiquant.trigpoly import TrigPoly


def cases(rng):
    sym_p = TrigPoly.random(rng, 4, 2).coeffs
    sym_m = TrigPoly.random(rng, 4, 2).coeffs
    speed = TrigPoly.random(rng, 2, 1, real=True).coeffs[:, 0, 0] * 0.1
    speed[2] += 1.0
    sub = TrigPoly.random(rng, 2, 2, hermitian=True).coeffs
    theta = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    return {
        "assemble_quantized N=256 d=2": lambda k: k.assemble_quantized(sym_p, sym_m, 256, 0),
        "transport_rk4 256 pts x 1000 steps d=2":
            lambda k: k.transport_rk4(speed, speed, sub, sub, theta, 1, 1.0, 1000),
    }


def _as_tuple(r):
    return r if isinstance(r, tuple) else (r,)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the NumPy backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':42s} {'backend':8s} {'best [s]':>10s} {'speedup':>8s}")
    for name, fn in cases(rng).items():
        times, results = {}, {}
        for bname, mod in backends.items():
            results[bname] = fn(mod)
            times[bname] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        for bname, t in times.items():
            print(f"{name:42s} {bname:8s} {t:10.4f} {times['python'] / t:8.1f}")
        if len(results) == 2:
            pairs = zip(_as_tuple(results["python"]), _as_tuple(results["cython"]))
            dev = max(float(np.max(np.abs(a - b))) for a, b in pairs)
            print(f"{'':42s} max backend deviation {dev:.2e}")


if __name__ == "__main__":
    main()
