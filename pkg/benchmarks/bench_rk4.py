"""Time the compiled RK4 covariance kernel against the numpy fallback.

Run with ``python3 benchmarks/bench_rk4.py [--steps N] [--repeat R]``.
"""
import argparse
import timeit

import numpy as np

from optoent import build_model
from optoent._kernels import _rk4_py
from optoent.sweep import FIGURE_BASE

try:
    from optoent._kernels import _rk4 as _rk4_c
except ImportError:
    _rk4_c = None


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    model = build_model(FIGURE_BASE.replace(g2=1.9))
    a, d = np.array(model.drift), np.array(model.diffusion)
    v0 = 0.5 * np.eye(8)
    dt = 1e-3

    kernels = {"python": _rk4_py.rk4_covariance}
    if _rk4_c is not None:
        kernels["cython"] = _rk4_c.rk4_covariance
    else:
        print("compiled kernel not built; timing the fallback only")

    results = {}
    for name, fn in kernels.items():
        best = min(timeit.repeat(lambda: fn(a, d, v0, dt, args.steps),
                                 number=1, repeat=args.repeat))
        results[name] = (best, fn(a, d, v0, dt, args.steps))
        print(f"{name:>7}: {best * 1e3:9.2f} ms for {args.steps} steps "
              f"({best / args.steps * 1e6:.2f} us/step)")

    if len(results) == 2:
        (tp, vp), (tc, vc) = results["python"], results["cython"]
        diff = np.max(np.abs(vp - vc)) / np.max(np.abs(vp))
        print(f"speedup: {tp / tc:.1f}x, max relative difference {diff:.2g}")


if __name__ == "__main__":
    main()
