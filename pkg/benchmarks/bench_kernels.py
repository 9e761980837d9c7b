"""Compare the compiled stepping kernel with its pure-Python twin.

    python benchmarks/bench_kernels.py [--steps N] [--repeat R]

Both backends iterate the same orbits; the script checks that the final
points agree and reports microseconds per Poncelet step.
"""

import argparse
import math
import time

from poncelet import _kernel_py
from poncelet.ovals import Conic, Superellipse

try:
    from poncelet import _kernel as _kernel_c
except ImportError:
    _kernel_c = None

CASES = {
    "quartic k=20.2": (Superellipse(4.0, 1.0), 4.0, 20.2),
    "circle in x^4+y^4=2": (Superellipse(2.0, 1.0), 4.0, 2.0),
    "ellipse in unit circle": (Conic.from_axes(0.55, 0.3, 0.1, -0.05, 0.6), 2.0, 1.0),
}


def run(mod, inner, q, k, steps):
    x, y = math.cos(0.3), math.sin(0.3)
    s = (k / (abs(x) ** q + abs(y) ** q)) ** (1.0 / q)
    t0 = time.perf_counter()
    out = mod.lift_map(*inner.kernel_params(), q, k, x * s, y * s, steps, True)
    return time.perf_counter() - t0, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if _kernel_c is None:
        print("compiled kernel not built; only the Python backend is timed")
    print(f"{'case':<26}{'python us/step':>16}{'cython us/step':>16}{'speedup':>10}{'max diff':>12}")
    for name, (inner, q, k) in CASES.items():
        py_steps = max(1, args.steps // 10)
        t_py = min(run(_kernel_py, inner, q, k, py_steps)[0] for _ in range(args.repeat))
        us_py = 1e6 * t_py / py_steps
        if _kernel_c is None:
            print(f"{name:<26}{us_py:>16.3f}{'-':>16}{'-':>10}{'-':>12}")
            continue
        t_c = min(run(_kernel_c, inner, q, k, args.steps)[0] for _ in range(args.repeat))
        us_c = 1e6 * t_c / args.steps
        _, a = run(_kernel_py, inner, q, k, py_steps)
        _, b = run(_kernel_c, inner, q, k, py_steps)
        diff = max(abs(u - v) for u, v in zip(a, b))
        print(f"{name:<26}{us_py:>16.3f}{us_c:>16.3f}{us_py / us_c:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
