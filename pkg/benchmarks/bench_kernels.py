"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--points 2000] [--repeat 5]

Times the finite-difference profile over a figure-sized grid, the batched
state evaluation and the Jacobi eigensolver, and checks both backends agree.
"""
import argparse
import sys
import timeit

import numpy as np

from threelevel import _pykernels

try:
    from threelevel import _ckernels
except ImportError:
    sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")

ARGS = (1.0, 0.3, 0.04, 0.7, 1.1)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    t = np.linspace(0.0, 50.0, args.points)
    rng = np.random.default_rng(0)
    mats = []
    for _ in range(200):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        mats.append(a + a.conj().T)

    cases = [
        (f"numeric_profile, exact, {args.points} pts",
         lambda m: m.numeric_profile(*ARGS, t, m.STATE_EXACT, 1e-6)),
        (f"numeric_profile, large detuning, {args.points} pts",
         lambda m: m.numeric_profile(*ARGS, t, m.STATE_LARGE_DETUNING, 1e-6)),
        (f"state_grid, exact, {args.points} pts",
         lambda m: m.state_grid(*ARGS, t, m.STATE_EXACT)),
        ("jacobi_eigh3 x 200", lambda m: [m.jacobi_eigh3(h) for h in mats]),
    ]

    print(f"{'kernel':<42}{'python [ms]':>13}{'cython [ms]':>13}{'speedup':>10}")
    for name, fn in cases:
        py = best(lambda: fn(_pykernels), args.repeat)
        cy = best(lambda: fn(_ckernels), args.repeat)
        print(f"{name:<42}{py * 1e3:>13.2f}{cy * 1e3:>13.2f}{py / cy:>9.1f}x")

    a = np.asarray(_pykernels.numeric_profile(*ARGS, t, 0, 1e-6))
    b = np.asarray(_ckernels.numeric_profile(*ARGS, t, 0, 1e-6))
    print(f"max |python - cython| over the exact-state profile: {np.max(np.abs(a - b)):.2e}")


if __name__ == "__main__":
    main()
