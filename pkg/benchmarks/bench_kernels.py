"""Time the compiled kernels against the numpy fallback on one trial batch.

    python benchmarks/bench_kernels.py [--trials 2048] [--pilots 100] [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from risauth import _kernels_py
from risauth.circuit import CircuitParams
from risauth.kernels import circuit_args, load_backend


def make_batch(trials: int, pilots: int, seed: int = 0):
    rng = np.random.default_rng(seed)

    def cn(*shape, scale=1e-4):
        return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    return cn(trials, 2, scale=3e-4), cn(trials, pilots, 2, 2), cn(trials, 2, 2)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2048)
    ap.add_argument("--pilots", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    amps, pilots, noise = make_batch(args.trials, args.pilots)
    cargs = circuit_args(CircuitParams())
    backends = {"python": _kernels_py}
    try:
        backends["cython"] = load_backend("cython")
    except ImportError:
        print("compiled kernels unavailable; timing the numpy fallback only")

    ref = None
    for name, mod in backends.items():
        mean, std = mod.pilot_stats(amps, pilots, *cargs)
        scores = mod.profile_scores(amps, noise, mean, std, *cargs, 1e-9)[0]
        if ref is None:
            ref = scores
        else:
            print(f"max |score difference| vs python: {np.max(np.abs(scores - ref)):.3e}")

        def run():
            m, s = mod.pilot_stats(amps, pilots, *cargs)
            mod.profile_scores(amps, noise, m, s, *cargs, 1e-9)

        best = min(timeit.repeat(run, number=1, repeat=args.repeat))
        rate = args.trials / best
        print(f"{name:>7}: {best * 1e3:8.2f} ms per batch of {args.trials} trials x {args.pilots} pilots "
              f"({rate:,.0f} trials/s)")


if __name__ == "__main__":
    main()
