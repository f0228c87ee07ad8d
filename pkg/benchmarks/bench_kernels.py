"""Time the pairwise phase kernel's numba and numpy implementations.

The kernel behind the free-resolvent quadratic forms evaluates
S(k) = sum_{i,j} f_i f_j exp(i k |x_i - x_j|) without materializing the
N x N matrix. This script times the active backend against the chunked
numpy fallback on growing node counts and checks that the two agree.

Run from the repository root::

    python3 benchmarks/bench_kernels.py
    TWISTRES_NUMBA=0 python3 benchmarks/bench_kernels.py   # numpy only
"""

import argparse
import time

import numpy as np

from twistres._accel import backend, phase_pairwise, phase_pairwise_numpy


def _sample(n, rng):
    x = np.sort(rng.uniform(-40.0, 40.0, n))
    f = rng.normal(size=n) * np.exp(-np.abs(x) / 15.0)
    return x, f.astype(complex)


def _time(fn, *args, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        val = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, val


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="benchmark the pairwise phase kernel backends")
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[2000, 8000, 20000],
                        help="node counts to time")
    parser.add_argument("--repeat", type=int, default=3,
                        help="repetitions per timing, best is kept")
    args = parser.parse_args(argv)

    rng = np.random.default_rng(11)
    k = 1.2 + 0.35j
    active = backend()
    print(f"active backend: {active}")

    if active == "numba":
        # trigger compilation outside the timed region
        xw, fw = _sample(64, rng)
        phase_pairwise(xw, fw, k)

    header = f"{'N':>8} {'numpy [s]':>12}"
    if active == "numba":
        header += f" {'numba [s]':>12} {'speedup':>9} {'rel diff':>10}"
    print(header)

    for n in args.sizes:
        x, f = _sample(n, rng)
        t_np, v_np = _time(phase_pairwise_numpy, x, f, k, repeat=args.repeat)
        line = f"{n:>8} {t_np:>12.4f}"
        if active == "numba":
            t_nb, v_nb = _time(phase_pairwise, x, f, k, repeat=args.repeat)
            rel = abs(v_nb - v_np) / max(abs(v_np), 1e-300)
            line += f" {t_nb:>12.4f} {t_np / t_nb:>8.1f}x {rel:>10.2e}"
            if rel > 1e-10:
                raise SystemExit(f"backends disagree at N={n}: {rel:.3e}")
        print(line)


if __name__ == "__main__":
    main()
