"""Time each kernel's numba and numpy implementations on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

The numba column is skipped when numba is missing or BSVSIM_DISABLE_NUMBA is set.
"""
import argparse
import time

import numpy as np

from bsvsim import kernels
from bsvsim.fock import BeamSplitterSpec, photon_number_unitary


def _cases():
    t = BeamSplitterSpec(0.35, 0.2, 0.9).transfer_matrix()
    level = photon_number_unitary(299, BeamSplitterSpec(0.35, 0.2, 0.9))
    coeffs = (complex(t[0, 0]), complex(t[1, 0]), complex(t[0, 1]), complex(t[1, 1]))
    rng = np.random.default_rng(0)
    a, b = rng.random((120, 120)), rng.random((120, 120))
    return {
        "bs_probabilities": ((500, 0.35), "n=500"),
        "next_level": ((level,) + coeffs, "300x300 -> 301x301"),
        "binomial_rows": ((np.arange(400, dtype=np.int64), 0.3, 399), "400 rows"),
        "convolve2d": ((a, b), "120x120 * 120x120"),
    }


def best_time(func, args, repeat):
    func(*args)  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    print(f"numba available: {kernels.NUMBA_AVAILABLE}")
    print(f"{'kernel':18s} {'case':22s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, (call_args, label) in _cases().items():
        fast, slow = kernels.IMPLEMENTATIONS[name]
        t_slow = best_time(slow, call_args, args.repeat)
        if kernels.NUMBA_AVAILABLE:
            t_fast = best_time(fast, call_args, args.repeat)
            np.testing.assert_allclose(fast(*call_args), slow(*call_args), rtol=1e-9, atol=1e-13)
            print(f"{name:18s} {label:22s} {1e3 * t_fast:11.3f} {1e3 * t_slow:11.3f} {t_slow / t_fast:7.1f}x")
        else:
            print(f"{name:18s} {label:22s} {'-':>11s} {1e3 * t_slow:11.3f} {'-':>8s}")


if __name__ == "__main__":
    main()
