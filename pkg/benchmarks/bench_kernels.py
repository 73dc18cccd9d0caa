"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--length 2000] [--repeat 3]

Numba compile time is excluded by a warm-up call.
"""

import argparse
import time

import numpy as np

from holdex import _kernels
from holdex.mhe import MpheConfig
from holdex.seminorm import BetaGrid


def _best(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()

    rng = np.random.default_rng(a.seed)
    x = 100 + np.cumsum(rng.normal(size=a.length))
    t = np.arange(1, a.length + 1) * 1e-3
    betas = BetaGrid().betas
    cfg = MpheConfig()
    lo, first = cfg.offsets()
    centers = np.arange(first, a.length - cfg.window_w + 1 - lo, dtype=np.int64)
    ref = cfg.reference
    w = slice(0, 50)

    cases = {
        "curve (50 points)": lambda k: k["curve"](x[w], t[w], betas),
        f"mphe ({a.length} points)": lambda k: k["mphe"](
            x, t, centers, lo, cfg.window_w, betas, ref.alpha_ref, ref.block_size, ref.n_blocks, 1.0),
        f"ema ({a.length} points)": lambda k: k["ema"](x, 0.3),
    }
    print(f"{'kernel':<24}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, call in cases.items():
        nb = _best(lambda: call(_kernels.NUMBA_KERNELS), a.repeat)
        npy = _best(lambda: call(_kernels.NUMPY_KERNELS), a.repeat)
        print(f"{name:<24}{nb:>12.5f}{npy:>12.5f}{npy / nb:>9.1f}x")


if __name__ == "__main__":
    main()
