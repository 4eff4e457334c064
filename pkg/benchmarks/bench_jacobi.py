"""Compare the compiled and pure-Python Jacobi kernels (and LAPACK for scale).

Usage::

    python benchmarks/bench_jacobi.py                # kernel timings + campaign throughput
    python benchmarks/bench_jacobi.py --sizes 4 16 --repeat 50

The campaign part runs ``thm-power`` in a fresh interpreter per backend,
because the backend is chosen once at import time.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from opbell import _jacobi_py

try:
    from opbell._jacobi import jacobi_eigh as compiled_eigh
except ImportError:
    compiled_eigh = None

CAMPAIGN_SNIPPET = """
import time
from opbell import _backend
from opbell.harness import CampaignConfig, run_campaign
cfg = CampaignConfig("thm-power", trials={trials}, n=4, r="-3,-2,2.5,3,4", seed=1)
run_campaign(CampaignConfig("thm-power", trials=5, n=4, seed=1))  # warm caches
t = time.perf_counter()
run_campaign(cfg)
print(_backend.BACKEND, time.perf_counter() - t)
"""


def random_symmetric(n, rng):
    z = rng.standard_normal((n, n))
    return np.ascontiguousarray(z + z.T)


def time_kernel(fn, mats, repeat):
    def run():
        for a in mats:
            fn(a)
    return min(timeit.repeat(run, number=1, repeat=repeat)) / len(mats)


def kernel_table(sizes, count, repeat):
    rng = np.random.default_rng(0)
    print(f"{'n':>3} {'cython us':>11} {'python us':>11} {'lapack us':>11} {'py/cy':>7}")
    for n in sizes:
        mats = [random_symmetric(n, rng) for _ in range(count)]
        py = time_kernel(_jacobi_py.jacobi_eigh, mats, max(1, repeat // 10))
        lap = time_kernel(np.linalg.eigh, mats, repeat)
        cy = time_kernel(compiled_eigh, mats, repeat) if compiled_eigh else float("nan")
        print(f"{n:>3} {cy * 1e6:>11.2f} {py * 1e6:>11.2f} {lap * 1e6:>11.2f} {py / cy:>7.1f}")


def campaign_table(trials):
    print(f"\nthm-power campaign, {trials} trials at n=4")
    for pure in ("0", "1"):
        env = dict(os.environ, OPBELL_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", CAMPAIGN_SNIPPET.format(trials=trials)],
                             env=env, capture_output=True, text=True, check=True).stdout.split()
        backend, seconds = out[0], float(out[1])
        print(f"  {backend:<7} {seconds:7.2f} s  ({trials / seconds:8.0f} trials/s)")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8, 16])
    parser.add_argument("--count", type=int, default=200, help="matrices per size")
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--trials", type=int, default=1000, help="campaign trials per backend")
    parser.add_argument("--skip-campaign", action="store_true")
    args = parser.parse_args(argv)
    if compiled_eigh is None:
        print("compiled kernel not built; only the pure-Python column is meaningful")
    kernel_table(args.sizes, args.count, args.repeat)
    if not args.skip_campaign:
        campaign_table(args.trials)


if __name__ == "__main__":
    main()
