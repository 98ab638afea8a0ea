"""Time the numba and pure-numpy kernel backends on the same workloads.

    python benchmarks/bench_kernels.py [--n 500] [--repeat 20]

Each backend runs in its own interpreter because the backend is chosen at
import time from POTSEL_DISABLE_NUMBA.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from potsel import _kernels as k

n, repeat = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(1)
u = rng.random(n)
y = np.sort((u ** -0.5 - 1.0) / 0.5)
x = np.sort(np.concatenate([rng.lognormal(0.0, 1.0, n), 1.0 + y]))
thr = np.quantile(x, np.linspace(0.0, 0.98, 30))

def clock(fn):
    fn()  # warm-up / compile
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat

out = {
    "backend": k.BACKEND,
    "fit_profile": clock(lambda: k.fit_profile(y)),
    "fit_ad_candidates": clock(lambda: k.fit_ad_candidates(x, thr, 10)),
    "ad_statistic": clock(lambda: k.ad_statistic(np.sort(u))),
}
print(json.dumps(out))
"""


def run(disable: bool, n: int, repeat: int) -> dict:
    env = dict(os.environ, POTSEL_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run(
        [sys.executable, "-c", WORKER, str(n), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=20)
    a = ap.parse_args()
    fast = run(False, a.n, a.repeat)
    slow = run(True, a.n, a.repeat)
    print(f"{'kernel':<20}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for key in ("fit_profile", "fit_ad_candidates", "ad_statistic"):
        print(f"{key:<20}{fast[key] * 1e3:>10.3f}ms{slow[key] * 1e3:>10.3f}ms{slow[key] / fast[key]:>9.1f}x")


if __name__ == "__main__":
    main()
