"""Time the shooting kernel with and without numba.

Each mode runs in a fresh interpreter because the backend is chosen at
import time from ``STABILITY_LAB_NUMBA``.  Compilation (or cache loading)
is excluded by a warm-up call.

    python3 benchmarks/bench_shooting.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
from stability_lab._accel import NUMBA_ENABLED
from stability_lab.metric import WarpedMetric
from stability_lab.potential import Potential, StabilityParams
from stability_lab.spectral import estimate_a0, first_zero, lambda1

repeat = int(sys.argv[1])
hyp = WarpedMetric.hyperbolic(1.0)
first_zero(hyp, StabilityParams(0.3), 40.0)  # warm-up / JIT

def best(fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

out = {
    "numba": NUMBA_ENABLED,
    "first_zero": best(lambda: first_zero(hyp, StabilityParams(0.3), 40.0)),
    "lambda1": best(lambda: lambda1(hyp, StabilityParams(0.0, Potential.decay(1.0, 2.0)), 10.0)),
    "a0": best(lambda: estimate_a0(hyp, 40.0, 1e-3, compare=False)),
}
print(json.dumps(out))
"""


def run(flag, repeat):
    env = dict(os.environ, STABILITY_LAB_NUMBA=flag)
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    jit = run("1", args.repeat)
    pure = run("0", args.repeat)
    if not jit["numba"]:
        print("numba not available; both columns use the interpreted kernel")
    print(f"{'workload':<12}{'numba [s]':>12}{'pure [s]':>12}{'speed-up':>10}")
    for key in ("first_zero", "lambda1", "a0"):
        print(f"{key:<12}{jit[key]:>12.4f}{pure[key]:>12.4f}{pure[key] / jit[key]:>10.1f}")


if __name__ == "__main__":
    main()
