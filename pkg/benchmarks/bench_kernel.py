"""Compare the compiled and pure-Python key-rate kernels.

Run with ``python3 benchmarks/bench_kernel.py``.  Prints the per-evaluation
cost of each backend and the wall time of one full optimization with each.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from rfiqkd import kernel
from rfiqkd.optimizer import Scenario
from rfiqkd.params import ProtocolParams

OPTIMIZE_SNIPPET = """
import time
from rfiqkd.optimizer import OptimizerConfig, Scenario, optimize
t = time.perf_counter()
optimize(Scenario().at(distance={distance}), OptimizerConfig(n_starts={starts}))
print(time.perf_counter() - t)
"""


def per_call(fn, x, scen, mode, out, number):
    return min(timeit.repeat(lambda: fn(x, scen, mode, out), number=number, repeat=5)) / number


def optimize_time(backend, distance, starts):
    env = dict(os.environ, RFIQKD_KERNEL=backend)
    code = OPTIMIZE_SNIPPET.format(distance=distance, starts=starts)
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(res.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--number", type=int, default=2000)
    ap.add_argument("--distance", type=float, default=50.0)
    ap.add_argument("--starts", type=int, default=8)
    args = ap.parse_args()

    scenario = Scenario().at(distance=args.distance)
    x = ProtocolParams.unbiased().as_array()
    scen, mode = scenario.kernel_args()
    found = kernel.backends()

    timings = {}
    for name, fn in found.items():
        out = kernel.new_out()
        timings[name] = per_call(fn, x, scen, mode, out, args.number)
        print(f"{name:>9s}: {timings[name] * 1e6:9.2f} us / evaluation")
    if "compiled" in timings:
        print(f"  speedup: {timings['python'] / timings['compiled']:9.1f}x")

    for name in found:
        secs = optimize_time(name, args.distance, args.starts)
        print(f"{name:>9s}: {secs:9.3f} s / optimize ({args.starts} starts, {args.distance:g} km)")


if __name__ == "__main__":
    main()
