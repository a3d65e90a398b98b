#!/usr/bin/env python3
"""Benchmark the compiled stepping kernel against the interpreted fallback.

Each backend runs in its own subprocess (the choice is fixed at import time via
SITDDE_BACKEND). Workloads are timed after one warm-up pass, so numba's one-off
compilation cost is reported separately, and the trajectory of the first
workload is saved per backend to verify the two paths agree bit-for-bit.

Usage: python benchmarks/bench_integrate.py [--repeats N] [--skip-fallback-scan]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import tempfile

_WORKER = r"""
import json, os, sys, time
import numpy as np
import sitdde as sd
from sitdde import ModelParams, ScanConfig, State

repeats = int(sys.argv[1])
outdir = sys.argv[2]
run_scan = sys.argv[3] == "1"

p_stiff = ModelParams(a=18, b=35, c=0.19, r=0.99, xi1=0.02, xi2=1.5, xi3=0.1, tau=0.7)
p_soft = ModelParams(a=5, b=18, c=0.05, r=1, xi1=0.5, xi2=0.2, xi3=0.3, tau=0.35)

def timed(fn):
    fn()  # warm-up (includes JIT compilation on the compiled backend)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best

results = {"backend": sd.backend_name()}

t0 = time.perf_counter()
traj = sd.integrate(p_stiff, State(18.001, 0.007, 0.005), 200.0)
results["first_call_s"] = time.perf_counter() - t0
results["stiff_steps"] = len(traj) - 1
np.save(os.path.join(outdir, f"traj_{sd.backend_name()}.npy"), traj.ys)

results["stiff_200d_s"] = timed(lambda: sd.integrate(p_stiff, State(18.001, 0.007, 0.005), 200.0))
results["soft_500d_s"] = timed(lambda: sd.integrate(p_soft, State(0.8, 0.7, 0.6), 500.0))

if run_scan:
    cfg = ScanConfig(vary="tau", lo=0.1, hi=0.9, n_points=12,
                     history=State(0.8, 0.7, 0.6), t_transient=150.0, t_sample=100.0)
    results["scan_12pt_s"] = timed(lambda: sd.scan(p_soft, cfg))

print(json.dumps(results))
"""


def run_backend(backend: str, repeats: int, outdir: str, run_scan: bool) -> dict:
    env = dict(os.environ, SITDDE_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", _WORKER, str(repeats), outdir, "1" if run_scan else "0"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--skip-fallback-scan", action="store_true",
                    help="the interpreted 12-point scan takes a while; skip it")
    args = ap.parse_args()

    import numpy as np

    with tempfile.TemporaryDirectory() as outdir:
        rows = []
        for backend in ("numba", "numpy"):
            run_scan = backend == "numba" or not args.skip_fallback_scan
            rows.append(run_backend(backend, args.repeats, outdir, run_scan))
        ys = [np.load(os.path.join(outdir, f"traj_{r['backend']}.npy")) for r in rows]

    keys = ["first_call_s", "stiff_200d_s", "soft_500d_s", "scan_12pt_s"]
    header = f"{'workload':<22}" + "".join(f"{r['backend']:>12}" for r in rows) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for key in keys:
        vals = [r.get(key) for r in rows]
        cells = "".join(f"{v:12.4f}" if v is not None else f"{'-':>12}" for v in vals)
        if vals[0] and vals[1]:
            cells += f"{vals[1] / vals[0]:9.1f}x"
        print(f"{key:<22}{cells}")
    same = np.array_equal(ys[0], ys[1])
    print(f"\ntrajectories bit-identical across backends: {same}")
    print(f"max abs deviation: {np.abs(ys[0] - ys[1]).max():.3e}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
