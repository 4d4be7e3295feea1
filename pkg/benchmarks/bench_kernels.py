"""Compare the compiled and the plain numpy paths of the hot kernels.

Run as ``python benchmarks/bench_kernels.py``.  The numpy baseline for LLL
and enumeration runs the same source in a subprocess with
``QUADAPPROX_DISABLE_NUMBA=1``; the shell search has a separate vectorised
numpy implementation that is timed in-process.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time

import numpy as np

from quadapprox import _kernels

LORENTZ4 = np.diag([1, 1, 1, -1]).astype(np.int64)
QUAD = np.array([[2, 1, 0, 0], [1, 3, 0, 1], [0, 0, 1, 0], [0, 1, 0, -5]], dtype=np.int64)


def _time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def shell_bench():
    rows = []
    for name, Q in (("lorentz4", LORENTZ4), ("quaternary", QUAD)):
        for H in (4, 8, 12):
            if _kernels.USE_NUMBA:
                _kernels.shell_zeros(Q, 1, use_numba=True)
                t_jit = _time(lambda: _kernels.shell_zeros(Q, H, use_numba=True))
            else:
                t_jit = float("nan")
            t_np = _time(lambda: _kernels.shell_zeros(Q, H, use_numba=False))
            rows.append((f"shell {name} H={H}", t_jit, t_np))
    return rows


def lattice_workload():
    rng = np.random.default_rng(0)
    out = {}
    B = rng.normal(size=(5, 5)) @ np.diag([1, 2, 4, 8, 16])
    _kernels.lll_reduce(B)
    _kernels.fincke_pohst(B, 1.0, 10)
    t0 = time.perf_counter()
    for _ in range(200):
        _kernels.lll_reduce(rng.normal(size=(5, 5)) * 10)
    out["lll x200"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    R = np.linalg.qr(B)[1]
    for _ in range(20):
        _kernels.fincke_pohst(R, 1500.0, 200_000)
    out["fincke-pohst x20"] = time.perf_counter() - t0
    return out


def main():
    if os.environ.get("_QUADAPPROX_BENCH_CHILD"):
        print(json.dumps(lattice_workload()))
        return
    print(f"numba available: {_kernels.NUMBA_AVAILABLE}, in use: {_kernels.USE_NUMBA}")
    print(f"{'kernel':32s} {'numba [s]':>12s} {'numpy [s]':>12s} {'speedup':>9s}")
    for name, t_jit, t_np in shell_bench():
        print(f"{name:32s} {t_jit:12.4f} {t_np:12.4f} {t_np / t_jit:9.1f}")
    jit = lattice_workload()
    env = dict(os.environ, QUADAPPROX_DISABLE_NUMBA="1", _QUADAPPROX_BENCH_CHILD="1")
    res = subprocess.run([sys.executable, __file__], env=env, capture_output=True, text=True, check=True)
    plain = json.loads(res.stdout.strip().splitlines()[-1])
    for name in jit:
        print(f"{name:32s} {jit[name]:12.4f} {plain[name]:12.4f} {plain[name] / jit[name]:9.1f}")


if __name__ == "__main__":
    main()
