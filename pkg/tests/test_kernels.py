import itertools
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from quadapprox import _kernels


def _brute_shell(Q, H):
    m = len(Q)
    out = set()
    for x in itertools.product(range(-H, H + 1), repeat=m):
        if max(abs(v) for v in x) == H and x @ Q @ np.array(x) == 0:
            # one representative per sign pair
            y = tuple(x) if next(v for v in x if v) > 0 else tuple(-v for v in x)
            out.add(y)
    return out


@pytest.mark.parametrize("Q", [np.diag([1, 1, -1]), np.array([[1, 2, 0], [2, -3, 1], [0, 1, -2]]),
                               np.diag([1, 1, 1, -1])])
def test_shell_paths_agree_with_brute_force(Q):
    Q = Q.astype(np.int64)
    for H in range(1, 6):
        oracle = _brute_shell(Q, H)
        zs, total, evals = _kernels.shell_zeros(Q, H, use_numba=False)
        got = {tuple(int(v) for v in z) for z in zs}
        got = {z if next(v for v in z if v) > 0 else tuple(-v for v in z) for z in got}
        assert got == oracle and total == len(oracle)
        assert evals == _kernels.shell_size(len(Q), H)
        if _kernels.USE_NUMBA:
            zs2, total2, _ = _kernels.shell_zeros(Q, H, use_numba=True)
            got2 = {tuple(int(v) for v in z) for z in zs2}
            got2 = {z if next(v for v in z if v) > 0 else tuple(-v for v in z) for z in got2}
            assert got2 == oracle and total2 == total


def test_shell_overflow_guard():
    with pytest.raises(OverflowError):
        _kernels.shell_zeros(np.diag([2 ** 40, 1, -1]), 2 ** 12)


def test_lll_is_unimodular_and_shortens():
    rng = np.random.default_rng(0)
    for _ in range(20):
        d = int(rng.integers(2, 5))
        B = rng.normal(size=(d, d)) * 10
        U0 = np.eye(d, dtype=np.int64)
        for _ in range(8):
            i, j = rng.choice(d, 2, replace=False)
            U0[:, i] += int(rng.integers(-3, 4)) * U0[:, j]
        Bs = B @ U0
        U = _kernels.lll_reduce(Bs)
        assert abs(round(np.linalg.det(U))) == 1
        R = Bs @ U
        assert np.linalg.norm(R, axis=0).min() <= np.linalg.norm(Bs, axis=0).min() + 1e-9


def test_fincke_pohst_matches_box():
    B = np.array([[2.0, 0.5, 0.0], [0.0, 1.5, 0.3], [0.0, 0.0, 1.0]])
    pts, total = _kernels.fincke_pohst(B, 9.0, 10_000)
    got = {tuple(int(v) for v in p) for p in pts}
    oracle = {c for c in itertools.product(range(-8, 9), repeat=3)
              if any(c) and np.sum((B @ np.array(c)) ** 2) <= 9.0}
    assert got == oracle and total == len(oracle)
    with pytest.raises(FloatingPointError):
        _kernels.fincke_pohst(np.zeros((2, 2)), 1.0, 10)


SNIPPET = """
import json, numpy as np
from quadapprox import _kernels
B = np.array([[3.0, 1.0, 0.2], [0.0, 2.0, 0.7], [0.0, 0.0, 0.5]])
U = _kernels.lll_reduce(B)
pts, total = _kernels.fincke_pohst(B, 4.0, 1000)
zs, t, _ = _kernels.shell_zeros(np.diag([1, 1, -1]).astype(np.int64), 5)
print(json.dumps({"numba": _kernels.USE_NUMBA, "U": U.tolist(),
                  "pts": sorted(map(tuple, pts.tolist())), "zeros": sorted(map(tuple, zs.tolist()))}))
"""


def _run(env_flag: bool) -> dict:
    env = dict(os.environ)
    env.pop("QUADAPPROX_DISABLE_NUMBA", None)
    if env_flag:
        env["QUADAPPROX_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_fallback_flag_gives_same_results():
    plain = _run(True)
    assert plain["numba"] is False
    compiled = _run(False)
    assert {k: v for k, v in plain.items() if k != "numba"} == {k: v for k, v in compiled.items() if k != "numba"}
