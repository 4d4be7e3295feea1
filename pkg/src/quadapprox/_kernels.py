"""Hot loops: LLL, Fincke-Pohst enumeration and shell zero search.

Each kernel is written once as plain Python over numpy arrays.  When numba is
importable and ``QUADAPPROX_DISABLE_NUMBA`` is unset the loops are compiled
with ``@njit``; otherwise the interpreted source runs as is, and the shell
search uses a vectorised numpy path instead of the scalar loop.
"""

from __future__ import annotations

import math
import os

import numpy as np

_DISABLE = os.environ.get("QUADAPPROX_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:  # pragma: no cover - exercised implicitly
    if _DISABLE:
        raise ImportError
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = NUMBA_AVAILABLE and not _DISABLE

# int64 headroom for |Q(x)| <= sum|Q_ij| * H^2
INT64_SAFE = 2 ** 62


# --- LLL ----------------------------------------------------------------------

def _gram_schmidt(B, Bs, mu, bnorm):
    d = B.shape[1]
    for i in range(d):
        for r in range(B.shape[0]):
            Bs[r, i] = B[r, i]
        for j in range(i):
            dot = 0.0
            for r in range(B.shape[0]):
                dot += B[r, i] * Bs[r, j]
            mu[i, j] = dot / bnorm[j] if bnorm[j] > 0 else 0.0
            for r in range(B.shape[0]):
                Bs[r, i] -= mu[i, j] * Bs[r, j]
        s = 0.0
        for r in range(B.shape[0]):
            s += Bs[r, i] * Bs[r, i]
        bnorm[i] = s


def _lll_loop(B_in, delta, max_iter):
    """LLL on the columns of ``B_in``; returns the unimodular ``U`` with ``B_in @ U`` reduced."""
    B = B_in.copy()
    d = B.shape[1]
    U = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        U[i, i] = 1
    Bs = np.zeros_like(B)
    mu = np.zeros((d, d))
    bnorm = np.zeros(d)
    _gs(B, Bs, mu, bnorm)
    k = 1
    it = 0
    while k < d and it < max_iter:
        it += 1
        for j in range(k - 1, -1, -1):
            r = np.rint(mu[k, j])
            if r != 0.0:
                ri = np.int64(r)
                for row in range(B.shape[0]):
                    B[row, k] -= r * B[row, j]
                for row in range(d):
                    U[row, k] -= ri * U[row, j]
                _gs(B, Bs, mu, bnorm)
        if bnorm[k] >= (delta - mu[k, k - 1] * mu[k, k - 1]) * bnorm[k - 1]:
            k += 1
        else:
            for row in range(B.shape[0]):
                tmp = B[row, k]
                B[row, k] = B[row, k - 1]
                B[row, k - 1] = tmp
            for row in range(d):
                tmpi = U[row, k]
                U[row, k] = U[row, k - 1]
                U[row, k - 1] = tmpi
            _gs(B, Bs, mu, bnorm)
            k = k - 1 if k > 1 else 1
    return U


# --- Fincke-Pohst ---------------------------------------------------------------

def _cholesky_upper(B):
    """Upper-triangular ``R`` with ``R^T R = B^T B``; zero diagonal flags failure."""
    d = B.shape[1]
    G = B.T @ B
    R = np.zeros((d, d))
    for i in range(d):
        s = G[i, i]
        for k in range(i):
            s -= R[k, i] * R[k, i]
        if s <= 0.0:
            R[i, i] = 0.0
            return R
        R[i, i] = math.sqrt(s)
        for j in range(i + 1, d):
            s2 = G[i, j]
            for k in range(i):
                s2 -= R[k, i] * R[k, j]
            R[i, j] = s2 / R[i, i]
    return R


def _fp_loop(R, radius2, out):
    """All nonzero integer ``c`` with ``|R c|^2 <= radius2``; returns the count
    (which may exceed ``len(out)``; extra points are counted, not stored)."""
    d = R.shape[0]
    cap = out.shape[0]
    c = np.zeros(d, dtype=np.int64)
    hi = np.zeros(d, dtype=np.int64)
    center = np.zeros(d)
    partial = np.zeros(d + 1)
    count = 0
    i = d - 1
    # level setup
    center[i] = 0.0
    span = math.sqrt(radius2) / abs(R[i, i])
    c[i] = np.int64(math.ceil(center[i] - span))
    hi[i] = np.int64(math.floor(center[i] + span))
    while True:
        if c[i] > hi[i]:
            i += 1
            if i >= d:
                break
            c[i] += 1
            continue
        val = R[i, i] * (c[i] - center[i])
        p = partial[i + 1] + val * val
        if p > radius2:
            c[i] += 1
            continue
        partial[i] = p
        if i == 0:
            nonzero = False
            for k in range(d):
                if c[k] != 0:
                    nonzero = True
                    break
            if nonzero:
                if count < cap:
                    for k in range(d):
                        out[count, k] = c[k]
                count += 1
            c[0] += 1
        else:
            i -= 1
            s = 0.0
            for j in range(i + 1, d):
                s += R[i, j] * c[j]
            center[i] = -s / R[i, i]
            rem = radius2 - partial[i + 1]
            if rem < 0.0:
                rem = 0.0
            span = math.sqrt(rem) / abs(R[i, i])
            c[i] = np.int64(math.ceil(center[i] - span))
            hi[i] = np.int64(math.floor(center[i] + span))
    return count


# --- shell zero search ---------------------------------------------------------------

def _shell_loop(Q, H, out):
    """Zeros of ``x^T Q x`` with ``max|x_i| = H``, one per ``+-`` pair.

    The pair representative has ``+H`` at the first coordinate of maximal
    modulus.  Returns the number of zeros (stored up to ``len(out)``) and the
    number of evaluations.
    """
    m = Q.shape[0]
    cap = out.shape[0]
    x = np.zeros(m, dtype=np.int64)
    count = 0
    evals = 0
    for p in range(m):
        for k in range(m):
            if k < p:
                x[k] = -(H - 1)
            elif k == p:
                x[k] = H
            else:
                x[k] = -H
        while True:
            val = 0
            for i in range(m):
                xi = x[i]
                if xi != 0:
                    acc = Q[i, i] * xi
                    for j in range(i + 1, m):
                        acc += 2 * Q[i, j] * x[j]
                    val += acc * xi
            evals += 1
            if val == 0:
                if count < cap:
                    for k in range(m):
                        out[count, k] = x[k]
                count += 1
            # odometer over the free coordinates (all except p)
            k = m - 1
            while k >= 0:
                if k == p:
                    k -= 1
                    continue
                lim = H - 1 if k < p else H
                if x[k] < lim:
                    x[k] += 1
                    break
                x[k] = -lim
                k -= 1
            if k < 0:
                break
    return count, evals


def _shell_numpy(Q, H, cap):
    """Vectorised counterpart of :func:`_shell_loop`."""
    m = Q.shape[0]
    found = []
    count = 0
    evals = 0
    for p in range(m):
        axes = []
        for k in range(m):
            if k < p:
                axes.append(np.arange(-(H - 1), H, dtype=np.int64))
            elif k == p:
                axes.append(np.array([H], dtype=np.int64))
            else:
                axes.append(np.arange(-H, H + 1, dtype=np.int64))
        # chunk over the first axis to bound memory
        first, rest = axes[0], axes[1:]
        if rest:
            grid = np.stack(np.meshgrid(*rest, indexing="ij"), axis=-1).reshape(-1, m - 1)
        else:
            grid = np.zeros((1, 0), dtype=np.int64)
        for x0 in first:
            X = np.empty((grid.shape[0], m), dtype=np.int64)
            X[:, 0] = x0
            X[:, 1:] = grid
            vals = np.einsum("ri,ij,rj->r", X, Q, X)
            evals += X.shape[0]
            hits = X[vals == 0]
            if hits.shape[0]:
                count += hits.shape[0]
                found.append(hits)
    if found:
        allz = np.concatenate(found)[:cap]
    else:
        allz = np.zeros((0, m), dtype=np.int64)
    return allz, count, evals


# --- dispatch --------------------------------------------------------------------------

def _maybe_jit(fn):
    return njit(cache=True)(fn) if USE_NUMBA else fn


_gs = _maybe_jit(_gram_schmidt)
_lll_impl = _maybe_jit(_lll_loop)
_cholesky_impl = _maybe_jit(_cholesky_upper)
_fp_impl = _maybe_jit(_fp_loop)
_shell_impl = _maybe_jit(_shell_loop) if USE_NUMBA else None


def lll_reduce(B: np.ndarray, delta: float = 0.99, max_iter: int = 100_000) -> np.ndarray:
    """Unimodular ``U`` (int64) such that the columns of ``B @ U`` are LLL-reduced."""
    B = np.ascontiguousarray(B, dtype=np.float64)
    return _lll_impl(B, float(delta), int(max_iter))


def fincke_pohst(B: np.ndarray, radius2: float, max_points: int) -> tuple[np.ndarray, int]:
    """Nonzero integer ``c`` with ``|B c|^2 <= radius2`` (both signs).

    Returns ``(points, total)``; ``total > len(points)`` means the cap was hit.
    """
    B = np.ascontiguousarray(B, dtype=np.float64)
    R = _cholesky_impl(B)
    if np.any(np.diag(R) <= 0.0):
        raise FloatingPointError("enumeration basis is numerically singular")
    out = np.zeros((max(int(max_points), 1), B.shape[1]), dtype=np.int64)
    total = _fp_impl(R, float(radius2), out)
    return out[: min(total, max_points)], int(total)


def shell_zeros(Q: np.ndarray, H: int, cap: int = 100_000, use_numba: bool | None = None):
    """Zeros of ``x^T Q x`` on the sup-norm shell ``H``; one vector per sign pair.

    ``use_numba=False`` forces the vectorised numpy path.  Returns
    ``(zeros, total, evaluations)``.
    """
    Q = np.ascontiguousarray(Q, dtype=np.int64)
    m = Q.shape[0]
    if int(np.abs(Q).sum()) * H * H >= INT64_SAFE:
        raise OverflowError("shell height too large for 64-bit evaluation")
    if H == 0:
        return np.zeros((0, m), dtype=np.int64), 0, 0
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba and _shell_impl is not None:
        out = np.zeros((cap, m), dtype=np.int64)
        total, evals = _shell_impl(Q, int(H), out)
        return out[: min(total, cap)], int(total), int(evals)
    zs, total, evals = _shell_numpy(Q, int(H), cap)
    return zs, int(total), int(evals)


def shell_size(m: int, H: int) -> int:
    """Number of evaluations in one shell (one representative per sign pair)."""
    if H == 0:
        return 0
    return ((2 * H + 1) ** m - (2 * H - 1) ** m) // 2
