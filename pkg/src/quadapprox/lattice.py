"""Short integer vectors for the gauge of a linear image of the cylinder.

A *body* is anything exposing ``dim``, ``precision``, ``inverse_mid()``
(midpoints of ``M^{-1}`` as Fractions), ``gauge(v)`` (a certified
:class:`~quadapprox.arith.RealEnclosure`) and ``at_precision(p)``.
:class:`~quadapprox.transforms.TransformStack` is one; :class:`CylinderBody`
is a plain exact-matrix one used for testing.

Floating point only steers the search: LLL and Fincke-Pohst run in float64
on an enlarged ellipsoid (the cylinder sits inside ``sqrt(2)`` times the unit
ball), and every decision is taken on certified gauges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .arith import (
    DEFAULT_PRECISION,
    DEFAULT_PRECISION_CAP,
    Certainty,
    RealEnclosure,
    certified_lt,
    enclosure,
)
from .errors import BudgetExceeded, IndeterminateComparison

DEFAULT_DELTA = 0.99
DEFAULT_MAX_POINTS = 200_000

# float slack on enumeration radii; the certified recheck makes these safe
_REL_SLACK = 1e-7


Vector = tuple[int, ...]


def tie_key(v: Sequence[int]) -> tuple:
    """Order among equal gauges: smaller l1 norm, then lexicographic."""
    return (sum(abs(x) for x in v), tuple(v))


def canonical(v: Sequence[int]) -> Vector:
    """Sign representative whose first nonzero entry is positive."""
    for x in v:
        if x:
            return tuple(int(y) for y in v) if x > 0 else tuple(-int(y) for y in v)
    return tuple(int(y) for y in v)


class IndependenceTracker:
    """Incremental exact rank test over the rationals."""

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: list[tuple[int, list[Fraction]]] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, v: Sequence[int]) -> list[Fraction]:
        w = [Fraction(x) for x in v]
        for pivot, row in self._rows:
            if w[pivot]:
                f = w[pivot] / row[pivot]
                w = [a - f * b for a, b in zip(w, row)]
        return w

    def is_independent(self, v: Sequence[int]) -> bool:
        return any(self._reduce(v))

    def add(self, v: Sequence[int]) -> bool:
        w = self._reduce(v)
        for i, x in enumerate(w):
            if x:
                self._rows.append((i, w))
                return True
        return False


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 0
    tr = IndependenceTracker(len(rows[0]))
    for r in rows:
        tr.add(r)
    return tr.rank


# bodies -------------------------------------------------------------------------

def _exact_inverse(M: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(M)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class CylinderBody:
    """``M K`` for an exact rational ``M`` given through its inverse."""

    inverse: tuple[tuple[Fraction, ...], ...]
    precision: int = DEFAULT_PRECISION

    @classmethod
    def from_inverse(cls, inverse: Sequence[Sequence], precision: int = DEFAULT_PRECISION) -> "CylinderBody":
        return cls(tuple(tuple(Fraction(x) for x in row) for row in inverse), precision)

    @classmethod
    def from_matrix(cls, M: Sequence[Sequence], precision: int = DEFAULT_PRECISION) -> "CylinderBody":
        return cls.from_inverse(_exact_inverse(M), precision)

    @classmethod
    def identity(cls, dim: int, precision: int = DEFAULT_PRECISION) -> "CylinderBody":
        return cls.from_inverse([[int(i == j) for j in range(dim)] for i in range(dim)], precision)

    @property
    def dim(self) -> int:
        return len(self.inverse)

    def at_precision(self, precision: int) -> "CylinderBody":
        return CylinderBody(self.inverse, precision)

    def inverse_mid(self) -> list[list[Fraction]]:
        return [list(r) for r in self.inverse]

    def inverse_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.inverse])

    def inverse_image(self, v: Sequence[int]) -> list[Fraction]:
        return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.inverse]

    def gauge(self, v: Sequence[int]) -> RealEnclosure:
        w = self.inverse_image(v)
        x2 = sum((x * x for x in w[:-1]), Fraction(0))
        xn = enclosure(x2, self.precision).sqrt()
        y = enclosure(abs(w[-1]), self.precision)
        from .arith import emax

        return emax(y, xn)


# reduction ------------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedBasis:
    basis: tuple[Vector, ...]
    gauge_norms: tuple[RealEnclosure, ...]
    quality: float
    transform: np.ndarray = field(repr=False, compare=False)


def _float_product(inverse_mid: list[list[Fraction]], U: np.ndarray) -> np.ndarray:
    d = len(inverse_mid)
    out = np.empty((d, U.shape[1]))
    for i in range(d):
        for j in range(U.shape[1]):
            out[i, j] = float(sum((inverse_mid[i][k] * int(U[k, j]) for k in range(d)), Fraction(0)))
    return out


def _reduce_transform(body, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Unimodular ``U`` and the float basis ``M^{-1} U`` after LLL.

    Passes are repeated on the exactly recomputed product so that a badly
    conditioned body is reduced progressively.
    """
    mid = body.inverse_mid()
    d = len(mid)
    U = np.eye(d, dtype=np.int64)
    B = _float_product(mid, U)
    for _ in range(6):
        V = _kernels.lll_reduce(B, delta)
        if np.array_equal(V, np.eye(d, dtype=np.int64)):
            break
        U = U @ V
        B = _float_product(mid, U)
    return U, B


def _float_gauges(B: np.ndarray, C: np.ndarray) -> np.ndarray:
    W = B @ C.T.astype(np.float64)
    return np.maximum(np.abs(W[-1]), np.sqrt((W[:-1] ** 2).sum(axis=0)))


def reduce(body, delta: float = DEFAULT_DELTA) -> ReducedBasis:
    """LLL-reduced basis of ``Z^d`` for the norm ``|M^{-1} v|_2``, sorted by certified gauge."""
    U, _ = _reduce_transform(body, delta)
    vecs = [canonical(U[:, j]) for j in range(U.shape[1])]
    gauges = [body.gauge(v) for v in vecs]
    order = sorted(range(len(vecs)), key=lambda i: (gauges[i].mid, tie_key(vecs[i])))
    return ReducedBasis(
        tuple(vecs[i] for i in order), tuple(gauges[i] for i in order), float(delta), U
    )


def enumerate_gauge_ball(body, bound: float, max_points: int = DEFAULT_MAX_POINTS,
                         delta: float = DEFAULT_DELTA) -> list[tuple[float, Vector]]:
    """Canonical nonzero integer vectors whose float gauge is ``<= bound`` (with slack).

    Returns ``(float_gauge, vector)`` pairs sorted by gauge then vector.
    """
    U, B = _reduce_transform(body, delta)
    radius2 = 2.0 * bound * bound * (1 + _REL_SLACK) + 1e-300
    coeffs, total = _kernels.fincke_pohst(B, radius2, max_points)
    if total > max_points:
        raise BudgetExceeded(f"enumeration found {total} points, budget is {max_points}")
    if coeffs.shape[0] == 0:
        return []
    gauges = _float_gauges(B, coeffs)
    keep = gauges <= bound * (1 + _REL_SLACK)
    vectors = coeffs[keep] @ U.T
    seen: dict[Vector, float] = {}
    for g, v in zip(gauges[keep], vectors):
        cv = canonical(v)
        if cv not in seen:
            seen[cv] = float(g)
    return sorted(((g, v) for v, g in seen.items()), key=lambda p: (p[0], tie_key(p[1])))


# successive minima ------------------------------------------------------------------

@dataclass(frozen=True)
class Minima:
    vectors: tuple[Vector, ...]
    minima: tuple[RealEnclosure, ...]
    exact: bool
    candidates: int = 0


def _certified_sorted(body, vectors: Sequence[Vector]) -> list[tuple[RealEnclosure, Vector]]:
    pairs = [(body.gauge(v), v) for v in vectors]
    pairs.sort(key=lambda p: (p[0].mid, tie_key(p[1])))
    return pairs


def successive_minima_points(body, k: int | None = None, max_points: int = DEFAULT_MAX_POINTS,
                             delta: float = DEFAULT_DELTA) -> Minima:
    """The first ``k`` successive minima of the cylinder gauge and vectors attaining them.

    Exact enumeration; raises :class:`BudgetExceeded` if the enclosing
    ellipsoid holds more than ``max_points`` lattice points.
    """
    d = body.dim
    k = d if k is None else k
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in 1..{d}")
    basis = reduce(body, delta)
    # the reduced basis is independent, so its largest gauge bounds lambda_d
    bound = max(float(g.upper) for g in basis.gauge_norms)
    candidates = enumerate_gauge_ball(body, bound, max_points, delta)

    tracker = IndependenceTracker(d)
    cutoff = None
    for g, v in candidates:
        if tracker.add(v) and tracker.rank == k:
            cutoff = g
            break
    if cutoff is None:  # pragma: no cover - the basis itself is in the ball
        raise RuntimeError("enumeration missed the reduced basis")
    near = [v for g, v in candidates if g <= cutoff * (1 + 1e-6) + 1e-12]
    tracker = IndependenceTracker(d)
    chosen: list[tuple[RealEnclosure, Vector]] = []
    for gauge, v in _certified_sorted(body, near):
        if tracker.add(v):
            chosen.append((gauge, v))
            if len(chosen) == k:
                break
    return Minima(tuple(v for _, v in chosen), tuple(gg for gg, _ in chosen), True, len(candidates))


def lll_minima(body, k: int | None = None, delta: float = DEFAULT_DELTA) -> Minima:
    """Approximate minima read off an LLL basis (no enumeration)."""
    basis = reduce(body, delta)
    k = body.dim if k is None else k
    return Minima(basis.basis[:k], basis.gauge_norms[:k], False, 0)


def first_minimum_below_one(body, dilation=1, max_points: int = DEFAULT_MAX_POINTS,
                            precision_cap: int = DEFAULT_PRECISION_CAP,
                            delta: float = DEFAULT_DELTA) -> Optional[Vector]:
    """A nonzero integer vector strictly inside ``dilation * body``, or ``None``.

    Among certified-inside vectors the one of least gauge (then lexicographically
    least) is returned.  Raises :class:`IndeterminateComparison` when no vector
    is certified inside but some candidate stays undecided at ``precision_cap``.
    """
    dil_f = float(dilation)
    # a reduced vector already inside shrinks the search to its gauge
    shortest = min(float(gg.upper) for gg in reduce(body, delta).gauge_norms)
    candidates = enumerate_gauge_ball(body, min(dil_f, shortest), max_points, delta)
    inside: list[tuple[RealEnclosure, Vector]] = []
    unresolved: list[Vector] = []
    for _, v in candidates:
        b = body
        while True:
            gauge = b.gauge(v)
            verdict = certified_lt(gauge, dilation)
            if verdict is not Certainty.UNKNOWN or b.precision >= precision_cap:
                break
            b = b.at_precision(min(2 * b.precision, precision_cap))
        if verdict is Certainty.TRUE:
            inside.append((gauge, v))
        elif verdict is Certainty.UNKNOWN:
            unresolved.append(v)
    if inside:
        inside.sort(key=lambda p: (p[0].mid, tie_key(p[1])))
        return inside[0][1]
    if unresolved:
        raise IndeterminateComparison(
            f"{len(unresolved)} lattice point(s) lie on the body boundary within {precision_cap} bits"
        )
    return None
