"""Zeros of integral quadratic forms: isotropy, small zeros, independent zeros.

All searches walk sup-norm shells ``max|x_i| = H`` for ``H = 1, 2, ..``, so
the first zero found has minimal height.  Within a shell zeros are ordered by
the key :func:`zero_key`.  Isotropy is decided by searching up to the
Cassels height bound ``(3 sum|Q_ij|)^((m-1)/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, ContractViolation, FormError, IsotropyIndeterminate
from .forms import IntMatrix, as_int_matrix, bareiss_det, leading_minors, quadratic_value
from .lattice import IndependenceTracker, canonical, integer_rank

DEFAULT_BUDGET = 10 ** 8
SHELL_CAP = 1_000_000


def height(v: Sequence[int]) -> int:
    return max(abs(int(x)) for x in v)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide by the gcd and make the first nonzero entry positive."""
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return canonical([int(x) // g for x in v])


def zero_key(v: Sequence[int]) -> tuple:
    """Order inside a shell: lexicographically largest canonical vector first."""
    return tuple(-int(x) for x in v)


@dataclass(frozen=True)
class IsotropicZero:
    vector: tuple[int, ...]
    height: int

    @classmethod
    def of(cls, v: Sequence[int]) -> "IsotropicZero":
        p = primitive(v)
        return cls(p, height(p))

    def to_json(self) -> dict:
        return {"vector": list(self.vector), "height": self.height}


def cassels_bound(coeffs: Sequence[Sequence[int]]) -> int:
    """``floor((3 sum|Q_ij|)^((m-1)/2))`` computed in exact integers."""
    m = len(coeffs)
    s = 3 * sum(abs(int(x)) for row in coeffs for x in row)
    if (m - 1) % 2 == 0:
        return s ** ((m - 1) // 2)
    return math.isqrt(s ** (m - 1))


def _definite(coeffs: IntMatrix) -> bool:
    minors = leading_minors(coeffs)
    if all(x > 0 for x in minors):
        return True
    neg = tuple(tuple(-x for x in row) for row in coeffs)
    return all(x > 0 for x in leading_minors(neg))


@dataclass(frozen=True)
class InducedForm:
    """``Q(xi) = F(sum xi_i g_i)`` with ``Q_ij = B_F(g_i, g_j)``."""

    coeffs: IntMatrix
    generators: tuple[tuple[int, ...], ...] = ()

    @property
    def m(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_generators(cls, gram: Sequence[Sequence[int]], generators: Sequence[Sequence[int]]) -> "InducedForm":
        gens = tuple(tuple(int(x) for x in g) for g in generators)
        coeffs = tuple(
            tuple(_bil(gram, gi, gj) for gj in gens) for gi in gens
        )
        return cls(coeffs, gens)

    def __call__(self, xi: Sequence[int]) -> int:
        return quadratic_value(self.coeffs, xi)

    def combine(self, xi: Sequence[int]) -> tuple[int, ...]:
        """``sum xi_i g_i``."""
        d = len(self.generators[0])
        return tuple(sum(int(x) * g[k] for x, g in zip(xi, self.generators)) for k in range(d))

    def max_coefficient(self) -> int:
        return max(abs(x) for row in self.coeffs for x in row)


def _bil(gram, u, v) -> int:
    return sum(gram[i][j] * u[i] * v[j] for i in range(len(u)) for j in range(len(v)) if gram[i][j])


# shell search ------------------------------------------------------------------------

@dataclass
class SearchStats:
    evaluations: int = 0
    height: int = 0


def shell_zeros(coeffs: Sequence[Sequence[int]], H: int, cap: int = SHELL_CAP,
                use_numba: bool | None = None) -> list[tuple[int, ...]]:
    """Primitive zeros on shell ``H`` (one per sign pair), sorted by :func:`zero_key`."""
    Q = np.array(coeffs, dtype=np.int64)
    zs, total, _ = _kernels.shell_zeros(Q, H, cap, use_numba)
    if total > cap:
        raise BudgetExceeded(f"shell {H} holds {total} zeros, cap is {cap}")
    out = set()
    for z in zs:
        p = primitive(z)
        if height(p) == H:
            out.add(p)
    return sorted(out, key=zero_key)


def iter_zeros(coeffs: Sequence[Sequence[int]], max_height: int, budget: int = DEFAULT_BUDGET,
               stats: SearchStats | None = None, use_numba: bool | None = None
               ) -> Iterator[tuple[int, list[tuple[int, ...]]]]:
    """Yield ``(H, zeros)`` for every shell ``1 <= H <= max_height`` holding primitive zeros.

    Raises :class:`BudgetExceeded` before a shell that would push the
    evaluation count over ``budget``.
    """
    coeffs = as_int_matrix(coeffs)
    m = len(coeffs)
    stats = stats if stats is not None else SearchStats()
    for H in range(1, max_height + 1):
        size = _kernels.shell_size(m, H)
        if stats.evaluations + size > budget:
            raise BudgetExceeded(
                f"search budget of {budget} evaluations exhausted after height {H - 1}"
            )
        zs = shell_zeros(coeffs, H, use_numba=use_numba)
        stats.evaluations += size
        stats.height = H
        if zs:
            yield H, zs


# isotropy -----------------------------------------------------------------------------

@dataclass(frozen=True)
class IsotropyResult:
    isotropic: bool
    zero: Optional[IsotropicZero]
    bound: int
    searched_height: int
    evaluations: int
    reason: str

    def to_json(self) -> dict:
        out = {
            "isotropic": self.isotropic,
            "bound": self.bound,
            "searched_height": self.searched_height,
            "evaluations": self.evaluations,
            "reason": self.reason,
        }
        if self.zero is not None:
            out["zero"] = list(self.zero.vector)
            out["height"] = self.zero.height
        else:
            out["bound_searched"] = self.searched_height
        return out


def isotropy(coeffs: Sequence[Sequence[int]], budget: int = DEFAULT_BUDGET) -> IsotropyResult:
    """Decide isotropy by shell search up to the Cassels bound.

    Raises :class:`IsotropyIndeterminate` (carrying the bound) when the
    budget runs out first.
    """
    coeffs = as_int_matrix(coeffs)
    return _isotropy(coeffs, budget)


@lru_cache(maxsize=128)
def _isotropy(coeffs: IntMatrix, budget: int) -> IsotropyResult:
    m = len(coeffs)
    bound = cassels_bound(coeffs)
    for i in range(m):
        if coeffs[i][i] == 0:
            z = IsotropicZero.of([int(k == i) for k in range(m)])
            return IsotropyResult(True, z, bound, 1, 0, "zero diagonal entry")
    if _definite(coeffs):
        return IsotropyResult(False, None, bound, 0, 0, "definite")
    stats = SearchStats()
    try:
        for H, zs in iter_zeros(coeffs, bound, budget, stats):
            return IsotropyResult(True, IsotropicZero.of(zs[0]), bound, H, stats.evaluations, "search")
    except BudgetExceeded as exc:
        raise IsotropyIndeterminate(
            f"isotropy undecided: {exc}; the Cassels bound is {bound}", bound
        ) from exc
    return IsotropyResult(False, None, bound, bound, stats.evaluations, "search complete to the Cassels bound")


def decide_isotropy(coeffs: Sequence[Sequence[int]], budget: int = DEFAULT_BUDGET) -> Optional[IsotropicZero]:
    """A minimal-height zero, or ``None`` when the form is anisotropic."""
    return isotropy(coeffs, budget).zero


def lift_isotropy(gram: Sequence[Sequence[int]], budget: int = DEFAULT_BUDGET) -> IsotropyResult:
    """Isotropy of ``f(x) - y^2``; five or more variables are isotropic by dimension."""
    g = as_int_matrix(gram)
    n = len(g)
    lifted = tuple(tuple(r) + (0,) for r in g) + ((0,) * n + (-1,),)
    if n + 1 >= 5:
        return IsotropyResult(True, None, cassels_bound(lifted), 0, 0, "by dimension")
    return _isotropy(lifted, budget)


# small zero ---------------------------------------------------------------------------

def small_zero(form: InducedForm | Sequence[Sequence[int]], budget: int = DEFAULT_BUDGET) -> IsotropicZero:
    """Minimal-height zero; ties broken by :func:`zero_key`.

    A form with no zero up to the Cassels bound is anisotropic, which the
    caller promised it is not; that raises :class:`ContractViolation`.
    """
    coeffs = form.coeffs if isinstance(form, InducedForm) else as_int_matrix(form)
    bound = cassels_bound(coeffs)
    for _, zs in iter_zeros(coeffs, bound, budget):
        return IsotropicZero.of(zs[0])
    raise ContractViolation(f"no zero up to the Cassels bound {bound}; the form is anisotropic")


# independent zeros ----------------------------------------------------------------------

@dataclass(frozen=True)
class IndependentZeros:
    zeros: tuple[IsotropicZero, ...]
    k: int
    complete: bool
    searched_height: int
    determinant: Optional[int] = None
    heights_product: int = field(default=1)

    def to_json(self) -> dict:
        return {
            "zeros": [z.to_json() for z in self.zeros],
            "k": self.k,
            "complete": self.complete,
            "partial": not self.complete,
            "rank": integer_rank([z.vector for z in self.zeros]),
            "searched_height": self.searched_height,
            "determinant": self.determinant,
            "heights_product": self.heights_product,
        }


def independent_zeros(form: InducedForm | Sequence[Sequence[int]], k: int | None = None,
                      max_height: int | None = None, budget: int = DEFAULT_BUDGET) -> IndependentZeros:
    """``k`` linearly independent zeros collected greedily by increasing height.

    Stops with ``complete=False`` when ``max_height`` or the budget runs out.
    """
    coeffs = form.coeffs if isinstance(form, InducedForm) else as_int_matrix(form)
    m = len(coeffs)
    k = m if k is None else k
    if not 1 <= k <= m:
        raise FormError(f"k must lie in 1..{m}")
    if max_height is None:
        max_height = cassels_bound(coeffs)
    tracker = IndependenceTracker(m)
    found: list[IsotropicZero] = []
    stats = SearchStats()
    try:
        for _, zs in iter_zeros(coeffs, max_height, budget, stats):
            for z in zs:
                if tracker.add(z):
                    found.append(IsotropicZero.of(z))
                    if len(found) == k:
                        break
            if len(found) == k:
                break
    except BudgetExceeded:
        pass
    det = bareiss_det([z.vector for z in found]) if len(found) == m else None
    prod = 1
    for z in found:
        prod *= z.height
    return IndependentZeros(tuple(found), k, len(found) == k, stats.height, det, prod)
