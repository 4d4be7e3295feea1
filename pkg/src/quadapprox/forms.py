"""Integral positive definite forms, their indefinite lifts and derived constants."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .arith import DEFAULT_PRECISION, RealEnclosure, emax, enclosure
from .errors import DimensionError, FormError

IntMatrix = tuple[tuple[int, ...], ...]


def as_int_matrix(rows: Sequence[Sequence]) -> IntMatrix:
    """Validate a square symmetric integer matrix and freeze it."""
    out = []
    for row in rows:
        r = []
        for x in row:
            if isinstance(x, bool) or not isinstance(x, int):
                if isinstance(x, float) and x.is_integer():
                    x = int(x)
                elif hasattr(x, "__index__"):
                    x = int(x)
                else:
                    raise FormError(f"form coefficients must be integers, got {x!r}")
            r.append(int(x))
        out.append(tuple(r))
    m = len(out)
    if m == 0 or any(len(r) != m for r in out):
        raise FormError("gram matrix must be square and non-empty")
    for i in range(m):
        for j in range(i):
            if out[i][j] != out[j][i]:
                raise FormError(f"gram matrix is not symmetric at ({i}, {j})")
    return tuple(out)


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def leading_minors(gram: Sequence[Sequence[int]]) -> list[int]:
    n = len(gram)
    return [bareiss_det([row[:k] for row in gram[:k]]) for k in range(1, n + 1)]


def is_positive_definite(gram: Sequence[Sequence[int]]) -> bool:
    """Sylvester's criterion on exact integer minors."""
    g = as_int_matrix(gram)
    return all(m > 0 for m in leading_minors(g))


def quadratic_value(gram: Sequence[Sequence[int]], v: Sequence):
    """``v^T gram v`` in whatever arithmetic the entries of ``v`` use."""
    if len(v) != len(gram):
        raise DimensionError(f"vector of length {len(v)} for a form in {len(gram)} variables")
    total = 0
    for i, row in enumerate(gram):
        vi = v[i]
        if _zero(vi):
            continue
        inner = 0
        for j, gij in enumerate(row):
            if gij and not _zero(v[j]):
                inner = inner + gij * v[j]
        total = total + vi * inner
    return total


def bilinear_value(gram: Sequence[Sequence[int]], u: Sequence, v: Sequence):
    if len(u) != len(gram) or len(v) != len(gram):
        raise DimensionError("bilinear arguments do not match the form dimension")
    total = 0
    for i, row in enumerate(gram):
        if _zero(u[i]):
            continue
        inner = 0
        for j, gij in enumerate(row):
            if gij and not _zero(v[j]):
                inner = inner + gij * v[j]
        total = total + u[i] * inner
    return total


def _zero(x) -> bool:
    return not isinstance(x, RealEnclosure) and x == 0


@dataclass(frozen=True)
class QuadraticForm:
    """``f(x) = x^T gram x`` with an integral positive definite ``gram``."""

    gram: IntMatrix

    def __init__(self, gram: Sequence[Sequence[int]]):
        g = as_int_matrix(gram)
        if not all(m > 0 for m in leading_minors(g)):
            raise FormError("gram matrix is not positive definite")
        object.__setattr__(self, "gram", g)

    @property
    def n(self) -> int:
        return len(self.gram)

    def __call__(self, v: Sequence):
        return quadratic_value(self.gram, v)

    def bilinear(self, u: Sequence, v: Sequence):
        return bilinear_value(self.gram, u, v)

    def det(self) -> int:
        return bareiss_det(self.gram)

    def lift(self) -> "IndefiniteLift":
        return IndefiniteLift(self)

    def to_json(self) -> dict:
        return {"n": self.n, "gram": [list(r) for r in self.gram]}

    @classmethod
    def from_json(cls, data: dict) -> "QuadraticForm":
        gram = _gram_from_json(data)
        return cls(gram)

    @classmethod
    def identity(cls, n: int) -> "QuadraticForm":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, *entries: int) -> "QuadraticForm":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])


@dataclass(frozen=True)
class IndefiniteLift:
    """``F(x, y) = f(x) - y^2`` in ``n + 1`` variables."""

    base: QuadraticForm

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def dim(self) -> int:
        return self.base.n + 1

    @property
    def gram(self) -> IntMatrix:
        n = self.n
        rows = [tuple(self.base.gram[i]) + (0,) for i in range(n)]
        rows.append((0,) * n + (-1,))
        return tuple(rows)

    def __call__(self, z: Sequence):
        if len(z) != self.dim:
            raise DimensionError(f"vector of length {len(z)} for a lift in {self.dim} variables")
        return self.base(z[:-1]) - z[-1] * z[-1]

    def bilinear(self, u: Sequence, v: Sequence):
        if len(u) != self.dim or len(v) != self.dim:
            raise DimensionError("bilinear arguments do not match the lift dimension")
        return self.base.bilinear(u[:-1], v[:-1]) - u[-1] * v[-1]


def evaluate(form: QuadraticForm | IndefiniteLift, v: Sequence):
    """Exact value of ``f(v)`` (or ``F(v)`` for a lift)."""
    return form(v)


def bilinear(form: QuadraticForm | IndefiniteLift, u: Sequence, v: Sequence):
    return form.bilinear(u, v)


def _gram_from_json(data: dict) -> IntMatrix:
    if not isinstance(data, dict) or "gram" not in data:
        raise FormError("form JSON must be an object with a 'gram' entry")
    gram = as_int_matrix(data["gram"])
    if "n" in data and data["n"] != len(gram):
        raise FormError(f"declared n={data['n']} but gram is {len(gram)}x{len(gram)}")
    return gram


def load_gram(path: str | Path) -> IntMatrix:
    """Read ``{"n": .., "gram": [[..]]}``; symmetry is checked, definiteness is not."""
    with open(path) as fh:
        data = json.load(fh)
    return _gram_from_json(data)


def load_form(path: str | Path) -> QuadraticForm:
    return QuadraticForm(load_gram(path))


# constants ----------------------------------------------------------------------

@dataclass(frozen=True)
class FormConstants:
    v_f: RealEnclosure
    o_n: RealEnclosure
    C_f: RealEnclosure
    kappa_f: RealEnclosure
    kappa_f_direct: RealEnclosure
    precision: int


def unit_ball_volume(n: int, precision: int = DEFAULT_PRECISION) -> RealEnclosure:
    """``pi^(n/2) / Gamma(n/2 + 1)`` with Gamma at half-integers done exactly."""
    if n < 1:
        raise ValueError("dimension must be positive")
    pi = RealEnclosure.pi(precision)
    if n % 2 == 0:
        k = n // 2
        return pi ** k / math.factorial(k)
    k = (n + 1) // 2
    # Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
    coeff = Fraction(4 ** k * math.factorial(k), math.factorial(2 * k))
    return pi ** (k - 1) * enclosure(coeff, precision)


def compute_constants(form: QuadraticForm, precision: int = DEFAULT_PRECISION) -> FormConstants:
    return _constants(form.gram, precision)


@lru_cache(maxsize=256)
def _constants(gram: IntMatrix, precision: int) -> FormConstants:
    n = len(gram)
    det = bareiss_det(gram)
    o_n = unit_ball_volume(n, precision)
    v_f = o_n / enclosure(det, precision).sqrt()
    numerator = (n + 1) ** (n + 1) * 6 ** n * 2 ** (n * n)
    C_f = emax(numerator / v_f ** (n + 1), 1)
    kappa_f = 6 * C_f.square()
    numerator2 = (n + 1) ** (2 * (n + 1)) * 6 ** (2 * n) * 2 ** (2 * n * n)
    kappa_direct = 6 * emax(numerator2 / v_f ** (2 * (n + 1)), 1)
    return FormConstants(v_f, o_n, C_f, kappa_f, kappa_direct, precision)
