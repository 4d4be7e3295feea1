"""Geometry of the approximation body.

Builds the triangular factor ``W`` with ``W^T gram W = I``, the orthogonal
``R`` sending ``e = (0, .., 0, 1)`` to ``beta = W^{-1} alpha``, the hyperbolic
boost ``G_t`` and their ``(n+1) x (n+1)`` lifts.  The body is the image
``M K`` of the open cylinder ``K = {|y| < 1, |x| < 1}`` under
``M = lift(W) lift(R) G_t``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from . import arith
from .arith import (
    DEFAULT_PRECISION,
    Certainty,
    RealEnclosure,
    certified_lt,
    enclosure,
    matmul,
    matvec,
    transpose,
)
from .errors import DimensionError, SurfaceResidualError
from .forms import QuadraticForm

Scalar = Union[int, Fraction, RealEnclosure]
TSource = Union[Fraction, int, Callable[[int], RealEnclosure]]

DEFAULT_SURFACE_TOL = Fraction(1, 2 ** 40)


# exact factorisation ----------------------------------------------------------

def ldl(gram: Sequence[Sequence[int]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Exact ``gram = L D L^T`` with unit lower-triangular ``L``."""
    n = len(gram)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    d = [Fraction(0)] * n
    for j in range(n):
        d[j] = Fraction(gram[j][j]) - sum(L[j][k] ** 2 * d[k] for k in range(j))
        if d[j] <= 0:
            raise ValueError("gram matrix is not positive definite")
        for i in range(j + 1, n):
            L[i][j] = (Fraction(gram[i][j]) - sum(L[i][k] * L[j][k] * d[k] for k in range(j))) / d[j]
    return L, d


def _unit_lower_inverse(L: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(L)
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            inv[i][j] = -sum(L[i][k] * inv[k][j] for k in range(j, i))
    return inv


def cholesky_W(form: QuadraticForm, precision: int = DEFAULT_PRECISION) -> list[list[RealEnclosure]]:
    """Upper-triangular ``W`` with ``W^T gram W = I``.

    With ``gram = L D L^T`` this is ``W = L^{-T} D^{-1/2}``; only the pivots
    ``sqrt(d_j)`` are irrational.
    """
    L, d = ldl(form.gram)
    Linv = _unit_lower_inverse(L)
    n = form.n
    inv_sqrt = [1 / enclosure(dj, precision).sqrt() for dj in d]
    return [
        [Linv[j][i] * inv_sqrt[j] if j >= i else enclosure(0, precision) for j in range(n)]
        for i in range(n)
    ]


def cholesky_W_inverse(form: QuadraticForm, precision: int = DEFAULT_PRECISION) -> list[list[RealEnclosure]]:
    """``W^{-1} = D^{1/2} L^T`` (upper triangular)."""
    L, d = ldl(form.gram)
    n = form.n
    root = [enclosure(dj, precision).sqrt() for dj in d]
    return [[root[i] * L[j][i] if j >= i else enclosure(0, precision) for j in range(n)] for i in range(n)]


def apply_W_inverse(form: QuadraticForm, x: Sequence, precision: int = DEFAULT_PRECISION) -> list:
    """``W^{-1} x`` as ``D^{1/2} (L^T x)`` with the bracket computed exactly when possible."""
    L, d = ldl(form.gram)
    n = form.n
    out = []
    for i in range(n):
        acc = 0
        for j in range(i, n):
            if L[j][i] != 0 and not _is_exact_zero(x[j]):
                acc = acc + L[j][i] * x[j]
        out.append(enclosure(d[i], precision).sqrt() * acc if not _is_exact_zero(acc) else enclosure(0, precision))
    return out


def _is_exact_zero(x) -> bool:
    if isinstance(x, RealEnclosure):
        return x.is_exact() and x.lower == 0
    return x == 0


# orthogonal map -------------------------------------------------------------------

def householder(u: Sequence, norm2, precision: int) -> list[list[RealEnclosure]]:
    """``I - 2 u u^T / norm2``."""
    n = len(u)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            val = -2 * (u[i] * u[j]) / norm2 if not (_is_exact_zero(u[i]) or _is_exact_zero(u[j])) else 0
            row.append(enclosure(int(i == j), precision) + val)
        out.append(row)
    return out


def rotation_to(beta: Sequence, precision: int = DEFAULT_PRECISION) -> list[list[RealEnclosure]]:
    """Orthogonal ``R`` with ``R e = beta`` for a unit vector ``beta``.

    One Householder reflection.  When the last coordinate of ``beta`` is
    positive the vector ``e - beta`` can be short, so we reflect ``e`` to
    ``-e`` first and then map ``-e`` to ``beta``; both branches keep the
    reflection vector's squared length ``>= 2``.
    """
    n = len(beta)
    beta = [enclosure(b, precision) for b in beta]
    last = beta[-1]
    if float(last) <= 0:
        u = [-b for b in beta]
        u[-1] = 1 - last
        return householder(u, 2 - 2 * last, precision)
    u = [-b for b in beta]
    u[-1] = -1 - last
    H = householder(u, 2 + 2 * last, precision)
    # right-multiplying by diag(1, .., 1, -1) flips the last column
    return [[(-x if j == n - 1 else x) for j, x in enumerate(row)] for row in H]


# boost -----------------------------------------------------------------------------

def _t_enclosure(t, precision: int) -> RealEnclosure:
    t = enclosure(t, precision)
    if certified_lt(0, t) is not Certainty.TRUE:
        raise ValueError("boost parameter t must be certified positive")
    return t


def boost(t, n: int, precision: int = DEFAULT_PRECISION) -> list[list[RealEnclosure]]:
    """``(n+1) x (n+1)`` boost: identity on the first ``n-1`` coordinates,
    ``[[c, s], [s, c]]`` with ``c = (t + 1/t)/2``, ``s = (t - 1/t)/2`` on the last two."""
    t = _t_enclosure(t, precision)
    inv = 1 / t
    c = (t + inv) / 2
    s = (t - inv) / 2
    d = n + 1
    G = arith.identity(d, precision)
    G[d - 2][d - 2], G[d - 2][d - 1] = c, s
    G[d - 1][d - 2], G[d - 1][d - 1] = s, c
    return G


def B_matrix(n: int) -> list[list[int]]:
    """Change of variables ``(x_n, y) -> (x_n - y, x_n + y)``."""
    d = n + 1
    B = [[int(i == j) for j in range(d)] for i in range(d)]
    B[d - 2][d - 2], B[d - 2][d - 1] = 1, -1
    B[d - 1][d - 2], B[d - 1][d - 1] = 1, 1
    return B


def B_inverse(n: int) -> list[list[Fraction]]:
    d = n + 1
    Bi = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    h = Fraction(1, 2)
    Bi[d - 2][d - 2], Bi[d - 2][d - 1] = h, h
    Bi[d - 1][d - 2], Bi[d - 1][d - 1] = -h, h
    return Bi


def D_matrix(t, n: int, precision: int = DEFAULT_PRECISION) -> list[list[RealEnclosure]]:
    t = _t_enclosure(t, precision)
    D = arith.identity(n + 1, precision)
    D[n - 1][n - 1] = 1 / t
    D[n][n] = t
    return D


def boost_factored(t, n: int, precision: int = DEFAULT_PRECISION) -> list[list[RealEnclosure]]:
    """``B^{-1} D_t B`` computed as a product (cross-check for :func:`boost`)."""
    Bi = [[enclosure(x, precision) for x in row] for row in B_inverse(n)]
    Bm = [[enclosure(x, precision) for x in row] for row in B_matrix(n)]
    return matmul(matmul(Bi, D_matrix(t, n, precision)), Bm)


def lorentz_value(z: Sequence):
    """``F_0(z) = z_1^2 + .. + z_n^2 - z_{n+1}^2``."""
    total = 0
    for x in z[:-1]:
        total = total + x * x
    return total - z[-1] * z[-1]


def lift(A: Sequence[Sequence], precision: int = DEFAULT_PRECISION) -> list[list[RealEnclosure]]:
    """Block matrix ``[[A, 0], [0, 1]]``."""
    n = len(A)
    out = [[enclosure(x, precision) for x in row] + [enclosure(0, precision)] for row in A]
    out.append([enclosure(0, precision)] * n + [enclosure(1, precision)])
    return out


# surface point -----------------------------------------------------------------------

@dataclass(frozen=True)
class SurfacePoint:
    """A target point ``alpha`` given exactly (rationals) or by expressions."""

    coords: tuple[Fraction, ...] | None = None
    exprs: tuple[str, ...] | None = None

    def __post_init__(self):
        if (self.coords is None) == (self.exprs is None):
            raise ValueError("give exactly one of coords or exprs")

    @classmethod
    def rational(cls, values: Sequence) -> "SurfacePoint":
        return cls(coords=tuple(Fraction(v) for v in values))

    @classmethod
    def from_exprs(cls, exprs: Sequence[str]) -> "SurfacePoint":
        exact = [arith.evaluate_rational(e) for e in exprs]
        if all(v is not None for v in exact):
            return cls(coords=tuple(exact))
        return cls(exprs=tuple(e.strip() for e in exprs))

    @property
    def exact(self) -> bool:
        return self.coords is not None

    @property
    def n(self) -> int:
        return len(self.coords if self.coords is not None else self.exprs)

    def values(self, precision: int = DEFAULT_PRECISION) -> list:
        """Exact coordinates, or enclosures of the expressions at ``precision``."""
        if self.coords is not None:
            return list(self.coords)
        return [arith.enclose(e, precision) for e in self.exprs]

    def enclosures(self, precision: int = DEFAULT_PRECISION) -> list[RealEnclosure]:
        return [enclosure(v, precision) for v in self.values(precision)]

    def residual(self, form: QuadraticForm, precision: int = DEFAULT_PRECISION):
        """``f(alpha) - 1`` (exact Fraction when alpha is rational)."""
        if self.n != form.n:
            raise DimensionError(f"alpha has {self.n} coordinates, form has {form.n}")
        return form(self.values(precision)) - 1

    def on_surface(self, form: QuadraticForm) -> bool:
        return self.exact and self.residual(form) == 0

    def residual_bound(self, form: QuadraticForm, precision: int = DEFAULT_PRECISION) -> Fraction:
        """Upper bound on ``|f(alpha) - 1|``."""
        r = self.residual(form, precision)
        if isinstance(r, RealEnclosure):
            return abs(r).upper
        return abs(Fraction(r))

    def to_json(self) -> dict:
        if self.coords is not None:
            return {"kind": "rational", "values": [arith.fraction_to_str(c) for c in self.coords]}
        return {"kind": "expr", "values": list(self.exprs)}

    @classmethod
    def from_json(cls, data: dict) -> "SurfacePoint":
        kind = data.get("kind")
        if kind == "rational":
            return cls(coords=tuple(arith.parse_rational(v) for v in data["values"]))
        if kind == "expr":
            return cls(exprs=tuple(str(v) for v in data["values"]))
        raise ValueError(f"unknown alpha kind {kind!r}")


def check_surface(form: QuadraticForm, alpha: SurfacePoint, tol: Fraction = DEFAULT_SURFACE_TOL,
                  precision: int = DEFAULT_PRECISION) -> Fraction:
    bound = alpha.residual_bound(form, precision)
    if bound > tol:
        raise SurfaceResidualError(f"|f(alpha) - 1| <= {float(bound):.3e} exceeds tolerance {float(tol):.3e}")
    return bound


def normalized_alpha(form: QuadraticForm, alpha: SurfacePoint, precision: int) -> list:
    """``alpha / sqrt(f(alpha))``: exact when alpha already lies on the quadric."""
    if alpha.on_surface(form):
        return list(alpha.coords)
    vals = alpha.enclosures(precision)
    scale = enclosure(form(vals), precision).sqrt()
    return [v / scale for v in vals]


# the stack -------------------------------------------------------------------------

class Membership(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    UNKNOWN = "unknown"


@dataclass(frozen=True, eq=False)
class TransformStack:
    form: QuadraticForm
    alpha: SurfacePoint
    t_source: TSource
    precision: int
    t: RealEnclosure
    alpha_hat: list
    beta: list
    W: list
    W_inv: list
    R: list
    G: list
    G_inv: list
    W_lift: list
    R_lift: list
    M: list
    M_inv: list
    _float_inv: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, form: QuadraticForm, alpha: SurfacePoint, t: TSource,
              precision: int = DEFAULT_PRECISION) -> "TransformStack":
        if alpha.n != form.n:
            raise DimensionError(f"alpha has {alpha.n} coordinates, form has {form.n}")
        n = form.n
        t_enc = _t_enclosure(t(precision) if callable(t) else t, precision)
        alpha_hat = normalized_alpha(form, alpha, precision)
        beta = apply_W_inverse(form, alpha_hat, precision)
        W = cholesky_W(form, precision)
        W_inv = cholesky_W_inverse(form, precision)
        R = rotation_to(beta, precision)
        G = boost(t_enc, n, precision)
        G_inv = boost(1 / t_enc, n, precision)
        W_lift = lift(W, precision)
        R_lift = lift(R, precision)
        M = matmul(matmul(W_lift, R_lift), G)
        M_inv = matmul(matmul(G_inv, lift(transpose(R), precision)), lift(W_inv, precision))
        float_inv = np.array([[float(x) for x in row] for row in M_inv], dtype=np.float64)
        return cls(form, alpha, t, precision, t_enc, alpha_hat, beta, W, W_inv, R, G, G_inv,
                   W_lift, R_lift, M, M_inv, float_inv)

    @property
    def n(self) -> int:
        return self.form.n

    @property
    def dim(self) -> int:
        return self.form.n + 1

    def at_precision(self, precision: int) -> "TransformStack":
        if precision == self.precision:
            return self
        return TransformStack.build(self.form, self.alpha, self.t_source, precision)

    def inverse_float(self) -> np.ndarray:
        return self._float_inv.copy()

    def inverse_mid(self) -> list[list[Fraction]]:
        """Midpoints of ``M^{-1}`` as exact dyadic rationals."""
        return [[x.mid if isinstance(x, RealEnclosure) else Fraction(x) for x in row] for row in self.M_inv]

    # matrix route ----------------------------------------------------------
    def pullback_chain(self, g: Sequence[int]) -> tuple[list, list, list]:
        """``u = W^{-1} g``, ``v = R^{-1} u``, ``w = G_t^{-1} v`` (lifted matrices)."""
        if len(g) != self.dim:
            raise DimensionError("vector does not match the stack dimension")
        p = self.precision
        u = apply_W_inverse(self.form, list(g[:-1]), p) + [enclosure(g[-1], p)]
        v = matvec(lift(transpose(self.R), p), u)
        w = matvec(self.G_inv, v)
        return u, v, w

    def inverse_image(self, g: Sequence[int]) -> list:
        return self.pullback_chain(g)[2]

    def gauge_matrix(self, g: Sequence[int]) -> RealEnclosure:
        return _cylinder_gauge(self.inverse_image(g), self.precision)

    # invariant route ---------------------------------------------------------
    def gauge(self, g: Sequence[int]) -> RealEnclosure:
        """Cylinder gauge of ``M^{-1} g``.

        Uses that the last coordinate of ``R^T W^{-1} a`` is the bilinear value
        ``h = B_f(alpha_hat, a)`` and the first ``n-1`` coordinates have squared
        length ``f(a) - h^2``; only ``t`` is irrational when alpha is rational.
        """
        if len(g) != self.dim:
            raise DimensionError("vector does not match the stack dimension")
        p = self.precision
        a, q = list(g[:-1]), int(g[-1])
        h = self.form.bilinear(self.alpha_hat, a)
        s = self.form(a) - h * h
        plus, minus = h + q, h - q
        t = self.t
        if _is_exact_zero(plus) and _is_exact_zero(minus):
            wn = wy = enclosure(0, p)
        else:
            x1 = plus / t
            x2 = minus * t
            wn = (x1 + x2) / 2
            wy = (x1 - x2) / 2
        xnorm2 = enclosure(s, p) + enclosure(wn, p).square()
        return arith.emax(abs(enclosure(wy, p)), xnorm2.sqrt())

    def lorentz_parts(self, g: Sequence[int]) -> dict:
        """Exact/enclosed ``h = v_n`` together with ``q`` for diagnostics."""
        h = self.form.bilinear(self.alpha_hat, list(g[:-1]))
        return {"v_n": h, "q": int(g[-1])}


def _cylinder_gauge(w: Sequence, precision: int) -> RealEnclosure:
    x2 = enclosure(0, precision)
    for x in w[:-1]:
        x2 = x2 + enclosure(x, precision).square()
    return arith.emax(abs(enclosure(w[-1], precision)), x2.sqrt())


def body_membership(g: Sequence[int], stack, dilation=1) -> Membership:
    """Is ``g`` in the open body ``dilation * M K``?  UNKNOWN if undecided at this precision."""
    gauge = stack.gauge(g)
    verdict = certified_lt(gauge, dilation)
    if verdict is Certainty.TRUE:
        return Membership.INSIDE
    if verdict is Certainty.FALSE:
        return Membership.OUTSIDE
    return Membership.UNKNOWN

