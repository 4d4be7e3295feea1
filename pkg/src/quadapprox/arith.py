"""Exact rationals and outward-rounded interval enclosures.

Exact values are plain :class:`fractions.Fraction`.  Irrational intermediates
live in :class:`RealEnclosure`, an interval with dyadic endpoints whose every
operation rounds the lower endpoint down and the upper endpoint up, so the
exact real value is always contained.
"""

from __future__ import annotations

import ast
import enum
import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence, TypeVar

from mpmath.libmp import (
    fzero,
    from_int,
    from_rational,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_mul,
    mpf_neg,
    mpf_pi,
    mpf_sqrt,
    mpf_sub,
    to_float,
    to_rational,
)

ExactRational = Fraction

MIN_PRECISION = 32
DEFAULT_PRECISION = 128
DEFAULT_PRECISION_CAP = 1024

_DOWN = "f"
_UP = "c"


class Certainty(enum.Enum):
    """Three-valued outcome of a certified comparison."""

    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __bool__(self) -> bool:  # pragma: no cover - guard against misuse
        raise TypeError("Certainty is three-valued; compare against Certainty.TRUE")


def rational_add(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(a) + Fraction(b)


def rational_mul(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(a) * Fraction(b)


def rational_div(a: Fraction, b: Fraction) -> Fraction:
    if b == 0:
        raise ZeroDivisionError("invalid operand: division by zero")
    return Fraction(a) / Fraction(b)


def rational_cmp(a: Fraction, b: Fraction) -> int:
    """-1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    a, b = Fraction(a), Fraction(b)
    return (a > b) - (a < b)


def parse_rational(text: str) -> Fraction:
    """Parse ``"3/5"``, ``"-2"`` or the literal decimal ``"0.6"`` exactly."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def _mpf_min(a, b):
    return a if mpf_cmp(a, b) <= 0 else b


def _mpf_max(a, b):
    return a if mpf_cmp(a, b) >= 0 else b


def _mpf_to_fraction(x) -> Fraction:
    p, q = to_rational(x)
    return Fraction(int(p), int(q))


def _check_precision(prec: int) -> int:
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {prec}")
    return int(prec)


class RealEnclosure:
    """Closed interval ``[lower, upper]`` with dyadic endpoints.

    Instances are immutable.  ``prec`` is the number of mantissa bits used
    when rounding results of operations involving this enclosure.
    """

    __slots__ = ("_lo", "_hi", "prec")

    def __init__(self, lo, hi, prec: int):
        if mpf_cmp(lo, hi) > 0:
            raise ValueError("enclosure lower endpoint exceeds upper endpoint")
        object.__setattr__(self, "_lo", lo)
        object.__setattr__(self, "_hi", hi)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("RealEnclosure is immutable")

    # construction -------------------------------------------------------
    @classmethod
    def from_value(cls, x, prec: int = DEFAULT_PRECISION) -> "RealEnclosure":
        """Tightest enclosure of an int / Fraction at ``prec`` bits."""
        if isinstance(x, RealEnclosure):
            return x
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            v = from_int(x)
            if abs(x).bit_length() <= prec:
                return cls(v, v, prec)
            return cls(from_int(x, prec, _DOWN), from_int(x, prec, _UP), prec)
        if isinstance(x, Fraction):
            p, q = x.numerator, x.denominator
            if q & (q - 1) == 0 and abs(p).bit_length() <= prec:
                v = from_rational(p, q, prec, _DOWN)
                return cls(v, v, prec)
            return cls(from_rational(p, q, prec, _DOWN), from_rational(p, q, prec, _UP), prec)
        if isinstance(x, float):
            return cls.from_value(Fraction(x), prec)
        raise TypeError(f"cannot enclose {type(x).__name__}")

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction, prec: int = DEFAULT_PRECISION) -> "RealEnclosure":
        lo, hi = Fraction(lo), Fraction(hi)
        return cls(
            from_rational(lo.numerator, lo.denominator, prec, _DOWN),
            from_rational(hi.numerator, hi.denominator, prec, _UP),
            prec,
        )

    @classmethod
    def pi(cls, prec: int = DEFAULT_PRECISION) -> "RealEnclosure":
        return cls(mpf_pi(prec, _DOWN), mpf_pi(prec, _UP), prec)

    # accessors ------------------------------------------------------------
    @property
    def lower(self) -> Fraction:
        return _mpf_to_fraction(self._lo)

    @property
    def upper(self) -> Fraction:
        return _mpf_to_fraction(self._hi)

    @property
    def mid(self) -> Fraction:
        return (self.lower + self.upper) / 2

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def __float__(self) -> float:
        return (to_float(self._lo) + to_float(self._hi)) / 2

    def is_exact(self) -> bool:
        return mpf_cmp(self._lo, self._hi) == 0

    def contains(self, x) -> bool:
        if isinstance(x, RealEnclosure):
            return mpf_cmp(self._lo, x._lo) <= 0 and mpf_cmp(x._hi, self._hi) <= 0
        x = Fraction(x)
        return self.lower <= x <= self.upper

    def intersects(self, other: "RealEnclosure") -> bool:
        other = _coerce(other, self.prec)
        return mpf_cmp(self._lo, other._hi) <= 0 and mpf_cmp(other._lo, self._hi) <= 0

    def hull(self, other: "RealEnclosure") -> "RealEnclosure":
        other = _coerce(other, self.prec)
        return RealEnclosure(
            _mpf_min(self._lo, other._lo), _mpf_max(self._hi, other._hi), max(self.prec, other.prec)
        )

    def contains_zero(self) -> bool:
        return mpf_cmp(self._lo, fzero) <= 0 <= mpf_cmp(self._hi, fzero)

    # arithmetic -------------------------------------------------------------
    def __neg__(self) -> "RealEnclosure":
        return RealEnclosure(mpf_neg(self._hi), mpf_neg(self._lo), self.prec)

    def __pos__(self) -> "RealEnclosure":
        return self

    def __abs__(self) -> "RealEnclosure":
        if mpf_cmp(self._lo, fzero) >= 0:
            return self
        if mpf_cmp(self._hi, fzero) <= 0:
            return -self
        return RealEnclosure(fzero, _mpf_max(mpf_neg(self._lo), self._hi), self.prec)

    def __add__(self, other) -> "RealEnclosure":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        return RealEnclosure(mpf_add(self._lo, other._lo, p, _DOWN), mpf_add(self._hi, other._hi, p, _UP), p)

    __radd__ = __add__

    def __sub__(self, other) -> "RealEnclosure":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        return RealEnclosure(mpf_sub(self._lo, other._hi, p, _DOWN), mpf_sub(self._hi, other._lo, p, _UP), p)

    def __rsub__(self, other) -> "RealEnclosure":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other) -> "RealEnclosure":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        pairs = [(a, b) for a in (self._lo, self._hi) for b in (other._lo, other._hi)]
        lo = hi = None
        for a, b in pairs:
            d = mpf_mul(a, b, p, _DOWN)
            u = mpf_mul(a, b, p, _UP)
            lo = d if lo is None else _mpf_min(lo, d)
            hi = u if hi is None else _mpf_max(hi, u)
        return RealEnclosure(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RealEnclosure":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        if other.contains_zero():
            raise ZeroDivisionError("divisor enclosure contains zero")
        p = max(self.prec, other.prec)
        lo = hi = None
        for a in (self._lo, self._hi):
            for b in (other._lo, other._hi):
                d = mpf_div(a, b, p, _DOWN)
                u = mpf_div(a, b, p, _UP)
                lo = d if lo is None else _mpf_min(lo, d)
                hi = u if hi is None else _mpf_max(hi, u)
        return RealEnclosure(lo, hi, p)

    def __rtruediv__(self, other) -> "RealEnclosure":
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return other / self

    def square(self) -> "RealEnclosure":
        a = abs(self)
        p = self.prec
        return RealEnclosure(mpf_mul(a._lo, a._lo, p, _DOWN), mpf_mul(a._hi, a._hi, p, _UP), p)

    def __pow__(self, k: int) -> "RealEnclosure":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** (-k))
        result = RealEnclosure.from_value(1, self.prec)
        base = self
        first = True
        while k:
            if k & 1:
                result = base if first else result * base
                first = False
            k >>= 1
            if k:
                base = base.square()
        return result

    def sqrt(self) -> "RealEnclosure":
        if mpf_cmp(self._hi, fzero) < 0:
            raise ValueError("square root of a negative enclosure")
        lo = self._lo if mpf_cmp(self._lo, fzero) > 0 else fzero
        p = self.prec
        return RealEnclosure(mpf_sqrt(lo, p, _DOWN), mpf_sqrt(self._hi, p, _UP), p)

    def with_precision(self, prec: int) -> "RealEnclosure":
        return RealEnclosure(self._lo, self._hi, prec)

    def __repr__(self) -> str:
        return f"RealEnclosure([{to_float(self._lo)!r}, {to_float(self._hi)!r}], prec={self.prec})"


def _coerce(x, prec: int):
    if isinstance(x, RealEnclosure):
        return x
    if isinstance(x, (int, Fraction, float)):
        return RealEnclosure.from_value(x, prec)
    return NotImplemented


def enclosure(x, prec: int = DEFAULT_PRECISION) -> RealEnclosure:
    return RealEnclosure.from_value(x, prec)


def sqrt(x, prec: int = DEFAULT_PRECISION) -> RealEnclosure:
    return enclosure(x, prec).sqrt()


def emax(a: RealEnclosure, b) -> RealEnclosure:
    b = _coerce(b, a.prec)
    a = _coerce(a, b.prec)
    return RealEnclosure(_mpf_max(a._lo, b._lo), _mpf_max(a._hi, b._hi), max(a.prec, b.prec))


def as_lower(x) -> Fraction:
    return x.lower if isinstance(x, RealEnclosure) else Fraction(x)


def as_upper(x) -> Fraction:
    return x.upper if isinstance(x, RealEnclosure) else Fraction(x)


def certified_leq(a, b) -> Certainty:
    """TRUE only if ``a.upper <= b.lower``; FALSE only if ``a.lower > b.upper``."""
    if as_upper(a) <= as_lower(b):
        return Certainty.TRUE
    if as_lower(a) > as_upper(b):
        return Certainty.FALSE
    return Certainty.UNKNOWN


def certified_lt(a, b) -> Certainty:
    """Strict variant: TRUE only if ``a.upper < b.lower``."""
    if as_upper(a) < as_lower(b):
        return Certainty.TRUE
    if as_lower(a) >= as_upper(b):
        return Certainty.FALSE
    return Certainty.UNKNOWN


T = TypeVar("T")


def escalate(
    decide: Callable[[int], T],
    precision: int = DEFAULT_PRECISION,
    cap: int = DEFAULT_PRECISION_CAP,
    undecided: Callable[[T], bool] = lambda r: r is Certainty.UNKNOWN,
) -> tuple[T, int]:
    """Call ``decide(p)`` with doubling precision until it is decided or ``cap`` is hit."""
    p = _check_precision(precision)
    while True:
        result = decide(p)
        if not undecided(result) or p >= cap:
            return result, p
        p = min(2 * p, cap)


# decimal serialisation ------------------------------------------------------

def decimal_digits(prec: int) -> int:
    """Significant decimal digits used when serialising a ``prec``-bit enclosure."""
    return int(math.ceil(prec * math.log10(2))) + 3


def fraction_to_decimal(x: Fraction, digits: int, rounding: str) -> str:
    """Round ``x`` to ``digits`` significant digits toward ``"down"``/``"up"`` (-inf/+inf)."""
    x = Fraction(x)
    if x == 0:
        return "0"
    neg = x < 0
    ax = -x if neg else x
    # exponent e with 10**e <= ax < 10**(e+1)
    e = len(str(ax.numerator)) - len(str(ax.denominator))
    if ax < Fraction(10) ** e:
        e -= 1
    elif ax >= Fraction(10) ** (e + 1):
        e += 1
    scale = Fraction(10) ** (e - digits + 1)
    m = ax / scale
    toward_zero = (rounding == "down") != neg
    mant = m.numerator // m.denominator
    if not toward_zero and mant * m.denominator != m.numerator:
        mant += 1
    exp10 = e - digits + 1
    s = str(mant)
    # a carry can add a digit; keep the value exact by folding into the exponent
    digits_s = s.rstrip("0")
    exp10 += len(s) - len(digits_s)
    if not digits_s:
        digits_s = "0"
    point_exp = exp10 + len(digits_s) - 1
    body = digits_s[0] + ("." + digits_s[1:] if len(digits_s) > 1 else "")
    return f"{'-' if neg else ''}{body}e{point_exp:+d}"


def enclosure_to_strings(x: RealEnclosure, digits: int | None = None) -> list[str]:
    digits = digits or decimal_digits(x.prec)
    return [fraction_to_decimal(x.lower, digits, "down"), fraction_to_decimal(x.upper, digits, "up")]


def enclosure_from_strings(pair: Sequence[str], prec: int = DEFAULT_PRECISION) -> RealEnclosure:
    lo, hi = (Fraction(s) for s in pair)
    if lo > hi:
        raise ValueError("enclosure lower endpoint exceeds upper endpoint")
    return RealEnclosure.from_bounds(lo, hi, prec)


def fraction_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# expressions ------------------------------------------------------------------

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def enclose(expr: str, precision: int = DEFAULT_PRECISION) -> RealEnclosure:
    """Evaluate a small arithmetic expression to an enclosure.

    Accepts integers, decimal literals (taken exactly), ``pi``, ``sqrt(..)``,
    ``+ - * /`` and integer powers ``**``.
    """
    _check_precision(precision)
    value = _eval(_parse(expr), expr, precision, exact=False)
    return enclosure(value, precision)


def evaluate_rational(expr: str) -> Fraction | None:
    """Exact value of an expression free of ``sqrt``/``pi``; ``None`` otherwise."""
    try:
        value = _eval(_parse(expr), expr, DEFAULT_PRECISION, exact=True)
    except _NotRational:
        return None
    return Fraction(value)


class _NotRational(Exception):
    pass


def _parse(expr: str) -> ast.AST:
    try:
        return ast.parse(expr.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression {expr!r}") from exc


def _eval(node: ast.AST, src: str, prec: int, exact: bool):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ValueError(f"unsupported literal in {src!r}")
        if isinstance(node.value, int):
            return node.value
        text = ast.get_source_segment(src.strip(), node)
        return Fraction(text) if text else Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, src, prec, exact)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        left = _eval(node.left, src, prec, exact)
        right = _eval(node.right, src, prec, exact)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if isinstance(left, int) and isinstance(right, int):
                return Fraction(left, right)
            return left / right
        if not isinstance(right, int) and not (isinstance(right, Fraction) and right.denominator == 1):
            raise ValueError(f"only integer exponents are supported in {src!r}")
        return left ** int(right)
    if isinstance(node, ast.Name) and node.id == "pi":
        if exact:
            raise _NotRational
        return RealEnclosure.pi(prec)
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "sqrt"
        and len(node.args) == 1
        and not node.keywords
    ):
        arg = _eval(node.args[0], src, prec, exact)
        if exact:
            arg = Fraction(arg)
            if arg < 0:
                raise ValueError(f"square root of negative value in {src!r}")
            rn, rd = math.isqrt(arg.numerator), math.isqrt(arg.denominator)
            if rn * rn == arg.numerator and rd * rd == arg.denominator:
                return Fraction(rn, rd)
            raise _NotRational
        return enclosure(arg, prec).sqrt()
    raise ValueError(f"unsupported construct in expression {src!r}")


# enclosure matrices -------------------------------------------------------------

Matrix = list


def identity(d: int, prec: int = DEFAULT_PRECISION) -> Matrix:
    return [[enclosure(int(i == j), prec) for j in range(d)] for i in range(d)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for s in range(k):
                x, y = a[i][s], b[s][j]
                if _is_zero(x) or _is_zero(y):
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else 0)
        out.append(row)
    return out


def matvec(a: Matrix, v: Sequence) -> list:
    out = []
    for row in a:
        acc = None
        for x, y in zip(row, v):
            if _is_zero(x) or _is_zero(y):
                continue
            term = x * y
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else 0)
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def _is_zero(x) -> bool:
    if isinstance(x, RealEnclosure):
        return x.is_exact() and x.lower == 0
    return x == 0


def max_abs_deviation(a: Matrix, b: Matrix) -> Fraction:
    """Largest ``|a_ij - b_ij|`` upper bound over all entries."""
    worst = Fraction(0)
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            d = x - y
            if isinstance(d, RealEnclosure):
                worst = max(worst, abs(d).upper)
            else:
                worst = max(worst, abs(Fraction(d)))
    return worst


def all_contain_zero(entries: Iterable) -> bool:
    for x in entries:
        if isinstance(x, RealEnclosure):
            if not x.contains_zero():
                return False
        elif x != 0:
            return False
    return True
