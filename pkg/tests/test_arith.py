from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadapprox.arith import (
    Certainty,
    RealEnclosure,
    certified_leq,
    certified_lt,
    enclose,
    enclosure,
    enclosure_from_strings,
    enclosure_to_strings,
    escalate,
    evaluate_rational,
    fraction_to_decimal,
    parse_rational,
    rational_add,
    rational_cmp,
    rational_div,
    rational_mul,
)

fractions = st.fractions(max_denominator=10 ** 6).filter(lambda x: abs(x) < 10 ** 6)


def test_rational_examples():
    assert rational_add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)
    assert rational_add(rational_mul(Fraction(3, 5), Fraction(3, 5)),
                        rational_mul(Fraction(4, 5), Fraction(4, 5))) == 1
    assert rational_cmp(Fraction(2, 3), Fraction(3, 4)) == -1
    assert rational_cmp(Fraction(3, 4), Fraction(3, 4)) == 0


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        rational_div(Fraction(1), Fraction(0))
    with pytest.raises(ZeroDivisionError):
        enclosure(1) / enclose("sqrt(2) - sqrt(2)")


def test_parse_rational():
    assert parse_rational("3/5") == Fraction(3, 5)
    assert parse_rational("0.6") == Fraction(3, 5)
    assert parse_rational(" -7 ") == -7
    with pytest.raises(ValueError):
        parse_rational("abc")


def test_sqrt2_width_and_containment():
    x = enclose("sqrt(2)", 64)
    assert x.width <= Fraction(1, 2 ** 60)
    assert x.lower < Fraction(141421356237, 10 ** 11) + Fraction(1, 10 ** 11)
    assert x.lower ** 2 <= 2 <= x.upper ** 2


def _mp_fraction(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(man) * Fraction(2) ** exp


def test_pi_enclosure():
    p = RealEnclosure.pi(128)
    with mpmath.workprec(400):
        ref = _mp_fraction(mpmath.pi)
    # the 400-bit reference is within 2^-398 of pi, far inside the 128-bit width
    assert p.lower <= ref <= p.upper
    assert p.contains(Fraction(314159265358979323846264, 10 ** 23)) is False
    assert float(p) == pytest.approx(3.14159265358979)


def test_square_of_sqrt_contains_two():
    assert enclose("sqrt(2)**2").contains(2)
    assert (enclose("sqrt(2)") * enclose("sqrt(2)")).contains(2)


def test_certified_leq_examples():
    a = RealEnclosure.from_bounds(Fraction(1), Fraction(11, 10))
    b = RealEnclosure.from_bounds(Fraction(2), Fraction(21, 10))
    c = RealEnclosure.from_bounds(Fraction(3), Fraction(31, 10))
    d = RealEnclosure.from_bounds(Fraction(1), Fraction(2))
    e = RealEnclosure.from_bounds(Fraction(3, 2), Fraction(8, 5))
    assert certified_leq(a, b) is Certainty.TRUE
    assert certified_leq(c, a) is Certainty.FALSE
    assert certified_leq(d, e) is Certainty.UNKNOWN


def test_certainty_is_not_boolean():
    with pytest.raises(TypeError):
        bool(Certainty.UNKNOWN)


def test_certified_lt_strictness():
    one = enclosure(1)
    assert certified_leq(one, 1) is Certainty.TRUE
    assert certified_lt(one, 1) is Certainty.FALSE


def test_escalate_stops_when_decided():
    seen = []

    def decide(p):
        seen.append(p)
        return Certainty.TRUE if p >= 256 else Certainty.UNKNOWN

    res, p = escalate(decide, 64, 1024)
    assert res is Certainty.TRUE and p == 256 and seen == [64, 128, 256]
    res, p = escalate(lambda p: Certainty.UNKNOWN, 64, 256)
    assert res is Certainty.UNKNOWN and p == 256


def test_precision_floor():
    with pytest.raises(ValueError):
        enclose("1", 16)


def test_expression_grammar():
    assert evaluate_rational("1/3 + 2**3") == Fraction(25, 3)
    assert evaluate_rational("0.25") == Fraction(1, 4)
    assert evaluate_rational("sqrt(2)") is None
    assert abs(float(enclose("pi/4")) - 0.7853981633974483) < 1e-15
    with pytest.raises((ValueError, SyntaxError)):
        enclose("__import__('os')")


def test_decimal_serialisation_is_outward():
    x = enclose("sqrt(2)", 128)
    lo, hi = enclosure_to_strings(x)
    assert Fraction(lo) <= x.lower and Fraction(hi) >= x.upper
    back = enclosure_from_strings([lo, hi], 128)
    assert back.lower <= x.lower and back.upper >= x.upper
    assert fraction_to_decimal(Fraction(1, 3), 3, "down") == "3.33e-1"
    assert fraction_to_decimal(Fraction(1, 3), 3, "up") == "3.34e-1"
    assert fraction_to_decimal(Fraction(-1, 3), 3, "down") == "-3.34e-1"
    assert fraction_to_decimal(Fraction(1500000), 5, "up") == "1.5e+6"


@given(fractions, fractions)
def test_rational_and_enclosure_arithmetic_agree(a, b):
    ea, eb = enclosure(a), enclosure(b)
    assert (ea + eb).contains(a + b)
    assert (ea - eb).contains(a - b)
    assert (ea * eb).contains(a * b)
    if b != 0:
        assert (ea / eb).contains(a / b)


@given(st.fractions(min_value=0, max_value=10 ** 4, max_denominator=10 ** 4))
def test_sqrt_contains_and_refines(a):
    lo = enclosure(a, 64).sqrt()
    hi = enclosure(a, 256).sqrt()
    assert lo.lower ** 2 <= a <= lo.upper ** 2
    assert hi.lower ** 2 <= a <= hi.upper ** 2
    # higher precision stays inside the lower-precision result
    assert lo.lower <= hi.lower and hi.upper <= lo.upper
    assert hi.width <= lo.width


@given(st.integers(min_value=-10 ** 40, max_value=10 ** 40))
def test_integers_are_exact(k):
    assert enclosure(k, 256).is_exact()
