import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadapprox.arith import enclosure
from quadapprox.errors import BudgetExceeded
from quadapprox.forms import unit_ball_volume
from quadapprox.lattice import (
    CylinderBody,
    IndependenceTracker,
    canonical,
    enumerate_gauge_ball,
    first_minimum_below_one,
    integer_rank,
    lll_minima,
    reduce,
    successive_minima_points,
    tie_key,
)


def _gauge2(inverse, v) -> Fraction:
    """Oracle: exact squared gauge, max(y^2, |x|^2)."""
    w = [sum(Fraction(a) * b for a, b in zip(row, v)) for row in inverse]
    return max(w[-1] ** 2, sum(x * x for x in w[:-1]))


def _box_minima(M, inverse, box):
    """Oracle: successive minima (squared) by exhaustive search over a box."""
    d = len(M)
    pts = []
    for v in itertools.product(range(-box, box + 1), repeat=d):
        if any(v):
            pts.append((_gauge2(inverse, v), v))
    pts.sort()
    tracker = IndependenceTracker(d)
    out = []
    for g2, v in pts:
        if tracker.add(v):
            out.append(g2)
            if len(out) == d:
                break
    return out


def _random_unimodular(rng, d, steps=6):
    U = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(steps):
        i, j = rng.sample(range(d), 2)
        k = rng.choice([-2, -1, 1, 2])
        for r in range(d):
            U[r][i] += k * U[r][j]
    return U


def test_identity_body():
    body = CylinderBody.identity(3)
    red = reduce(body)
    assert red.basis == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    m = successive_minima_points(body)
    assert all(g.contains(1) for g in m.minima) and m.exact
    assert sorted(m.vectors) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert first_minimum_below_one(body) is None


def test_diagonal_scaling():
    M = [[Fraction(1, 2), 0, 0], [0, 1, 0], [0, 0, 3]]
    body = CylinderBody.from_matrix(M)
    m = successive_minima_points(body)
    assert m.vectors == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    assert m.minima[0].contains(Fraction(1, 3))
    assert m.minima[1].contains(1)
    assert m.minima[2].contains(2)
    assert first_minimum_below_one(body) == (0, 0, 1)


def test_contraction_finds_all_directions():
    body = CylinderBody.from_matrix([[2, 0, 0], [0, 2, 0], [0, 0, 2]])
    m = successive_minima_points(body)
    assert all(g.contains(Fraction(1, 2)) for g in m.minima)
    # tie-break: smaller l1 norm first, then lexicographic
    assert first_minimum_below_one(body) == (0, 0, 1)


def test_boundary_point_is_not_inside():
    body = CylinderBody.from_matrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert first_minimum_below_one(body, dilation=1) is None
    assert first_minimum_below_one(body, dilation=Fraction(3, 2)) == (0, 0, 1)


@pytest.mark.parametrize("seed", range(8))
def test_minima_against_box_oracle(seed):
    rng = random.Random(seed)
    d = rng.choice([2, 3])
    U = _random_unimodular(rng, d)
    D = [Fraction(rng.randint(1, 6), rng.randint(1, 4)) for _ in range(d)]
    M = [[U[i][j] * D[j] for j in range(d)] for i in range(d)]
    body = CylinderBody.from_matrix(M)
    m = successive_minima_points(body)
    # gauge <= R forces |M^{-1} v|_2 <= sqrt(2) R, hence |v_i| <= sqrt(2) R sum_j |M_ij|
    R = max(float(g.upper) for g in m.minima)
    box = math.ceil(math.sqrt(2) * R * max(sum(abs(x) for x in row) for row in M)) + 1
    oracle = _box_minima(M, body.inverse, min(box, 12 if d == 3 else 40))
    for g, o2 in zip(m.minima, oracle):
        assert g.square().contains(o2)
    assert integer_rank(m.vectors) == d


def test_unimodular_scramble_keeps_minima():
    # v = U w is a bijection of Z^d, so U D K and D K have the same minima
    rng = random.Random(3)
    for _ in range(10):
        d = rng.choice([2, 3])
        U = _random_unimodular(rng, d, steps=10)
        D = [Fraction(rng.randint(1, 7), rng.randint(1, 7)) for _ in range(d)]
        base = CylinderBody.from_matrix([[D[i] if i == j else 0 for j in range(d)] for i in range(d)])
        scrambled = CylinderBody.from_matrix([[U[i][j] * D[j] for j in range(d)] for i in range(d)])
        m0 = successive_minima_points(base)
        m1 = successive_minima_points(scrambled)
        for a, b in zip(m0.minima, m1.minima):
            assert a.intersects(b)


def test_minkowski_bounds():
    rng = random.Random(5)
    for _ in range(10):
        d = rng.choice([2, 3, 4])
        U = _random_unimodular(rng, d)
        D = [Fraction(rng.randint(1, 5), rng.randint(1, 5)) for _ in range(d)]
        M = [[U[i][j] * D[j] for j in range(d)] for i in range(d)]
        body = CylinderBody.from_matrix(M)
        m = successive_minima_points(body)
        det = abs(math.prod(D))
        vol = enclosure(det, 128) * 2 * unit_ball_volume(d - 1, 128)
        prod = m.minima[0]
        for g in m.minima[1:]:
            prod = prod * g
        prod = prod * vol
        assert prod.lower <= 2 ** d
        assert prod.upper >= Fraction(2 ** d, math.factorial(d))


def test_lll_minima_bound_exact_ones():
    rng = random.Random(9)
    for _ in range(10):
        U = _random_unimodular(rng, 3)
        D = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(3)]
        M = [[U[i][j] * D[j] for j in range(3)] for i in range(3)]
        body = CylinderBody.from_matrix(M)
        exact = successive_minima_points(body)
        approx = lll_minima(body)
        assert not approx.exact
        assert approx.minima[0].upper >= exact.minima[0].lower
        assert integer_rank(approx.vectors) == 3


def test_enumeration_budget():
    body = CylinderBody.from_matrix([[50, 0, 0], [0, 50, 0], [0, 0, 50]])
    with pytest.raises(BudgetExceeded):
        enumerate_gauge_ball(body, 1.0, max_points=1000)


def test_enumeration_matches_box():
    M = [[3, 1, 0], [0, 2, 1], [1, 0, 2]]
    body = CylinderBody.from_matrix(M)
    found = {v for _, v in enumerate_gauge_ball(body, 1.0)}
    oracle = set()
    for v in itertools.product(range(-6, 7), repeat=3):
        if any(v) and _gauge2(body.inverse, v) <= 1:
            oracle.add(canonical(v))
    assert found == oracle


@settings(max_examples=40)
@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3).filter(any))
def test_canonical_and_tie_key(v):
    c = canonical(v)
    assert c == canonical([-x for x in v])
    assert next(x for x in c if x) > 0
    assert tie_key(c)[0] == sum(abs(x) for x in v)
