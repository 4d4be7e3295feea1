import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_quadric_point
from quadapprox.arith import enclose, enclosure, matmul, matvec, transpose
from quadapprox.errors import SurfaceResidualError
from quadapprox.forms import QuadraticForm, compute_constants
from quadapprox.transforms import (
    Membership,
    SurfacePoint,
    TransformStack,
    body_membership,
    boost,
    boost_factored,
    check_surface,
    cholesky_W,
    lorentz_value,
    rotation_to,
)

P = 128
TOL = Fraction(1, 2 ** 50)


def _close(x, target=0, tol=TOL) -> bool:
    x = enclosure(x, P)
    return x.contains(target) and x.width < tol


def _identity_close(A, tol=TOL) -> bool:
    return all(_close(A[i][j], int(i == j), tol) for i in range(len(A)) for j in range(len(A)))


def _gram_enc(gram):
    return [[enclosure(x, P) for x in row] for row in gram]


def _det(A):
    n = len(A)
    total = enclosure(0, P)
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = enclosure(sign, P)
        for i in range(n):
            term = term * A[i][perm[i]]
        total = total + term
    return total


@pytest.mark.parametrize("gram", [[[1, 0], [0, 2]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[2, 1], [1, 2]],
                                  [[3, 1, 0], [1, 2, 1], [0, 1, 4]]])
def test_cholesky_identity(gram):
    f = QuadraticForm(gram)
    W = cholesky_W(f, P)
    prod = matmul(matmul(transpose(W), _gram_enc(gram)), W)
    assert _identity_close(prod)
    assert all(W[i][j].is_exact() and W[i][j].lower == 0 for i in range(f.n) for j in range(i))


def test_cholesky_diagonal_cases():
    W = cholesky_W(QuadraticForm.diagonal(1, 2), P)
    assert W[0][0].contains(1) and W[0][1].contains(0)
    assert W[1][1].contains(1 / enclose("sqrt(2)"))
    W = cholesky_W(QuadraticForm.identity(3), P)
    assert _identity_close(W)


def test_rotation_examples():
    R = rotation_to([0, 0, 1], P)
    assert _identity_close(R, Fraction(1, 2 ** 100))
    R = rotation_to([1, 0], P)
    assert [[float(x) for x in row] for row in R] == [[0.0, 1.0], [1.0, 0.0]]
    s = 1 / enclose("sqrt(3)")
    beta = [s, s, s]
    R = rotation_to(beta, P)
    assert _identity_close(matmul(transpose(R), R))
    Re = matvec(R, [0, 0, 1])
    assert all(_close(Re[i] - beta[i]) for i in range(3))


def test_rotation_near_antipode():
    eps = Fraction(1, 10 ** 6)
    x = enclosure(1 - eps * eps, P).sqrt()
    beta = [enclosure(eps, P), -x]
    R = rotation_to(beta, P)
    assert _identity_close(matmul(transpose(R), R))
    Re = matvec(R, [0, 1])
    assert _close(Re[0] - beta[0]) and _close(Re[1] - beta[1])


def test_boost_examples():
    assert _identity_close(boost(1, 2, P))
    G = boost(2, 2, P)
    assert G[1][1].contains(Fraction(5, 4)) and G[1][2].contains(Fraction(3, 4))
    assert G[2][1].contains(Fraction(3, 4)) and G[2][2].contains(Fraction(5, 4))
    assert G[0][0].contains(1) and G[0][1].contains(0)
    with pytest.raises(ValueError):
        boost(0, 2, P)


@given(st.lists(st.integers(-100, 100), min_size=4, max_size=4),
       st.fractions(min_value=Fraction(1, 100), max_value=100, max_denominator=1000))
def test_boost_preserves_lorentz_form(z, t):
    G = boost(t, 3, P)
    assert _close(lorentz_value(matvec(G, z)) - lorentz_value(z), 0, Fraction(1, 2 ** 40))
    F = boost_factored(t, 3, P)
    assert all(_close(F[i][j] - G[i][j]) for i in range(4) for j in range(4))


@given(st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=100),
       st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=100))
def test_boost_group_law(t, s):
    lhs = matmul(boost(t, 2, P), boost(s, 2, P))
    rhs = boost(t * s, 2, P)
    assert all(enclosure(lhs[i][j], P).intersects(enclosure(rhs[i][j], P)) for i in range(3) for j in range(3))


def _stacks(rng, count):
    forms = [QuadraticForm(g) for g in ([[1, 0], [0, 1]], [[1, 0], [0, 2]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                                        [[1, 0, 0], [0, 1, 0], [0, 0, 2]])]
    for _ in range(count):
        f = rng.choice(forms)
        alpha = SurfacePoint.rational(random_quadric_point(f, rng))
        t = Fraction(rng.randint(1, 400), rng.randint(1, 40))
        yield f, alpha, TransformStack.build(f, alpha, t, P)


def test_stack_invariants():
    rng = random.Random(7)
    for f, alpha, s in _stacks(rng, 25):
        n = f.n
        assert _identity_close(matmul(s.M, s.M_inv), Fraction(1, 2 ** 40))
        # volume of the body equals twice the volume of the ellipsoid f <= 1
        c = compute_constants(f, P)
        vol = abs(_det(s.M)) * 2 * c.o_n
        assert vol.intersects(2 * c.v_f)
        # alpha_bar = W beta_bar, beta_bar = R e_bar, t beta_bar = R G_t e_bar
        beta_bar = list(s.beta) + [1]
        alpha_bar = list(s.alpha_hat) + [1]
        e_bar = [0] * (n - 1) + [1, 1]
        lhs = matvec(s.W_lift, beta_bar)
        assert all(enclosure(lhs[i] - alpha_bar[i], P).contains(0) for i in range(n + 1))
        lhs = matvec(s.R_lift, e_bar)
        assert all(enclosure(lhs[i] - beta_bar[i], P).contains(0) for i in range(n + 1))
        lhs = matvec(matmul(s.R_lift, s.G), e_bar)
        assert all(enclosure(lhs[i] - s.t * beta_bar[i], P).contains(0) for i in range(n + 1))
        # F(M z) = F_0(z)
        for _ in range(3):
            z = [rng.randint(-9, 9) for _ in range(n + 1)]
            Mz = matvec(s.M, z)
            assert f.lift()(Mz).intersects(enclosure(lorentz_value(z), P))


def test_gauge_routes_agree():
    rng = random.Random(11)
    for f, alpha, s in _stacks(rng, 20):
        for _ in range(5):
            g = [rng.randint(-20, 20) for _ in range(f.n + 1)]
            assert s.gauge(g).intersects(s.gauge_matrix(g))


def test_membership_examples():
    f = QuadraticForm.identity(2)
    s = TransformStack.build(f, SurfacePoint.rational([0, 1]), 1, P)
    assert body_membership([0, 0, 0], s) is Membership.INSIDE
    assert body_membership([0, 0, 2], s) is Membership.OUTSIDE
    assert body_membership([Fraction(1, 2), 0, Fraction(1, 2)], s) is Membership.INSIDE
    assert body_membership([1, 0, 0], s) is Membership.OUTSIDE
    assert body_membership([1, 0, 0], s, 3) is Membership.INSIDE


def test_surface_check():
    f = QuadraticForm.identity(2)
    check_surface(f, SurfacePoint.rational([Fraction(3, 5), Fraction(4, 5)]))
    check_surface(f, SurfacePoint.from_exprs(["sqrt(2)/2", "1/sqrt(2)"]))
    with pytest.raises(SurfaceResidualError):
        check_surface(f, SurfacePoint.rational([Fraction(1, 2), Fraction(1, 2)]))
    p = SurfacePoint.from_exprs(["3/5", "0.8"])
    assert p.exact and p.on_surface(f)
    assert SurfacePoint.from_json(p.to_json()) == p
