import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadapprox.errors import DimensionError, FormError
from quadapprox.forms import (
    QuadraticForm,
    bilinear,
    compute_constants,
    evaluate,
    is_positive_definite,
    load_form,
    unit_ball_volume,
)

vec3 = st.lists(st.integers(-50, 50), min_size=3, max_size=3)


def test_evaluate_examples():
    f0 = QuadraticForm.identity(2)
    assert evaluate(f0, [Fraction(3, 5), Fraction(4, 5)]) == 1
    f = QuadraticForm.diagonal(1, 2)
    assert evaluate(f, [1, 2]) == 9
    assert evaluate(f.lift(), [1, 2, 3]) == 0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        evaluate(QuadraticForm.identity(2), [1, 2, 3])
    with pytest.raises(DimensionError):
        bilinear(QuadraticForm.identity(2).lift(), [1, 0], [0, 1, 0])


def test_bilinear_examples():
    F0 = QuadraticForm.identity(2).lift()
    assert bilinear(F0, (1, 0, 0), (0, 0, 1)) == 0
    assert bilinear(F0, (1, 0, 1), (1, 0, 1)) == 0
    F = QuadraticForm.diagonal(1, 2).lift()
    u, v = (1, 2, 3), (1, 0, 0)
    # oracle: polarisation by hand
    oracle = Fraction(F([a + b for a, b in zip(u, v)]) - F(u) - F(v), 2)
    assert oracle == 1
    assert bilinear(F, u, v) == 1


def test_positive_definite_examples():
    assert is_positive_definite([[1, 0], [0, 2]])
    assert not is_positive_definite([[1, 2], [2, 1]])
    assert is_positive_definite([[2, 1], [1, 2]])
    with pytest.raises(FormError):
        is_positive_definite([[1, 2], [3, 1]])


def test_form_rejects_bad_input():
    with pytest.raises(FormError):
        QuadraticForm([[1, 2], [2, 1]])
    with pytest.raises(FormError):
        QuadraticForm([[1, 0.5], [0.5, 1]])
    with pytest.raises(FormError):
        QuadraticForm([[1, 0, 0], [0, 1, 0]])


def test_form_json(tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"n": 2, "gram": [[2, 1], [1, 2]]}))
    f = load_form(p)
    assert f.gram == ((2, 1), (1, 2))
    assert QuadraticForm.from_json(f.to_json()) == f
    p.write_text(json.dumps({"n": 3, "gram": [[2, 1], [1, 2]]}))
    with pytest.raises(FormError):
        load_form(p)
    p.write_text(json.dumps({"n": 2, "gram": [[2, 1], [0, 2]]}))
    with pytest.raises(FormError):
        load_form(p)


def _mp(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(man) * Fraction(2) ** exp


def test_constants_circle_against_oracle():
    c = compute_constants(QuadraticForm.identity(2), 128)
    with mpmath.workprec(300):
        pi = mpmath.pi
        C = 15552 / pi ** 3
        kappa = 6 * C ** 2
        pi_f, C_f, k_f = _mp(pi), _mp(C), _mp(kappa)
    assert c.v_f.lower <= pi_f <= c.v_f.upper
    assert c.C_f.lower <= C_f <= c.C_f.upper
    assert c.kappa_f.lower <= k_f <= c.kappa_f.upper
    assert float(c.C_f) == pytest.approx(501.5759, rel=1e-6)
    assert float(c.kappa_f) == pytest.approx(1.50947e6, rel=1e-5)


def test_constants_sphere_against_oracle():
    c = compute_constants(QuadraticForm.identity(3), 128)
    with mpmath.workprec(300):
        v = 4 * mpmath.pi / 3
        C = 4 ** 4 * 6 ** 3 * 2 ** 9 / v ** 4
        v_f, C_f = _mp(v), _mp(C)
    assert c.v_f.lower <= v_f <= c.v_f.upper
    assert c.C_f.lower <= C_f <= c.C_f.upper
    assert float(c.C_f) == pytest.approx(9.1962e4, rel=1e-4)


@pytest.mark.parametrize("gram", [[[1]], [[1, 0], [0, 2]], [[2, 1], [1, 2]], [[1, 0, 0], [0, 1, 0], [0, 0, 2]],
                                  [[2, 1, 0, 0], [1, 2, 1, 0], [0, 1, 2, 1], [0, 0, 1, 2]]])
def test_constant_invariants(gram):
    f = QuadraticForm(gram)
    c = compute_constants(f, 128)
    assert c.kappa_f.lower >= 6
    assert c.kappa_f.intersects(6 * c.C_f.square())
    assert c.kappa_f.intersects(c.kappa_f_direct)
    assert c.v_f.upper <= c.o_n.upper
    rel = c.kappa_f.width / c.kappa_f.lower
    assert rel < Fraction(1, 2 ** 64)


def test_unit_ball_volumes():
    with mpmath.workprec(200):
        for n in range(1, 7):
            ref = _mp(mpmath.pi ** (mpmath.mpf(n) / 2) / mpmath.gamma(mpmath.mpf(n) / 2 + 1))
            v = unit_ball_volume(n, 128)
            assert abs(float(v) - float(ref)) < 1e-12 * float(ref)


@given(vec3, vec3, vec3, st.integers(-5, 5))
def test_bilinear_properties(u, v, w, k):
    F = QuadraticForm([[2, 1], [1, 3]]).lift()
    assert F.bilinear(u, u) == F(u)
    assert F.bilinear(u, v) == F.bilinear(v, u)
    s = [a + b for a, b in zip(u, w)]
    assert F.bilinear(s, v) == F.bilinear(u, v) + F.bilinear(w, v)
    assert F.bilinear([k * x for x in u], v) == k * F.bilinear(u, v)
    assert isinstance(F.bilinear(u, v), int)
