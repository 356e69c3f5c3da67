import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from su4sym.cyclo import (
    CycloNumber,
    cyclotomic_poly,
    euler_phi,
    from_rational,
    qnumber,
    qnumber_frac,
    sqrt_int,
    to_float,
    zeta,
)

CONDUCTORS = [1, 3, 4, 5, 6, 8, 12, 16, 24]


def test_cyclotomic_polynomials():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(2) == (1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(8) == (1, 0, 0, 0, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    # the three conductors carrying the s-matrices
    for m in (128, 160, 192):
        assert euler_phi(m) == 64
        assert len(cyclotomic_poly(m)) == 65


def test_roots_of_unity():
    assert zeta(4) ** 2 == -1
    assert zeta(8) ** 8 == 1
    assert zeta(5) ** 5 == 1
    assert sum((zeta(7, k) for k in range(1, 7)), from_rational(0)) == -1
    z = zeta(12)
    assert z ** 6 == -1
    assert z * z.conjugate() == 1


def test_cross_conductor_equality():
    assert zeta(3) == zeta(6) ** 2
    assert zeta(4) == zeta(8) ** 2
    assert zeta(5) == zeta(10) ** 2
    assert from_rational(Fraction(1, 2)) == zeta(6) - zeta(12) ** 2 + Fraction(1, 2) - zeta(6) + zeta(12) ** 2


def test_square_roots():
    for n in (2, 3, 5, 8, 10, 12, 20, 45):
        r = sqrt_int(n)
        assert r * r == n
        assert abs(to_float(r) - math.sqrt(n)) < 1e-12
    with pytest.raises(ValueError):
        sqrt_int(7)


def test_qnumber_values():
    kappa = 8
    assert qnumber(0, kappa).is_zero()
    assert qnumber(1, kappa) == 1
    assert qnumber(kappa, kappa).is_zero()
    for n in range(1, 16):
        approx = math.sin(n * math.pi / kappa) / math.sin(math.pi / kappa)
        assert abs(to_float(qnumber(n, kappa)) - approx) < 1e-12
    # [2][n] = [n-1] + [n+1]
    for n in range(1, 10):
        assert qnumber(2, kappa) * qnumber(n, kappa) == qnumber(n - 1, kappa) + qnumber(n + 1, kappa)


def test_qnumber_frac_agrees_on_integers():
    for kappa in (8, 10, 14):
        for n in range(0, 6):
            assert qnumber_frac(Fraction(n), kappa) == qnumber(n, kappa)


def test_qnumber_frac_half_integers():
    kappa = 14
    x = Fraction(7, 2)
    approx = math.sin(float(x) * math.pi / kappa) / math.sin(math.pi / kappa)
    assert abs(to_float(qnumber_frac(x, kappa)) - approx) < 1e-12


def test_serialization_round_trip():
    x = zeta(12) * Fraction(3, 7) - zeta(12) ** 3 + Fraction(2, 5)
    obj = x.to_json()
    assert obj["conductor"] == 12
    assert all(isinstance(s, str) for s in obj["coeffs"])
    assert CycloNumber.from_json(obj) == x


small_fracs = st.fractions(
    min_value=-4, max_value=4, max_denominator=6
)


@st.composite
def cyclos(draw):
    m = draw(st.sampled_from(CONDUCTORS))
    coeffs = draw(
        st.lists(small_fracs, min_size=euler_phi(m), max_size=euler_phi(m))
    )
    return CycloNumber(m, coeffs)


@settings(max_examples=60, deadline=None)
@given(cyclos(), cyclos(), cyclos())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + 0 == a
    assert a * 1 == a
    assert a - a == from_rational(0)


@settings(max_examples=40, deadline=None)
@given(cyclos())
def test_multiplicative_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == 1
        assert (1 / a) * a == 1


@settings(max_examples=40, deadline=None)
@given(cyclos(), cyclos())
def test_conjugation_is_a_ring_map(a, b):
    assert (a + b).conjugate() == a.conjugate() + b.conjugate()
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert a.conjugate().conjugate() == a


@settings(max_examples=40, deadline=None)
@given(cyclos())
def test_complex_embedding_respects_conjugation(a):
    z = a.complex_value()
    w = a.conjugate().complex_value()
    assert abs(z.conjugate() - w) < 1e-9


@settings(max_examples=40, deadline=None)
@given(cyclos())
def test_serialization_survives(a):
    assert CycloNumber.from_json(a.to_json()) == a


@settings(max_examples=40, deadline=None)
@given(cyclos(), st.integers(min_value=0, max_value=2))
def test_promotion_preserves_value(a, i):
    m = a.conductor * (2, 3, 5)[i]
    b = a.promote(m)
    assert b.conductor == m
    assert b == a
    assert abs(b.complex_value() - a.complex_value()) < 1e-9


def test_galois_orbit_of_sqrt5():
    r = sqrt_int(5)
    assert r.galois(2) == -r  # 2 is not a square mod 5
    assert r.galois(4) == r


def test_rational_detection():
    x = zeta(8) + zeta(8, 7)  # sqrt(2), not rational
    assert not x.is_rational()
    y = x * x
    assert y.is_rational() and y.rational_value() == 2
    with pytest.raises(ValueError):
        x.rational_value()
