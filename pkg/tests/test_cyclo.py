import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from charsum.cyclo import CycloInt, cyclo_abs, cyclo_add, cyclo_conj, cyclo_mul, cyclotomic_poly


def test_cyclotomic_polys():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(2) == (1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)


def test_roots_of_unity_sum_to_zero():
    for D in (2, 3, 4, 6, 12):
        assert CycloInt.from_counts(D, [1] * D) == CycloInt.zero(D)


def test_zeta_order():
    z = CycloInt.zeta_power(12, 1)
    assert z**12 == CycloInt.one(12)
    assert z**6 == -CycloInt.one(12)


def test_abs_and_json():
    z = CycloInt.from_counts(4, [0, 1])  # i
    assert abs(z) == pytest.approx(1.0)
    assert z.norm_squared() == CycloInt.one(4)
    j = z.to_json()
    assert j["coeffs"] == [0, 1] and j["im"] == pytest.approx(1.0)


def test_galois_needs_unit():
    with pytest.raises(ValueError):
        CycloInt.one(6).galois(2)


def test_mismatched_orders():
    with pytest.raises(ValueError):
        CycloInt.one(4) + CycloInt.one(6)


def test_functional_aliases():
    a = CycloInt.zeta_power(6, 1)
    b = CycloInt.zeta_power(6, 2)
    assert cyclo_add(a, b) == a + b
    assert cyclo_mul(a, b) == CycloInt.zeta_power(6, 3)
    assert cyclo_conj(a) == CycloInt.zeta_power(6, 5)
    assert cyclo_abs(a) == pytest.approx(1.0)


orders = st.sampled_from([2, 3, 4, 5, 6, 8, 12])


@st.composite
def elems(draw, D=None):
    D = D or draw(orders)
    counts = draw(st.lists(st.integers(-5, 5), min_size=D, max_size=D))
    return CycloInt.from_counts(D, counts)


@st.composite
def pairs(draw):
    D = draw(orders)
    return draw(elems(D)), draw(elems(D)), draw(elems(D))


@settings(max_examples=80, deadline=None)
@given(pairs())
def test_ring_axioms_match_complex(abc):
    a, b, c = abc
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert cmath.isclose((a * b).to_complex(), a.to_complex() * b.to_complex(), abs_tol=1e-8)
    assert cmath.isclose(a.conj().to_complex(), a.to_complex().conjugate(), abs_tol=1e-8)


@settings(max_examples=60, deadline=None)
@given(pairs(), st.integers(1, 30))
def test_galois_is_ring_automorphism(abc, u):
    a, b, _ = abc
    if math.gcd(u, a.D) != 1:
        return
    assert (a * b).galois(u) == a.galois(u) * b.galois(u)
    assert (a + b).galois(u) == a.galois(u) + b.galois(u)


@settings(max_examples=60, deadline=None)
@given(elems())
def test_norm_squared_is_real_nonnegative(a):
    z = a.norm_squared().to_complex()
    assert abs(z.imag) < 1e-8 and z.real > -1e-8
    assert z.real == pytest.approx(abs(a) ** 2, abs=1e-6)
