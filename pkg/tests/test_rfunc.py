import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charsum.errors import ConfigError, IrreducibilityUnverified
from charsum.ffield import make_field
from charsum.rfunc import (FactoredRational, MPoly, absolute_form, assoc_scalar, is_dth_power_free,
                           is_perfect_dth_power, parse_poly, parse_rational, poly_to_literal,
                           product_of_translates, rational_to_literal, stabilizer, univariate_split)

from oracles import poly_eval

F3, F5, F7 = make_field(3), make_field(5), make_field(7)


def uni(K, coeffs):
    return MPoly.univariate(K, coeffs)


def test_evaluate_matches_integer_horner():
    f = uni(F7, [3, 0, 5, 1])
    for x in range(7):
        assert f.evaluate([x]) == poly_eval([3, 0, 5, 1], x, 7)
    assert list(f.veval(np.arange(7).reshape(-1, 1))) == [poly_eval([3, 0, 5, 1], x, 7) for x in range(7)]


def test_translate_is_substitution():
    K = make_field(5)
    x, y = MPoly.variable(K, 2, 0), MPoly.variable(K, 2, 1)
    f = x * x * y + MPoly.constant(K, 2, 3) * y + MPoly.constant(K, 2, 1)
    g = f.translate((2, 4))
    for a, b in itertools.product(range(5), repeat=2):
        assert g.evaluate((a, b)) == f.evaluate(((a + 2) % 5, (b + 4) % 5))


def test_rational_zero_or_pole():
    F = FactoredRational.make(F5, 1, [(uni(F5, [0, 1]), 1), (uni(F5, [1, 1]), -1)])
    assert F.evaluate([0]).zero_or_pole
    assert F.evaluate([4]).zero_or_pole
    assert F.evaluate([1]).value == F5.div(1, 2)
    assert list(F.vlog(np.array([[0], [4], [1]]))) [:2] == [-1, -1]


def test_merging_associates_and_cancellation():
    f = uni(F5, [1, 1])
    g = uni(F5, [2, 2])  # 2 * f
    F = FactoredRational.make(F5, 1, [(f, 1), (g, -1)])
    M = F.merged()
    assert M.factors == () and M.c == F5.inv(2)
    assert assoc_scalar(f, g) == 2
    assert assoc_scalar(f, uni(F5, [1, 2])) is None
    zero = MPoly.from_dict(F5, 1, {})
    assert assoc_scalar(zero, zero) == 1


def test_split_x2_plus_1():
    sp = univariate_split(F3, uni(F3, [1, 0, 1]))
    assert sp.e == 2 and sum(m for _, m in sp.roots) == 2
    sp5 = univariate_split(F5, uni(F5, [1, 0, 1]))
    assert sp5.e == 1 and sorted(r for r, _ in sp5.roots) == [2, 3]


def test_perfect_power_and_power_free():
    x = uni(F5, [0, 1])
    assert is_perfect_dth_power(FactoredRational.make(F5, 1, [(x, 2)]), 2)
    assert not is_perfect_dth_power(FactoredRational.from_poly(x), 2)
    # (x^2+1)^2 over F_3 is a square, x^2+1 alone is square-free
    q = uni(F3, [1, 0, 1])
    assert is_perfect_dth_power(FactoredRational.make(F3, 1, [(q, 2)]), 2)
    assert is_dth_power_free(FactoredRational.from_poly(q), 2)
    # x^2 is not 2nd-power-free; (x+1)^2 written as x^2+2x+1 is caught only after splitting
    assert not is_dth_power_free(FactoredRational.from_poly(uni(F5, [1, 2, 1])), 2)
    assert is_perfect_dth_power(FactoredRational.from_poly(uni(F5, [1, 2, 1])), 2)


def test_multivariate_requires_assertion():
    K = F3
    f = MPoly.from_dict(K, 2, {(1, 1): 1, (0, 0): 1})
    F = FactoredRational.from_poly(f)
    with pytest.raises(IrreducibilityUnverified):
        absolute_form(F)
    G, _ = absolute_form(FactoredRational.from_poly(f, absolutely_irreducible=True))
    assert G.factors[0][1] == 1


def test_stabilizers():
    assert stabilizer(FactoredRational.from_poly(uni(F5, [0, 1]))) == [(0,)]
    # x^3 - x over F_3 is invariant under all of F_3
    assert len(stabilizer(FactoredRational.from_poly(uni(F3, [0, 2, 0, 1])), 1)) == 3
    assert len(stabilizer(FactoredRational.from_poly(uni(F3, [0, 2, 0, 1])), 2)) == 3


def test_product_of_translates_square():
    F = FactoredRational.from_poly(uni(F5, [0, 1]))
    G = product_of_translates(F, [((1,), 1), ((1,), 1), ((3,), -1), ((3,), -1)])
    assert is_perfect_dth_power(G, 2)
    H = product_of_translates(F, [((1,), 1), ((2,), 1), ((3,), -1), ((3,), -1)])
    assert not is_perfect_dth_power(H, 2)


def test_literal_roundtrip_and_errors():
    lit = [[[2], 1], [[0], 1]]
    f = parse_poly(F5, 1, lit)
    assert parse_poly(F5, 1, poly_to_literal(f)) == f
    F = parse_rational(F5, 1, {"numerator": [[[1], 1]], "denominator": [[[1], 1], [[0], 1]]})
    assert parse_rational(F5, 1, rational_to_literal(F)).same_function(F)
    with pytest.raises(ConfigError, match=r"poly\[1\]"):
        parse_poly(F5, 1, [[[1], 1], [[1, 2], 1]])
    with pytest.raises(ConfigError, match="coefficient"):
        parse_poly(F5, 1, [[[1], "a"]])
    with pytest.raises(ConfigError, match="n = 1"):
        parse_rational(F5, 2, {"numerator": [[[1, 0], 1]]})


coeff_lists = st.lists(st.integers(0, 6), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, coeff_lists, st.integers(0, 6))
def test_ring_ops_pointwise(a, b, m):
    f, g = uni(F7, a), uni(F7, b)
    for x in range(7):
        fx, gx = f.evaluate([x]), g.evaluate([x])
        assert (f * g).evaluate([x]) == F7.mul(fx, gx)
        assert (f + g).evaluate([x]) == F7.add(fx, gx)
        assert (f - g).evaluate([x]) == F7.sub(fx, gx)
        assert f.translate([m]).evaluate([x]) == f.evaluate([(x + m) % 7])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.sampled_from([1, -1])), min_size=1, max_size=4))
def test_perfect_square_iff_even_root_multiplicities(offs):
    F = FactoredRational.from_poly(uni(F5, [0, 1]))
    G = product_of_translates(F, [((m,), a) for m, a in offs])
    mult = {}
    for m, a in offs:
        mult[m] = mult.get(m, 0) + a
    assert is_perfect_dth_power(G, 2) == all(v % 2 == 0 for v in mult.values())
