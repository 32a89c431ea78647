import pytest
from hypothesis import given, settings, strategies as st

from charsum.census import (census_bound_check, census_structure_check, factor_graph, lemma_constant,
                            perfect_power_census, weil_check)
from charsum.errors import BudgetExceeded, ConfigError, IrreducibilityUnverified
from charsum.ffield import make_character, make_field
from charsum.rfunc import FactoredRational, MPoly, product_of_translates
from charsum.sums import SumFamily, sum_S

from oracles import census_multiset, census_signed_roots, legendre


def rat(p, coeffs, mult=1):
    K = make_field(p)
    return FactoredRational.make(K, 1, [(MPoly.univariate(K, coeffs), mult)])


X = [0, 1]


@pytest.mark.parametrize("q", [3, 5, 7])
def test_s1_diagonal(q):
    assert perfect_power_census(rat(q, X), 2, 1).count == q


@pytest.mark.parametrize("q", [3, 5, 7])
def test_s2_counts_match_root_parity_oracle(q):
    rep = perfect_power_census(rat(q, X), 2, 2)
    assert rep.count == census_signed_roots(q, 2) == 3 * q * q - 2 * q
    # the rearrangement tuples are a strict subset: (x+a)^2/(x+b)^2 squares are extra
    assert census_multiset(q, 2) == 2 * q * q - q < rep.count


def test_extra_tuples_are_squares_by_character_constancy():
    # (x+a)^2 / (x+b)^2 with a != b: the quadratic character is 1 off the zeros/poles
    # over F_{3^5}, far beyond what a nonsquare could fake
    K = make_field(3)
    F = FactoredRational.from_poly(MPoly.univariate(K, X))
    chi = make_character(K, 2)
    G = product_of_translates(F, [((0,), 1), ((0,), 1), ((1,), -1), ((1,), -1)])
    fam = SumFamily(K, 1, (chi,), (G,), 2)
    Q = 3**5
    assert sum_S(fam, 5, [(0,)]).value.as_int() == Q - 2


def test_x_squared_negative_control():
    assert perfect_power_census(rat(5, [0, 0, 1]), 2, 1).count == 25


def test_exponents_plus_plus():
    assert perfect_power_census(rat(5, X), 2, exponents=(1, 1)).count == 5


def test_exponents_must_be_units_mod_d():
    with pytest.raises(ConfigError):
        perfect_power_census(rat(5, X), 2, exponents=(1, 2))


def test_census_budget():
    with pytest.raises(BudgetExceeded):
        perfect_power_census(rat(7, X), 2, 2, budget_limit=100)


def test_max_T_over_nonpowers_is_weil_sized():
    for q in (5, 7):
        rep = perfect_power_census(rat(q, [0, 1, 1]), 2, 1)
        assert rep.extra["max_ratio_nonpower"] <= 3


def test_multivariate_needs_flag():
    K = make_field(3)
    f = MPoly.from_dict(K, 2, {(1, 1): 1, (0, 0): 1})
    with pytest.raises(IrreducibilityUnverified):
        perfect_power_census(FactoredRational.from_poly(f), 2, 1)
    rep = perfect_power_census(FactoredRational.from_poly(f, True), 2, 1)
    assert rep.count == 9 and rep.absolutely_irreducible


def test_factor_graph_examples():
    F = rat(7, [0, 1, 1])
    for j in range(2):
        g = factor_graph(F, 2, [(3,), (3,)], (1, -1), j)
        assert g.edges == frozenset({(1, 2)})
    # x and x+1 at offsets 0 and 1: x+1 is a translate of x, so the shift +-1 matches
    assert factor_graph(F, 2, [(0,), (1,)], (1, -1), 0).edges == frozenset({(1, 2)})
    # offsets 0 and 3 for x(x+1): shifts +-3 never map {0, -1} roots onto each other
    assert factor_graph(F, 2, [(0,), (3,)], (1, -1), 0).edges == frozenset()
    assert factor_graph(rat(5, X), 2, [(0,), (1,)], (1, -1), 0).edges == frozenset()
    g = factor_graph(rat(5, X), 2, [(0,), (1,), (0,), (1,)], (1, 1, -1, -1), 0)
    assert g.isolated() == [] and g.components() == 2


def test_structure_examples():
    assert census_structure_check(rat(5, X), 2, 1)
    assert census_structure_check(rat(5, [0, 1, 1]), 2, 1)
    assert census_structure_check(rat(3, X), 2, 2)


def test_bound_check_examples():
    bc = census_bound_check(rat(5, X), 2, (1, -1))
    assert bc.count == 5 and bc.stabilizer_size == 1 and bc.passed
    cubic = rat(3, [0, 2, 0, 1])
    for e, want in ((1, 9), (2, 27)):
        bc = census_bound_check(cubic, 2, (1, -1), e)
        assert bc.stabilizer_size == 3 and bc.count == want and bc.passed
    assert lemma_constant(2, 1) == 2**3 * 2**4
    with pytest.raises(ConfigError):
        census_bound_check(rat(5, [0, 0, 1]), 2, (1, -1))


def test_weil_examples():
    rep = weil_check(rat(7, [0, 1, 1]), make_character(make_field(7), 2), (1,))
    assert rep.rows[0]["abs"] == 1.0 and rep.max_ratio == pytest.approx(7**-0.5)
    zero = weil_check(rat(5, X), make_character(make_field(5), 2), (1, 2))
    assert all(row["abs"] == 0 for row in zero.rows)
    with pytest.raises(ConfigError, match="perfect"):
        weil_check(rat(5, [0, 0, 1]), make_character(make_field(5), 2))


def test_weil_against_legendre_oracle():
    for p in (5, 7, 11, 13):
        rep = weil_check(rat(p, [0, 1, 0, 1]), make_character(make_field(p), 2), (1,))
        assert rep.rows[0]["abs"] == abs(sum(legendre(x**3 + x, p) for x in range(p)))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(0, 4))
def test_census_translation_invariant(q, t):
    t %= q
    F = rat(q, [0, 1, 1])
    G = F.translate((t,))
    assert perfect_power_census(F, 2, 1, with_sums=False).count == perfect_power_census(G, 2, 1, with_sums=False).count


def test_s1_count_is_diagonal_for_trivial_stabilizer():
    for p, coeffs in ((5, [0, 1, 1]), (7, [1, 0, 1]), (5, [0, 1, 0, 1])):
        for e in (1, 2):
            rep = perfect_power_census(rat(p, coeffs), 2, 1, e=e, with_sums=False)
            assert rep.count == p**e


def test_ratio_bounded_across_degrees():
    r1 = perfect_power_census(rat(3, X), 2, 2, e=1, with_sums=False)
    r2 = perfect_power_census(rat(3, X), 2, 2, e=2, with_sums=False)
    assert r1.ratio <= 3 and r2.ratio <= 3
