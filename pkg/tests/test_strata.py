import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from charsum.errors import BudgetExceeded, ConfigError
from charsum.ffield import make_character, make_field
from charsum.rfunc import FactoredRational, MPoly
from charsum.strata import (BoxSpec, b_power, box_count_variety, box_exceptional_count, random_variety_suite,
                            stratum_census, thresholds)
from charsum.sums import make_family

from oracles import offset_sum


def family(p, polys, d=2, trivial=False):
    K = make_field(p)
    chars = [make_character(K, 1 if trivial else d, 1, 2) for _ in polys]
    rats = [FactoredRational.from_poly(MPoly.univariate(K, c)) for c in polys]
    return make_family(K, 1, chars, rats)


def oracle_counts(p, polys, C, n=1):
    taus = [C * p ** ((n + j - 1) / 2) for j in range(n + 1)]
    counts = [0] * (n + 1)
    for xs in itertools.product(range(p), repeat=len(polys)):
        a = abs(offset_sum(p, 2, polys, xs))
        for j, tau in enumerate(taus):
            counts[j] += a > tau + 1e-9
    return counts


def test_constant_sum_has_empty_top_stratum():
    sc = stratum_census(family(7, [[0, 1, 1]]), 1, 1.0)
    assert sc.counts[1] == 0


@pytest.mark.parametrize("C", [0.5, 1.0, 3.0])
def test_F5_two_copies_of_x(C):
    sc = stratum_census(family(5, [[0, 1], [0, 1]]), 1, C)
    assert sc.counts == oracle_counts(5, [[0, 1], [0, 1]], C)
    assert sc.total == 25


def test_pinned_F5_census_at_default_C():
    sc = stratum_census(family(5, [[0, 1], [0, 1]]), 1, 3.0)
    assert sc.counts == [5, 0]
    assert sc.empirical_exponents() == [1.0, None]
    assert sc.empirical_codims() == [1.0, None]


def test_trivial_character_control():
    fam = family(5, [[0, 1], [1, 1]], trivial=True)
    sc = stratum_census(fam, 1, 0.1)
    assert sc.counts == [25, 25]


def test_thresholds_increase():
    taus = thresholds(3.0, 7, 2)
    assert taus == sorted(taus) and taus[0] == pytest.approx(3 * math.sqrt(7))
    assert thresholds(3.0, 7, 1)[0] == 3.0


def test_sampling_is_seeded():
    fam = family(7, [[0, 1, 0, 1], [0, 1, 0, 1]])
    a = stratum_census(fam, 1, 1.0, mode="sample", samples=300, seed=5)
    b = stratum_census(fam, 1, 1.0, mode="sample", samples=300, seed=5)
    c = stratum_census(fam, 1, 1.0, mode="sample", samples=300, seed=6)
    assert a.sample_hits == b.sample_hits and a.to_json() == {**b.to_json(), "wall_time": a.wall_time}
    assert a.samples == 300 and a.seed == 5
    exact = stratum_census(fam, 1, 1.0)
    assert abs(a.counts[0] - exact.counts[0]) < 0.25 * exact.total
    assert c.seed == 6
    with pytest.raises(ConfigError):
        stratum_census(fam, 1, 1.0, mode="bogus")


def test_budget_in_exact_mode():
    with pytest.raises(BudgetExceeded):
        stratum_census(family(7, [[0, 1]] * 3), 1, 3.0, budget_limit=1000)


def test_full_box_reduces_to_census():
    fam = family(7, [[0, 1, 0, 1]] * 2)
    sc = stratum_census(fam, 1, 1.0)
    for j in range(2):
        rep = box_exceptional_count(fam, 1, 1.0, j, BoxSpec.full(fam.ctx, 1))
        assert rep.count == sc.counts[j]


def test_box_F13_pinned():
    fam = family(13, [[0, 1], [0, 1]])
    box = BoxSpec.of([range(6)])
    want = [0, 0]
    for a, b in itertools.product(range(6), repeat=2):
        s = abs(offset_sum(13, 2, [[0, 1], [0, 1]], (a, b)))
        want[0] += s > 3
        want[1] += s > 3 * math.sqrt(13)
    got = [box_exceptional_count(fam, 1, 3.0, j, box).count for j in range(2)]
    assert got == want == [6, 6]
    rep = box_exceptional_count(fam, 1, 3.0, 1, box, C_prime=1.0)
    assert rep.shape == 6.0 and rep.passed


def test_box_monotone_under_restriction():
    fam = family(7, [[0, 1, 1]])
    assert box_exceptional_count(fam, 1, 1.0, 1, BoxSpec.of([[0, 2, 5]])).count == 0


def test_box_validation():
    fam = family(5, [[0, 1]])
    with pytest.raises(ConfigError):
        BoxSpec.of([[]])
    with pytest.raises(ConfigError):
        box_exceptional_count(fam, 1, 3.0, 1, BoxSpec.of([[7]]))
    with pytest.raises(ConfigError):
        box_exceptional_count(fam, 1, 3.0, 1, [BoxSpec.of([[1]])] * 2)


def test_b_power():
    # theta = n0 r + eta with r = 2: theta 3 -> (#B_1)^-2 (#B_2)^-1 on sorted sizes
    assert b_power([4, 2], 2, 3) == pytest.approx(1 / (2**2 * 4))
    assert b_power([3], 2, 0) == 1


def test_variety_examples():
    K7, K5 = make_field(7), make_field(5)
    x1 = MPoly.variable(K7, 2, 0)
    rep = box_count_variety([x1], BoxSpec.of([[0, 1], [0, 1, 2]]), 1, 1)
    assert (rep.count, rep.bound, rep.passed) == (3, 3, True)
    u, v = MPoly.variable(K5, 2, 0), MPoly.variable(K5, 2, 1)
    hyp = u * v - MPoly.constant(K5, 2, 1)
    rep = box_count_variety([hyp], BoxSpec.full(K5, 2), 1, 2)
    assert (rep.count, rep.bound, rep.passed) == (4, 10, True)
    rep = box_count_variety([u * v], BoxSpec.full(K5, 2), 1, 2)
    assert (rep.count, rep.bound, rep.passed) == (9, 10, True)


def test_variety_suite_passes():
    suite = random_variety_suite(0)
    assert len(suite) == 50 and {inst.p for inst in suite} == {5, 7}
    for inst in suite:
        assert inst.N <= 3
        assert box_count_variety(inst.polys, inst.box, inst.theta, inst.d).passed
    again = random_variety_suite(0)
    assert [str(f) for inst in again for f in inst.polys] == [str(f) for inst in suite for f in inst.polys]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([5, 7]), st.floats(0.2, 4.0))
def test_counts_nonincreasing_in_j(p, C):
    fam = family(p, [[0, 1, 0, 1], [0, 1, 1]])
    sc = stratum_census(fam, 1, C)
    assert all(a >= b for a, b in zip(sc.counts, sc.counts[1:]))
    assert all(eps is None or eps <= fam.n * fam.r + 1e-12 for eps in sc.empirical_exponents())


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(0, 4), min_size=1, max_size=5), min_size=2, max_size=2), st.integers(0, 1))
def test_box_count_never_exceeds_global(box_sets, j):
    fam = family(5, [[0, 1], [1, 1]])
    sc = stratum_census(fam, 1, 1.0)
    box = BoxSpec.of(box_sets[:1])
    rep = box_exceptional_count(fam, 1, 1.0, j, [box, BoxSpec.of(box_sets[1:])])
    assert rep.count <= sc.counts[j]
