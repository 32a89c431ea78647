import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charsum.errors import ConfigError
from charsum.subspace import (Subspace, check_transversality, extend_transverse, intersection, nullspace,
                              random_instances, rref, transverse_basis)


def enumerate_space(S):
    """All vectors of S, by brute force over coefficient tuples."""
    vecs = set()
    B = S.matrix()
    for coeffs in itertools.product(range(S.p), repeat=S.dim):
        v = (np.array(coeffs, dtype=np.int64) @ B) % S.p if S.dim else np.zeros(S.dim_ambient, dtype=np.int64)
        vecs.add(tuple(int(a) for a in v))
    return vecs


def test_rref_canonical():
    R, piv = rref(np.array([[0, 2, 1], [0, 1, 2], [1, 1, 1]]), 3)
    assert piv == [0, 1] and R.tolist() == [[1, 0, 2], [0, 1, 2]]
    A = Subspace.span(3, 3, [[0, 2, 1], [1, 1, 1]])
    B = Subspace.span(3, 3, [[1, 1, 1], [0, 1, 2]])
    assert A == B


def test_nullspace():
    M = np.array([[1, 1, 0]])
    N = nullspace(M, 2, 3)
    assert ((M @ N.T) % 2 == 0).all() and len(N) == 2


def test_intersection_against_enumeration():
    A = Subspace.span(2, 4, [[1, 1, 0, 0], [0, 0, 1, 1]])
    B = Subspace.span(2, 4, [[1, 1, 1, 1], [1, 0, 0, 0]])
    inter = A.intersect(B)
    assert enumerate_space(inter) == enumerate_space(A) & enumerate_space(B)


def test_ambient_mismatch():
    with pytest.raises(ConfigError):
        Subspace.span(2, 2, [[1, 0]]) + Subspace.span(3, 2, [[1, 0]])
    with pytest.raises(ConfigError):
        Subspace.span(4, 2, [])


def test_coordinate_pair_is_already_transverse():
    V1, V2 = Subspace.span(2, 2, [[1, 0]]), Subspace.span(2, 2, [[0, 1]])
    assert extend_transverse([V1, V2]) == [V1, V2]
    assert check_transversality([V1, V2]).all()
    tb = transverse_basis([V1, V2])
    assert V1 <= tb.span_without(2, 2, set(tb.parts[0]))
    assert V2 <= tb.span_without(2, 2, set(tb.parts[1]))


def test_equal_lines_grow():
    A = Subspace.span(3, 2, [[1, 0]])
    W = extend_transverse([A, A])
    assert W[0] == A and W[1].dim == 2
    assert check_transversality(W).all()
    assert intersection(W) == A


def test_equal_proper_subspaces_fail_everything():
    A = Subspace.span(3, 2, [[1, 2]])
    rep = check_transversality([A, A])
    assert not any(rep.to_json().values())


def test_degenerate_families():
    assert extend_transverse([]) == []
    assert check_transversality([]).all()
    single = Subspace.span(3, 3, [[1, 0, 0]])
    assert check_transversality([single]).all()
    tb = transverse_basis([Subspace.whole(3, 3)])
    assert tb.parts == [[]] and len(tb.E) == 3
    z = transverse_basis([Subspace.zero(2, 1)])
    assert z.E == [(1,)] and z.parts == [[0]]


def test_complement():
    S = Subspace.span(2, 4, [[1, 1, 0, 0], [0, 0, 1, 0]])
    C = S.complement()
    assert (S + C).dim == 4 and S.intersect(C).dim == 0
    assert C == Subspace.span(2, 4, [[0, 1, 0, 0], [0, 0, 0, 1]])


def check_constructions(Vs):
    p, n = Vs[0].p, Vs[0].dim_ambient
    rep = check_transversality(Vs)
    assert rep.agree()
    Ws = extend_transverse(Vs)
    assert all(V <= W for V, W in zip(Vs, Ws))
    assert check_transversality(Ws).all()
    assert intersection(Ws) == intersection(Vs)
    tb = transverse_basis(Vs)
    assert len(tb.E) == n and Subspace.span(p, n, [list(v) for v in tb.E]).dim == n
    used = set()
    for part in tb.parts:
        assert not used & set(part)
        used |= set(part)
    assert tb.span_without(p, n, used) == intersection(Vs)
    for V, part in zip(Vs, tb.parts):
        assert V <= tb.span_without(p, n, set(part))


def test_random_suite_small():
    for Vs in random_instances(seed=11, count=60):
        check_constructions(Vs)


@st.composite
def families(draw):
    p = draw(st.sampled_from([2, 3]))
    n = draw(st.integers(1, 4))
    N = draw(st.integers(1, 3))
    Vs = []
    for _ in range(N):
        k = draw(st.integers(0, n))
        vecs = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), min_size=k, max_size=k))
        Vs.append(Subspace.span(p, n, vecs))
    return Vs


@settings(max_examples=80, deadline=None)
@given(families())
def test_constructions_hold(Vs):
    check_constructions(Vs)


@settings(max_examples=60, deadline=None)
@given(families())
def test_codim_additivity_matches_enumeration(Vs):
    # independent count: the intersection is enumerated as a set of vectors
    inter = set.intersection(*[enumerate_space(V) for V in Vs])
    p, n = Vs[0].p, Vs[0].dim_ambient
    codim_inter = n - round(np.log(len(inter)) / np.log(p))
    assert check_transversality(Vs).codim_additive == (codim_inter == sum(V.codim for V in Vs))
