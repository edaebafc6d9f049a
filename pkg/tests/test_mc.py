from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dglab import generators as gen
from dglab.dgla import DGLieAlgebra
from dglab.linalg import canon, is_zero, q, rank
from dglab.mc import (ArtinianBase, first_order_data, gauge_act, mc_residual, mc_solve,
                      unobstructed_probe)
from dglab.report import InputError

from strategies import seeds, valid_dgla


def in_image(L, v):
    D = L.d.matrix
    return rank(D) == rank(np.concatenate([D, canon(v).reshape(-1, 1)], axis=1))


def same(x, y):
    return x.keys() == y.keys() and all(np.all(x[k] == y[k]) for k in x)


def test_toy_obstruction_is_one_half(fixture):
    L = fixture("mc_toy_obstructed").algebra()
    rep = unobstructed_probe(L, ArtinianBase(1, 5))
    assert rep.verdict == "obstructed-at-order-2"
    (cls,) = rep.data["failure"]["obstruction"].values()
    assert [Fraction(int(x.numerator), int(x.denominator)) for x in cls] == [Fraction(1, 2)]


def test_mixed_obstruction(fixture):
    L = fixture("mc_mixed_obstructed").algebra()
    rep = unobstructed_probe(L, ArtinianBase(2, 3))
    fail = rep.data["failure"]
    # data are (e1, e1), (e1, e2), (e2, e2); the mixed one gives t1 t2 f
    assert fail["datum"] == 1 and fail["order"] == 2
    assert list(fail["obstruction"]) == ["t1*t2"]
    assert list(fail["obstruction"]["t1*t2"]) == [q(1)]
    # a single variable never sees the mixed term on either generator alone
    e1, e2 = L.space.basis_vector(0), L.space.basis_vector(1)
    for v in (e1, e2):
        assert not mc_solve(L, [v], ArtinianBase(1, 4)).obstructed


def test_exact_obstruction_is_corrected(fixture):
    L = fixture("mc_exact_obstruction").algebra()
    base = ArtinianBase(1, 5)
    e = L.space.basis_vector(L.space.index("e"))
    g = L.space.basis_vector(L.space.index("g"))
    st_ = mc_solve(L, [e], base)
    assert not st_.obstructed and st_.order == 5
    # x = t e - 1/2 t^2 g solves dx + 1/2 [x, x] = 0 exactly
    assert set(st_.x) == {(1,), (2,)}
    assert np.all(st_.x[(1,)] == e) and np.all(st_.x[(2,)] == canon(g * q("-1/2")))
    assert unobstructed_probe(L, base).verdict == "unobstructed"


def test_rejects_wrong_degree(fixture):
    L = fixture("mc_exact_obstruction").algebra()
    f = L.space.basis_vector(L.space.index("f"))
    with pytest.raises(InputError):
        mc_residual(L, {(1,): f}, ArtinianBase(1, 2))
    with pytest.raises(InputError):
        mc_solve(L, [f], ArtinianBase(1, 2))


def test_rejects_open_first_order(fixture):
    L = fixture("mc_exact_obstruction").algebra()
    g = L.space.basis_vector(L.space.index("g"))
    with pytest.raises(InputError):
        mc_solve(L, [g], ArtinianBase(1, 2))


def test_base_validation():
    with pytest.raises(InputError):
        ArtinianBase(0, 2)
    with pytest.raises(InputError):
        ArtinianBase(1, 0)
    assert ArtinianBase(2, 3).monomials(2) == [(2, 0), (1, 1), (0, 2)]


@given(valid_dgla(max_dim=5), st.integers(1, 2))
def test_solutions_and_obstructions(L, g):
    base = ArtinianBase(g, 3)
    for datum in first_order_data(L, g):
        s = mc_solve(L, datum, base)
        if not s.obstructed:
            assert s.order == 3
            assert mc_residual(L, s.x, base) == {}
        else:
            entry = s.ledger[-1]
            # the reported residual is a cocycle outside the image of d
            for r in entry["residual"].values():
                assert is_zero(L.d(r))
                assert not in_image(L, r)
            R = mc_residual(L, s.x, base)
            assert all(sum(e) >= entry["order"] for e in R)


def random_gauge(rng, L, base):
    a = {}
    idx0 = L.space.indices(0)
    for j in range(1, base.n + 1):
        for e in base.monomials(j):
            v = L.space.zero()
            for i in idx0:
                v[i] = q(rng.choice((-1, 0, 1)))
            if not is_zero(v):
                a[e] = v
    return a


@given(valid_dgla(max_dim=5), seeds)
def test_gauge_preserves_mc(L, seed):
    rng = gen.rng_for(seed)
    base = ArtinianBase(1, 3)
    xs = [{}]
    for datum in first_order_data(L, 1):
        s = mc_solve(L, datum, base)
        if not s.obstructed:
            xs.append(s.x)
    a = random_gauge(rng, L, base)
    for x in xs:
        y = gauge_act(L, a, x, base)
        assert mc_residual(L, y, base) == {}
    assert same(gauge_act(L, {}, xs[-1], base), xs[-1])


@given(valid_dgla(max_dim=5), seeds)
def test_first_order_gauge_keeps_obstruction_class(L, seed):
    """v and v + d alpha have the same order-2 obstruction class."""
    rng = gen.rng_for(seed)
    base = ArtinianBase(1, 2)
    idx0 = L.space.indices(0)
    alpha = L.space.zero()
    for i in idx0:
        alpha[i] = q(rng.choice((-1, 0, 1, 2)))
    for (v,) in first_order_data(L, 1):
        s1 = mc_solve(L, [v], base)
        s2 = mc_solve(L, [canon(v + L.d(alpha))], base)
        assert s1.obstructed == s2.obstructed
        c1 = s1.ledger[-1]["obstruction"]
        c2 = s2.ledger[-1]["obstruction"]
        assert c1.keys() == c2.keys()
        for k in c1:
            assert np.all(c1[k] == c2[k])


@given(seeds, st.integers(1, 2))
def test_abelian_unobstructed(seed, g):
    rng = gen.rng_for(seed)
    V, d = gen.random_complex(rng, gen.random_degrees(rng, rng.randint(1, 5), 0, 3))
    rep = unobstructed_probe(DGLieAlgebra.abelian(V, d), ArtinianBase(g, 4))
    assert rep.verdict == "unobstructed"
