import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dglab import generators as gen
from dglab.coderivations import (Coderivation, TruncatedSymCoalgebra, _unknown_slots, build_Q,
                                 coderivation_cartan_check, q_square_check, splitting_check)
from dglab.dgla import DGLieAlgebra, check_axioms, h_star_bracket
from dglab.graded import GradedSpace
from dglab.linalg import q, qzeros
from dglab.report import InputError

from strategies import candidate, seeds, valid_dgla


def random_coderivation(rng, S, degree, arities):
    comps = {}
    for n in arities:
        m = qzeros(S.V.dim, S.dim(n))
        for r, c in _unknown_slots(S, n, degree):
            m[r, c] = q(rng.choice((-1, 0, 1, 2)))
        comps[n] = m
    return Coderivation(S, degree, comps)


@given(candidate())
def test_q_square_matches_axioms(L):
    rep = q_square_check(L)
    ax = check_axioms(L)
    for key in ("matches_d_squared", "matches_leibniz", "matches_jacobi"):
        assert rep.data[key] is True
    assert rep.passed == (ax.get("d_squared").passed and ax.get("leibniz").passed
                          and ax.get("jacobi").passed)


@given(candidate(max_dim=4))
def test_bracket_of_q_with_itself(L):
    Q = build_Q(L)
    ax = check_axioms(L)
    assert Q.bracket(Q).is_zero() == ax.passed


def test_truncation_must_reach_three(fixture):
    with pytest.raises(InputError):
        q_square_check(fixture("dgla_sl2").algebra(), 2)
    with pytest.raises(InputError):
        splitting_check(fixture("dgla_sl2").algebra(), 2)


@given(seeds, st.lists(st.integers(-2, 2), min_size=3, max_size=3),
       st.lists(st.sets(st.integers(0, 2), min_size=1), min_size=3, max_size=3))
def test_coderivation_bracket_jacobi(seed, degs, ars):
    rng = gen.rng_for(seed)
    V = GradedSpace(gen.random_degrees(rng, rng.randint(1, 3), -1, 1))
    S = TruncatedSymCoalgebra(V, 3)
    # keep every arity of the nested brackets within the truncation
    assume(max(ars[0]) + max(ars[1]) + max(ars[2]) - 2 <= 3)
    F, G, H = (random_coderivation(rng, S, e, sorted(a)) for e, a in zip(degs, ars))
    sign = -1 if (F.degree * G.degree) % 2 else 1
    lhs = F.bracket(G.bracket(H))
    rhs = F.bracket(G).bracket(H) + G.bracket(F.bracket(H)).scale(sign)
    assert (lhs - rhs).is_zero()
    # graded antisymmetry
    anti = F.bracket(G) + G.bracket(F).scale(sign)
    assert anti.is_zero()


@given(valid_dgla(max_dim=4))
def test_cartan_homotopy_on_valid(L):
    assert coderivation_cartan_check(L).passed


@given(seeds)
def test_abelian_always_splits(seed):
    rng = gen.rng_for(seed)
    V, d = gen.random_complex(rng, gen.random_degrees(rng, rng.randint(1, 4), -1, 2))
    rep = splitting_check(DGLieAlgebra.abelian(V, d))
    assert rep.verdict == "homotopy-abelian-certified"


@given(valid_dgla(max_dim=4))
def test_certified_splitting_has_abelian_cohomology(L):
    rep = splitting_check(L)
    if rep.verdict == "homotopy-abelian-certified":
        assert h_star_bracket(L).abelian_cohomology
    if not h_star_bracket(L).abelian_cohomology:
        assert rep.verdict.startswith("obstructed")


@pytest.mark.parametrize("name,verdict", [
    ("dgla_sl2", "obstructed-at-stage-1"),
    ("dgla_abelian", "homotopy-abelian-certified"),
    ("dgla_heisenberg_odd", "obstructed-at-stage-1"),
])
def test_splitting_fixtures(fixture, name, verdict):
    assert splitting_check(fixture(name).algebra()).verdict == verdict


def test_lift_is_closed(fixture):
    L = fixture("dgla_abelian").algebra()
    rep = splitting_check(L)
    Q = build_Q(L)
    for comps in rep.data["lifts"].values():
        alpha = Coderivation(Q.sym, Q.sym.V.degree_of(comps["0"][:, 0]),
                             {int(k): np.asarray(m, dtype=object) for k, m in comps.items()})
        assert Q.bracket(alpha).is_zero()
