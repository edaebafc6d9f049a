from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given

from dglab.dgla import (DGLAMorphism, DGLieAlgebra, check_axioms, direct_product, end_dgla,
                        h_star_bracket, kunneth_check, morphism_check, pullback, sl2, sub_dgla)
from dglab.graded import GradedMap, GradedSpace, Subspace
from dglab.linalg import is_zero, qmatrix
from dglab.report import InputError

from strategies import candidate, complex_, morphism, valid_dgla


def naive_axioms(L):
    """Loop-level re-derivation of the four axioms with Fractions."""
    n = L.dim
    deg = L.space.degrees
    T = [[[Fraction(int(L.table[a, b, c].numerator), int(L.table[a, b, c].denominator))
           for c in range(n)] for b in range(n)] for a in range(n)]
    D = [[Fraction(str(L.d.matrix[i, j])) for j in range(n)] for i in range(n)]

    def br(x, y):
        out = [Fraction(0)] * n
        for a, b in product(range(n), repeat=2):
            if x[a] and y[b]:
                for c in range(n):
                    out[c] += x[a] * y[b] * T[a][b][c]
        return out

    def dd(x):
        return [sum(D[i][j] * x[j] for j in range(n)) for i in range(n)]

    def e(a):
        return [Fraction(int(i == a)) for i in range(n)]

    def s(k):
        return -1 if k % 2 else 1

    res = {"d_squared": all(not any(dd(dd(e(a)))) for a in range(n))}
    res["skewsymmetry"] = all(
        [u + s(deg[a] * deg[b]) * v for u, v in zip(br(e(a), e(b)), br(e(b), e(a)))] == [0] * n
        for a, b in product(range(n), repeat=2))
    res["leibniz"] = all(
        dd(br(e(a), e(b))) == [u + s(deg[a]) * v
                               for u, v in zip(br(dd(e(a)), e(b)), br(e(a), dd(e(b))))]
        for a, b in product(range(n), repeat=2))
    jac = True
    for a, b, c in product(range(n), repeat=3):
        lhs = br(e(a), br(e(b), e(c)))
        r1 = br(br(e(a), e(b)), e(c))
        r2 = br(e(b), br(e(a), e(c)))
        if lhs != [u + s(deg[a] * deg[b]) * v for u, v in zip(r1, r2)]:
            jac = False
            break
    res["jacobi"] = jac
    return res


@given(candidate())
def test_axiom_checker_agrees_with_naive_oracle(L):
    rep = check_axioms(L)
    assert {c.name: c.passed for c in rep.checks} == naive_axioms(L)


@given(valid_dgla())
def test_generated_algebras_are_dglas(L):
    assert check_axioms(L).passed


@given(valid_dgla())
def test_cohomology_bracket_is_skew(L):
    # the induced bracket on H^* is a graded Lie algebra in its own right
    assert check_axioms(h_star_bracket(L).algebra).passed


@given(morphism())
def test_generated_morphisms_are_morphisms(f):
    assert morphism_check(f).passed


@given(complex_(max_dim=3))
def test_end_is_a_dgla_with_kunneth_cohomology(c):
    V, d = c
    E = end_dgla(V, d)
    assert check_axioms(E).passed
    assert kunneth_check(V, d)


def test_sl2_structure():
    L = sl2()
    assert check_axioms(L).passed
    h, e, f = (L.space.basis_vector(i) for i in range(3))
    assert np.all(L.bracket(h, e) == 2 * e)
    assert np.all(L.bracket(e, f) == h)
    assert not h_star_bracket(L).abelian_cohomology


def test_broken_jacobi_has_witness():
    V = GradedSpace((0, 0, 0), ("a", "b", "c"))
    L = DGLieAlgebra.from_constants(V, None, [
        ("a", "b", "b", 1), ("b", "a", "b", -1), ("b", "c", "a", 1), ("c", "b", "a", -1),
        ("a", "c", "c", 1), ("c", "a", "c", -1)])
    rep = check_axioms(L)
    assert rep.first_failure().name == "jacobi"
    assert rep.first_failure().witness is not None


def test_odd_elements_may_bracket_with_themselves():
    V = GradedSpace((1, 2), ("e", "f"))
    L = DGLieAlgebra.from_constants(V, None, [("e", "e", "f", 1)])
    assert check_axioms(L).passed


def test_sub_dgla_and_product():
    L = sl2()
    S = Subspace.span(L.space, [L.space.basis_vector(0), L.space.basis_vector(1)])
    B, inc = sub_dgla(L, S)
    assert check_axioms(B).passed and morphism_check(inc).passed
    P = direct_product(L, B)
    assert check_axioms(P).passed
    with pytest.raises(InputError):
        sub_dgla(L, Subspace.span(L.space, [L.space.basis_vector(1), L.space.basis_vector(2)]))


def test_pullback_of_inclusions_is_intersection():
    L = sl2()
    b = Subspace.span(L.space, [L.space.basis_vector(0), L.space.basis_vector(1)])
    b2 = Subspace.span(L.space, [L.space.basis_vector(0), L.space.basis_vector(2)])
    B1, i1 = sub_dgla(L, b, name="b+")
    B2, i2 = sub_dgla(L, b2, name="b-")
    P, p1, p2 = pullback(i1, i2)
    assert P.dim == 1  # the Cartan subalgebra
    assert check_axioms(P).passed
    assert morphism_check(p1).passed and morphism_check(p2).passed


def test_non_morphism_is_detected():
    L = sl2()
    f = DGLAMorphism(L, L, GradedMap(L.space, L.space, 0, qmatrix([[2, 0, 0], [0, 1, 0], [0, 0, 1]])))
    assert not morphism_check(f).get("preserves_bracket").passed


def test_abelian_dgla_has_zero_bracket_on_cohomology():
    V = GradedSpace((0, 1))
    L = DGLieAlgebra.abelian(V)
    assert h_star_bracket(L).abelian_cohomology
    assert is_zero(L.table)
