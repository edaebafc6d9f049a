"""Derived brackets of Lie type.

M = L (+) A with L a sub-DGLA, A abelian and [da, b] in A.  Then A[-1]
with delta a = -p d a and {a, b} = -(-1)^i [da, b] (i the degree of a in
A[-1], p the projection onto A along L) is a DGLA, homotopy abelian when
L -> M is injective in cohomology.
"""

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .cartan import CartanCalculus, CartanHomotopy, btt_certify
from .dgla import DGLieAlgebra, end_dgla, h_star_bracket, is_subalgebra
from .graded import GradedMap, GradedSpace, Subspace, check_differential
from .linalg import canon, is_zero, qzeros, rank, solve
from .report import InputError, Report


def _sgn(e):
    return -1 if e % 2 else 1


@dataclass(frozen=True, eq=False)
class LieTypeSplit:
    M: DGLieAlgebra
    L: Subspace
    A: Subspace
    projection: np.ndarray = field(init=False, repr=False)  # M -> A coordinates, or None

    def __post_init__(self):
        if self.L.space != self.M.space or self.A.space != self.M.space:
            raise InputError("L and A must be subspaces of M")
        B = np.concatenate([self.L.basis, self.A.basis], axis=1)
        p = None
        if B.shape[1] == self.M.dim and rank(B) == self.M.dim:
            inv = solve(B, np.eye(self.M.dim, dtype=object))
            p = canon(inv[self.L.dim:, :])
        object.__setattr__(self, "projection", p)

    def p(self, m):
        """A-coordinates of the A-component of m."""
        return canon(self.projection @ np.asarray(m, dtype=object))

    @property
    def a_space(self):
        """A[-1]: degrees of A raised by one."""
        names = tuple(f"a{j}" for j in range(self.A.dim))
        return GradedSpace(tuple(d + 1 for d in self.A.degrees), names)


def lietype_check(s):
    M, A = s.M, s.A
    rep = Report("Lie-type conditions")
    per_degree = {}
    for i in sorted(set(M.space.support)):
        lhs = s.L.dims().get(i, 0) + A.dims().get(i, 0)
        per_degree[i] = (lhs, M.space.dim_in(i))
    direct = s.projection is not None
    rep.add("i_direct_sum", direct, None if direct else {"dims": per_degree})
    w = is_subalgebra(M, s.L)
    rep.add("L_sub_dgla", w is None, w)
    B = A.basis
    bad2 = bad3 = None
    dB = canon(M.d.matrix @ B)
    for a, b in iproduct(range(A.dim), repeat=2):
        if bad2 is None:
            v = M.bracket(B[:, a], B[:, b])
            if not is_zero(v):
                bad2 = {"pair": [a, b], "bracket": v}
        if bad3 is None:
            v = M.bracket(dB[:, a], B[:, b])
            if not A.contains(v):
                bad3 = {"pair": [a, b], "bracket": v}
    rep.add("ii_A_abelian", bad2 is None, bad2)
    rep.add("iii_dA_bracket_in_A", bad3 is None, bad3)
    return rep


def lietype_dgla(s, check=True, name="A[-1]"):
    if check:
        rep = lietype_check(s)
        if not rep.passed:
            raise InputError("not a Lie-type split", witness=rep.first_failure().to_dict())
    M, A = s.M, s.A
    space = s.a_space
    B = A.basis
    dB = canon(M.d.matrix @ B)
    n = A.dim
    delta = -s.p(dB) if n else qzeros(0, 0)
    t = qzeros(n, n, n)
    for a, b in iproduct(range(n), repeat=2):
        i = space.degrees[a]
        t[a, b] = A.coords(M.bracket(dB[:, a], B[:, b])) * -_sgn(i)
    return DGLieAlgebra(space, GradedMap(space, space, 1, delta), t, name)


def lietype_cartan(s, alg=None):
    """i: A[-1] -> M, i_a = -a, with the Lie derivative landing in L.

    With {a, b} = -(-1)^i [da, b], Leibniz gives [a, db] = (-1)^i [da, b],
    so it is -a (not a) that satisfies i_{a,b} = [i_a, d i_b].
    """
    alg = alg or lietype_dgla(s)
    return CartanHomotopy(alg, s.M, GradedMap(alg.space, s.M.space, -1, -s.A.basis))


def lietype_btt(s):
    """btt_certify for i_a = -a and H = L; also records p(l_a) = 0."""
    alg = lietype_dgla(s)
    h = lietype_cartan(s, alg)
    rep = btt_certify(CartanCalculus(h, s.L))
    lmat = s.M.d.matrix @ h.map.matrix + h.map.matrix @ alg.d.matrix
    rep.data["p_of_lie_derivative_zero"] = is_zero(s.p(lmat)) if s.A.dim else True
    rep.data["algebra"] = alg.name
    return rep


@dataclass(frozen=True, eq=False)
class PiData:
    """Complexes V, W and pi in Hom^1(W, V) with d_V pi + pi d_W = 0."""

    V: GradedSpace
    W: GradedSpace
    dV: GradedMap
    dW: GradedMap
    pi: GradedMap

    def __post_init__(self):
        check_differential(self.dV)
        check_differential(self.dW)
        if self.pi.source != self.W or self.pi.target != self.V or self.pi.degree != 1:
            raise InputError("pi must be a degree 1 map W -> V")

    def total(self):
        """V (+) W with D = [[d_V, -pi], [0, d_W]]."""
        U = self.V.direct_sum(self.W, ("V.", "W."))
        n, m = self.V.dim, self.W.dim
        D = qzeros(n + m, n + m)
        D[:n, :n] = self.dV.matrix
        D[:n, n:] = -self.pi.matrix
        D[n:, n:] = self.dW.matrix
        return U, GradedMap(U, U, 1, D)


@dataclass(frozen=True, eq=False)
class PiExample:
    data: PiData
    split: LieTypeSplit


def pi_example_build(data):
    U, D = data.total()
    DD = D.matrix @ D.matrix
    if not is_zero(DD):
        col = next(j for j in range(U.dim) if not is_zero(DD[:, j]))
        raise InputError("d_V pi + pi d_W != 0",
                         witness={"basis_vector": U.names[col], "D2": canon(DD[:, col])})
    M = end_dgla(U, D, name="End(V+W)")
    n = data.V.dim
    a_vecs, l_vecs = [], []
    for k, nm in enumerate(M.space.names):
        t_name, s_name = nm[2:-1].split("<-")
        si, ti = U.index(s_name), U.index(t_name)
        if si < n <= ti:
            a_vecs.append(M.space.basis_vector(k))
        else:
            l_vecs.append(M.space.basis_vector(k))
    split = LieTypeSplit(M, Subspace.span(M.space, l_vecs), Subspace.span(M.space, a_vecs))
    return PiExample(data, split)


def pi_bracket_check(ex, alg=None):
    """{a, b} = a pi b - (-1)^{ij} b pi a on every basis pair, with a, b read
    as maps V -> W and i, j their degrees in A[-1]."""
    s = ex.split
    alg = alg or lietype_dgla(s)
    V, W, pi = ex.data.V, ex.data.W, ex.data.pi.matrix
    n = s.A.dim
    U = V.direct_sum(W, ("V.", "W."))
    nv = V.dim

    def as_hom(coords):
        """A-coordinates -> matrix W x V."""
        full = s.A.basis @ coords
        m = qzeros(W.dim, V.dim)
        for k, x in enumerate(full):
            if x != 0:
                t_name, s_name = s.M.space.names[k][2:-1].split("<-")
                m[U.index(t_name) - nv, U.index(s_name)] += x
        return m

    homs = [as_hom(np.eye(n, dtype=object)[:, a]) for a in range(n)]
    rep = Report("derived bracket vs pi-bracket")
    bad = None
    for a, b in iproduct(range(n), repeat=2):
        i, j = alg.space.degrees[a], alg.space.degrees[b]
        expected = canon(homs[a] @ pi @ homs[b] - _sgn(i * j) * (homs[b] @ pi @ homs[a]))
        got = as_hom(alg.table[a, b])
        if not np.all(expected == got):
            bad = {"pair": [a, b], "abstract": got, "pi_bracket": expected}
            break
    rep.add("bracket_equals_pi_bracket", bad is None, bad)
    # delta(f) = -d_W f - (-1)^i f d_V
    badd = None
    for a in range(n):
        i = alg.space.degrees[a]
        expected = canon(-(ex.data.dW.matrix @ homs[a]) - _sgn(i) * (homs[a] @ ex.data.dV.matrix))
        got = as_hom(alg.d.matrix[:, a])
        if not np.all(expected == got):
            badd = {"basis_vector": alg.space.names[a], "abstract": got, "expected": expected}
            break
    rep.add("delta_matches", badd is None, badd)
    return rep


def lietype_consequences(s):
    """Facts that hold on any valid split: A[-1] passes the DGLA axioms and
    p(l_a) = 0."""
    from .dgla import check_axioms

    alg = lietype_dgla(s)
    rep = Report("Lie-type consequences")
    rep.extend(check_axioms(alg), "axioms.")
    h = lietype_cartan(s, alg)
    lmat = s.M.d.matrix @ h.map.matrix + h.map.matrix @ alg.d.matrix
    rep.add("p_of_lie_derivative_zero", is_zero(s.p(lmat)) if s.A.dim else True)
    rep.data["h_star_bracket_zero"] = h_star_bracket(alg).abelian_cohomology
    return rep
