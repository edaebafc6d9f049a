"""DG-Lie algebras given by structure constants.

The bracket is a dense tensor ``T`` with ``T[a, b]`` the coordinate vector
of [e_a, e_b].  Nothing about it is symmetrised on input: skewsymmetry is
checked like every other axiom.
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as iproduct

import numpy as np

from .graded import (GradedMap, GradedSpace, Subspace, check_differential,
                     cohomology, graded_commutator, induced_map_on_cohomology,
                     is_chain_map)
from .linalg import ONE, canon, is_zero, nullspace, q, qzeros
from .report import InputError, Report


def _sign(e):
    return -1 if e % 2 else 1


@dataclass(frozen=True, eq=False)
class DGLieAlgebra:
    space: GradedSpace
    d: GradedMap
    table: np.ndarray = field(repr=False)
    name: str = "L"

    def __post_init__(self):
        n = self.space.dim
        t = canon(self.table)
        if t.shape != (n, n, n):
            raise InputError(f"bracket tensor has shape {t.shape}, expected {(n, n, n)}")
        if self.d.source != self.space or self.d.target != self.space:
            raise InputError("differential does not act on the algebra's space")
        if self.d.degree != 1:
            raise InputError("differential must have degree +1")
        degs = self.space.degrees
        for (a, b, c), x in np.ndenumerate(t):
            if x != 0 and degs[c] != degs[a] + degs[b]:
                raise InputError(
                    f"[{self.space.names[a]}, {self.space.names[b]}] has a component "
                    f"on {self.space.names[c]} of the wrong degree")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def abelian(cls, space, d=None, name="L"):
        d = d if d is not None else GradedMap.zero(space, space, 1)
        return cls(space, d, qzeros(space.dim, space.dim, space.dim), name)

    @classmethod
    def from_constants(cls, space, d, constants, name="L"):
        """``constants``: iterable of (a, b, c, coef) by index or name,
        meaning [e_a, e_b] has coefficient coef on e_c."""
        n = space.dim
        t = qzeros(n, n, n)
        for a, b, c, coef in constants:
            a, b, c = (space.index(x) if isinstance(x, str) else x for x in (a, b, c))
            t[a, b, c] += q(coef)
        if d is None:
            d = GradedMap.zero(space, space, 1)
        return cls(space, d, t, name)

    @property
    def dim(self):
        return self.space.dim

    @cached_property
    def ad(self):
        """ad[a] is the matrix of y -> [e_a, y]."""
        return canon(np.transpose(self.table, (0, 2, 1)))

    def ad_of(self, x):
        return canon(np.tensordot(np.asarray(x, dtype=object), self.ad, axes=([0], [0])))

    def bracket(self, x, y):
        # sum over nonzero coordinates only; arguments are usually sparse
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        out = self.space.zero()
        ys = [(b, y[b]) for b in np.flatnonzero(y)]
        for a in np.flatnonzero(x):
            for b, yb in ys:
                out = out + (x[a] * yb) * self.table[a, b]
        return canon(out)

    def differential(self, x):
        return self.d(x)

    def is_abelian(self):
        return is_zero(self.table)

    def cohomology(self):
        return self._cohomology

    @cached_property
    def _cohomology(self):
        return cohomology(self.space, self.d)

    def constants(self):
        """Nonzero structure constants as (a, b, c, coef) name tuples."""
        names = self.space.names
        return [(names[a], names[b], names[c], x)
                for (a, b, c), x in np.ndenumerate(self.table) if x != 0]


def check_axioms(L, exhaustive=False):
    """Verify d^2 = 0, graded skewsymmetry, Jacobi and Leibniz.

    Each axiom reports its lexicographically first violating basis tuple
    with both sides; ``exhaustive`` lists every violation instead.
    """
    names = L.space.names
    degs = L.space.degrees
    n = L.dim
    D = L.d.matrix
    rep = Report(f"axioms of {L.name}")

    # d o d = 0
    dd = canon(D @ D)
    fails = [j for j in range(n) if not is_zero(dd[:, j])]
    rep.add("d_squared", not fails, _witness(fails, exhaustive, lambda j: {
        "tuple": [names[j]], "lhs": dd[:, j], "rhs": qzeros(n)}))

    # [a,b] = -(-1)^{|a||b|} [b,a]
    T = L.table
    fails = []
    for a, b in iproduct(range(n), repeat=2):
        lhs = T[a, b]
        rhs = -_sign(degs[a] * degs[b]) * T[b, a]
        if not np.all(lhs == rhs):
            fails.append((a, b, lhs, canon(rhs)))
            if not exhaustive:
                break
    rep.add("skewsymmetry", not fails, _witness(fails, exhaustive, lambda f: {
        "tuple": [names[f[0]], names[f[1]]], "lhs": f[2], "rhs": f[3]}))

    # [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]], as matrices in c
    ad = L.ad
    fails = []
    for a, b in iproduct(range(n), repeat=2):
        lhs = ad[a] @ ad[b]
        rhs = L.ad_of(T[a, b]) + _sign(degs[a] * degs[b]) * (ad[b] @ ad[a])
        diff = lhs - rhs
        for c in range(n):
            if not is_zero(diff[:, c]):
                fails.append((a, b, c, canon(lhs[:, c]), canon(rhs[:, c])))
                if not exhaustive:
                    break
        if fails and not exhaustive:
            break
    rep.add("jacobi", not fails, _witness(fails, exhaustive, lambda f: {
        "tuple": [names[f[0]], names[f[1]], names[f[2]]], "lhs": f[3], "rhs": f[4]}))

    # d[a,b] = [da,b] + (-1)^{|a|} [a,db], as matrices in b
    fails = []
    for a in range(n):
        lhs = D @ ad[a]
        rhs = L.ad_of(D[:, a]) + _sign(degs[a]) * (ad[a] @ D)
        diff = lhs - rhs
        for b in range(n):
            if not is_zero(diff[:, b]):
                fails.append((a, b, canon(lhs[:, b]), canon(rhs[:, b])))
                if not exhaustive:
                    break
        if fails and not exhaustive:
            break
    rep.add("leibniz", not fails, _witness(fails, exhaustive, lambda f: {
        "tuple": [names[f[0]], names[f[1]]], "lhs": f[2], "rhs": f[3]}))
    return rep


def _witness(fails, exhaustive, fmt):
    if not fails:
        return None
    if exhaustive:
        return {"violations": [fmt(f) for f in fails]}
    return fmt(fails[0])


def end_dgla(space, dV, name="End"):
    """Hom^*(V, V) with the graded commutator and differential [d_V, -].

    Basis: elementary maps E[t<-s] (sending e_s to e_t), ordered by Hom
    degree, then source, then target index.  Degree window
    [lo - hi, hi - lo] for V's window [lo, hi].
    """
    check_differential(dV)
    basis = end_basis(space)
    degrees = tuple(deg for deg, _, _ in basis)
    names = tuple(f"E[{space.names[t]}<-{space.names[s]}]" for _, s, t in basis)
    lo, hi = space.window
    E = GradedSpace(degrees, names, (lo - hi, hi - lo))
    mats = [elementary(space, s, t) for _, s, t in basis]
    coords = _end_coords(space, basis)
    return matrix_lie_algebra(E, mats, coords, dV, name)


def end_basis(space):
    out = []
    for s in range(space.dim):
        for t in range(space.dim):
            out.append((space.degrees[t] - space.degrees[s], s, t))
    out.sort()
    return out


def elementary(space, s, t):
    m = qzeros(space.dim, space.dim)
    m[t, s] = ONE
    return m


def _end_coords(space, basis):
    pos = {(s, t): k for k, (_, s, t) in enumerate(basis)}

    def coords(m):
        v = qzeros(len(basis))
        for (t, s), x in np.ndenumerate(m):
            if x != 0:
                v[pos[(s, t)]] = x
        return v
    return coords


def matrix_lie_algebra(space, mats, coords, dV, name="M"):
    """DGLA on a family of homogeneous endomorphism matrices closed under
    the graded commutator and [dV, -]; ``coords`` expresses a matrix in the
    family's basis."""
    n = len(mats)
    degs = space.degrees
    t = qzeros(n, n, n)
    for a, b in iproduct(range(n), repeat=2):
        s = _sign(degs[a] * degs[b])
        t[a, b] = coords(mats[a] @ mats[b] - s * (mats[b] @ mats[a]))
    dm = qzeros(n, n)
    D = dV.matrix
    for a in range(n):
        dm[:, a] = coords(D @ mats[a] - _sign(degs[a]) * (mats[a] @ D))
    return DGLieAlgebra(space, GradedMap(space, space, 1, dm), t, name)


def kunneth_check(space, dV):
    """dim H^i(Hom(V,V)) == sum_j dim H^j(V) dim H^{j+i}(V) for all i."""
    E = end_dgla(space, dV)
    lhs = E.cohomology().dims
    hv = cohomology(space, dV).dims
    return all(
        lhs.get(i, 0) == sum(hv.get(j, 0) * hv.get(j + i, 0) for j in hv)
        for i in E.space.degree_range())


@dataclass(frozen=True, eq=False)
class DGLAMorphism:
    source: DGLieAlgebra
    target: DGLieAlgebra
    map: GradedMap

    def __post_init__(self):
        if self.map.source != self.source.space or self.map.target != self.target.space:
            raise InputError("morphism map does not match the algebras' spaces")
        if self.map.degree != 0:
            raise InputError("a DGLA morphism has degree 0")

    def __call__(self, x):
        return self.map(x)

    def induced(self):
        return induced_map_on_cohomology(
            self.map, self.source.d, self.target.d,
            h_source=self.source.cohomology(), h_target=self.target.cohomology())

    @classmethod
    def identity(cls, L):
        return cls(L, L, GradedMap.identity(L.space))

    @classmethod
    def zero(cls, L, M):
        return cls(L, M, GradedMap.zero(L.space, M.space, 0))


def morphism_check(f):
    L, M, F = f.source, f.target, f.map.matrix
    rep = Report(f"morphism {L.name} -> {M.name}")
    w = is_chain_map(f.map, L.d, M.d)
    rep.add("commutes_with_d", w is None, w)
    names = L.space.names
    fail = None
    for a, b in iproduct(range(L.dim), repeat=2):
        lhs = canon(F @ L.table[a, b])
        rhs = M.bracket(F[:, a], F[:, b])
        if not np.all(lhs == rhs):
            fail = {"tuple": [names[a], names[b]], "lhs": lhs, "rhs": rhs}
            break
    rep.add("preserves_bracket", fail is None, fail)
    return rep


def direct_product(L, M, name=None):
    space = L.space.direct_sum(M.space, (f"{L.name}.", f"{M.name}."))
    n, m = L.dim, M.dim
    t = qzeros(n + m, n + m, n + m)
    t[:n, :n, :n] = L.table
    t[n:, n:, n:] = M.table
    d = qzeros(n + m, n + m)
    d[:n, :n] = L.d.matrix
    d[n:, n:] = M.d.matrix
    return DGLieAlgebra(space, GradedMap(space, space, 1, d), t,
                        name or f"{L.name}x{M.name}")


def is_subalgebra(L, S):
    """Witness of the first failure of S being a sub-DGLA of L, or None."""
    j = S.unstable_column(L.d)
    if j is not None:
        return {"reason": "not d-stable", "basis_index": j}
    B = S.basis
    for a, b in iproduct(range(S.dim), repeat=2):
        if not S.contains(L.bracket(B[:, a], B[:, b])):
            return {"reason": "not bracket-closed", "pair": [a, b]}
    return None


def sub_dgla(L, S, name=None, names=None):
    """The sub-DGLA on S, with its basis in S's column order."""
    w = is_subalgebra(L, S)
    if w is not None:
        raise InputError("subspace is not a DG-Lie subalgebra", witness=w)
    space = S.as_space(names)
    k = S.dim
    t = qzeros(k, k, k)
    B = S.basis
    for a, b in iproduct(range(k), repeat=2):
        t[a, b] = S.coords(L.bracket(B[:, a], B[:, b]))
    sub = DGLieAlgebra(space, S.restrict(L.d, names), t, name or f"{L.name}|sub")
    return sub, DGLAMorphism(sub, L, S.inclusion(names))


def pullback(f, g, name=None):
    """L x_N M for f: L -> N, g: M -> N, with projections f' (to M) and
    g' (to L)."""
    if f.target is not g.target and f.target.space != g.target.space:
        raise InputError("pullback needs a common target")
    L, M = f.source, g.source
    P = direct_product(L, M)
    # kernel of (x, y) -> f(x) - g(y)
    diff = np.concatenate([f.map.matrix, -g.map.matrix], axis=1)
    K = nullspace(diff)
    S = Subspace.from_columns(P.space, K)
    sub, inc = sub_dgla(P, S, name or f"{L.name}x_{f.target.name}{M.name}")
    n = L.dim
    to_L = GradedMap(sub.space, L.space, 0, inc.map.matrix[:n, :])
    to_M = GradedMap(sub.space, M.space, 0, inc.map.matrix[n:, :])
    return sub, DGLAMorphism(sub, L, to_L), DGLAMorphism(sub, M, to_M)


@dataclass(frozen=True, eq=False)
class BracketTable:
    """Induced bracket on H^*(L) in the chosen representative basis."""

    algebra: DGLieAlgebra
    abelian_cohomology: bool

    def entries(self):
        return self.algebra.constants()


def h_star_bracket(L):
    H = L.cohomology()
    R = H.rep_matrix
    k = R.shape[1]
    t = qzeros(k, k, k)
    for a, b in iproduct(range(k), repeat=2):
        t[a, b] = H.classify(L.bracket(R[:, a], R[:, b]))
    hspace = H.hspace
    alg = DGLieAlgebra(hspace, GradedMap.zero(hspace, hspace, 1), t, f"H({L.name})")
    return BracketTable(alg, is_zero(t))


def sl2(name="sl2"):
    """sl_2 in degree 0 with [h,e]=2e, [h,f]=-2f, [e,f]=h."""
    space = GradedSpace((0, 0, 0), ("h", "e", "f"))
    consts = [("h", "e", "e", 2), ("e", "h", "e", -2),
              ("h", "f", "f", -2), ("f", "h", "f", 2),
              ("e", "f", "h", 1), ("f", "e", "h", -1)]
    return DGLieAlgebra.from_constants(space, None, consts, name)


__all__ = [
    "DGLieAlgebra", "DGLAMorphism", "BracketTable", "check_axioms", "end_dgla",
    "kunneth_check", "morphism_check", "direct_product", "is_subalgebra",
    "sub_dgla", "pullback", "h_star_bracket", "sl2", "matrix_lie_algebra",
    "graded_commutator",
]
