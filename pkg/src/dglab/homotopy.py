"""Polynomial forms M[t, dt], the explicit path-object factorisation, and
homotopy fibres through their finite cone model.

An element of M[t, dt] is a finite sum  sum_i m_i t^i + sum_j n_j t^j dt.
Elements are sparse and untruncated; a truncation order ``T`` (t-degree
at most T, dt-part at most T-1) appears only when a whole complex has to be
materialised, and then it is always an explicit argument.
"""

from dataclasses import dataclass, field
import numpy as np

from .dgla import DGLAMorphism, DGLieAlgebra, h_star_bracket, is_subalgebra, morphism_check, sub_dgla
from .graded import (GradedMap, GradedSpace, Subspace, cohomology, exact_at,
                     image_subspace, induced_map_on_cohomology, is_chain_map,
                     kernel_subspace, shift_map)
from .linalg import canon, is_zero, q, qzeros, rank
from .report import InputError, Report


def _clean(terms):
    return tuple(sorted((int(p), canon(v)) for p, v in terms.items() if not is_zero(v)))


@dataclass(frozen=True, eq=False)
class PolyElement:
    """sum m_i t^i + sum n_j t^j dt over an ambient DGLA."""

    ambient: DGLieAlgebra
    t_terms: tuple = ()
    dt_terms: tuple = ()

    @classmethod
    def build(cls, ambient, t=None, dt=None):
        return cls(ambient, _clean(t or {}), _clean(dt or {}))

    @classmethod
    def constant(cls, ambient, m):
        return cls.build(ambient, {0: m})

    def t_dict(self):
        return {p: v for p, v in self.t_terms}

    def dt_dict(self):
        return {p: v for p, v in self.dt_terms}

    def __add__(self, other):
        t, dt = self.t_dict(), self.dt_dict()
        for p, v in other.t_terms:
            t[p] = t[p] + v if p in t else v
        for p, v in other.dt_terms:
            dt[p] = dt[p] + v if p in dt else v
        return PolyElement.build(self.ambient, t, dt)

    def scale(self, c):
        c = q(c)
        return PolyElement.build(self.ambient, {p: v * c for p, v in self.t_terms},
                                 {p: v * c for p, v in self.dt_terms})

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, PolyElement):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self):
        return not self.t_terms and not self.dt_terms


def poly_d(x):
    """d(m p(t) + n q(t) dt) = (dm) p + (-1)^{|m|} m p' dt + (dn) q dt."""
    M = x.ambient
    par = M.space.parity
    t, dt = {}, {}

    def acc(store, p, v):
        store[p] = store[p] + v if p in store else v
    for p, m in x.t_terms:
        acc(t, p, M.d(m))
        if p:
            acc(dt, p - 1, canon(par * m) * p)
    for p, n in x.dt_terms:
        acc(dt, p, M.d(n))
    return PolyElement.build(M, t, dt)


def poly_bracket(x, y):
    """Bracket on M (x) K[t, dt] with Koszul signs: dt . dt = 0 and moving
    dt past n costs (-1)^{|n|}."""
    M = x.ambient
    par = M.space.parity
    t, dt = {}, {}

    def acc(store, p, v):
        store[p] = store[p] + v if p in store else v
    for i, m in x.t_terms:
        for j, n in y.t_terms:
            acc(t, i + j, M.bracket(m, n))
        for j, n in y.dt_terms:
            acc(dt, i + j, M.bracket(m, n))
    for i, m in x.dt_terms:
        for j, n in y.t_terms:
            acc(dt, i + j, M.bracket(m, canon(par * n)))
    return PolyElement.build(M, t, dt)


def evaluate(x, a):
    """e_a: sum m_i t^i + n_i t^i dt  ->  sum m_i a^i."""
    a = q(a)
    out = x.ambient.space.zero()
    for p, m in x.t_terms:
        out = out + m * a ** p
    return canon(out)


def integrate01(x):
    """Integral over [0, 1]: sum_j n_j / (j + 1); t-only terms give 0."""
    out = x.ambient.space.zero()
    for p, n in x.dt_terms:
        out = out + n * q(f"1/{p + 1}")
    return canon(out)


def times_poly(m, ambient, coeffs):
    """m * (sum_k coeffs[k] t^k)."""
    return PolyElement.build(ambient, {k: m * q(c) for k, c in enumerate(coeffs)})


class PolyComplex:
    """M (x) K[t, dt] truncated to t-degree <= T, as a finite complex.

    Coordinates: the t^i part for i = 0..T, then the t^j dt part for
    j = 0..T-1, each a copy of M's basis.
    """

    def __init__(self, M, T):
        if T < 1:
            raise InputError("truncation order must be at least 1")
        self.M, self.T = M, T
        n = M.dim
        degrees, names = [], []
        for i in range(T + 1):
            degrees += list(M.space.degrees)
            names += [f"{nm}*t^{i}" for nm in M.space.names]
        for j in range(T):
            degrees += [d + 1 for d in M.space.degrees]
            names += [f"{nm}*t^{j}dt" for nm in M.space.names]
        lo, hi = M.space.window
        self.space = GradedSpace(tuple(degrees), tuple(names), (lo, hi + 1))
        self.n = n
        cols = [poly_d(self.decode(self.space.basis_vector(k))) for k in range(self.space.dim)]
        self.d = GradedMap(self.space, self.space, 1,
                           np.stack([self.encode(c) for c in cols], axis=1) if cols
                           else qzeros(0, 0))

    def encode(self, x):
        v = self.space.zero()
        n = self.n
        for p, m in x.t_terms:
            if p > self.T:
                raise InputError("element exceeds the truncation order")
            v[p * n:(p + 1) * n] = m
        off = (self.T + 1) * n
        for p, m in x.dt_terms:
            if p > self.T - 1:
                raise InputError("element exceeds the truncation order")
            v[off + p * n:off + (p + 1) * n] = m
        return v

    def decode(self, v):
        n = self.n
        t = {p: v[p * n:(p + 1) * n] for p in range(self.T + 1)}
        off = (self.T + 1) * n
        dt = {p: v[off + p * n:off + (p + 1) * n] for p in range(self.T)}
        return PolyElement.build(self.M, t, dt)

    def evaluation(self, a):
        """e_a as a matrix on the truncated coordinates."""
        a = q(a)
        n = self.n
        m = qzeros(n, self.space.dim)
        for p in range(self.T + 1):
            for b in range(n):
                m[b, p * n + b] = a ** p
        return m

    def integral(self):
        n = self.n
        m = qzeros(n, self.space.dim)
        off = (self.T + 1) * n
        for p in range(self.T):
            for b in range(n):
                m[b, off + p * n + b] = q(f"1/{p + 1}")
        return m


def _pair_complex(L, poly):
    """L (+) M[t,dt]_{<=T} with the sum differential."""
    space = L.space.direct_sum(poly.space, ("L.", "P."))
    d = qzeros(space.dim, space.dim)
    n = L.dim
    d[:n, :n] = L.d.matrix
    d[n:, n:] = poly.d.matrix
    return space, GradedMap(space, space, 1, d)


@dataclass(frozen=True, eq=False)
class FactorizationData:
    """L -i-> P_f -g-> M with p: P_f -> L, checked on the truncated model."""

    morphism: DGLAMorphism
    truncation: int
    carrier: str
    space: GradedSpace
    d: GradedMap
    i: GradedMap
    g: GradedMap
    p: GradedMap
    ledger: Report = field(repr=False)


def factorize(f, T=2):
    """Path-object factorisation P_f = {(x, m(t,dt)) : m(1) = f(x)}.

    g(x, m) = m(0), i(x) = (x, f(x)), p(x, m) = x.  The ledger checks
    g o i = f and p o i = id on every basis vector, surjectivity of g via
    the preimage (0, (1 - t) m), and that p is a surjective
    quasi-isomorphism on the t-degree <= T truncation of P_f.
    """
    mc = morphism_check(f)
    if not mc.passed:
        raise InputError("not a DGLA morphism", witness=mc.first_failure().to_dict())
    L, M = f.source, f.target
    poly = PolyComplex(M, T)
    big, dbig = _pair_complex(L, poly)
    n = L.dim
    e1, e0 = poly.evaluation(1), poly.evaluation(0)
    # P_f = ker((x, m) -> m(1) - f(x))
    constraint = np.concatenate([-f.map.matrix, e1], axis=1)
    S = kernel_subspace(GradedMap(big, M.space, 0, constraint))
    Pd = S.restrict(dbig)
    Pspace = Pd.source
    B = S.basis
    i_mat = qzeros(S.dim, n)
    ledger = Report(f"factorisation of {L.name} -> {M.name}")
    i_ok = True
    for a in range(n):
        x = L.space.basis_vector(a)
        image = np.concatenate([x, poly.encode(PolyElement.constant(M, f(x)))])
        c = S.coords(image)
        if c is None:
            i_ok = False
            break
        i_mat[:, a] = c
    ledger.add("i_lands_in_P", i_ok)
    i_map = GradedMap(L.space, Pspace, 0, i_mat)
    g_map = GradedMap(Pspace, M.space, 0, e0 @ B[n:, :])
    p_map = GradedMap(Pspace, L.space, 0, B[:n, :])

    gi = g_map.compose(i_map)
    bad = _first_col_diff(gi.matrix, f.map.matrix, L.space.names)
    ledger.add("g_o_i_equals_f", bad is None, bad)
    pi = p_map.compose(i_map)
    bad = _first_col_diff(pi.matrix, np.eye(n, dtype=object), L.space.names)
    ledger.add("p_o_i_equals_id", bad is None, bad)

    witness = None
    for b in range(M.dim):
        m = M.space.basis_vector(b)
        pre = times_poly(m, M, [1, -1])
        vec = np.concatenate([L.space.zero(), poly.encode(pre)])
        c = S.coords(vec)
        if c is None or not np.all(canon(g_map.matrix @ c) == m) or not np.all(evaluate(pre, 0) == m):
            witness = {"basis_vector": M.space.names[b]}
            break
    ledger.add("g_surjective_via_(1-t)m", witness is None, witness)

    ledger.add("i_chain_map", is_chain_map(i_map, L.d, Pd) is None)
    ledger.add("g_chain_map", is_chain_map(g_map, Pd, M.d) is None)
    ledger.add("p_surjective", rank(p_map.matrix) == L.dim)
    hp = induced_map_on_cohomology(p_map, Pd, L.d)
    ledger.add("p_quasi_iso", hp.iso(), hp.summary() if not hp.iso() else None)
    hi = induced_map_on_cohomology(i_map, L.d, Pd)
    ledger.add("i_injective_quasi_iso", rank(i_mat) == n and hi.iso())
    return FactorizationData(f, T, "{(x, m(t,dt)) in L x M[t,dt] | m(1) = f(x)}",
                             Pspace, Pd, i_map, g_map, p_map, ledger)


def _first_col_diff(a, b, names):
    diff = canon(a - b)
    for j in range(diff.shape[1]):
        if not is_zero(diff[:, j]):
            return {"basis_vector": names[j], "lhs": canon(a[:, j]), "rhs": canon(b[:, j])}
    return None


@dataclass(frozen=True, eq=False)
class ConeModel:
    """C(f)^i = L^i (+) M^{i-1},  D(x, m) = (d x, f(x) - d m)."""

    morphism: DGLAMorphism
    space: GradedSpace
    d: GradedMap
    to_source: GradedMap     # (x, m) -> x
    from_target: GradedMap   # M[-1] -> C, m -> (0, m)
    target_shifted_d: GradedMap
    report: Report = field(repr=False)

    def cohomology(self):
        return cohomology(self.space, self.d)


def cone_complex(fmap, dL, dM):
    """Cone of a degree-0 chain map between complexes."""
    L, M = fmap.source, fmap.target
    Ms = M.shift(-1)
    space = L.direct_sum(Ms, ("", "s."))
    n, m = L.dim, M.dim
    D = qzeros(n + m, n + m)
    D[:n, :n] = dL.matrix
    D[n:, :n] = fmap.matrix
    D[n:, n:] = -dM.matrix
    d = GradedMap(space, space, 1, D)
    proj = GradedMap(space, L, 0, np.concatenate([np.eye(n, dtype=object), qzeros(n, m)], axis=1))
    inc_mat = np.concatenate([qzeros(n, m), np.eye(m, dtype=object)], axis=0)
    dMs = shift_map(dM, -1)
    inc = GradedMap(dMs.source, space, 0, inc_mat)
    return space, d, proj, inc, dMs


def long_exact_sequence(fmap, dL, dM, space, d, proj, inc, dMs):
    """Exactness of ... H^{i-1}(M) -> H^i(C) -> H^i(L) -> H^i(M) -> ...
    at every position; returns a Report."""
    hL = cohomology(fmap.source, dL)
    hM = cohomology(fmap.target, dM)
    hMs = cohomology(dMs.source, dMs)
    hC = cohomology(space, d)
    Hf = induced_map_on_cohomology(fmap, dL, dM, h_source=hL, h_target=hM)
    Hj = induced_map_on_cohomology(inc, dMs, d, h_source=hMs, h_target=hC)
    Hp = induced_map_on_cohomology(proj, d, dL, h_source=hC, h_target=hL)
    # H(M[-1])^i = H^{i-1}(M); H(f) between M-degree i-1 blocks
    lo = min(space.window[0], fmap.source.window[0], fmap.target.window[0]) - 1
    hi = max(space.window[1], fmap.source.window[1], fmap.target.window[1]) + 1
    rep = Report("long exact sequence")
    for i in range(lo, hi + 1):
        f_prev = Hf.block(i - 1)           # H^{i-1}(L) -> H^{i-1}(M)
        j_i = Hj.block(i)                  # H^{i-1}(M) -> H^i(C)
        p_i = Hp.block(i)                  # H^i(C) -> H^i(L)
        f_i = Hf.block(i)                  # H^i(L) -> H^i(M)
        rep.add(f"exact_at_H{i - 1}(M)", exact_at(f_prev, j_i, hM.dim(i - 1)))
        rep.add(f"exact_at_H{i}(C)", exact_at(j_i, p_i, hC.dim(i)))
        rep.add(f"exact_at_H{i}(L)", exact_at(p_i, f_i, hL.dim(i)))
    rep.data["dims"] = {"C": hC.dims, "L": hL.dims, "M": hM.dims}
    return rep


def cone_model(f):
    mc = morphism_check(f)
    if not mc.passed:
        raise InputError("not a DGLA morphism", witness=mc.first_failure().to_dict())
    space, d, proj, inc, dMs = cone_complex(f.map, f.source.d, f.target.d)
    rep = Report(f"cone of {f.source.name} -> {f.target.name}")
    rep.add("D_squared_zero", is_zero(d.matrix @ d.matrix))
    rep.extend(long_exact_sequence(f.map, f.source.d, f.target.d, space, d, proj, inc, dMs))
    rep.data["cohomology_dims"] = cohomology(space, d).dims
    return ConeModel(f, space, d, proj, inc, dMs, rep)


def _quotient_shifted(f):
    """(M / f(L))[-1] with differential -(induced d), and the projection."""
    M = f.target
    S = image_subspace(f.map)
    quot = S.quotient()
    qd = quot.induced(M.d)
    qds = shift_map(qd, -1)
    return quot, qds


def tw_projection_quasi_iso_check(f, T=2):
    """For injective f: the projections onto (M/f(L))[-1] from the cone
    model and from the truncated homotopy fibre are quasi-isomorphisms.

    On the fibre {(x, m) : m(0) = 0, m(1) = f(x)} the map is
    z -> (-1)^{deg z} (integral of the dt-part) mod f(L); the degree sign
    makes it a chain map for the shifted differential -d.
    """
    if rank(f.map.matrix) != f.source.dim:
        raise InputError("morphism is not injective")
    L, M = f.source, f.target
    quot, qds = _quotient_shifted(f)
    rep = Report(f"homotopy fibre of {L.name} -> {M.name} vs cokernel[-1]")

    # cone model: (x, m) -> m mod f(L)
    cone = cone_model(f)
    n = L.dim
    cmap = GradedMap(cone.space, qds.source, 0,
                     np.concatenate([qzeros(quot.space.dim, n), quot.projection.matrix], axis=1))
    w = is_chain_map(cmap, cone.d, qds)
    rep.add("cone_map_chain", w is None, w)
    if w is None:
        h = induced_map_on_cohomology(cmap, cone.d, qds)
        rep.add("cone_map_quasi_iso", h.iso(), h.summary())
        rep.add("cone_map_surjective", rank(cmap.matrix) == qds.source.dim)

    # truncated homotopy fibre
    poly = PolyComplex(M, T)
    big, dbig = _pair_complex(L, poly)
    e1, e0 = poly.evaluation(1), poly.evaluation(0)
    top = np.concatenate([-f.map.matrix, e1], axis=1)
    bottom = np.concatenate([qzeros(M.dim, n), e0], axis=1)
    constraint = GradedMap(big, M.space.direct_sum(M.space, ("1.", "0.")), 0,
                           np.concatenate([top, bottom], axis=0))
    S = kernel_subspace(constraint)
    tw_d = S.restrict(dbig)
    integ = quot.projection.matrix @ poly.integral() @ S.basis[n:, :]
    signs = np.array([q(-1 if deg % 2 else 1) for deg in tw_d.source.degrees], dtype=object)
    tw_map = GradedMap(tw_d.source, qds.source, 0, integ * signs[np.newaxis, :] if integ.size else integ)
    w = is_chain_map(tw_map, tw_d, qds)
    rep.add("fibre_map_chain", w is None, w)
    if w is None:
        h = induced_map_on_cohomology(tw_map, tw_d, qds)
        rep.add("fibre_map_quasi_iso", h.iso(), h.summary())
    hC = cone.cohomology().dims
    hT = cohomology(tw_d.source, tw_d).dims
    rep.add("fibre_matches_cone", all(hC.get(i, 0) == hT.get(i, 0) for i in set(hC) | set(hT)))
    return rep


def homotopy_fiber_abelian_probe(f, mc_order=3):
    """Certificates from injectivity of H^*(f).

    All degrees injective: the fibre is homotopy abelian.  Only H^1
    injective: its deformation functor is unobstructed.  When f is
    surjective, ker f is a finite DGLA model of the fibre and the
    certificate is cross-checked on it.
    """
    from .mc import ArtinianBase, unobstructed_probe

    h = f.induced()
    rep = Report(f"homotopy fibre of {f.source.name} -> {f.target.name}")
    rep.data["injective"] = {str(k): v for k, v in sorted(h.injective_in.items())}
    rep.data["matrices"] = h.summary()["matrices"]
    if h.injective():
        rep.verdict = "homotopy-abelian"
    elif h.injective_in.get(1, True):
        rep.verdict = "unobstructed"
    else:
        rep.verdict = "none"
    cone = cone_model(f)
    rep.data["fibre_cohomology"] = cone.cohomology().dims
    if rank(f.map.matrix) == f.target.dim and rep.verdict != "none":
        K, _ = sub_dgla(f.source, kernel_subspace(f.map), name="ker")
        if rep.verdict == "homotopy-abelian":
            rep.add("kernel_bracket_on_H_zero", h_star_bracket(K).abelian_cohomology)
        probe = unobstructed_probe(K, ArtinianBase(1, mc_order), mc_order)
        rep.add("kernel_unobstructed", probe.passed, probe.data.get("failure"))
    return rep


def grassmannian_stabilizer(W, dW, U_indices):
    """{phi in End(W) : phi(U) in U} -> End(W) for the coordinate subspace
    U spanned by the given basis vectors (which must form a subcomplex)."""
    from .dgla import end_dgla

    E = end_dgla(W, dW)
    U = set(U_indices)
    vecs = []
    for k, nm in enumerate(E.space.names):
        t_name, s_name = nm[2:-1].split("<-")
        s, t = W.index(s_name), W.index(t_name)
        if s not in U or t in U:
            vecs.append(E.space.basis_vector(k))
    S = Subspace.span(E.space, vecs)
    w = is_subalgebra(E, S)
    if w is not None:
        raise InputError("U is not a subcomplex", witness=w)
    sub, inc = sub_dgla(E, S, name="Stab")
    return inc
