"""Cartan homotopies, Lie derivatives and the certificate that a DGLA is
homotopy abelian when it acts on a Cartan calculus.

A Cartan homotopy is a degree -1 map i: L -> M with

    [i_a, i_b] = 0   and   i_{[a,b]} = [i_a, d_M i_b].

Its Lie derivative l_a = d_M i_a + i_{d_L a} is then a DGLA morphism.  If
l lands in a sub-DGLA H of M, H -> M is injective in cohomology, and the
induced map L -> (M/H)[-1] is injective in cohomology, L is homotopy
abelian.
"""

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .dgla import (DGLAMorphism, DGLieAlgebra, h_star_bracket, is_subalgebra,
                   morphism_check, sub_dgla)
from .graded import (GradedMap, GradedSpace, cohomology, induced_map_on_cohomology,
                     is_chain_map, shift_map)
from .homotopy import cone_complex
from .linalg import canon, is_zero, q, qzeros, solve
from .report import InputError, Report

VERDICT_CERTIFIED = "homotopy-abelian-certified"
VERDICT_SMOOTH = "smoothness-only-certified"


def failed(k):
    return f"failed({k})"


@dataclass(frozen=True, eq=False)
class CartanHomotopy:
    source: DGLieAlgebra
    target: DGLieAlgebra
    map: GradedMap

    def __post_init__(self):
        if self.map.degree != -1:
            raise InputError(f"a Cartan homotopy has degree -1, got {self.map.degree}")
        if self.map.source != self.source.space or self.map.target != self.target.space:
            raise InputError("homotopy map does not match the algebras' spaces")

    def __call__(self, a):
        return self.map(a)


def cartan_check(h):
    L, M = h.source, h.target
    I = h.map.matrix
    dI = M.d.matrix @ I
    names = L.space.names
    rep = Report(f"Cartan homotopy {L.name} -> {M.name}")
    comm = lie = None
    for a, b in iproduct(range(L.dim), repeat=2):
        if comm is None:
            v = M.bracket(I[:, a], I[:, b])
            if not is_zero(v):
                comm = {"tuple": [names[a], names[b]], "lhs": v, "rhs": M.space.zero()}
        if lie is None:
            lhs = canon(I @ L.table[a, b])
            rhs = M.bracket(I[:, a], dI[:, b])
            if not np.all(lhs == rhs):
                lie = {"tuple": [names[a], names[b]], "lhs": lhs, "rhs": rhs}
        if comm is not None and lie is not None:
            break
    rep.add("i_commute", comm is None, comm, "[i_a, i_b] = 0")
    rep.add("i_bracket", lie is None, lie, "i_[a,b] = [i_a, d i_b]")
    return rep


def lie_derivative(h, check=True):
    """l = d_M i + i d_L as a DGLA morphism, with its verification report."""
    if check:
        c = cartan_check(h)
        if not c.passed:
            raise InputError("not a Cartan homotopy", witness=c.first_failure().to_dict())
    L, M = h.source, h.target
    m = M.d.matrix @ h.map.matrix + h.map.matrix @ L.d.matrix
    lmap = GradedMap(L.space, M.space, 0, m)
    ell = DGLAMorphism(L, M, lmap)
    rep = morphism_check(ell)
    rep.title = f"Lie derivative {L.name} -> {M.name}"
    homotopy = canon(M.d.matrix @ h.map.matrix + h.map.matrix @ L.d.matrix - m)
    rep.add("homotopic_to_zero_via_i", is_zero(homotopy))
    return ell, rep


@dataclass(frozen=True, eq=False)
class CartanCalculus:
    """A Cartan homotopy together with a sub-DGLA H of its target."""

    homotopy: CartanHomotopy
    H: object  # Subspace of the target
    sub: DGLieAlgebra = field(init=False, repr=False)
    chi: DGLAMorphism = field(init=False, repr=False)

    def __post_init__(self):
        M = self.homotopy.target
        if self.H.space != M.space:
            raise InputError("H is not a subspace of the Cartan homotopy's target")
        w = is_subalgebra(M, self.H)
        if w is not None:
            raise InputError("H is not a DG-Lie subalgebra", witness=w)
        sub, chi = sub_dgla(M, self.H, name="H", names=tuple(f"H.{k}" for k in range(self.H.dim)))
        object.__setattr__(self, "sub", sub)
        object.__setattr__(self, "chi", chi)

    @property
    def source(self):
        return self.homotopy.source

    @property
    def target(self):
        return self.homotopy.target


def quotient_map(data):
    """i: L -> (M/H)[-1] (degree 0) with the target differential -d."""
    M = data.target
    quot = data.H.quotient()
    qd = shift_map(quot.induced(M.d), -1)
    m = quot.projection.matrix @ data.homotopy.map.matrix
    return GradedMap(data.source.space, qd.source, 0, m), qd


def _ledger(data, relaxed):
    L, M = data.source, data.target
    rep = Report(("relaxed " if relaxed else "") + f"BTT ledger for {L.name}")
    c = cartan_check(data.homotopy)
    rep.add("1_cartan_homotopy", c.passed, None if c.passed else c.first_failure().to_dict())
    lmat = M.d.matrix @ data.homotopy.map.matrix + data.homotopy.map.matrix @ L.d.matrix
    miss = None
    for a in range(L.dim):
        if not data.H.contains(lmat[:, a]):
            miss = {"basis_vector": L.space.names[a], "l_a": canon(lmat[:, a])}
            break
    rep.add("2_lie_derivative_in_H", miss is None, miss)

    hchi = data.chi.induced()
    if relaxed:
        ok3 = hchi.injective_in.get(1, True)
    else:
        ok3 = hchi.injective()
    rep.add("3_H_to_M_injective", ok3, None if ok3 else hchi.summary()["injective"])
    rep.data["H_to_M_injective"] = hchi.summary()["injective"]

    imap, qd = quotient_map(data)
    w = is_chain_map(imap, L.d, qd)
    if w is not None:
        rep.add("4_i_injective_on_cohomology", False, {"not_a_chain_map": w})
    else:
        hi = induced_map_on_cohomology(imap, L.d, qd, h_source=L.cohomology())
        ok4 = hi.injective_in.get(2, True) if relaxed else hi.injective()
        rep.add("4_i_injective_on_cohomology", ok4, None if ok4 else hi.summary()["injective"])
        rep.data["i_injective"] = hi.summary()["injective"]
    return rep


def _verdict(rep, success):
    for k, chk in enumerate(rep.checks, start=1):
        if not chk.passed:
            return failed(k)
    return success


def btt_certify(data):
    """Check hypotheses (1)-(4); the verdict is certified iff all pass."""
    rep = _ledger(data, relaxed=False)
    rep.verdict = _verdict(rep, VERDICT_CERTIFIED)
    if rep.verdict == VERDICT_CERTIFIED:
        rep.data["h_star_bracket_zero"] = h_star_bracket(data.source).abelian_cohomology
    return rep


def btt_relaxed(data):
    """Only H^1(H -> M) and H^2(i) injective: Def_L is unobstructed.

    Injectivity in the other degrees is reported in ``data`` for
    information only.
    """
    rep = _ledger(data, relaxed=True)
    rep.verdict = _verdict(rep, VERDICT_SMOOTH)
    return rep


def ks_plus_tensor(L):
    """K[s] (x) L with deg s = -1, d s = 1, s^2 = 0.

    Basis: 1.a (degree |a|) then s.a (degree |a| - 1).
    """
    n = L.dim
    degs = L.space.degrees
    space = GradedSpace(degs + tuple(d - 1 for d in degs),
                        tuple("1." + x for x in L.space.names) + tuple("s." + x for x in L.space.names),
                        (L.space.window[0] - 1, L.space.window[1]))
    d = qzeros(2 * n, 2 * n)
    d[:n, :n] = L.d.matrix
    d[:n, n:] = np.eye(n, dtype=object)
    d[n:, n:] = -L.d.matrix
    t = qzeros(2 * n, 2 * n, 2 * n)
    t[:n, :n, :n] = L.table
    for a in range(n):
        sa = q(-1 if degs[a] % 2 else 1)
        t[a, n:, n:] = L.table[a] * sa      # [1.a, s.b] = (-1)^|a| s.[a,b]
        t[n + a, :n, n:] = L.table[a]       # [s.a, 1.b] = s.[a,b]
    return DGLieAlgebra(space, GradedMap(space, space, 1, d), t, f"K[s]{L.name}")


def ks_inclusion(L, KL):
    """alpha: a -> 1.a."""
    n = L.dim
    m = np.concatenate([np.eye(n, dtype=object), qzeros(n, n)], axis=0)
    return DGLAMorphism(L, KL, GradedMap(L.space, KL.space, 0, m))


def cartan_extension(h, KL):
    """phi: K[s] (x) L -> M, 1.a -> l_a, s.a -> i_a."""
    L, M = h.source, h.target
    lmat = M.d.matrix @ h.map.matrix + h.map.matrix @ L.d.matrix
    m = np.concatenate([lmat, h.map.matrix], axis=1)
    return DGLAMorphism(KL, M, GradedMap(KL.space, M.space, 0, m))


@dataclass(frozen=True)
class AnnihilatorResult:
    image: np.ndarray          # coordinates in H^2 of the cone of H -> M
    representative: np.ndarray
    report: Report

    @property
    def is_zero(self):
        return is_zero(self.image)


def obstruction_annihilator(data, cls):
    """s = H^2(phi) o H^2(p)^{-1} applied to a degree-2 cocycle of L.

    Cone(alpha) for alpha: L -> K[s](x)L maps to Cone(chi) for chi: H -> M
    by (x, y) -> (l x, phi y); p: Cone(alpha) -> L is a quasi-isomorphism
    because K[s](x)L is contractible.
    """
    L, M = data.source, data.target
    cls = canon(cls)
    if L.space.degree_of(cls) not in (2, None):
        raise InputError("class must be homogeneous of degree 2")
    if not is_zero(L.d(cls)):
        raise InputError("class is not closed", witness={"d_class": L.d(cls)})
    rep = Report("obstruction annihilator")
    KL = ks_plus_tensor(L)
    alpha = ks_inclusion(L, KL)
    phi = cartan_extension(data.homotopy, KL)
    rep.extend(morphism_check(phi), "phi.")
    ca, Da, pa, _, _ = cone_complex(alpha.map, L.d, KL.d)
    H = data.sub
    cc, Dc, _, _, _ = cone_complex(data.chi.map, H.d, M.d)
    lmat = phi.map.matrix[:, :L.dim]
    lcoords = solve(data.H.basis, lmat) if data.H.dim else qzeros(0, L.dim)
    if lcoords is None:
        raise InputError("Lie derivative does not land in H")
    big = qzeros(cc.dim, ca.dim)
    big[:H.dim, :L.dim] = lcoords
    big[H.dim:, L.dim:] = phi.map.matrix
    Phi = GradedMap(ca, cc, 0, big)
    w = is_chain_map(Phi, Da, Dc)
    rep.add("cone_map_chain", w is None, w)
    if w is not None:
        raise InputError("cone map is not a chain map", witness=w)
    hL = L.cohomology()
    hA = cohomology(ca, Da)
    Hp = induced_map_on_cohomology(pa, Da, L.d, h_source=hA, h_target=hL)
    rep.add("p_quasi_iso", Hp.iso())
    hC = cohomology(cc, Dc)
    if hL.dim(2) == 0 or hC.dim(2) == 0:
        image = qzeros(hC.dim(2))
        return AnnihilatorResult(image, cc.zero(), rep)
    pre = solve(Hp.block(2), hL.class_in(2, cls))
    rep_vec = canon(big @ (hA.representatives[2] @ pre))
    image = hC.class_in(2, rep_vec)
    rep.data["image"] = image
    return AnnihilatorResult(image, rep_vec, rep)
