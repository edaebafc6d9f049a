"""Differential Batalin-Vilkovisky algebras and (d, Delta) bicomplexes.

A dBV algebra of odd degree k is a unital graded-commutative DG algebra
(A, d) with an operator Delta of degree -k, Delta^2 = 0, Delta(1) = 0,
d Delta + Delta d = 0, satisfying the seven-term second-order relation.
L = A[k] with d_L = -d and

    [a, b] = (-1)^p (Delta(ab) - Delta(a) b) - a Delta(b),   a in A^p,

is then a DGLA.  Degeneration asks every d-closed a_0 to extend to a
chain with Delta a_i = d a_{i+1}.
"""

from dataclasses import dataclass, field
from itertools import product as iproduct
from math import ceil, factorial

import numpy as np

from .dgla import DGLieAlgebra, check_axioms, h_star_bracket
from .graded import GradedMap, GradedSpace, check_differential, graded_commutator
from .linalg import canon, column_basis, is_zero, nullspace, q, qeye, qzeros, rank, solve
from .report import InputError, Report


def _sgn(e):
    return -1 if e % 2 else 1


@dataclass(frozen=True, eq=False)
class Bicomplex:
    """(V, d, Delta) with d^2 = 0 and Delta^2 = 0; Delta of any degree."""

    space: GradedSpace
    d: GradedMap
    delta: GradedMap

    def __post_init__(self):
        check_differential(self.d)
        if not self.delta.is_endo() or self.delta.source != self.space:
            raise InputError("Delta must be an endomap of the space")
        if not is_zero(self.delta.matrix @ self.delta.matrix):
            raise InputError("Delta^2 != 0")

    @property
    def step(self):
        """deg a_{i+1} - deg a_i along a chain Delta a_i = d a_{i+1}."""
        return self.delta.degree - 1

    def anticommute(self):
        return is_zero(self.d.matrix @ self.delta.matrix + self.delta.matrix @ self.d.matrix)


@dataclass(frozen=True, eq=False)
class DBVAlgebra:
    space: GradedSpace
    unit: np.ndarray
    product: np.ndarray = field(repr=False)   # product[a, b] = coords of e_a e_b
    d: GradedMap = None
    delta: GradedMap = None
    k: int = 1

    def __post_init__(self):
        n = self.space.dim
        p = canon(self.product)
        if p.shape != (n, n, n):
            raise InputError(f"product tensor has shape {p.shape}, expected {(n, n, n)}")
        degs = self.space.degrees
        for (a, b, c), x in np.ndenumerate(p):
            if x != 0 and degs[c] != degs[a] + degs[b]:
                raise InputError(f"product {self.space.names[a]}*{self.space.names[b]} "
                                 f"has a component of the wrong degree")
        p.setflags(write=False)
        object.__setattr__(self, "product", p)
        object.__setattr__(self, "unit", canon(self.unit))
        d = self.d if self.d is not None else GradedMap.zero(self.space, self.space, 1)
        object.__setattr__(self, "d", d)
        if self.delta is None:
            raise InputError("Delta is required")
        object.__setattr__(self, "k", int(self.k))

    @property
    def dim(self):
        return self.space.dim

    def mul(self, x, y):
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        return canon(np.tensordot(y, np.tensordot(x, self.product, axes=([0], [0])), axes=([0], [0])))

    def left(self, x):
        """Matrix of y -> x y."""
        return canon(np.tensordot(np.asarray(x, dtype=object), self.product, axes=([0], [0])).T)

    @property
    def bicomplex(self):
        return Bicomplex(self.space, self.d, self.delta)


def bv_check(A):
    rep = Report("dBV axioms")
    degs = A.space.degrees
    names = A.space.names
    n = A.dim
    E = [A.space.basis_vector(i) for i in range(n)]
    D, Dl = A.d.matrix, A.delta.matrix
    rep.add("k_odd", A.k % 2 == 1, {"k": A.k})
    rep.add("delta_degree", A.delta.degree == -A.k, {"degree": A.delta.degree, "expected": -A.k})
    rep.add("unit_in_degree_0", A.space.degree_of(A.unit) == 0 and not is_zero(A.unit))

    def first(pred):
        for t in pred:
            if t is not None:
                return t
        return None

    def unit_fail(a):
        l, r = A.mul(A.unit, E[a]), A.mul(E[a], A.unit)
        if not (np.all(l == E[a]) and np.all(r == E[a])):
            return {"tuple": [names[a]], "lhs": l, "rhs": r}
        return None
    w = first(unit_fail(a) for a in range(n))
    rep.add("unit", w is None, w)

    ab = [[A.product[a, b] for b in range(n)] for a in range(n)]

    def assoc_fail(a, b, c):
        l, r = A.mul(ab[a][b], E[c]), A.mul(E[a], ab[b][c])
        if not np.all(l == r):
            return {"tuple": [names[a], names[b], names[c]], "lhs": l, "rhs": r}
        return None
    w = first(assoc_fail(a, b, c) for a, b, c in iproduct(range(n), repeat=3))
    rep.add("associative", w is None, w)

    def comm_fail(a, b):
        l, r = ab[a][b], ab[b][a] * _sgn(degs[a] * degs[b])
        if not np.all(l == r):
            return {"tuple": [names[a], names[b]], "lhs": l, "rhs": canon(r)}
        return None
    w = first(comm_fail(a, b) for a, b in iproduct(range(n), repeat=2))
    rep.add("graded_commutative", w is None, w)

    rep.add("d_degree_1", A.d.degree == 1)
    rep.add("d_squared", is_zero(D @ D))
    rep.add("delta_squared", is_zero(Dl @ Dl))
    rep.add("delta_unit", is_zero(A.delta(A.unit)), {"delta_1": A.delta(A.unit)})

    def der_fail(a, b):
        l = A.d(ab[a][b])
        r = A.mul(D[:, a], E[b]) + _sgn(degs[a]) * A.mul(E[a], D[:, b])
        if not np.all(l == r):
            return {"tuple": [names[a], names[b]], "lhs": l, "rhs": canon(r)}
        return None
    w = first(der_fail(a, b) for a, b in iproduct(range(n), repeat=2))
    rep.add("d_derivation", w is None, w)
    rep.add("d_delta_anticommute", is_zero(D @ Dl + Dl @ D))

    def bv_fail(a, b, c):
        x, y, z = degs[a], degs[b], degs[c]
        abc = A.mul(ab[a][b], E[c])
        lhs = (A.delta(abc) + A.mul(A.mul(Dl[:, a], E[b]), E[c])
               + _sgn(x * y) * A.mul(A.mul(Dl[:, b], E[a]), E[c])
               + _sgn(z * (x + y)) * A.mul(Dl[:, c], ab[a][b]))
        rhs = (A.mul(A.delta(ab[a][b]), E[c])
               + _sgn(x * (y + z)) * A.mul(A.delta(ab[b][c]), E[a])
               + _sgn(y * z) * A.mul(A.delta(ab[a][c]), E[b]))
        if not np.all(canon(lhs) == canon(rhs)):
            return {"tuple": [names[a], names[b], names[c]], "lhs": canon(lhs), "rhs": canon(rhs)}
        return None
    w = first(bv_fail(a, b, c) for a, b, c in iproduct(range(n), repeat=3))
    rep.add("bv_relation", w is None, w)
    return rep


def bv_bracket(A, x, y, p):
    """The derived bracket for x homogeneous of A-degree p."""
    return canon(_sgn(p) * (A.delta(A.mul(x, y)) - A.mul(A.delta(x), y)) - A.mul(x, A.delta(y)))


def bv_to_dgla(A, check=True, name="L"):
    if check:
        rep = bv_check(A)
        if not rep.passed:
            raise InputError("not a dBV algebra", witness=rep.first_failure().to_dict())
    n = A.dim
    space = A.space.shift(A.k)
    t = qzeros(n, n, n)
    for a, b in iproduct(range(n), repeat=2):
        t[a, b] = bv_bracket(A, A.space.basis_vector(a), A.space.basis_vector(b), A.space.degrees[a])
    d = GradedMap(space, space, 1, -A.d.matrix)
    return DGLieAlgebra(space, d, t, name)


# -- degeneration -----------------------------------------------------------

@dataclass
class DegenerationWitness:
    holds: bool | None
    step: int
    method: str
    chains: dict = field(default_factory=dict)     # generator name -> list of vectors
    failure: dict | None = None
    bound: int | None = None
    explanation: str = ""

    def verify(self, X):
        """Every stored chain satisfies Delta a_i = d a_{i+1} and the degree rule."""
        V = X.space
        for chain in self.chains.values():
            for i in range(len(chain) - 1):
                if not np.all(X.delta(chain[i]) == X.d(chain[i + 1])):
                    return False
                di, dj = V.degree_of(chain[i]), V.degree_of(chain[i + 1])
                if di is not None and dj is not None and dj - di != self.step:
                    return False
        return True

    def to_report(self):
        rep = Report("degeneration")
        rep.verdict = {True: "holds", False: "fails", None: "undecided"}[self.holds]
        rep.add("degeneration", bool(self.holds), self.failure, self.explanation)
        rep.data.update({"step": self.step, "method": self.method, "bound": self.bound,
                         "chains": {k: v for k, v in self.chains.items()}})
        return rep


def _bicomplex(X):
    return X.bicomplex if isinstance(X, DBVAlgebra) else X


def closed_generators(X):
    """Basis of ker d, degree by degree, as (name, vector) pairs."""
    V = X.space
    out = []
    for p in V.support:
        idx = V.indices(p)
        K = nullspace(X.d.block(p))
        for j in range(K.shape[1]):
            v = V.zero()
            v[idx] = K[:, j]
            out.append((f"z{p}_{j}", canon(v)))
    return out


def degeneration_solve(X):
    """Decide the degeneration property.

    For chains that change degree the chain must leave the grading window
    after N = ceil(width / |step|) + 1 steps, and one stacked linear system
    per generator of ker d decides it.  Degree-preserving chains are
    decided by the largest subspace W with Delta(W) in d(W).
    """
    X = _bicomplex(X)
    step = X.step
    if step == 0:
        return _degeneration_fixpoint(X)
    V = X.space
    lo, hi = (min(V.support), max(V.support)) if V.dim else (0, 0)
    N = ceil((hi - lo) / abs(step)) + 1
    wit = DegenerationWitness(True, step, "stacked", bound=N)
    for name, a0 in closed_generators(X):
        p = V.degree_of(a0)
        blocks = [V.indices(p + i * step) for i in range(1, N + 1)]
        offs = np.cumsum([0] + [len(b) for b in blocks])
        nvar = int(offs[-1])
        rows, rhs = [], []
        # d a_1 = Delta a_0;  d a_{i+1} - Delta a_i = 0;  Delta a_N = 0
        for i in range(N + 1):
            eq = qzeros(V.dim, nvar)
            if i < N:
                eq[:, offs[i]:offs[i + 1]] = X.d.matrix[:, blocks[i]]
            if i >= 1:
                eq[:, offs[i - 1]:offs[i]] -= X.delta.matrix[:, blocks[i - 1]]
            rows.append(eq)
            rhs.append(X.delta(a0) if i == 0 else V.zero())
        Amat = np.concatenate(rows, axis=0)
        bvec = np.concatenate(rhs)
        sol = solve(Amat, bvec) if nvar else (None if not is_zero(bvec) else qzeros(0))
        if sol is None:
            wit.holds = False
            ra = rank(Amat) if nvar else 0
            wit.failure = {"generator": name, "a0": a0, "rank_system": ra,
                           "rank_augmented": rank(np.concatenate([Amat, bvec.reshape(-1, 1)], axis=1))}
            wit.explanation = "stacked chain system is infeasible"
            return wit
        chain = [a0]
        for i, b in enumerate(blocks):
            v = V.zero()
            v[b] = sol[offs[i]:offs[i + 1]]
            chain.append(v)
        wit.chains[name] = chain
    return wit


def _preimage_space(F, U):
    """Basis (columns) of {x : F x in span(U)}."""
    n = F.shape[1]
    if U.shape[1] == 0:
        return nullspace(F)
    K = nullspace(np.concatenate([F, -U], axis=1))
    return column_basis(K[:n, :]) if K.shape[1] else qzeros(n, 0)


def _degeneration_fixpoint(X):
    V = X.space
    W = qeye(V.dim)
    history = [V.dim]
    while True:
        nxt = _preimage_space(X.delta.matrix, column_basis(X.d.matrix @ W))
        if nxt.shape[1] == W.shape[1]:
            break
        W = nxt
        history.append(W.shape[1])
    wit = DegenerationWitness(True, 0, "fixpoint", bound=len(history),
                              explanation="largest W with Delta(W) in d(W)")
    dW = canon(X.d.matrix @ W)
    for name, a0 in closed_generators(X):
        c = solve(W, a0) if W.shape[1] else None
        if c is None:
            wit.holds = False
            wit.failure = {"generator": name, "a0": a0, "stable_dims": history}
            return wit
        chain = [a0]
        for _ in range(len(history) + 1):
            y = solve(dW, X.delta(chain[-1]))
            chain.append(canon(W @ y))
        wit.chains[name] = chain
    return wit


def d_delta_lemma_check(X):
    """ker d cap im Delta = ker Delta cap im d = im(d Delta), by ranks."""
    X = _bicomplex(X)
    if not X.anticommute():
        raise InputError("d Delta + Delta d != 0")
    D, Dl = X.d.matrix, X.delta.matrix
    dD = canon(D @ Dl)
    r_img = rank(dD)
    # ker d cap im Delta = Delta(ker(d Delta)); ker Delta cap im d = d(ker(Delta d))
    r1 = rank(Dl @ nullspace(dD))
    r2 = rank(D @ nullspace(canon(Dl @ D)))
    rep = Report("d-Delta lemma")
    rep.add("ker_d_cap_im_delta", r1 == r_img, {"dim": r1, "im_d_delta": r_img})
    rep.add("ker_delta_cap_im_d", r2 == r_img, {"dim": r2, "im_d_delta": r_img})
    rep.data["holds"] = rep.passed
    if rep.passed:
        deg = degeneration_solve(X)
        rep.add("implies_degeneration", deg.holds is True, deg.failure)
    rep.verdict = "holds" if rep.data["holds"] else "fails"
    return rep


def exp_tf_witness(X, f, max_steps=None):
    """Chains a_i = f^i(a)/i! when Delta = [d, f] and [f, Delta] = 0."""
    X = _bicomplex(X)
    rep = Report("exp(tf) witness")
    if f.degree != X.delta.degree - 1:
        raise InputError(f"f must have degree {X.delta.degree - 1}")
    rep.add("delta_is_commutator", graded_commutator(X.d, f) == X.delta)
    rep.add("f_commutes_with_delta", graded_commutator(f, X.delta).is_zero())
    n = X.space.dim
    P, nil = qeye(n), None
    for i in range(n + 1):
        if is_zero(P):
            nil = i
            break
        P = canon(P @ f.matrix)
    if nil is None and max_steps is None:
        wit = DegenerationWitness(None, X.step, "exp", explanation="f is not nilpotent")
        return wit, rep
    if not rep.passed:
        return DegenerationWitness(None, X.step, "exp", explanation="hypotheses fail"), rep
    steps = nil if nil is not None else max_steps
    wit = DegenerationWitness(True, X.step, "exp", bound=steps)
    for name, a0 in closed_generators(X):
        chain, cur = [a0], a0
        for i in range(1, steps + 1):
            cur = f(cur)
            chain.append(canon(cur * q(f"1/{factorial(i)}")))
        while len(chain) > 1 and is_zero(chain[-1]):
            chain.pop()
        chain.append(X.space.zero())
        wit.chains[name] = chain
    rep.add("chains_satisfy_recurrence", wit.verify(X))
    other = degeneration_solve(X)
    rep.add("agrees_with_solver", other.holds is True, other.failure)
    return wit, rep


# -- finite Laurent model of the Cartan homotopy a -> (b -> ab/t) ----------

class LaurentOp:
    """t-linear operator sum_p X_p t^p on A((t)); deg t = 1 + k is even, so
    t is central and signs only see the total degree parity."""

    def __init__(self, terms, parity):
        self.terms = {p: canon(m) for p, m in terms.items() if not is_zero(m)}
        self.parity = parity % 2

    def bracket(self, other):
        out = {}
        s = _sgn(self.parity * other.parity)
        for p, x in self.terms.items():
            for r, y in other.terms.items():
                v = x @ y - s * (y @ x)
                out[p + r] = out[p + r] + v if p + r in out else v
        return LaurentOp(out, self.parity + other.parity)

    def __sub__(self, other):
        out = dict(self.terms)
        for p, y in other.terms.items():
            out[p] = out[p] - y if p in out else -y
        return LaurentOp(out, self.parity)

    def __add__(self, other):
        out = dict(self.terms)
        for p, y in other.terms.items():
            out[p] = out[p] + y if p in out else y
        return LaurentOp(out, self.parity)

    def is_zero(self):
        return not self.terms

    def min_power(self):
        return min(self.terms, default=None)


def laurent_cartan_check(A, L=None):
    """Cartan identities for i_a = (left multiplication by a) t^{-1} in
    End(A)((t)) with differential [d - t Delta, -]; also checks that the
    Lie derivative l_a has no negative powers of t."""
    L = L or bv_to_dgla(A)
    n = A.dim
    D = LaurentOp({0: A.d.matrix, 1: -A.delta.matrix}, 1)
    rep = Report("Laurent-window Cartan homotopy")
    rep.add("D_squared_zero", D.bracket(D).is_zero())
    degs = L.space.degrees
    I = [LaurentOp({-1: A.left(A.space.basis_vector(a))}, degs[a] - 1) for a in range(n)]
    comm = lie = neg = None
    names = A.space.names
    for a, b in iproduct(range(n), repeat=2):
        if comm is None and not I[a].bracket(I[b]).is_zero():
            comm = {"tuple": [names[a], names[b]]}
        if lie is None:
            target = LaurentOp({-1: A.left(L.table[a, b])}, degs[a] + degs[b] - 1)
            if not (I[a].bracket(D.bracket(I[b])) - target).is_zero():
                lie = {"tuple": [names[a], names[b]]}
    for a in range(n):
        ell = D.bracket(I[a]) + LaurentOp({-1: A.left(L.d.matrix[:, a])}, degs[a])
        mp = ell.min_power()
        if mp is not None and mp < 0:
            neg = {"basis_vector": names[a], "power": mp}
            break
    rep.add("i_commute", comm is None, comm)
    rep.add("i_bracket", lie is None, lie)
    rep.add("lie_derivative_in_A[[t]]", neg is None, neg)
    return rep


def bv_pipeline(A, mc_order=3):
    """Degeneration, then the testable consequences of homotopy abelianity
    on L = A[k]: trivial bracket on H^*(L) and unobstructed deformations."""
    from .mc import ArtinianBase, unobstructed_probe

    rep = Report("dBV pipeline")
    chk = bv_check(A)
    rep.extend(chk, "bv.")
    if not chk.passed:
        rep.verdict = "invalid-input"
        return rep
    deg = degeneration_solve(A)
    rep.add("degeneration", deg.holds is True, deg.failure, deg.method)
    if not deg.holds:
        rep.verdict = "degeneration-fails"
        return rep
    L = bv_to_dgla(A, check=False)
    rep.extend(check_axioms(L), "dgla.")
    rep.extend(laurent_cartan_check(A, L), "cartan.")
    rep.add("h_star_bracket_zero", h_star_bracket(L).abelian_cohomology)
    h1 = L.cohomology().dim(1)
    if h1:
        probe = unobstructed_probe(L, ArtinianBase(h1, mc_order), mc_order)
        rep.add("mc_unobstructed", probe.passed, probe.data.get("failure"))
    rep.verdict = "consequences-verified" if rep.passed else "consequence-violated"
    return rep
