"""Seeded random instances for property tests.

Valid DG-Lie algebras come from a few constructions (End of a complex,
Heisenberg-type and sl2 summands, abelian complexes) transported along a
random degree-preserving change of basis; invalid candidates are random
skew tables or single-entry perturbations of valid ones.
"""

import random
from dataclasses import replace

import numpy as np

from .dgla import DGLAMorphism, DGLieAlgebra, direct_product, end_dgla, sl2
from .graded import GradedMap, GradedSpace
from .linalg import canon, nullspace, q, qzeros, rank, solve

COEFS = (-2, -1, 1, 2)


def _sgn(e):
    return -1 if e % 2 else 1


def random_degrees(rng, dim, lo=-1, hi=2):
    return tuple(sorted(rng.randint(lo, hi) for _ in range(dim)))


def random_invertible(rng, space):
    """Block-diagonal (degree-preserving) invertible matrix."""
    g = qzeros(space.dim, space.dim)
    for i in sorted(set(space.support)):
        idx = space.indices(i)
        n = len(idx)
        while True:
            b = qzeros(n, n)
            for r in range(n):
                for c in range(n):
                    b[r, c] = q(rng.choice((-1, 0, 0, 1, 1, 2)))
            if rank(b) == n:
                break
        g[np.ix_(idx, idx)] = b
    return g


def random_complex(rng, degrees):
    """A random differential on the space with these degrees."""
    V = GradedSpace(degrees)
    m = qzeros(V.dim, V.dim)
    used = set()
    for a in range(V.dim):
        if a in used or rng.random() < 0.4:
            continue
        targets = [b for b in V.indices(V.degrees[a] + 1) if b not in used and b != a]
        if targets:
            b = rng.choice(targets)
            m[b, a] = q(1)
            used.update((a, b))
    g = random_invertible(rng, V)
    ginv = solve(g, np.eye(V.dim, dtype=object))
    return V, GradedMap(V, V, 1, canon(ginv @ m @ g))


def transport(L, g, name=None):
    """The algebra with basis g e_a: table'[a, b] = g^{-1}[g e_a, g e_b]."""
    n = L.dim
    ginv = solve(g, np.eye(n, dtype=object))
    t = qzeros(n, n, n)
    for a in range(n):
        for b in range(n):
            t[a, b] = canon(ginv @ L.bracket(g[:, a], g[:, b]))
    d = canon(ginv @ L.d.matrix @ g)
    return DGLieAlgebra(L.space, GradedMap(L.space, L.space, 1, d), t, name or L.name)


def heisenberg(degree_x, degree_y, name="h"):
    V = GradedSpace((degree_x, degree_y, degree_x + degree_y), ("x", "y", "z"))
    consts = [("x", "y", "z", 1), ("y", "x", "z", -_sgn(degree_x * degree_y))]
    return DGLieAlgebra.from_constants(V, None, consts, name)


def random_valid_dgla(rng, max_dim=5):
    """A genuine DGLA of dimension <= max_dim."""
    kind = rng.choice(["end", "heis", "sl2", "abelian", "sum"])
    if kind == "end" or (kind == "sum" and max_dim < 4):
        degs = random_degrees(rng, 2, -1, 1)
        V, d = random_complex(rng, degs)
        L = end_dgla(V, d, name="End")
    elif kind == "heis":
        L = heisenberg(rng.randint(-1, 1), rng.randint(-1, 1))
    elif kind == "sl2":
        L = sl2()
    elif kind == "abelian":
        V, d = random_complex(rng, random_degrees(rng, rng.randint(1, max_dim)))
        L = DGLieAlgebra.abelian(V, d, name="ab")
    else:
        V, d = random_complex(rng, random_degrees(rng, rng.randint(1, max_dim - 3)))
        L = direct_product(heisenberg(rng.randint(0, 1), rng.randint(0, 1)),
                           DGLieAlgebra.abelian(V, d, name="a"), name="sum")
    if L.dim > max_dim:
        return random_valid_dgla(rng, max_dim)
    return transport(L, random_invertible(rng, L.space))


def random_skew_table(rng, space, density=0.5):
    """A graded skew-symmetric bracket respecting degrees, otherwise random."""
    n = space.dim
    degs = space.degrees
    t = qzeros(n, n, n)
    for a in range(n):
        for b in range(a, n):
            sym = _sgn(degs[a] * degs[b])
            if a == b and sym == 1:
                continue  # [x, x] = 0 for x of even degree
            for c in space.indices(degs[a] + degs[b]):
                if rng.random() < density:
                    x = q(rng.choice(COEFS))
                    t[a, b, c] = x
                    if a != b:
                        t[b, a, c] = -sym * x
    return t


def random_differential(rng, space, square_zero):
    if square_zero:
        V, d = random_complex(rng, space.degrees)
        return GradedMap(space, space, 1, d.matrix)
    m = qzeros(space.dim, space.dim)
    for a in range(space.dim):
        for b in space.indices(space.degrees[a] + 1):
            if rng.random() < 0.5:
                m[b, a] = q(rng.choice(COEFS))
    return GradedMap(space, space, 1, m)


def random_candidate(rng, max_dim=5):
    """A candidate (space, d, bracket), valid or not, as a DGLieAlgebra."""
    mode = rng.choice(["valid", "random", "random_d0", "perturb", "perturb_d"])
    if mode == "valid":
        return random_valid_dgla(rng, max_dim)
    if mode in ("random", "random_d0"):
        space = GradedSpace(random_degrees(rng, rng.randint(1, max_dim), -1, 2))
        d = (GradedMap.zero(space, space, 1) if mode == "random_d0"
             else random_differential(rng, space, rng.random() < 0.6))
        return DGLieAlgebra(space, d, random_skew_table(rng, space, rng.choice((0.2, 0.5))), "rand")
    L = random_valid_dgla(rng, max_dim)
    n = L.dim
    if mode == "perturb_d":
        m = L.d.matrix.copy()
        slots = [(b, a) for a in range(n) for b in L.space.indices(L.space.degrees[a] + 1)]
        if slots:
            b, a = rng.choice(slots)
            m[b, a] += q(rng.choice(COEFS))
        return DGLieAlgebra(L.space, GradedMap(L.space, L.space, 1, m), L.table, "perturbed")
    t = L.table.copy()
    degs = L.space.degrees
    slots = [(a, b, c) for a in range(n) for b in range(a + 1, n)
             for c in L.space.indices(degs[a] + degs[b])]
    if slots:
        a, b, c = rng.choice(slots)
        x = q(rng.choice(COEFS))
        t[a, b, c] += x
        t[b, a, c] += -_sgn(degs[a] * degs[b]) * x
    return DGLieAlgebra(L.space, L.d, t, "perturbed")


def _chain_maps(S, dS, T, dT):
    """Basis of degree 0 chain maps S -> T (as flattened matrices)."""
    slots = [(r, c) for c in range(S.dim) for r in T.indices(S.degrees[c])]
    if not slots:
        return slots, []
    rows = []
    for i in range(T.dim):
        for j in range(S.dim):
            # (dT f - f dS)[i, j] as a linear form in the slots
            row = [q(0)] * len(slots)
            for k, (r, c) in enumerate(slots):
                if c == j:
                    row[k] += dT.matrix[i, r]
                if r == i:
                    row[k] -= dS.matrix[c, j]
            rows.append(row)
    K = nullspace(np.array(rows, dtype=object))
    return slots, [K[:, j] for j in range(K.shape[1])]


def random_morphism(rng, max_dim=4):
    """A DGLA morphism from one of several families."""
    kind = rng.choice(["chain", "inclusion", "projection", "end_block", "zero"])
    if kind == "chain":
        S, dS = random_complex(rng, random_degrees(rng, rng.randint(1, max_dim), -1, 1))
        T, dT = random_complex(rng, random_degrees(rng, rng.randint(1, max_dim), -1, 1))
        L, M = DGLieAlgebra.abelian(S, dS, "L"), DGLieAlgebra.abelian(T, dT, "M")
        slots, basis = _chain_maps(S, dS, T, dT)
        m = qzeros(T.dim, S.dim)
        if basis:
            coeffs = [q(rng.choice((-1, 0, 1, 2))) for _ in basis]
            v = canon(sum((c * b for c, b in zip(coeffs, basis)), basis[0] * 0))
            for k, (r, c) in enumerate(slots):
                m[r, c] = v[k]
        return DGLAMorphism(L, M, GradedMap(S, T, 0, m))
    if kind == "end_block":
        V, dV = random_complex(rng, random_degrees(rng, rng.randint(1, 2), -1, 1))
        W, dW = random_complex(rng, random_degrees(rng, 1, -1, 1))
        U = V.direct_sum(W, ("V.", "W."))
        dU = qzeros(U.dim, U.dim)
        dU[:V.dim, :V.dim] = dV.matrix
        dU[V.dim:, V.dim:] = dW.matrix
        L = end_dgla(V, dV, "EndV")
        M = end_dgla(U, GradedMap(U, U, 1, dU), "EndU")
        m = qzeros(M.dim, L.dim)
        for k, nm in enumerate(L.space.names):
            t, s = nm[2:-1].split("<-")
            m[M.space.index(f"E[V.{t}<-V.{s}]"), k] = q(1)
        return DGLAMorphism(L, M, GradedMap(L.space, M.space, 0, m))
    L = replace(random_valid_dgla(rng, max_dim), name="L")
    N = replace(random_valid_dgla(rng, 3), name="N")
    P = direct_product(L, N, name="LxN")
    if kind == "inclusion":
        m = np.concatenate([np.eye(L.dim, dtype=object), qzeros(N.dim, L.dim)], axis=0)
        g = random_invertible(rng, P.space)
        P2 = transport(P, g, "M")
        ginv = solve(g, np.eye(P.dim, dtype=object))
        return DGLAMorphism(L, P2, GradedMap(L.space, P2.space, 0, canon(ginv @ m)))
    if kind == "projection":
        m = np.concatenate([np.eye(L.dim, dtype=object), qzeros(L.dim, N.dim)], axis=1)
        return DGLAMorphism(P, L, GradedMap(P.space, L.space, 0, m))
    return DGLAMorphism(L, N, GradedMap.zero(L.space, N.space))


def random_injective_morphism(rng, max_dim=4):
    while True:
        f = random_morphism(rng, max_dim)
        if rank(f.map.matrix) == f.source.dim:
            return f


def rng_for(seed):
    return random.Random(seed)


# -- bicomplexes ----------------------------------------------------------

PIECES = ("single", "d_pair", "delta_pair", "square", "zigzag")


def _piece(kind, k, delta_deg):
    """(degrees, d entries, Delta entries) of one indecomposable summand;
    entries are (target, source, coefficient) in local indices."""
    e = delta_deg
    if kind == "single":
        return [k], [], []
    if kind == "d_pair":
        return [k, k + 1], [(1, 0, 1)], []
    if kind == "delta_pair":
        return [k, k + e], [], [(1, 0, 1)]
    if kind == "square":
        # a, da, Delta a, d Delta a; Delta d a = -d Delta a
        return [k, k + 1, k + e, k + 1 + e], [(1, 0, 1), (3, 2, 1)], [(2, 0, 1), (3, 1, -1)]
    # zigzag: d a = b = Delta c
    return [k, k + 1, k + 1 - e], [(1, 0, 1)], [(1, 2, 1)]


def random_bicomplex(rng, delta_deg=-1, max_pieces=3):
    """A bicomplex assembled from known summands and conjugated by a random
    graded change of basis.  Returns (Bicomplex, kinds).  The d-Delta lemma
    holds iff every summand is a single or a square; degeneration fails iff
    some summand is a delta_pair."""
    from .bv import Bicomplex

    kinds = [rng.choice(PIECES) for _ in range(rng.randint(1, max_pieces))]
    degs, dents, lents = [], [], []
    for kind in kinds:
        pd, pdl, pll = _piece(kind, rng.randint(-1, 1), delta_deg)
        off = len(degs)
        degs += pd
        dents += [(t + off, s + off, c) for t, s, c in pdl]
        lents += [(t + off, s + off, c) for t, s, c in pll]
    V = GradedSpace(tuple(degs))
    n = V.dim
    D, Dl = qzeros(n, n), qzeros(n, n)
    for t, s, c in dents:
        D[t, s] = q(c)
    for t, s, c in lents:
        Dl[t, s] = q(c)
    g = random_invertible(rng, V)
    ginv = solve(g, np.eye(n, dtype=object))
    d = GradedMap(V, V, 1, canon(ginv @ D @ g))
    delta = GradedMap(V, V, delta_deg, canon(ginv @ Dl @ g))
    return Bicomplex(V, d, delta), kinds


def random_exp_bicomplex(rng):
    """(X, f) with Delta = [d, f] on degrees 0..2 and f of degree -2.

    In this window f^2, f d f and hence Delta^2 and [f, Delta] all vanish."""
    from .bv import Bicomplex
    from .graded import graded_commutator

    degs = random_degrees(rng, rng.randint(2, 5), 0, 2)
    V, d = random_complex(rng, degs)
    m = qzeros(V.dim, V.dim)
    for a in V.indices(2):
        for b in V.indices(0):
            m[b, a] = q(rng.choice((-1, 0, 1, 2)))
    f = GradedMap(V, V, -2, m)
    return Bicomplex(V, d, graded_commutator(d, f)), f


def random_pi_data(rng, max_dim=2):
    """Random complexes V, W and a random pi of degree 1 with
    d_V pi + pi d_W = 0."""
    from .derived import PiData

    V, dV = random_complex(rng, random_degrees(rng, rng.randint(1, max_dim), -1, 1))
    W, dW = random_complex(rng, random_degrees(rng, rng.randint(1, max_dim), -1, 1))
    slots = [(r, c) for c in range(W.dim) for r in V.indices(W.degrees[c] + 1)]
    m = qzeros(V.dim, W.dim)
    if slots:
        rows = []
        for i in range(V.dim):
            for j in range(W.dim):
                row = [q(0)] * len(slots)
                for k, (r, c) in enumerate(slots):
                    if c == j:
                        row[k] += dV.matrix[i, r]
                    if r == i:
                        row[k] += dW.matrix[c, j]
                rows.append(row)
        K = nullspace(np.array(rows, dtype=object))
        for j in range(K.shape[1]):
            x = q(rng.choice((-1, 0, 1, 2)))
            for k, (r, c) in enumerate(slots):
                m[r, c] += x * K[k, j]
    return PiData(V, W, dV, dW, GradedMap(W, V, 1, canon(m)))
