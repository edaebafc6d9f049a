"""Finite-dimensional graded vector spaces, homogeneous maps, subspaces,
quotients and cohomology.

Every space carries an ordered basis; each basis vector has an integer
degree.  Elements are flat mpq vectors over the whole basis, so sums of
elements of different degrees are allowed wherever that is meaningful.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import (ONE, canon, column_basis, first_nonzero, is_zero,
                     left_inverse_on_columns, nullspace, q, qeye, qzeros,
                     rank, rref, solve)
from .report import InputError


@dataclass(frozen=True, eq=True)
class GradedSpace:
    degrees: tuple
    names: tuple = None
    window: tuple = None

    def __post_init__(self):
        degrees = tuple(int(d) for d in self.degrees)
        object.__setattr__(self, "degrees", degrees)
        names = self.names
        if names is None:
            counters = {}
            names = []
            for d in degrees:
                j = counters.get(d, 0)
                counters[d] = j + 1
                names.append(f"v{d}_{j}")
        names = tuple(names)
        if len(names) != len(degrees):
            raise InputError("number of basis names does not match dimension")
        if len(set(names)) != len(names):
            raise InputError("basis names must be distinct")
        object.__setattr__(self, "names", names)
        window = self.window
        if window is None:
            window = (min(degrees), max(degrees)) if degrees else (0, 0)
        window = (int(window[0]), int(window[1]))
        if window[0] > window[1]:
            raise InputError(f"empty degree window {window}")
        for d in degrees:
            if not window[0] <= d <= window[1]:
                raise InputError(f"basis degree {d} outside window {window}")
        object.__setattr__(self, "window", window)

    @classmethod
    def from_dims(cls, dims, names=None, window=None):
        """Space with ``dims[i]`` basis vectors in degree i, sorted by degree.

        ``names`` maps degree -> list of names.
        """
        degrees = []
        all_names = [] if names is not None else None
        for d in sorted(dims):
            n = int(dims[d])
            if n < 0:
                raise InputError(f"negative dimension in degree {d}")
            degrees.extend([d] * n)
            if names is not None:
                nd = list(names.get(d, [f"v{d}_{j}" for j in range(n)]))
                if len(nd) != n:
                    raise InputError(f"degree {d}: {len(nd)} names for dimension {n}")
                all_names.extend(nd)
        return cls(tuple(degrees), None if all_names is None else tuple(all_names), window)

    @property
    def dim(self):
        return len(self.degrees)

    @cached_property
    def dims(self):
        out = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def dim_in(self, degree):
        return self.dims.get(degree, 0)

    @cached_property
    def _index_table(self):
        table = {}
        for i, d in enumerate(self.degrees):
            table.setdefault(d, []).append(i)
        return table

    def indices(self, degree):
        return self._index_table.get(degree, [])

    @property
    def support(self):
        return sorted(self._index_table)

    def degree_range(self):
        return range(self.window[0], self.window[1] + 1)

    @cached_property
    def parity(self):
        """Vector of (-1)^deg, used to apply degree signs to mixed elements."""
        return np.array([q(-1 if d % 2 else 1) for d in self.degrees], dtype=object)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown basis name {name!r}") from None

    def basis_vector(self, i):
        v = qzeros(self.dim)
        v[i] = ONE
        return v

    def zero(self):
        return qzeros(self.dim)

    def element(self, degree, coeffs):
        """Flat vector for the homogeneous element with local coordinates."""
        idx = self.indices(degree)
        if len(coeffs) != len(idx):
            raise InputError(f"degree {degree} has dimension {len(idx)}, got {len(coeffs)} coefficients")
        v = self.zero()
        for i, c in zip(idx, coeffs):
            v[i] = q(c)
        return v

    def degree_of(self, v):
        """Degree of a nonzero homogeneous element; None for zero."""
        degs = {self.degrees[i] for i, x in enumerate(v) if x != 0}
        if not degs:
            return None
        if len(degs) > 1:
            raise InputError(f"element is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def components(self, v):
        """Split a vector into homogeneous parts: {degree: vector}."""
        out = {}
        for d in self.support:
            w = self.zero()
            idx = self.indices(d)
            w[idx] = v[idx]
            if not is_zero(w):
                out[d] = w
        return out

    def shift(self, k):
        """V[k], with V[k]^i = V^{i+k}."""
        return GradedSpace(tuple(d - k for d in self.degrees), self.names,
                           (self.window[0] - k, self.window[1] - k))

    def direct_sum(self, other, prefixes=("", "")):
        names = tuple(prefixes[0] + n for n in self.names) + tuple(prefixes[1] + n for n in other.names)
        window = (min(self.window[0], other.window[0]), max(self.window[1], other.window[1]))
        return GradedSpace(self.degrees + other.degrees, names, window)

    def describe(self):
        return {"window": list(self.window), "dims": {str(k): v for k, v in self.dims.items()}}


@dataclass(frozen=True, eq=False)
class GradedMap:
    """A linear map V -> W homogeneous of a given degree.

    Stored as one full matrix; ``block(i)`` gives the V^i -> W^{i+degree}
    piece.  Entries linking basis vectors of mismatched degrees must vanish.
    """

    source: GradedSpace
    target: GradedSpace
    degree: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = canon(self.matrix)
        if m.shape != (self.target.dim, self.source.dim):
            raise InputError(f"matrix shape {m.shape} does not match "
                             f"({self.target.dim}, {self.source.dim})")
        for (r, c), x in np.ndenumerate(m):
            if x != 0 and self.target.degrees[r] != self.source.degrees[c] + self.degree:
                raise InputError(
                    f"entry ({self.target.names[r]}, {self.source.names[c]}) breaks degree {self.degree}",
                    witness={"row": self.target.names[r], "column": self.source.names[c]})
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "degree", int(self.degree))

    @classmethod
    def from_blocks(cls, source, target, degree, blocks):
        m = qzeros(target.dim, source.dim)
        for i, block in blocks.items():
            rows = target.indices(i + degree)
            cols = source.indices(i)
            b = np.asarray(block, dtype=object)
            if b.size == 0 and (len(rows) == 0 or len(cols) == 0):
                continue
            if b.shape != (len(rows), len(cols)):
                raise InputError(f"block for source degree {i} has shape {b.shape}, "
                                 f"expected {(len(rows), len(cols))}")
            m[np.ix_(rows, cols)] = canon(b)
        return cls(source, target, degree, m)

    @classmethod
    def zero(cls, source, target, degree=0):
        return cls(source, target, degree, qzeros(target.dim, source.dim))

    @classmethod
    def identity(cls, space):
        return cls(space, space, 0, qeye(space.dim))

    def block(self, i):
        rows = self.target.indices(i + self.degree)
        cols = self.source.indices(i)
        if not rows or not cols:
            return qzeros(len(rows), len(cols))
        return self.matrix[np.ix_(rows, cols)]

    @property
    def blocks(self):
        return {i: self.block(i) for i in self.source.support}

    def __call__(self, v):
        return canon(self.matrix @ np.asarray(v, dtype=object))

    def compose(self, other):
        """self o other."""
        return compose(self, other)

    def _check_parallel(self, other):
        if (self.source != other.source or self.target != other.target
                or self.degree != other.degree):
            raise InputError("maps are not parallel (source, target, degree)")

    def __add__(self, other):
        self._check_parallel(other)
        return GradedMap(self.source, self.target, self.degree, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check_parallel(other)
        return GradedMap(self.source, self.target, self.degree, self.matrix - other.matrix)

    def __neg__(self):
        return GradedMap(self.source, self.target, self.degree, -self.matrix)

    def scale(self, c):
        return GradedMap(self.source, self.target, self.degree, self.matrix * q(c))

    def is_zero(self):
        return is_zero(self.matrix)

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.degree == other.degree
                and bool(np.all(self.matrix == other.matrix)))

    __hash__ = None

    def is_endo(self):
        return self.source == self.target

    def rank(self):
        return rank(self.matrix)


def compose(f, g):
    """f o g; needs target(g) == source(f)."""
    if g.target != f.source:
        raise InputError("cannot compose: target of the inner map differs from source of the outer map")
    return GradedMap(g.source, f.target, f.degree + g.degree, f.matrix @ g.matrix)


def graded_commutator(f, g):
    """[f, g] = fg - (-1)^{|f||g|} gf for endomaps of one space."""
    if not (f.is_endo() and g.is_endo() and f.source == g.source):
        raise InputError("graded commutator needs endomaps of the same space")
    sign = -1 if (f.degree * g.degree) % 2 else 1
    return GradedMap(f.source, f.source, f.degree + g.degree,
                     f.matrix @ g.matrix - sign * (g.matrix @ f.matrix))


def shift_map(f, k, sign=True):
    """The endomap f viewed on V[k]; a differential picks up (-1)^k."""
    space = f.source.shift(k)
    s = -1 if (sign and k % 2) else 1
    return GradedMap(space, space, f.degree, f.matrix * s)


def check_differential(d):
    """Raise InputError unless d is a degree +1 endomap with d o d = 0."""
    if not d.is_endo():
        raise InputError("differential must be an endomap")
    if d.degree != 1:
        raise InputError(f"differential must have degree +1, got {d.degree}")
    dd = d.matrix @ d.matrix
    idx = first_nonzero(dd)
    if idx is not None:
        col = idx[1]
        raise InputError("d o d != 0",
                         witness={"basis_vector": d.source.names[col],
                                  "value": dd[:, col]})


@dataclass(frozen=True, eq=False)
class Subspace:
    """A graded subspace given by homogeneous spanning vectors.

    ``basis`` holds one column per basis vector; within each degree the
    columns are the reduced echelon rows of the spanning set.
    """

    space: GradedSpace
    basis: np.ndarray = field(repr=False)
    degrees: tuple = ()
    pivots: tuple = ()

    @classmethod
    def span(cls, space, vectors):
        by_degree = {}
        for v in vectors:
            v = canon(v)
            if v.shape != (space.dim,):
                raise InputError("spanning vector has the wrong length")
            d = space.degree_of(v)
            if d is None:
                continue
            by_degree.setdefault(d, []).append(v)
        cols, degrees, pivots = [], [], []
        for d in sorted(by_degree):
            idx = space.indices(d)
            local = np.stack([v[idx] for v in by_degree[d]])
            rows, piv = rref(local)
            for row, p in zip(rows, piv):
                full = space.zero()
                full[idx] = row
                cols.append(full)
                degrees.append(d)
                pivots.append(idx[p])
        basis = np.stack(cols, axis=1) if cols else qzeros(space.dim, 0)
        basis = canon(basis)
        basis.setflags(write=False)
        return cls(space, basis, tuple(degrees), tuple(pivots))

    @classmethod
    def from_columns(cls, space, matrix):
        matrix = np.asarray(matrix, dtype=object)
        return cls.span(space, [matrix[:, j] for j in range(matrix.shape[1])])

    @classmethod
    def zero(cls, space):
        return cls.span(space, [])

    @classmethod
    def whole(cls, space):
        return cls.span(space, [space.basis_vector(i) for i in range(space.dim)])

    @property
    def dim(self):
        return self.basis.shape[1]

    def as_space(self, names=None):
        if names is None:
            names = tuple(f"s{i}" for i in range(self.dim))
        return GradedSpace(self.degrees, names, self.space.window)

    def dims(self):
        out = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def coords(self, v):
        """Coordinates of v in this basis; None if v is not in the subspace."""
        v = canon(v)
        x = qzeros(self.dim)
        for j, p in enumerate(self.pivots):
            x[j] = v[p]
        if bool(np.all(canon(self.basis @ x) == v)):
            return x
        return None

    def contains(self, v):
        return self.coords(v) is not None

    def unstable_column(self, f):
        """Witness column index of the first basis vector sent outside, or None."""
        for j in range(self.dim):
            if not self.contains(f(self.basis[:, j])):
                return j
        return None

    def inclusion(self, names=None):
        return GradedMap(self.as_space(names), self.space, 0, self.basis)

    def restrict(self, f, names=None):
        """The endomap f restricted to this (f-stable) subspace."""
        j = self.unstable_column(f)
        if j is not None:
            raise InputError("subspace is not stable under the map",
                             witness={"basis_index": j})
        sub = self.as_space(names)
        m = qzeros(self.dim, self.dim)
        for j in range(self.dim):
            m[:, j] = self.coords(f(self.basis[:, j]))
        return GradedMap(sub, sub, f.degree, m)

    def quotient(self, names=None):
        return Quotient.of(self, names)


@dataclass(frozen=True, eq=False)
class Quotient:
    """V/S realised on the non-pivot coordinates of S's echelon basis."""

    sub: Subspace
    space: GradedSpace
    complement: tuple
    projection: GradedMap
    lift: GradedMap

    @classmethod
    def of(cls, sub, names=None):
        V = sub.space
        pivset = set(sub.pivots)
        comp = tuple(i for i in range(V.dim) if i not in pivset)
        if names is None:
            names = tuple(V.names[i] for i in comp)
        Q = GradedSpace(tuple(V.degrees[i] for i in comp), names, V.window)
        # v - sum_j v[p_j] s_j kills every pivot coordinate
        reducer = qeye(V.dim)
        for j, p in enumerate(sub.pivots):
            reducer[:, p] -= sub.basis[:, j]
        proj = canon(reducer[list(comp), :]) if comp else qzeros(0, V.dim)
        lift = qzeros(V.dim, len(comp))
        for k, i in enumerate(comp):
            lift[i, k] = ONE
        return cls(sub, Q, comp, GradedMap(V, Q, 0, proj), GradedMap(Q, V, 0, lift))

    def induced(self, f):
        """Endomap of V/S induced by an S-stable endomap f of V."""
        j = self.sub.unstable_column(f)
        if j is not None:
            raise InputError("subspace is not stable under the map",
                             witness={"basis_index": j})
        m = self.projection.matrix @ f.matrix @ self.lift.matrix
        return GradedMap(self.space, self.space, f.degree, m)


@dataclass(frozen=True, eq=False)
class Subquotient:
    sub_space: GradedSpace
    sub_d: GradedMap
    inclusion: GradedMap
    quotient_space: GradedSpace
    quotient_d: GradedMap
    projection: GradedMap


def subquotient(space, d, sub, shift=0):
    """Sub-complex S and quotient complex V/S for a d-stable subspace S.

    With ``shift=k`` the quotient is returned as (V/S)[k], carrying the
    differential (-1)^k times the induced one.
    """
    if sub.space != space or d.source != space:
        raise InputError("subspace and differential must live on the given space")
    j = sub.unstable_column(d)
    if j is not None:
        raise InputError("subspace is not d-stable", witness={"basis_index": j})
    quot = sub.quotient()
    qd = quot.induced(d)
    proj = quot.projection
    if shift:
        qd = shift_map(qd, shift)
        proj = GradedMap(space, qd.source, -shift, proj.matrix)
    return Subquotient(sub.as_space(), sub.restrict(d), sub.inclusion(),
                       qd.source, qd, proj)


@dataclass(frozen=True, eq=False)
class CohomologyReport:
    """Per-degree cohomology with chosen representatives.

    ``representatives[i]`` has one full-space column per class;
    ``projections[i]`` maps cocycles of degree i (full-space vectors) to
    class coordinates.
    """

    space: GradedSpace
    dims: dict
    representatives: dict
    projections: dict

    @cached_property
    def hspace(self):
        degrees, names = [], []
        for i in sorted(self.dims):
            for j in range(self.dims[i]):
                degrees.append(i)
                names.append(f"H{i}_{j}")
        return GradedSpace(tuple(degrees), tuple(names), self.space.window)

    @property
    def total_dim(self):
        return sum(self.dims.values())

    def is_zero(self):
        return self.total_dim == 0

    def dim(self, i):
        return self.dims.get(i, 0)

    @cached_property
    def rep_matrix(self):
        """Columns: representatives of all classes, in hspace order."""
        cols = [self.representatives[i] for i in sorted(self.dims) if self.dims[i]]
        if not cols:
            return qzeros(self.space.dim, 0)
        return canon(np.concatenate(cols, axis=1))

    @cached_property
    def proj_matrix(self):
        """Rows: class coordinates of a cocycle, in hspace order."""
        rows = [self.projections[i] for i in sorted(self.dims) if self.dims[i]]
        if not rows:
            return qzeros(0, self.space.dim)
        return canon(np.concatenate(rows, axis=0))

    def classify(self, v):
        """Class of a cocycle as an hspace vector."""
        return canon(self.proj_matrix @ np.asarray(v, dtype=object))

    def class_in(self, i, v):
        return canon(self.projections[i] @ np.asarray(v, dtype=object))


def cohomology(space, d):
    """H^*(V, d) with deterministic pivot-chosen representatives."""
    if d.source != space:
        raise InputError("differential does not act on the given space")
    check_differential(d)
    dims, reps, projs = {}, {}, {}
    for i in space.degree_range():
        idx = space.indices(i)
        n = len(idx)
        z = nullspace(d.block(i)) if n else qzeros(0, 0)
        prev = d.block(i - 1)
        b = column_basis(prev) if prev.size else qzeros(n, 0)
        nb = b.shape[1]
        combined = np.concatenate([b, z], axis=1) if n else qzeros(0, 0)
        basis = column_basis(combined) if n else qzeros(0, 0)
        h = basis.shape[1] - nb if n else 0
        dims[i] = h
        rep_full = qzeros(space.dim, h)
        proj_full = qzeros(h, space.dim)
        if h:
            rep_full[idx, :] = basis[:, nb:]
            inv = left_inverse_on_columns(basis)
            proj_full[:, idx] = inv[nb:, :]
        reps[i] = rep_full
        projs[i] = proj_full
    return CohomologyReport(space, dims, reps, projs)


def is_chain_map(f, d_source, d_target, graded=False):
    """Witness (source basis name) of d_W f != s f d_V, or None.

    ``graded`` uses s = (-1)^{deg f}; otherwise s = 1.
    """
    s = -1 if (graded and f.degree % 2) else 1
    diff = d_target.matrix @ f.matrix - s * (f.matrix @ d_source.matrix)
    idx = first_nonzero(diff)
    if idx is None:
        return None
    return {"basis_vector": f.source.names[idx[1]], "lhs": canon(d_target.matrix @ f.matrix)[:, idx[1]],
            "rhs": canon(s * (f.matrix @ d_source.matrix))[:, idx[1]]}


@dataclass(frozen=True, eq=False)
class CohomologyMap:
    map: GradedMap
    source: CohomologyReport
    target: CohomologyReport
    injective_in: dict
    surjective_in: dict

    def block(self, i):
        return self.map.block(i)

    def injective(self, degrees=None):
        degrees = self.injective_in if degrees is None else degrees
        return all(self.injective_in.get(i, True) for i in degrees)

    def surjective(self, degrees=None):
        degrees = self.surjective_in if degrees is None else degrees
        return all(self.surjective_in.get(i, True) for i in degrees)

    def iso(self):
        return self.injective() and self.surjective()

    def summary(self):
        return {
            "injective": {str(k): v for k, v in sorted(self.injective_in.items())},
            "surjective": {str(k): v for k, v in sorted(self.surjective_in.items())},
            "matrices": {str(i): self.block(i) for i in self.map.source.support},
        }


def induced_map_on_cohomology(f, d_source, d_target, graded=False,
                              h_source=None, h_target=None):
    """H^*(f) in the chosen representative bases, with per-degree flags.

    Injectivity is indexed by source degree, surjectivity by target degree.
    """
    if f.source != d_source.source or f.target != d_target.source:
        raise InputError("map and differentials live on different spaces")
    w = is_chain_map(f, d_source, d_target, graded)
    if w is not None:
        raise InputError("map is not a chain map", witness=w)
    hs = h_source or cohomology(f.source, d_source)
    ht = h_target or cohomology(f.target, d_target)
    m = ht.proj_matrix @ f.matrix @ hs.rep_matrix
    hmap = GradedMap(hs.hspace, ht.hspace, f.degree, m)
    inj, sur = {}, {}
    for i in f.source.degree_range():
        inj[i] = rank(hmap.block(i)) == hs.dim(i)
    for j in f.target.degree_range():
        sur[j] = rank(hmap.block(j - f.degree)) == ht.dim(j)
    return CohomologyMap(hmap, hs, ht, inj, sur)


def exact_at(incoming, outgoing, middle_dim):
    """Exactness of A -> B -> C at B from matrices of the two maps."""
    comp = outgoing @ incoming if incoming.size and outgoing.size else None
    if comp is not None and not is_zero(comp):
        return False
    r_in = rank(incoming) if incoming.size else 0
    r_out = rank(outgoing) if outgoing.size else 0
    return r_in + r_out == middle_dim


def solve_preimage(f, v):
    """Some x with f(x) = v (minimal pivot), or None."""
    return solve(f.matrix, v)


def kernel_subspace(f):
    """ker f as a graded subspace (computed degree by degree)."""
    V = f.source
    vecs = []
    for i in V.support:
        idx = V.indices(i)
        k = nullspace(f.block(i))
        for j in range(k.shape[1]):
            v = V.zero()
            v[idx] = k[:, j]
            vecs.append(v)
    return Subspace.span(V, vecs)


def image_subspace(f):
    """im f as a graded subspace of the target."""
    return Subspace.from_columns(f.target, f.matrix)
