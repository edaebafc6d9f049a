"""Exact linear algebra over the rationals.

Matrices are numpy object arrays holding ``gmpy2.mpq`` entries.  Row
reduction is done on plain nested lists, which is noticeably faster than
element access on object arrays.
"""

import numpy as np
from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)


def q(x):
    """Coerce ints, strings ("p/q"), Fractions and mpq to a canonical mpq."""
    if isinstance(x, str):
        x = x.strip()
        if not x:
            raise ValueError("empty rational literal")
    return mpq(x)


def qstr(x):
    return str(mpq(x))


def qvector(entries):
    return np.array([q(x) for x in entries], dtype=object).reshape(len(entries))


def qzeros(*shape):
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def qeye(n):
    out = qzeros(n, n)
    for i in range(n):
        out[i, i] = ONE
    return out


def qmatrix(rows, shape=None):
    """Build an mpq matrix; ``shape`` is needed when ``rows`` is empty."""
    rows = [list(r) for r in rows]
    if shape is None:
        shape = (len(rows), len(rows[0]) if rows else 0)
    out = qzeros(*shape)
    if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
        raise ValueError(f"matrix entries do not match shape {shape}")
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = q(x)
    return out


def canon(a):
    """Return a copy with every entry converted to mpq (matmul of empty
    arrays produces python ints)."""
    a = np.asarray(a, dtype=object)
    out = np.empty(a.shape, dtype=object)
    flat_in = a.reshape(-1)
    flat_out = out.reshape(-1)
    for i in range(flat_in.size):
        flat_out[i] = mpq(flat_in[i])
    return out


def is_zero(a):
    a = np.asarray(a, dtype=object)
    return all(x == 0 for x in a.reshape(-1))


def first_nonzero(a):
    """Index tuple of the first nonzero entry in C order, or None."""
    a = np.asarray(a, dtype=object)
    for idx, x in np.ndenumerate(a):
        if x != 0:
            return idx
    return None


def rref(a):
    """Reduced row echelon form.

    Returns ``(R, pivots)`` where ``R`` is a list of row lists and
    ``pivots`` the pivot column of each nonzero row.  Pivoting takes the
    first nonzero entry in each column, so results depend only on the
    order of rows and columns.
    """
    a = np.asarray(a, dtype=object)
    m, n = a.shape
    rows = [[mpq(x) for x in a[i]] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = None
        for i in range(r, m):
            if rows[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            inv = 1 / piv
            rows[r] = [x * inv for x in rows[r]]
        pr = rows[r]
        for i in range(m):
            if i != r:
                f = rows[i][c]
                if f != 0:
                    ri = rows[i]
                    rows[i] = [x - f * y for x, y in zip(ri, pr)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(a):
    a = np.asarray(a, dtype=object)
    if a.size == 0:
        return 0
    return len(rref(a)[1])


def nullspace(a):
    """Basis of the kernel as columns of an (n x k) matrix.

    One basis vector per free column, with that free variable set to 1 and
    the other free variables 0.
    """
    a = np.asarray(a, dtype=object)
    m, n = a.shape
    if m == 0:
        return qeye(n)
    rows, pivots = rref(a)
    free = [c for c in range(n) if c not in set(pivots)]
    out = qzeros(n, len(free))
    for k, fc in enumerate(free):
        out[fc, k] = ONE
        for row, pc in zip(rows, pivots):
            out[pc, k] = -row[fc]
    return out


def column_basis(a):
    """Linearly independent columns of ``a`` spanning its column space,
    chosen greedily from the left."""
    a = np.asarray(a, dtype=object)
    if a.shape[1] == 0 or a.shape[0] == 0:
        return qzeros(a.shape[0], 0)
    _, pivots = rref(a)
    return canon(a[:, pivots])


def solve(a, b):
    """One solution x of ``a @ x = b`` or None if the system is infeasible.

    Free variables are set to zero, giving the minimal-pivot solution.
    ``b`` may be a vector or a matrix of right-hand sides (then every
    column must be solvable).
    """
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    vec = b.ndim == 1
    if vec:
        b = b.reshape(-1, 1)
    m, n = a.shape
    k = b.shape[1]
    if m == 0:
        x = qzeros(n, k)
        return x[:, 0] if vec else x
    aug = np.concatenate([a, b], axis=1)
    rows, pivots = rref(aug)
    x = qzeros(n, k)
    for row, pc in zip(rows, pivots):
        if pc >= n:
            return None
        for j in range(k):
            x[pc, j] = row[n + j]
    return x[:, 0] if vec else x


def in_span(basis, v):
    """True if v lies in the column span of ``basis``."""
    basis = np.asarray(basis, dtype=object)
    if basis.shape[1] == 0:
        return is_zero(v)
    return solve(basis, v) is not None


def left_inverse_on_columns(c):
    """A matrix P with ``P @ c = I`` for an injective column matrix c.

    ``c`` is completed to a basis by unit vectors (earliest first) and the
    inverse of the completed matrix is truncated to the first rows.
    """
    c = np.asarray(c, dtype=object)
    n, r = c.shape
    if r == 0:
        return qzeros(0, n)
    cols = [c[:, j] for j in range(r)]
    current = canon(np.stack(cols, axis=1))
    for i in range(n):
        if current.shape[1] == n:
            break
        e = qzeros(n)
        e[i] = ONE
        trial = np.concatenate([current, e.reshape(-1, 1)], axis=1)
        if rank(trial) == trial.shape[1]:
            current = trial
    if current.shape[1] != n:
        raise ValueError("columns are not linearly independent")
    inv = solve(current, qeye(n))
    return inv[:r, :]


def block_diag(*blocks):
    m = sum(b.shape[0] for b in blocks)
    n = sum(b.shape[1] for b in blocks)
    out = qzeros(m, n)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out
