"""Maurer-Cartan elements over truncated polynomial bases.

Elements of L (x) m, m = (t_1, ..., t_g) in K[t]/m^{n+1}, are dicts from
exponent tuples to coefficient vectors of L.  The equation is
dx + 1/2 [x, x] = 0; lifting proceeds one order at a time, the class of the
degree-j part of the residual in H^2(L) being the obstruction.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import factorial

import numpy as np

from .linalg import canon, is_zero, q, solve
from .report import InputError, Report

HALF = q("1/2")


@dataclass(frozen=True)
class ArtinianBase:
    """K[t_1..t_g] / m^{n+1}."""

    g: int
    n: int

    def __post_init__(self):
        if self.g < 1 or self.n < 1:
            raise InputError("need at least one variable and order >= 1")

    def monomials(self, degree):
        """Exponent tuples of the given total degree, in a fixed order."""
        out = []
        for combo in combinations_with_replacement(range(self.g), degree):
            e = [0] * self.g
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
        return out

    def times(self, u, v):
        w = tuple(a + b for a, b in zip(u, v))
        return w if sum(w) <= self.n else None

    def variable(self, i):
        e = [0] * self.g
        e[i] = 1
        return tuple(e)

    def label(self, e):
        parts = []
        for i, k in enumerate(e):
            if k:
                parts.append(f"t{i + 1}" + (f"^{k}" if k > 1 else ""))
        return "*".join(parts) or "1"


def _acc(store, key, v):
    store[key] = store[key] + v if key in store else v


def _clean(x):
    return {e: canon(v) for e, v in sorted(x.items()) if not is_zero(v)}


def mul_bracket(L, x, y, base):
    out = {}
    for u, a in x.items():
        for v, b in y.items():
            w = base.times(u, v)
            if w is not None:
                _acc(out, w, L.bracket(a, b))
    return _clean(out)


def _check_degree(L, x, degree):
    for e, v in x.items():
        dg = L.space.degree_of(v)
        if dg is not None and dg != degree:
            raise InputError(f"coefficient of {e} has degree {dg}, expected {degree}")


def mc_residual(L, x, base):
    """dx + 1/2 [x, x]."""
    _check_degree(L, x, 1)
    out = {e: L.d(v) for e, v in x.items()}
    for e, v in mul_bracket(L, x, x, base).items():
        _acc(out, e, v * HALF)
    return _clean(out)


@dataclass
class MCState:
    x: dict
    order: int
    ledger: list = field(default_factory=list)
    obstructed: bool = False

    def to_dict(self, base=None):
        lab = base.label if base else str
        return {"x": {lab(e): v for e, v in self.x.items()}, "order": self.order,
                "obstructed": self.obstructed,
                "ledger": self.ledger}


def mc_extend(L, x, base, start, max_order):
    """Lift x (an MC element modulo m^start) order by order up to max_order."""
    H = L.cohomology()
    d1 = L.d.block(1)
    idx1, idx2 = L.space.indices(1), L.space.indices(2)
    state = MCState(_clean(x), start - 1)
    for j in range(start, max_order + 1):
        R = mc_residual(L, state.x, base)
        low = {e: v for e, v in R.items() if sum(e) < j}
        if low:
            raise InputError("input is not a solution to the previous order",
                             witness={"monomials": [base.label(e) for e in low]})
        classes = {}
        correction = {}
        for mono in base.monomials(j):
            r = R.get(mono)
            if r is None:
                continue
            cls = H.class_in(2, r) if H.dim(2) else np.array([], dtype=object)
            if not is_zero(cls):
                classes[base.label(mono)] = {"class": cls, "residual": r}
                continue
            y = solve(d1, -r[idx2]) if idx1 else None
            if y is None:
                raise InputError("closed residual with zero class has no primitive")
            v = L.space.zero()
            v[idx1] = y
            correction[mono] = v
        entry = {"order": j, "obstruction": {k: c["class"] for k, c in classes.items()}}
        if classes:
            entry["residual"] = {k: c["residual"] for k, c in classes.items()}
            state.ledger.append(entry)
            state.obstructed = True
            return state
        state.ledger.append(entry)
        for mono, v in correction.items():
            _acc(state.x, mono, v)
        state.x = _clean(state.x)
        state.order = j
    return state


def mc_solve(L, first_order, base, max_order=None):
    """Lift sum_i t_i v_i (v_i closed in L^1) as far as possible."""
    max_order = base.n if max_order is None else min(max_order, base.n)
    if len(first_order) != base.g:
        raise InputError(f"need {base.g} first-order vectors, got {len(first_order)}")
    x = {}
    for i, v in enumerate(first_order):
        v = canon(v)
        if not is_zero(L.d(v)):
            raise InputError("first-order datum is not closed", witness={"index": i})
        _acc(x, base.variable(i), v)
    _check_degree(L, x, 1)
    return mc_extend(L, x, base, 2, max_order)


def gauge_act(L, a, x, base):
    """e^a * x = x + sum_{n>=0} ad_a^n([a, x] - da) / (n+1)!."""
    _check_degree(L, a, 0)
    _check_degree(L, x, 1)
    term = mul_bracket(L, a, x, base)
    for e, v in a.items():
        _acc(term, e, -L.d(v))
    term = _clean(term)
    out = dict(x)
    k = 0
    while term:
        for e, v in term.items():
            _acc(out, e, v * q(f"1/{factorial(k + 1)}"))
        term = mul_bracket(L, a, term, base)
        k += 1
    return _clean(out)


def first_order_data(L, g):
    """Deterministic first-order data from a basis of H^1(L)."""
    H = L.cohomology()
    h = H.dim(1)
    if h == 0:
        return []
    reps = [H.representatives[1][:, j] for j in range(h)]
    data = [list(c) for c in combinations_with_replacement(reps, g)]
    if g == 1 and h > 1:
        data.append([canon(sum(reps[1:], reps[0]))])
    return data


def unobstructed_probe(L, base, max_order=None):
    max_order = base.n if max_order is None else min(max_order, base.n)
    rep = Report(f"MC probe for {L.name}")
    data = first_order_data(L, base.g)
    failure = None
    for k, datum in enumerate(data):
        st = mc_solve(L, datum, base, max_order)
        if st.obstructed:
            last = st.ledger[-1]
            failure = {"datum": k, "order": last["order"], "obstruction": last["obstruction"]}
            break
    rep.add("unobstructed", failure is None, failure)
    rep.data.update({"g": base.g, "max_order": max_order, "first_order_data": len(data)})
    if failure:
        rep.data["failure"] = failure
    rep.verdict = "unobstructed" if failure is None else f"obstructed-at-order-{failure['order']}"
    return rep
