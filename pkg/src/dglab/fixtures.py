"""JSON fixture files.

One file is one self-contained instance.  Rationals are integers or strings
"p/q"; matrices are row-major lists of rows.  Blocks:

    space         {"degrees": [...], "names": [...]} or
                  {"dims": {"0": 2, "1": 1}, "names": [...], "window": [lo, hi]}
    differential  {"i": matrix of d: V^i -> V^{i+1}}
    bracket       [[a, b, c, coef], ...]: [e_a, e_b] has coefficient coef on e_c
    product       [[a, b, c, coef], ...] for a graded commutative product
    unit, k       unit basis name and the shift of a dBV algebra
    delta         {"degree": k, "blocks": {"i": matrix V^i -> V^{i+k}}}
    algebras      {name: {"space", "differential"?, "bracket"?}}
    maps          {name: {"source", "target", "degree", "blocks"}}
    subspaces     {name: {"in": algebra, "span": [coordinate vectors]}}
    pi_example    {"V", "W", "dV"?, "dW"?, "pi"} for derived brackets
    scenario      {"command", "options"?, "expect"?}

Basis elements in ``bracket``/``product``/``unit`` are names or indices.
The blocks ``space``/``differential``/``bracket`` at top level describe the
file's main algebra (called "main").  Unknown keys are rejected.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dgla import DGLieAlgebra
from .graded import GradedMap, GradedSpace, Subspace
from .linalg import q, qstr, qzeros
from .report import InputError

TOP_KEYS = {"name", "description", "space", "differential", "bracket", "product", "unit",
            "delta", "k", "algebras", "maps", "subspaces", "pi_example", "scenario"}
MAIN = "main"


def _keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise InputError(f"{where}: unknown keys {sorted(extra)}")
    missing = set(required) - set(obj)
    if missing:
        raise InputError(f"{where}: missing keys {sorted(missing)}")


def _coef(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise InputError(f"{where}: coefficients are integers or 'p/q' strings, got {x!r}")
    try:
        return q(x)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"{where}: bad rational {x!r}") from e


def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise InputError(f"{where}: expected an integer, got {x!r}")
    return x


def _matrix(obj, rows, cols, where):
    if not isinstance(obj, list) or len(obj) != rows:
        raise InputError(f"{where}: expected {rows} rows")
    m = qzeros(rows, cols)
    for r, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            raise InputError(f"{where}: row {r} must have {cols} entries")
        for c, x in enumerate(row):
            m[r, c] = _coef(x, f"{where}[{r}][{c}]")
    return m


def parse_space(obj, where="space"):
    _keys(obj, {"degrees", "dims", "names", "window"}, (), where)
    if ("degrees" in obj) == ("dims" in obj):
        raise InputError(f"{where}: give exactly one of 'degrees' and 'dims'")
    if "degrees" in obj:
        degs = [_int(d, f"{where}.degrees") for d in obj["degrees"]]
    else:
        if not isinstance(obj["dims"], dict):
            raise InputError(f"{where}.dims: expected an object degree -> dimension")
        try:
            dims = {int(k): _int(v, f"{where}.dims") for k, v in obj["dims"].items()}
        except ValueError as e:
            raise InputError(f"{where}.dims: degrees must be integers") from e
        degs = [d for d in sorted(dims) for _ in range(dims[d])]
    window = obj.get("window")
    if window is not None:
        if not isinstance(window, list) or len(window) != 2:
            raise InputError(f"{where}.window: expected [lo, hi]")
        window = (_int(window[0], where), _int(window[1], where))
    names = obj.get("names")
    if names is not None:
        if len(names) != len(degs) or not all(isinstance(n, str) for n in names):
            raise InputError(f"{where}: need {len(degs)} string names")
        names = tuple(names)
    return GradedSpace(tuple(degs), names, window)


def parse_blocks(source, target, degree, obj, where):
    """Per-degree matrices {"i": block source^i -> target^{i+degree}}."""
    m = qzeros(target.dim, source.dim)
    if obj is None:
        return GradedMap(source, target, degree, m)
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object degree -> matrix")
    for key, block in obj.items():
        try:
            i = int(key)
        except ValueError as e:
            raise InputError(f"{where}: bad degree {key!r}") from e
        src, tgt = source.indices(i), target.indices(i + degree)
        if not src:
            raise InputError(f"{where}: source has no degree {i}")
        if not tgt:
            raise InputError(f"{where}: target has no degree {i + degree}")
        m[np.ix_(tgt, src)] = _matrix(block, len(tgt), len(src), f"{where}[{key}]")
    return GradedMap(source, target, degree, m)


def _basis_index(space, x, where):
    if isinstance(x, int) and not isinstance(x, bool):
        if not 0 <= x < space.dim:
            raise InputError(f"{where}: index {x} out of range")
        return x
    if isinstance(x, str):
        try:
            return space.index(x)
        except InputError as e:
            raise InputError(f"{where}: unknown basis element {x!r}") from e
    raise InputError(f"{where}: basis elements are names or indices")


def _quadruples(space, obj, where):
    t = qzeros(space.dim, space.dim, space.dim)
    if not isinstance(obj, list):
        raise InputError(f"{where}: expected a list of [a, b, c, coef]")
    for k, entry in enumerate(obj):
        if not isinstance(entry, list) or len(entry) != 4:
            raise InputError(f"{where}[{k}]: entries are [a, b, c, coef]")
        a, b, c = (_basis_index(space, x, f"{where}[{k}]") for x in entry[:3])
        t[a, b, c] += _coef(entry[3], f"{where}[{k}]")
    return t


def parse_algebra(obj, name, where):
    _keys(obj, {"space", "differential", "bracket"}, ("space",), where)
    space = parse_space(obj["space"], f"{where}.space")
    d = parse_blocks(space, space, 1, obj.get("differential"), f"{where}.differential")
    t = _quadruples(space, obj.get("bracket", []), f"{where}.bracket")
    return DGLieAlgebra(space, d, t, name)


# -- serialization -----------------------------------------------------------

def space_to_json(space):
    return {"degrees": list(space.degrees), "names": list(space.names)}


def blocks_to_json(f):
    out = {}
    for i in sorted(set(f.source.support)):
        src, tgt = f.source.indices(i), f.target.indices(i + f.degree)
        if not tgt:
            continue
        block = f.matrix[np.ix_(tgt, src)]
        if any(x != 0 for x in block.flat):
            out[str(i)] = [[qstr(x) for x in row] for row in block]
    return out


def quadruples_to_json(space, t):
    return [[space.names[a], space.names[b], space.names[c], qstr(x)]
            for (a, b, c), x in np.ndenumerate(t) if x != 0]


def algebra_to_json(L):
    out = {"space": space_to_json(L.space)}
    d = blocks_to_json(L.d)
    if d:
        out["differential"] = d
    br = quadruples_to_json(L.space, L.table)
    if br:
        out["bracket"] = br
    return out


def map_to_json(f, source, target):
    return {"source": source, "target": target, "degree": f.degree, "blocks": blocks_to_json(f)}


def subspace_to_json(S, algebra):
    return {"in": algebra, "span": [[qstr(x) for x in S.basis[:, j]] for j in range(S.dim)]}


# -- fixtures ----------------------------------------------------------------

@dataclass
class Fixture:
    name: str
    description: str = ""
    algebras: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    subspaces: dict = field(default_factory=dict)
    dbv: dict = None          # space, unit, product, d, delta, k
    bicomplex: dict = None    # space, d, delta
    pi: dict = None           # V, W, dV, dW, pi
    scenario: dict = field(default_factory=dict)

    @property
    def expect(self):
        return self.scenario.get("expect", {})

    def algebra(self, name=None):
        if name is None:
            if MAIN in self.algebras:
                return self.algebras[MAIN]
            if len(self.algebras) == 1:
                return next(iter(self.algebras.values()))
            raise InputError(f"{self.name}: several algebras; choose one of {sorted(self.algebras)}")
        if name not in self.algebras:
            raise InputError(f"{self.name}: no algebra named {name!r}")
        return self.algebras[name]

    def map(self, name):
        if name not in self.maps:
            raise InputError(f"{self.name}: no map named {name!r}")
        return self.maps[name]

    def subspace(self, name):
        if name not in self.subspaces:
            raise InputError(f"{self.name}: no subspace named {name!r}")
        return self.subspaces[name]

    def algebra_on(self, space):
        for L in self.algebras.values():
            if L.space == space:
                return L
        return None

    def dbv_algebra(self):
        from .bv import DBVAlgebra

        if self.dbv is None:
            raise InputError(f"{self.name}: not a dBV algebra (needs product, unit and delta)")
        b = self.dbv
        return DBVAlgebra(b["space"], b["unit"], b["product"], b["d"], b["delta"], b["k"])

    def bicomplex_obj(self):
        """The dBV algebra if there is one, else the bare bicomplex."""
        from .bv import Bicomplex

        if self.dbv is not None:
            return self.dbv_algebra()
        if self.bicomplex is None:
            raise InputError(f"{self.name}: no bicomplex (needs space, differential and delta)")
        b = self.bicomplex
        return Bicomplex(b["space"], b["d"], b["delta"])

    def morphism(self, name="f"):
        from .dgla import DGLAMorphism

        f = self.map(name)
        L, M = self.algebra_on(f.source), self.algebra_on(f.target)
        if L is None or M is None or f.degree != 0:
            raise InputError(f"{self.name}: map {name!r} must be a degree 0 map between algebras")
        return DGLAMorphism(L, M, f)

    def calculus(self, i="i", h="H"):
        from .cartan import CartanCalculus, CartanHomotopy

        imap = self.map(i)
        L, M = self.algebra_on(imap.source), self.algebra_on(imap.target)
        if L is None or M is None:
            raise InputError(f"{self.name}: map {i!r} must go between algebras of the file")
        return CartanCalculus(CartanHomotopy(L, M, imap), self.subspace(h))

    def pi_example(self):
        from .derived import PiData, pi_example_build

        if self.pi is None:
            raise InputError(f"{self.name}: no pi_example block")
        p = self.pi
        return pi_example_build(PiData(p["V"], p["W"], p["dV"], p["dW"], p["pi"]))

    def split(self):
        """Lie-type split from the pi_example block or subspaces L and A."""
        from .derived import LieTypeSplit

        if self.pi is not None:
            return self.pi_example().split
        return LieTypeSplit(self.algebra(), self.subspace("L"), self.subspace("A"))


def _space_of(fx, name, where):
    if name in fx.algebras:
        return fx.algebras[name].space
    if name == MAIN and fx.bicomplex is not None:
        return fx.bicomplex["space"]
    raise InputError(f"{where}: unknown algebra {name!r}")


def parse_fixture(obj, where="fixture"):
    _keys(obj, TOP_KEYS, (), where)
    fx = Fixture(obj.get("name", where), obj.get("description", ""))
    if "algebras" in obj:
        if "space" in obj:
            raise InputError(f"{where}: use either top-level 'space' or 'algebras', not both")
        if not isinstance(obj["algebras"], dict) or not obj["algebras"]:
            raise InputError(f"{where}.algebras: expected a nonempty object")
        for nm, a in obj["algebras"].items():
            fx.algebras[nm] = parse_algebra(a, nm, f"{where}.algebras.{nm}")
    elif "space" in obj:
        space = parse_space(obj["space"], f"{where}.space")
        d = parse_blocks(space, space, 1, obj.get("differential"), f"{where}.differential")
        if "delta" in obj:
            dl = obj["delta"]
            _keys(dl, {"degree", "blocks"}, ("degree",), f"{where}.delta")
            delta = parse_blocks(space, space, _int(dl["degree"], f"{where}.delta.degree"),
                                 dl.get("blocks"), f"{where}.delta")
            if "product" in obj:
                if "unit" not in obj:
                    raise InputError(f"{where}: a product needs a 'unit'")
                unit = space.basis_vector(_basis_index(space, obj["unit"], f"{where}.unit"))
                fx.dbv = {"space": space, "unit": unit, "d": d, "delta": delta,
                          "product": _quadruples(space, obj["product"], f"{where}.product"),
                          "k": _int(obj.get("k", 1), f"{where}.k")}
            else:
                fx.bicomplex = {"space": space, "d": d, "delta": delta}
        else:
            t = _quadruples(space, obj.get("bracket", []), f"{where}.bracket")
            fx.algebras[MAIN] = DGLieAlgebra(space, d, t, obj.get("name", MAIN))
        for key in ("product", "unit", "k"):
            if key in obj and fx.dbv is None:
                raise InputError(f"{where}: '{key}' needs 'product' and 'delta'")
        if "bracket" in obj and MAIN not in fx.algebras:
            raise InputError(f"{where}: 'bracket' cannot be combined with 'delta'")
    for nm, m in obj.get("maps", {}).items():
        w = f"{where}.maps.{nm}"
        _keys(m, {"source", "target", "degree", "blocks"}, ("source", "target", "degree"), w)
        S, T = _space_of(fx, m["source"], w), _space_of(fx, m["target"], w)
        fx.maps[nm] = parse_blocks(S, T, _int(m["degree"], f"{w}.degree"), m.get("blocks"), w)
    for nm, s in obj.get("subspaces", {}).items():
        w = f"{where}.subspaces.{nm}"
        _keys(s, {"in", "span"}, ("in", "span"), w)
        space = _space_of(fx, s["in"], w)
        if not isinstance(s["span"], list):
            raise InputError(f"{w}.span: expected a list of coordinate vectors")
        vecs = [_matrix([v], 1, space.dim, f"{w}.span")[0] for v in s["span"]]
        fx.subspaces[nm] = Subspace.span(space, vecs) if vecs else Subspace.zero(space)
    if "pi_example" in obj:
        p, w = obj["pi_example"], f"{where}.pi_example"
        _keys(p, {"V", "W", "dV", "dW", "pi"}, ("V", "W", "pi"), w)
        V, W = parse_space(p["V"], f"{w}.V"), parse_space(p["W"], f"{w}.W")
        fx.pi = {"V": V, "W": W, "dV": parse_blocks(V, V, 1, p.get("dV"), f"{w}.dV"),
                 "dW": parse_blocks(W, W, 1, p.get("dW"), f"{w}.dW"),
                 "pi": parse_blocks(W, V, 1, p["pi"], f"{w}.pi")}
    sc = obj.get("scenario", {})
    _keys(sc, {"command", "options", "expect"}, (), f"{where}.scenario")
    fx.scenario = sc
    return fx


def load(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"{path}: cannot read ({e.strerror})") from e
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e.msg} at line {e.lineno}, column {e.colno})") from e
    return parse_fixture(obj, path.stem)


def shipped_dir():
    return Path(__file__).parent / "fixtures"


def resolve(name):
    """A path, or the stem of a bundled fixture."""
    p = Path(name)
    if p.exists():
        return p
    b = shipped_dir() / f"{name}.json"
    if b.exists():
        return b
    raise InputError(f"no such fixture file {name!r}")


def shipped():
    """All bundled fixtures as (stem, Fixture), sorted by file name."""
    return [(p.stem, load(p)) for p in sorted(shipped_dir().glob("*.json"))]
