"""Regenerate the bundled JSON fixtures.

Small instances are written out by hand; the larger ones (End algebras,
derived brackets, tensor products) are assembled with the library and
serialized.  Expected outcomes are stated here, not computed.
"""

import itertools
import json
from pathlib import Path

import numpy as np

from dglab.derived import PiData, lietype_cartan, lietype_dgla, pi_example_build
from dglab.dgla import DGLieAlgebra, end_dgla, sl2
from dglab.fixtures import (algebra_to_json, blocks_to_json, map_to_json, quadruples_to_json,
                            space_to_json, subspace_to_json)
from dglab.graded import GradedMap, GradedSpace, Subspace
from dglab.linalg import q, qmatrix, qzeros

OUT = Path(__file__).resolve().parent.parent / "src" / "dglab" / "fixtures"


def alg(degrees, names, d=None, brackets=(), name="L"):
    """Algebra from sparse data; each bracket entry also sets its skew partner."""
    space = GradedSpace(tuple(degrees), tuple(names))
    m = qzeros(space.dim, space.dim)
    for src, col in (d or {}).items():
        for tgt, c in col.items():
            m[space.index(tgt), space.index(src)] += q(c)
    consts = []
    for a, b, c, coef in brackets:
        consts.append((a, b, c, coef))
        if a != b:
            ia, ib = space.index(a), space.index(b)
            sign = -1 if (space.degrees[ia] * space.degrees[ib]) % 2 else 1
            consts.append((b, a, c, -sign * q(coef)))
    return DGLieAlgebra.from_constants(space, GradedMap(space, space, 1, m), consts, name)


def sparse_map(S, T, degree, entries):
    m = qzeros(T.dim, S.dim)
    for src, col in entries.items():
        for tgt, c in col.items():
            m[T.index(tgt), S.index(src)] += q(c)
    return GradedMap(S, T, degree, m)


def pi_data(vd, wd, dV, dW, pi):
    V, W = GradedSpace(tuple(vd)), GradedSpace(tuple(wd))
    return PiData(V, W, GradedMap(V, V, 1, qmatrix(dV, (len(vd), len(vd)))),
                  GradedMap(W, W, 1, qmatrix(dW, (len(wd), len(wd)))),
                  GradedMap(W, V, 1, qmatrix(pi, (len(vd), len(wd)))))


def pi_json(data):
    out = {"V": space_to_json(data.V), "W": space_to_json(data.W),
           "pi": blocks_to_json(data.pi)}
    for key, f in (("dV", data.dV), ("dW", data.dW)):
        b = blocks_to_json(f)
        if b:
            out[key] = b
    return out


def btt_file(L, M, i, H):
    return {"algebras": {"L": algebra_to_json(L), "M": algebra_to_json(M)},
            "maps": {"i": map_to_json(i, "L", "M")},
            "subspaces": {"H": subspace_to_json(H, "M")}}


def lietype_as_btt(data):
    """The derived-bracket algebra with its Cartan homotopy i_a = -a and H = L."""
    s = pi_example_build(data).split
    A = lietype_dgla(s)
    return btt_file(A, s.M, lietype_cartan(s, A).map, s.L)


def single(L):
    return algebra_to_json(L)


PI_TRIVIAL = pi_data([0], [0], [[0]], [[0]], [[0]])
PI_BROKEN = pi_data([1], [0], [[0]], [[0]], [[1]])
PI_NONABELIAN = pi_data([1, 2], [0, 1], [[0, 0], [1, 0]], [[0, 0], [1, 0]], [[2, 0], [0, -2]])
PI_CYCLES = pi_data([0, 1], [0], [[0, 0], [0, 0]], [[0]], [[0], [1]])


def gl2():
    V = GradedSpace((0, 0))
    return end_dgla(V, GradedMap.zero(V, V, 1), name="gl2")


def sl2_in_gl2():
    S, G = sl2(), gl2()
    em = lambda nm: G.space.basis_vector(G.space.index(nm))
    cols = [em("E[v0_0<-v0_0]") - em("E[v0_1<-v0_1]"), em("E[v0_0<-v0_1]"), em("E[v0_1<-v0_0]")]
    return S, G, GradedMap(S.space, G.space, 0, np.stack(cols, axis=1))


def product_tensor(space, entries):
    t = qzeros(space.dim, space.dim, space.dim)
    for a, b, c, coef in entries:
        t[space.index(a), space.index(b), space.index(c)] += q(coef)
    return t


def dbv_file(space, product, delta, d=None, unit="1", k=1):
    out = {"space": space_to_json(space)}
    if d is not None and blocks_to_json(d):
        out["differential"] = blocks_to_json(d)
    out["product"] = quadruples_to_json(space, product)
    out["unit"] = unit
    out["k"] = k
    out["delta"] = {"degree": delta.degree, "blocks": blocks_to_json(delta)}
    return out


def bicomplex_file(space, d, delta, f=None):
    out = {"space": space_to_json(space), "differential": blocks_to_json(d),
           "delta": {"degree": delta.degree, "blocks": blocks_to_json(delta)}}
    if f is not None:
        out["maps"] = {"f": map_to_json(f, "main", "main")}
    return out


EXT = GradedSpace((0, 1), ("1", "th"))
EXT_PRODUCT = product_tensor(EXT, [("1", "1", "1", 1), ("1", "th", "th", 1), ("th", "1", "th", 1)])
NONAB = GradedSpace((0, 0, 1, 1), ("1", "x", "th", "xth"))
NONAB_PRODUCT = product_tensor(NONAB, [(a, b, c, 1) for a, b, c in [
    ("1", "1", "1"), ("1", "x", "x"), ("x", "1", "x"), ("1", "th", "th"), ("th", "1", "th"),
    ("1", "xth", "xth"), ("xth", "1", "xth"), ("x", "th", "xth"), ("th", "x", "xth")]])


def dbv_tensor_acyclic():
    """(K[x]/x^2 (x) L(th), Delta(x th) = x) (x) L(z), deg z = -1, dz = 1."""
    bn, bd = ["1", "x", "th", "xth"], [0, 0, 1, 1]
    tab = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (0, 2): 2, (2, 0): 2, (0, 3): 3, (3, 0): 3,
           (1, 2): 3, (2, 1): 3}
    names = [b + ("z" if c else "") for c in range(2) for b in bn]
    space = GradedSpace(tuple(bd[b] - c for c in range(2) for b in range(4)), tuple(names))
    entries = []
    for (b1, c1), (b2, c2) in itertools.product(itertools.product(range(4), range(2)), repeat=2):
        r = tab.get((b1, b2))
        if r is None or c1 + c2 > 1:
            continue
        s = -1 if (c1 * bd[b2]) % 2 else 1
        entries.append((names[c1 * 4 + b1], names[c2 * 4 + b2], names[(c1 + c2) * 4 + r], s))
    d = sparse_map(space, space, 1, {names[4 + b]: {names[b]: -1 if bd[b] % 2 else 1}
                                     for b in range(4)})
    delta = sparse_map(space, space, -1, {"xth": {"x": 1}, "xthz": {"xz": 1}})
    return dbv_file(space, product_tensor(space, entries), delta, d)


def sc(command, expect, **options):
    out = {"command": command}
    if options:
        out["options"] = options
    out["expect"] = expect
    return out


def fixtures():
    F = {}
    # ---- DG-Lie algebras
    F["dgla_sl2"] = {**single(sl2()), "description": "sl2 in degree 0",
                     "scenario": sc("check", {"exit": 0, "h_star_bracket_zero": False})}
    F["dgla_heisenberg_odd"] = {
        **single(alg([1, 1, 2], ["x", "y", "z"], brackets=[("x", "y", "z", 1)])),
        "description": "[x, y] = z with x, y odd",
        "scenario": sc("check", {"exit": 0, "h_star_bracket_zero": False})}
    F["dgla_abelian"] = {
        **single(alg([0, 1, 1, 2], ["a", "b", "c", "e"], d={"a": {"b": 1}})),
        "description": "abelian with one acyclic pair",
        "scenario": sc("check", {"exit": 0, "h_star_bracket_zero": True})}
    F["dgla_broken_jacobi"] = {
        **single(alg([0, 0, 0], ["a", "b", "c"],
                     brackets=[("a", "b", "b", 1), ("b", "c", "a", 1), ("a", "c", "c", 1)])),
        "description": "skew bracket on K^3 violating Jacobi",
        "scenario": sc("check", {"exit": 1, "failing": "jacobi"})}
    F["dgla_broken_leibniz"] = {
        **single(alg([0, 0, 1], ["x", "y", "z"], d={"y": {"z": 1}}, brackets=[("x", "y", "y", 1)])),
        "description": "[x, y] = y and dy = z, but [x, z] = 0",
        "scenario": sc("check", {"exit": 1, "failing": "leibniz"})}
    # ---- morphisms
    S, G, f = sl2_in_gl2()
    F["fiber_sl2_gl2"] = {
        "algebras": {"L": algebra_to_json(S), "M": algebra_to_json(G)},
        "maps": {"f": map_to_json(f, "L", "M")}, "description": "sl2 -> gl2",
        "scenario": sc("fiber", {"exit": 0, "verdict": "homotopy-abelian"})}
    H3 = alg([1, 1, 2], ["x", "y", "z"], brackets=[("x", "y", "z", 1)], name="L")
    ab2 = alg([1, 1], ["x", "y"], name="M")
    F["fiber_heisenberg_quotient"] = {
        "algebras": {"L": algebra_to_json(H3), "M": algebra_to_json(ab2)},
        "maps": {"f": map_to_json(sparse_map(H3.space, ab2.space, 0,
                                             {"x": {"x": 1}, "y": {"y": 1}}), "L", "M")},
        "description": "kill the central z: injective on H^1 only",
        "scenario": sc("fiber", {"exit": 0, "verdict": "unobstructed"})}
    x1, u1 = alg([1], ["x"]), alg([1], ["u"], name="M")
    F["fiber_zero"] = {
        "algebras": {"L": algebra_to_json(x1), "M": algebra_to_json(u1)},
        "maps": {"f": map_to_json(GradedMap.zero(x1.space, u1.space), "L", "M")},
        "description": "zero map on a nonzero H^1",
        "scenario": sc("fiber", {"exit": 0, "verdict": "none"})}
    # ---- BTT instances
    def btt(L, M, i, H, verdict, relaxed, description):
        return {**btt_file(L, M, sparse_map(L.space, M.space, -1, i), H(M.space)),
                "description": description,
                "scenario": sc("btt", {"exit": 0 if verdict.startswith("homotopy") else 1,
                                       "verdict": verdict, "relaxed": relaxed})}

    zero, whole = Subspace.zero, Subspace.whole
    CERT, SMOOTH = "homotopy-abelian-certified", "smoothness-only-certified"
    F["btt_abelian_shift"] = btt(alg([1], ["x"]), alg([1, 0], ["x1", "u"], name="M"),
                                 {"x": {"u": 1}}, zero, CERT, SMOOTH,
                                 "i_x = u into an abelian M, H = 0")
    for nm, data, verdict, relaxed, desc in [
            ("btt_pi_trivial", PI_TRIVIAL, CERT, SMOOTH, "derived brackets for V = W = K, pi = 0"),
            ("btt_pi_nonabelian", PI_NONABELIAN, CERT, SMOOTH,
             "derived brackets with a nonzero bracket on A[-1]"),
            ("btt_broken_3", PI_BROKEN, "failed(3)", SMOOTH,
             "derived brackets for V = K[-1], W = K, pi = 1")]:
        F[nm] = {**lietype_as_btt(data), "description": desc,
                 "scenario": sc("btt", {"exit": 0 if verdict == CERT else 1,
                                        "verdict": verdict, "relaxed": relaxed})}
    S, G, _ = sl2_in_gl2()
    F["btt_sl2"] = btt(S, G, {}, whole, "failed(4)", SMOOTH,
                       "sl2 has a nonzero bracket on H^0; no certificate")
    F["btt_broken_1"] = btt(alg([1, 2], ["e", "f"], brackets=[("e", "e", "f", 1)]),
                            alg([0, 1], ["u", "v"], name="M"),
                            {"e": {"u": 1}, "f": {"v": 1}}, whole, "failed(1)", "failed(1)",
                            "i_[e,e] = v but [i_e, d i_e] = 0")
    F["btt_broken_2"] = btt(alg([1], ["x"]), alg([0, 1], ["u", "w"], d={"u": {"w": 1}}, name="M"),
                            {"x": {"u": 1}}, zero, "failed(2)", "failed(2)",
                            "l_x = w is not in H = 0")
    F["btt_broken_4"] = btt(alg([1], ["x"]), alg([1], ["w"], name="M"), {}, whole,
                            "failed(4)", SMOOTH, "i = 0 cannot detect H^1(L)")
    F["btt_relaxed"] = btt(alg([2, 3], ["x", "y"]), alg([1, 2], ["u", "z"], name="M"),
                           {"x": {"u": 1}}, zero, "failed(4)", SMOOTH,
                           "i detects H^2 but not H^3")
    F["btt_relaxed_residuals"] = btt(
        alg([1, 1, 2, 2, 3], ["e", "g", "f", "x", "y"], d={"g": {"f": 1}},
            brackets=[("e", "e", "f", 1)]),
        alg([1, 2], ["u", "z"], name="M"), {"x": {"u": 1}}, zero, "failed(4)", SMOOTH,
        "[e, e] = f = dg gives nonzero exact residuals; i detects H^2 only")
    # ---- dBV algebras
    def dbv(file, description, **expect):
        return {**file, "description": description,
                "scenario": sc("bv", {"exit": 0 if expect.get("bv", True) and expect.get("degeneration") else 1,
                                   **expect},
                               sub="pipeline" if expect.get("bv", True) else "check")}

    F["dbv_exterior"] = dbv(dbv_file(EXT, EXT_PRODUCT, sparse_map(EXT, EXT, -1, {"th": {"1": 1}})),
                            "Lambda(th), Delta = d/dth", bv=True, abelian=True, degeneration=False)
    F["dbv_nonabelian"] = dbv(dbv_file(NONAB, NONAB_PRODUCT,
                                       sparse_map(NONAB, NONAB, -1, {"xth": {"x": 1}})),
                              "K[x]/x^2 (x) Lambda(th), Delta(x th) = x",
                              bv=True, abelian=False, degeneration=False)
    F["dbv_bv_relation_fails"] = dbv(dbv_file(NONAB, NONAB_PRODUCT,
                                              sparse_map(NONAB, NONAB, -1, {"xth": {"1": 1}})),
                                     "Delta(x th) = 1 is not a derivation of the bracket",
                                     bv=False, failing="bv_relation")
    F["dbv_tensor_acyclic"] = {**dbv_tensor_acyclic(),
                               "description": "the nonabelian example tensored with Lambda(z), dz = 1",
                               "scenario": sc("bv", {"exit": 0, "bv": True, "abelian": False,
                                                     "degeneration": True}, sub="pipeline")}
    F["dbv_trivial_delta"] = dbv(dbv_file(EXT, EXT_PRODUCT, GradedMap.zero(EXT, EXT, -1)),
                                 "Delta = 0 and d = 0", bv=True, abelian=True, degeneration=True)
    # ---- bicomplexes
    def bic(degs, names, d, delta, ddeg, description, f=None, **expect):
        V = GradedSpace(tuple(degs), tuple(names))
        fm = sparse_map(V, V, ddeg - 1, f) if f is not None else None
        return {**bicomplex_file(V, sparse_map(V, V, 1, d), sparse_map(V, V, ddeg, delta), fm),
                "description": description,
                "scenario": sc("bv", {"exit": 0 if expect["degeneration"] else 1, **expect},
                               sub="degeneration")}

    F["bicomplex_d_equals_delta"] = bic([0, 1], ["a", "b"], {"a": {"b": 1}}, {"a": {"b": 1}}, 1,
                                        "Delta = d", degeneration=True, d_delta_lemma=False)
    F["bicomplex_square"] = bic([0, 1, -1, 0], ["a", "da", "Da", "dDa"],
                                {"a": {"da": 1}, "Da": {"dDa": 1}},
                                {"a": {"Da": 1}, "da": {"dDa": -1}}, -1,
                                "a single d-Delta square", degeneration=True, d_delta_lemma=True)
    F["bicomplex_nondegenerate"] = bic([0, 1], ["x", "y"], {}, {"x": {"y": 1}}, 1,
                                       "Delta is nonzero on H(d)",
                                       degeneration=False, d_delta_lemma=False)
    F["bicomplex_exp_jordan"] = bic([0, 0, 1, 1], ["a0", "a1", "b0", "b1"], {"a0": {"b0": 1}},
                                    {"a0": {"b1": -1}}, 1,
                                    "Delta = [d, f] with f a nilpotent Jordan block",
                                    f={"a0": {"a1": 1}, "b0": {"b1": 1}},
                                    degeneration=True, exp_tf=True)
    # ---- Lie-type splits and pi-examples
    for nm, data, cert, ab in [("trivial", PI_TRIVIAL, True, True),
                               ("broken", PI_BROKEN, False, True),
                               ("nonabelian", PI_NONABELIAN, True, False),
                               ("cycles", PI_CYCLES, False, False)]:
        F[f"pi_{nm}"] = {"pi_example": pi_json(data),
                         "scenario": sc("lietype", {"exit": 0 if cert else 1, "lietype": True,
                                                    "certified": cert, "abelian": ab}, sub="btt")}
    s = pi_example_build(PI_NONABELIAN).split
    F["lietype_nonabelian"] = {
        **single(s.M), "subspaces": {"L": subspace_to_json(s.L, "main"),
                                     "A": subspace_to_json(s.A, "main")},
        "description": "the nonabelian pi-example given as an explicit split",
        "scenario": sc("lietype", {"exit": 0, "lietype": True, "certified": True}, sub="btt")}
    S = sl2()
    F["lietype_not_abelian_A"] = {
        **single(S), "subspaces": {
            "L": subspace_to_json(Subspace.span(S.space, [S.space.basis_vector(0)]), "main"),
            "A": subspace_to_json(Subspace.span(S.space, [S.space.basis_vector(1),
                                                          S.space.basis_vector(2)]), "main")},
        "description": "A = <e, f> in sl2 has [e, f] = h",
        "scenario": sc("lietype", {"exit": 1, "lietype": False, "failing": "ii_A_abelian"},
                       sub="check")}
    # ---- Maurer-Cartan
    F["mc_toy_obstructed"] = {
        **single(alg([1, 2], ["e", "f"], brackets=[("e", "e", "f", 1)])),
        "description": "[e, e] = f: obstructed at order 2",
        "scenario": sc("mc", {"exit": 1, "verdict": "obstructed-at-order-2"}, vars=1, order=5)}
    F["mc_mixed_obstructed"] = {
        **single(alg([1, 1, 2], ["e1", "e2", "f"], brackets=[("e1", "e2", "f", 1)])),
        "description": "only mixed first-order data are obstructed",
        "scenario": sc("mc", {"exit": 1, "verdict": "obstructed-at-order-2"}, vars=2, order=3)}
    F["mc_exact_obstruction"] = {
        **single(alg([1, 2, 1], ["e", "f", "g"], d={"g": {"f": 1}},
                     brackets=[("e", "e", "f", 1)])),
        "description": "the would-be obstruction f = dg is exact",
        "scenario": sc("mc", {"exit": 0, "verdict": "unobstructed"}, vars=1, order=5)}
    return F


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.json"):
        old.unlink()
    F = fixtures()
    for name, obj in F.items():
        obj = {"name": name, **obj}
        (OUT / f"{name}.json").write_text(json.dumps(obj, indent=2) + "\n")
    print(f"wrote {len(F)} fixtures to {OUT}")


if __name__ == "__main__":
    main()
