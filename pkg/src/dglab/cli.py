"""Command-line entry point.

    dglab COMMAND [SUB] FIXTURE [options]

FIXTURE is a path or the name of a bundled fixture (``dglab list``).  Exit
codes: 0 all checks pass, 1 a mathematical check failed, 2 input error.
Reports go to stdout, as text or with ``--json`` as sorted JSON.  The
environment variable DGLAB_VERBOSITY (0, 1 or 2) sets the detail of the
text rendering.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .bv import (bv_check, bv_pipeline, bv_to_dgla, d_delta_lemma_check, degeneration_solve,
                 exp_tf_witness)
from .cartan import CartanHomotopy, btt_certify, btt_relaxed, cartan_check
from .coderivations import q_square_check, splitting_check
from .derived import lietype_btt, lietype_check, lietype_dgla, pi_bracket_check
from .dgla import DGLAMorphism, check_axioms, h_star_bracket, morphism_check
from .fixtures import load, resolve, shipped
from .homotopy import cone_model, factorize, homotopy_fiber_abelian_probe, tw_projection_quasi_iso_check
from .linalg import is_zero, rank
from .mc import ArtinianBase, unobstructed_probe
from .report import InputError, Report

VERBOSITY_ENV = "DGLAB_VERBOSITY"


def _complex_report(name, space, d):
    from .graded import cohomology

    rep = Report(f"cohomology of {name}")
    H = cohomology(space, d)
    rep.data["dims"] = {str(i): n for i, n in sorted(H.dims.items())}
    rep.data["representatives"] = {
        str(i): [dict(zip(space.names, H.representatives[i][:, j]))
                 for j in range(H.dims[i])] for i in sorted(H.dims) if H.dims[i]}
    return rep


def cmd_check(fx, args):
    rep = Report(f"check {fx.name}")
    for nm, L in sorted(fx.algebras.items()):
        rep.extend(check_axioms(L), f"{nm}.")
    if fx.dbv is not None:
        rep.extend(bv_check(fx.dbv_algebra()), "bv.")
    if fx.bicomplex is not None:
        b = fx.bicomplex
        rep.add("d_squared", is_zero(b["d"].matrix @ b["d"].matrix))
        rep.add("delta_squared", is_zero(b["delta"].matrix @ b["delta"].matrix))
    if rep.passed:
        for nm, f in sorted(fx.maps.items()):
            src, tgt = fx.algebra_on(f.source), fx.algebra_on(f.target)
            if src is None or tgt is None:
                continue
            if f.degree == 0:
                rep.extend(morphism_check(DGLAMorphism(src, tgt, f)), f"{nm}.")
            elif f.degree == -1:
                rep.extend(cartan_check(CartanHomotopy(src, tgt, f)), f"{nm}.")
    return rep


def cmd_cohomology(fx, args):
    rep = Report(f"cohomology {fx.name}")
    for nm, L in sorted(fx.algebras.items()):
        sub = _complex_report(nm, L.space, L.d)
        rep.data[nm] = sub.data
        rep.data[nm]["h_star_bracket_zero"] = h_star_bracket(L).abelian_cohomology
    src = fx.dbv or fx.bicomplex
    if src is not None:
        rep.data["d"] = _complex_report("d", src["space"], src["d"]).data
    return rep


def _calculus(fx, args):
    return fx.calculus(args.i, args.h)


def cmd_btt(fx, args):
    return btt_certify(_calculus(fx, args))


def cmd_btt_relaxed(fx, args):
    return btt_relaxed(_calculus(fx, args))


def cmd_bv(fx, args):
    sub = args.sub
    if sub == "check":
        return bv_check(fx.dbv_algebra())
    if sub == "dgla":
        A = fx.dbv_algebra()
        L = bv_to_dgla(A)
        rep = check_axioms(L)
        rep.title = f"DG-Lie algebra of {fx.name}"
        rep.data["bracket"] = [[L.space.names[a], L.space.names[b], L.space.names[c], x]
                               for (a, b, c), x in _nonzero(L.table)]
        rep.data["abelian"] = L.is_abelian()
        return rep
    if sub == "degeneration":
        X = fx.bicomplex_obj()
        wit = degeneration_solve(X)
        rep = wit.to_report()
        lemma = d_delta_lemma_check(X)
        rep.data["d_delta_lemma"] = lemma.get("ker_d_cap_im_delta").passed and \
            lemma.get("ker_delta_cap_im_d").passed
        return rep
    if sub == "lemma":
        return d_delta_lemma_check(fx.bicomplex_obj())
    if sub == "exp":
        _, rep = exp_tf_witness(fx.bicomplex_obj(), fx.map(args.f))
        return rep
    if sub == "pipeline":
        return bv_pipeline(fx.dbv_algebra(), mc_order=args.order)
    raise InputError(f"unknown bv subcommand {sub!r}")


def _nonzero(t):
    return [(idx, x) for idx, x in np.ndenumerate(t) if x != 0]


def cmd_coder(fx, args):
    L = fx.algebra(args.algebra)
    if args.sub == "q2":
        rep = q_square_check(L, args.trunc)
        if not all(v for k, v in rep.data.items() if k.startswith("matches_")):
            rep.add("agrees_with_axioms", False, {k: v for k, v in rep.data.items()})
        return rep
    rep = splitting_check(L, args.trunc)
    if rep.verdict.startswith("obstructed"):
        rep.add("splitting", False, {"verdict": rep.verdict})
    return rep


def cmd_lietype(fx, args):
    ex = fx.pi_example() if fx.pi is not None else None
    s = fx.split()
    if args.sub == "check":
        return lietype_check(s)
    if args.sub == "dgla":
        alg = lietype_dgla(s)
        rep = check_axioms(alg)
        rep.title = f"derived-bracket algebra of {fx.name}"
        if ex is not None:
            rep.extend(pi_bracket_check(ex, alg), "pi.")
        rep.data["abelian"] = alg.is_abelian()
        return rep
    rep = lietype_btt(s)
    if ex is not None:
        rep.data["pi_bracket"] = pi_bracket_check(ex).passed
    return rep


def cmd_mc(fx, args):
    L = fx.algebra(args.algebra)
    opts = fx.scenario.get("options", {}) if fx.scenario.get("command") == "mc" else {}
    g = args.vars if args.vars is not None else opts.get("vars", 1)
    n = args.order if args.order is not None else opts.get("order", 3)
    return unobstructed_probe(L, ArtinianBase(g, n), args.max_order)


def cmd_fiber(fx, args):
    mor = fx.morphism(args.map)
    f, L = mor.map, mor.source
    rep = homotopy_fiber_abelian_probe(mor, mc_order=args.order)
    rep.extend(cone_model(mor).report, "cone.")
    rep.extend(factorize(mor).ledger, "factorize.")
    if rank(f.matrix) == L.dim:
        rep.extend(tw_projection_quasi_iso_check(mor), "fibre.")
    else:
        rep.data["integral_map"] = "skipped: f is not injective"
    return rep


def cmd_list(args):
    rep = Report("bundled fixtures")
    for name, fx in shipped():
        rep.data[name] = {"command": fx.scenario.get("command"),
                          "options": fx.scenario.get("options", {}),
                          "description": fx.description}
    return rep


COMMANDS = {"check": cmd_check, "cohomology": cmd_cohomology, "btt": cmd_btt,
            "btt-relaxed": cmd_btt_relaxed, "bv": cmd_bv, "coder": cmd_coder,
            "lietype": cmd_lietype, "mc": cmd_mc, "fiber": cmd_fiber}


def build_parser():
    p = argparse.ArgumentParser(prog="dglab", description="Exact checks for DG-Lie algebras.")
    p.add_argument("--version", action="version", version=f"dglab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def fixture_cmd(name, help_, subs=None):
        c = sub.add_parser(name, help=help_)
        if subs:
            c.add_argument("sub", choices=subs)
        c.add_argument("fixture", help="fixture path or bundled fixture name")
        c.add_argument("--json", action="store_true", help="machine-readable output")
        return c

    fixture_cmd("check", "axioms of every structure in the file")
    fixture_cmd("cohomology", "cohomology of every complex in the file")
    for nm in ("btt", "btt-relaxed"):
        c = fixture_cmd(nm, "Cartan-calculus certificate" + (" (H^1/H^2 only)" if "-" in nm else ""))
        c.add_argument("--h", default="H", help="subspace name (default H)")
        c.add_argument("--i", default="i", help="Cartan homotopy map name (default i)")
    c = fixture_cmd("bv", "dBV algebras and bicomplexes",
                    ["check", "dgla", "degeneration", "lemma", "exp", "pipeline"])
    c.add_argument("--f", default="f", help="map name for the exp criterion (default f)")
    c.add_argument("--order", type=int, default=5, help="MC order for the pipeline")
    c = fixture_cmd("coder", "coderivations of the symmetric coalgebra", ["q2", "split"])
    c.add_argument("--trunc", type=int, default=3, help="word-length truncation N >= 3")
    c.add_argument("--algebra", default=None)
    fixture_cmd("lietype", "derived brackets of Lie type", ["check", "dgla", "btt"])
    c = fixture_cmd("mc", "Maurer-Cartan lifting probe")
    c.add_argument("--vars", type=int, default=None, help="number of variables g")
    c.add_argument("--order", type=int, default=None, help="truncation order n")
    c.add_argument("--max-order", type=int, default=None, dest="max_order")
    c.add_argument("--algebra", default=None)
    c = fixture_cmd("fiber", "cone model, long exact sequence and fibre probe")
    c.add_argument("--map", default="f", help="morphism name (default f)")
    c.add_argument("--order", type=int, default=3, help="MC order for the kernel probe")
    fixture_cmd("run", "run the scenario stored in the file")
    c = sub.add_parser("list", help="list bundled fixtures")
    c.add_argument("--json", action="store_true")
    return p


def scenario_args(fx):
    """Argument namespace for the file's own scenario."""
    sc = fx.scenario
    if "command" not in sc:
        raise InputError(f"{fx.name}: no scenario command")
    argv = [sc["command"]]
    opts = dict(sc.get("options", {}))
    if "sub" in opts:
        argv.append(str(opts.pop("sub")))
    argv.append(fx.name)
    if sc["command"] != "mc":
        for k, v in sorted(opts.items()):
            argv += [f"--{k.replace('_', '-')}", str(v)]
    return build_parser().parse_args(argv)


def run_fixture(fx, args):
    """(exit code, report) for a parsed fixture."""
    rep = COMMANDS[args.command](fx, args)
    return (0 if rep.passed else 1), rep


def _verbosity():
    try:
        return max(0, min(2, int(os.environ.get(VERBOSITY_ENV, "1"))))
    except ValueError:
        return 1


def emit(rep, as_json, out):
    if as_json:
        out.write(rep.to_json() + "\n")
    else:
        out.write(rep.render(_verbosity()) + "\n")


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.command == "list":
            rep = cmd_list(args)
            if args.json:
                emit(rep, True, out)
            else:
                for name, info in rep.data.items():
                    out.write(f"{name:28s} {info['command'] or '-':12s} {info['description']}\n")
            return 0
        fx = load(resolve(args.fixture))
        if args.command == "run":
            as_json = args.json
            args = scenario_args(fx)
            args.json = as_json
        code, rep = run_fixture(fx, args)
    except InputError as e:
        rep = Report("input error", verdict="input-error")
        rep.add("input", False, e.witness, str(e))
        emit(rep, getattr(args, "json", False), out)
        return 2
    emit(rep, args.json, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
