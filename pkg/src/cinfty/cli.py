"""Command-line interface: ring info, identity suites, psi reports, Stokes
checks, sheaf demos, and the acceptance selfcheck.

Machine-readable JSON goes to stdout; a human-readable summary goes to stderr
(suppressed by --quiet).  Exit codes: 0 all verdicts pass, 1 failures,
2 parse/IO errors, 3 degree mismatches.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time
from fractions import Fraction

from . import expr as ex
from .acceptance import run_all
from .cring import CRingError, load_ring
from .derham import FormError, parse_form
from .expr import ParseError
from .geometry import (
    GermRep,
    IncompatibleFamily,
    Section,
    germ_invert,
    glue,
    space_from_dict,
)
from .integrate import DegreeMismatch, QuadratureRule, SimplexMap, stokes_check
from .kaehler import kaehler_presentation, psi_noninjectivity_report

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_DEGREE = 3

_PI_TEXT = f"({Fraction(math.pi)})"


def _wall(start: float) -> float:
    return round(time.perf_counter() - start, 6)


def _emit(report: dict, args, human_lines: list[str], exit_code: int) -> int:
    print(json.dumps(report, indent=2, sort_keys=True, default=str))
    if not args.quiet and not args.json:
        for line in human_lines:
            print(line, file=sys.stderr)
    return exit_code


def _split_components(text: str) -> list[str]:
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
            continue
        cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur).strip())
    return parts


def _substitute_pi(text: str) -> str:
    return re.sub(r"\bpi\b", _PI_TEXT, text)


def cmd_ring(args) -> int:
    start = time.perf_counter()
    ring = load_ring(args.ring)
    module = kaehler_presentation(ring)
    gb = ring.groebner()
    report = {
        "command": "ring",
        "inputs": {"ring": args.ring},
        "n": ring.n,
        "generators": [str(g) for g in ring.gens],
        "polynomial_presentation": ring.is_polynomial,
        "groebner_basis_size": len(gb.basis) if gb else 0,
        "kaehler": {
            "rank": module.rank,
            "relations": [
                [str(c) for c in row] for row in module.relations
            ],
        },
        "seed": ring.oracle.seed,
        "wall_time_s": _wall(start),
    }
    lines = [
        f"ring: n={ring.n}, {len(ring.gens)} generator(s), "
        f"Groebner size {report['groebner_basis_size']}",
        f"1-form module: rank {module.rank}, {len(module.relations)} relation(s)",
    ]
    return _emit(report, args, lines, EXIT_OK)


def cmd_identities(args) -> int:
    from .randomized import run_identity_suites, self_hom_pool

    start = time.perf_counter()
    ring = load_ring(args.ring)
    suites = run_identity_suites(ring, args.trials, args.seed, self_hom_pool(ring))
    all_pass = all(s.passed for s in suites)
    report = {
        "command": "identities",
        "inputs": {"ring": args.ring, "trials": args.trials},
        "suites": [s.to_dict() for s in suites],
        "all_pass": all_pass,
        "seed": args.seed,
        "wall_time_s": _wall(start),
    }
    lines = [
        f"{s.name}: {s.trials - s.failures}/{s.trials} pass" for s in suites
    ]
    return _emit(report, args, lines, EXIT_OK if all_pass else EXIT_FAIL)


def cmd_psi(args) -> int:
    start = time.perf_counter()
    ring = load_ring(args.ring)
    omega = parse_form(args.omega, ring)
    if omega.degree != 1:
        raise DegreeMismatch("psi probes need a 1-form")
    rep = psi_noninjectivity_report(
        ring, omega.as_oneform(), args.degree_bound, args.derivation_degree
    )
    report = {
        "command": "psi",
        "inputs": {"ring": args.ring, "omega": args.omega},
        **rep,
        "wall_time_s": _wall(start),
    }
    lines = [
        f"omega in J: {rep['in_J']['label']}",
        f"tangent derivations checked: {rep['derivations_checked']}",
        f"all contractions in ideal: {rep['all_contractions_in_I']}",
        f"witness found: {rep['witness_found']}",
    ]
    return _emit(report, args, lines, EXIT_OK)


def cmd_stokes(args) -> int:
    start = time.perf_counter()
    ring = load_ring(args.ring)
    gamma = parse_form(args.gamma, ring)
    k = gamma.degree + 1
    comps = [_substitute_pi(c) for c in _split_components(args.sigma)]
    used = [int(m) for c in comps for m in re.findall(r"\bt(\d+)\b", c)]
    if used and max(used) > k:
        raise DegreeMismatch(
            f"sigma uses t{max(used)} but gamma has degree {gamma.degree}, "
            f"so the simplex dimension is {k}"
        )
    sigma = SimplexMap(k, ring, comps)
    rule = QuadratureRule(degree=args.quad_degree, tol=min(args.tol * 1e-2, 1e-9))
    rep = stokes_check(sigma, gamma, args.tol, rule)
    report = {
        "command": "stokes",
        "inputs": {
            "ring": args.ring,
            "sigma": args.sigma,
            "gamma": args.gamma,
            "tol": args.tol,
            "simplex_dimension": k,
        },
        **rep.to_dict(),
        "seed": args.seed,
        "wall_time_s": _wall(start),
    }
    lines = [
        f"int_sigma d(gamma) = {rep.lhs:.12g}",
        f"int_boundary gamma = {rep.rhs:.12g}",
        f"residual = {rep.residual:.3g} ({'PASS' if rep.passed else 'FAIL'} at {args.tol:g})",
    ]
    return _emit(report, args, lines, EXIT_OK if rep.passed else EXIT_FAIL)


def cmd_sheaf(args) -> int:
    start = time.perf_counter()
    with open(args.space, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    space, opens = space_from_dict(data)
    if not opens:
        opens = [space.whole()]
    rep_expr = ex.parse(args.section, space.ring.n)
    sections = [Section(u, rep_expr) for u in opens]
    glue_info: dict = {}
    code = EXIT_OK
    try:
        glued, cert = glue(opens, sections)
        glue_info = {"glued": True, **cert.to_dict()}
    except IncompatibleFamily as e:
        glue_info = {
            "glued": False,
            "witness": list(e.witness),
            "pair": list(e.pair),
            "deviation": e.deviation,
        }
        code = EXIT_FAIL
    germ_info: dict = {}
    base = next((p for p in space.samples(40) if abs(ex.evaluate(rep_expr, p)) > 0.1), None)
    if base is not None:
        germ = GermRep(Section(space.whole(), rep_expr), base)
        inv = germ_invert(germ)
        nbhd = [p for p in space.samples(60) if inv.section.open_set.contains(p)]
        err = max(
            (abs(germ.section(p) * inv.section(p) - 1.0) for p in nbhd), default=0.0
        )
        germ_info = {
            "base_point": list(base),
            "inverse_product_error": err,
            "neighborhood_samples": len(nbhd),
        }
    report = {
        "command": "sheaf",
        "inputs": {"space": args.space, "section": args.section},
        "opens": len(opens),
        "glue": glue_info,
        "germ_inversion": germ_info,
        "seed": space.seed,
        "wall_time_s": _wall(start),
    }
    lines = [f"gluing over {len(opens)} open(s): {glue_info}"]
    if germ_info:
        lines.append(
            f"germ inversion at {germ_info['base_point']}: "
            f"error {germ_info['inverse_product_error']:.3g}"
        )
    return _emit(report, args, lines, code)


def cmd_selfcheck(args) -> int:
    start = time.perf_counter()
    results = run_all(args.seed)
    all_pass = all(r.passed for r in results)
    report = {
        "command": "selfcheck",
        "inputs": {},
        "criteria": [r.to_dict() for r in results],
        "all_pass": all_pass,
        "seed": args.seed,
        "wall_time_s": _wall(start),
    }
    lines = [r.line() for r in results]
    lines.append("all criteria pass" if all_pass else "FAILURES present")
    return _emit(report, args, lines, EXIT_OK if all_pass else EXIT_FAIL)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--degree-bound", type=int, default=6, dest="degree_bound")
    common.add_argument("--json", action="store_true", help="machine output only")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(
        prog="cinfty",
        description="Symbolic/numeric calculus on finitely presented smooth rings",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ring = sub.add_parser("ring", parents=[common],
                            help="presentation and differential-module info")
    p_ring.add_argument("--ring", required=True)
    p_ring.set_defaults(fn=cmd_ring)

    p_id = sub.add_parser("identities", parents=[common],
                          help="randomized identity suites")
    p_id.add_argument("--ring", required=True)
    p_id.add_argument("--trials", type=int, default=50)
    p_id.set_defaults(fn=cmd_identities)

    p_psi = sub.add_parser("psi", parents=[common],
                           help="contraction-degeneracy report for a 1-form")
    p_psi.add_argument("--ring", required=True)
    p_psi.add_argument("--omega", required=True, help='form literal, e.g. "x1 * dx2"')
    p_psi.add_argument("--derivation-degree", type=int, default=4,
                       dest="derivation_degree")
    p_psi.set_defaults(fn=cmd_psi)

    p_st = sub.add_parser("stokes", parents=[common],
                          help="compare both sides of the boundary identity")
    p_st.add_argument("--ring", required=True)
    p_st.add_argument("--sigma", required=True,
                      help='comma-separated map components in t1..tk (pi allowed)')
    p_st.add_argument("--gamma", required=True, help="form literal")
    p_st.add_argument("--quad-degree", type=int, default=7, dest="quad_degree")
    p_st.set_defaults(fn=cmd_stokes)

    p_sh = sub.add_parser("sheaf", parents=[common],
                          help="gluing and germ-inversion demo on a cover")
    p_sh.add_argument("--space", required=True, help="space/cover JSON description")
    p_sh.add_argument("--section", default="x1")
    p_sh.set_defaults(fn=cmd_sheaf)

    p_self = sub.add_parser("selfcheck", parents=[common],
                            help="run the acceptance suite")
    p_self.set_defaults(fn=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DegreeMismatch as exc:
        print(json.dumps({"error": str(exc), "kind": "degree_mismatch"}))
        if not args.quiet:
            print(f"degree mismatch: {exc}", file=sys.stderr)
        return EXIT_DEGREE
    except (ParseError, FormError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(json.dumps({"error": str(exc), "kind": "input"}))
        if not args.quiet:
            print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CRingError as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}))
        if not args.quiet:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
