"""Command-line front end.

Exit codes: 0 when every certified check passes, 1 when a certified check
fails, 2 on usage or validation errors.  ``--format structured`` prints one
JSON document (schema ``surgery-cert/report/1``) with sorted keys and no
timestamps, so identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from . import __version__
from .chain import (ASSUMPTIONS, ChainCertificateError, ChainParams, euler_prong_check, fried_prongs,
                    birkhoff_sign_check, knot_surgery_check, theorem_main_verifier)
from .homology import (DimensionError, SurgeryDeterminant, SurgerySpec, is_odd_order, ostrowski_bound,
                       positivity_threshold, presentation_matrix)
from .linkfile import LinkFormatError, load_link, preset
from .lspace import CertificateError, PreconditionError, certificate_tree, dump_tree
from .slopes import parse_rational, parse_slope

REPORT_SCHEMA = "surgery-cert/report/1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("surgery_cert")


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _slope_list(text):
    try:
        return [parse_rational(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _resolve_link(args):
    if bool(args.preset) == bool(args.link):
        raise UsageError("give exactly one of --preset or --link")
    if args.preset:
        return preset(args.preset, args.signs)
    return load_link(args.link)


def _chain_params(args) -> ChainParams:
    return ChainParams(n=args.n, M=args.M, mode=args.mode,
                       ell=tuple(args.ell) if args.ell else None,
                       interior_prongs=tuple(args.interior or ()),
                       signs=tuple(args.signs) if args.signs else None)


# -- commands: each returns (status, certified dict, human lines) -------------------

def cmd_homology(args):
    L = _resolve_link(args)
    if not args.slopes:
        raise UsageError("--slopes is required")
    spec = SurgerySpec(tuple(args.slopes))
    if spec.n != L.n:
        raise UsageError(f"link has {L.n} components but {spec.n} slopes were given")
    parity = is_odd_order(L, spec)
    bound = ostrowski_bound(L, spec)
    f_val = SurgeryDeterminant(L)(spec.slopes)
    k, thr = positivity_threshold(L)
    status = "pass"
    if bound is not None and bound > parity.order:
        status = "fail"
    out = {
        "slopes": [_frac(a) for a in spec.slopes],
        "presentation_matrix": [[str(v) for v in row] for row in presentation_matrix(L, spec)],
        "h1_order": str(parity.order),
        "h1_infinite": parity.order == 0,
        "odd": parity.odd,
        "all_denominators_even": parity.all_denominators_even,
        "ostrowski_bound": "inapplicable" if bound is None else str(bound),
        "f_value": _frac(f_val),
        "positivity_threshold": str(thr),
    }
    lines = [
        f"slopes            {', '.join(out['slopes'])}",
        f"|H_1|             {'infinite' if parity.order == 0 else parity.order}",
        f"parity            {'odd' if parity.odd else 'even'}"
        f" (all q_i even: {'yes' if parity.all_denominators_even else 'no'})",
        f"Ostrowski bound   {out['ostrowski_bound']}",
        f"f(a)              {out['f_value']}",
        f"n!*k threshold    {thr}  (k = {k})",
    ]
    return status, out, lines


def _tree_lines(tree):
    ids = {}
    order = []
    for node in tree.iter_unique():
        ids[id(node)] = len(ids)
        order.append(node)
    lines = []
    for node in order:
        spec = "(" + ", ".join(_frac(a) for a in node.spec.slopes) + ")"
        if node.is_leaf:
            lines.append(f"#{ids[id(node)]} leaf {spec} |H_1|={node.h1}")
        else:
            w = node.witness
            lines.append(
                f"#{ids[id(node)]} {spec} |H_1|={node.h1} split d={node.split_index} -> "
                f"#{ids[id(node.left)]} + #{ids[id(node.right)]}: {node.left.h1} + {node.right.h1} = {node.h1}"
                f" [det {w.det_left},{w.det_right},{w.det_parent}; affine {w.affine_left},{w.affine_right},"
                f"{w.affine_parent}]")
    return lines


def cmd_lspace_cert(args):
    L = _resolve_link(args)
    if not args.slopes:
        raise UsageError("--slopes is required")
    if args.C is None:
        raise UsageError("--C is required")
    spec = SurgerySpec(tuple(args.slopes))
    if spec.n != L.n:
        raise UsageError(f"link has {L.n} components but {spec.n} slopes were given")
    cert = certificate_tree(L, spec, args.C)
    if args.emit_tree:
        with open(args.emit_tree, "w") as fh:
            fh.write(dump_tree(cert, L))
    out = {
        "slopes": [_frac(a) for a in spec.slopes],
        "C": args.C,
        "positivity": cert.positivity,
        "threshold": str(cert.threshold),
        "internal_nodes": cert.internal_nodes,
        "leaves": cert.leaves,
        "min_leaf_slope": _frac(cert.min_leaf_slope),
        "root_h1": str(cert.tree.h1),
        "statement": cert.statement,
    }
    lines = [f"certificate: {cert.statement}",
             f"positivity of f: {cert.positivity} (n!*k = {cert.threshold})",
             f"{cert.internal_nodes} splits, {cert.leaves} integral leaves, all >= {args.C}",
             "distinct nodes:"] + ["  " + s for s in _tree_lines(cert.tree)]
    return "pass", out, lines


def cmd_verify_main(args):
    p = _chain_params(args)
    if args.C is None and not args.skip_lspace:
        raise UsageError("--C is required unless --skip-lspace is given")
    report = theorem_main_verifier(p, args.C, skip_lspace=args.skip_lspace)
    status = "pass" if report.passed else "fail"
    out = {
        "params": {"n": p.n, "M": p.M, "mode": p.mode, "C": args.C,
                   "ell": list(p.ell) if p.ell else None},
        "items": {it.name: {"status": it.status, "detail": it.detail, "message": it.message}
                  for it in report.items},
    }
    lines = [f"n={p.n} M={p.M} mode={p.mode} C={args.C}", "", "CERTIFIED"]
    for it in report.items:
        lines.append(f"  [{it.status.upper():>11}] {it.name}" + (f": {it.message}" if it.message else ""))
        if it.name == "prong-table" and it.status == "pass":
            for k, row in enumerate(it.detail["core_prongs"]):
                lines.append(f"      k={k}: {row}")
        elif it.name == "homology" and it.status == "pass":
            lines.append(f"      |H_1| = {it.detail['h1_order']} (odd), >= {it.detail['ostrowski_bound']}")
        elif it.name == "inequivalence" and it.status == "pass":
            lines.append(f"      {it.detail['tuples_checked']} multiplicity tuple(s); "
                         f"maxima l_0 * {it.detail['base_maxima']}")
    return status, out, lines


def cmd_prongs(args):
    p = _chain_params(args)
    ks = [args.rotation] if args.rotation is not None else range(p.n)
    rows = {}
    lines = [f"ell = {list(p.representative_ell())}"]
    for k in ks:
        prof = fried_prongs(p, k)
        rows[str(k)] = [str(c) for c in prof.core_prongs]
        lines.append(f"k={k}: cores {list(prof.core_prongs)}  max {prof.maximum}")
    return "pass", {"ell": list(p.representative_ell()), "core_prongs": rows}, lines


def cmd_euler(args):
    ok = euler_prong_check(args.boundary or [], args.interior or [], args.genus)
    out = {"boundary": args.boundary or [], "interior": args.interior or [], "genus": args.genus,
           "holds": ok}
    return ("pass" if ok else "fail"), out, [f"Euler identity {'holds' if ok else 'fails'}"]


def cmd_knot(args):
    if not args.slopes or len(args.slopes) != 1:
        raise UsageError("--slopes takes exactly one p/q")
    if args.degeneracy is None:
        raise UsageError("--degeneracy is required")
    deg = parse_slope(args.degeneracy)
    dist = knot_surgery_check(args.genus, args.slopes[0], deg)
    return "pass", {"distance": dist}, [f"distance {dist} >= 3"]


def cmd_birkhoff(args):
    p = _chain_params(args)
    slopes = args.slopes or p.surgery_slopes()
    out = []
    lines = []
    for a in slopes:
        for row in birkhoff_sign_check(p, a):
            out.append({"slope": _frac(Fraction(a)), "component": row.component,
                        "fiber": str(row.fiber_pairing), "degeneracy": str(row.degeneracy_pairing)})
            lines.append(f"{_frac(Fraction(a))} i={row.component}: lam' {row.fiber_pairing}, d {row.degeneracy_pairing}")
    return "pass", {"rows": out}, lines


COMMANDS = {
    "homology": cmd_homology,
    "lspace-cert": cmd_lspace_cert,
    "verify-main": cmd_verify_main,
    "prongs": cmd_prongs,
    "euler": cmd_euler,
    "knot": cmd_knot,
    "birkhoff": cmd_birkhoff,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("-v", "--verbose", action="count", default=0)

    link = argparse.ArgumentParser(add_help=False)
    link.add_argument("--preset", help="built-in link: hopf or chain:<n>")
    link.add_argument("--link", help="path to a link description (YAML or JSON)")
    link.add_argument("--signs", type=_int_list, help="adjacent linking signs for a preset")
    link.add_argument("--slopes", type=_slope_list, help="comma-separated p/q list")

    chain = argparse.ArgumentParser(add_help=False)
    chain.add_argument("--n", type=int, required=True)
    chain.add_argument("--M", type=int, required=True)
    chain.add_argument("--mode", choices=("interval", "refined"), default="refined")
    chain.add_argument("--ell", type=_int_list, help="explicit multiplicities l_0..l_{n-1}")
    chain.add_argument("--interior", type=_int_list, help="interior singularity prong counts")
    chain.add_argument("--signs", type=_int_list, help="adjacent linking signs of the chain")

    parser = argparse.ArgumentParser(prog="surgery-cert",
                                     description="Exact checks for surgeries on fibered links.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("homology", parents=[common, link], help="homology order, parity and bounds")
    p = sub.add_parser("lspace-cert", parents=[common, link], help="L-space certificate tree")
    p.add_argument("--C", type=int)
    p.add_argument("--emit-tree", metavar="PATH", help="write the tree as JSON")
    p = sub.add_parser("verify-main", parents=[common, chain], help="check the n-flow construction")
    p.add_argument("--C", type=int)
    p.add_argument("--skip-lspace", action="store_true")
    p = sub.add_parser("prongs", parents=[common, chain], help="core prong counts per rotation")
    p.add_argument("--rotation", type=int)
    p = sub.add_parser("euler", parents=[common], help="Euler characteristic prong identity")
    p.add_argument("--boundary", type=_int_list)
    p.add_argument("--interior", type=_int_list)
    p.add_argument("--genus", type=int, default=1)
    p = sub.add_parser("knot", parents=[common], help="distance check for large knot surgeries")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--slopes", type=_slope_list)
    p.add_argument("--degeneracy", help="degeneracy slope a/b")
    p = sub.add_parser("birkhoff", parents=[common, chain], help="Birkhoff section sign table")
    p.add_argument("--slopes", type=_slope_list)
    return parser


def _assumptions(command):
    if command == "verify-main":
        return ASSUMPTIONS
    if command == "lspace-cert":
        return [a for a in ASSUMPTIONS if a[0] == "lspace-constant"]
    return []


def _emit(args, status, certified, lines, error=None):
    if args.format == "structured":
        doc = {
            "schema": REPORT_SCHEMA,
            "command": args.command,
            "status": status,
            "certified": certified,
            "assumed": [{"name": n, "statement": s} for n, s in _assumptions(args.command)],
            "meta": {"version": __version__},
        }
        if error:
            doc["error"] = error
        print(json.dumps(doc, indent=2, sort_keys=True))
        return
    for line in lines:
        print(line)
    if error:
        print(f"error: {error}", file=sys.stderr)
    if _assumptions(args.command):
        print("\nASSUMED (not machine-checked)")
        for name, text in _assumptions(args.command):
            print(f"  - {name}: {text}")
    print(f"\nstatus: {status.upper()}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        status, certified, lines = COMMANDS[args.command](args)
    except (UsageError, LinkFormatError, DimensionError, PreconditionError, OSError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CertificateError, ChainCertificateError, ArithmeticError) as exc:
        _emit(args, "fail", {}, [], error=str(exc))
        return EXIT_FAIL
    except ValueError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(args, status, certified, lines)
    return EXIT_OK if status == "pass" else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
