"""Command-line interface.

Subcommands: decide, check, valid, countermodel, analyze, extract,
verify, enumerate, random-system.  Exit codes: 0 valid/holds/verified,
1 falsifiable/fails/countermodel found, 2 usage or parse error,
3 resource limit, 4 internal invariant violation.

All output is deterministic given the arguments, input files, and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import alexandroff, quasimodel
from .config import Caps
from .errors import (CapExceeded, FragmentError, InvariantViolation,
                     ItlcError, ParseError, SchemaError)
from .formula import eliminate_exists, format_formula, in_diamond_fragment, parse
from .labels import subformula_closure
from .moments import enumerate_irreducibles

EXIT_OK = 0
EXIT_FOUND = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_INTERNAL = 4


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="itlc", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def add_caps(p):
        p.add_argument("--max-moments", type=int, default=50_000)
        p.add_argument("--max-valuations", type=int, default=2**20)
        p.add_argument("--max-systems", type=int, default=200_000)
        p.add_argument("--timeout", type=float, default=None)
        p.add_argument("--jobs", type=int, default=1)

    def add_format(p, choices=("text", "json", "dot")):
        p.add_argument("--format", choices=choices, default="text")

    p = sub.add_parser("decide", help="decide validity over dynamical systems")
    p.add_argument("formula")
    p.add_argument("--out", help="write the certificate JSON here")
    add_format(p)
    add_caps(p)

    p = sub.add_parser("check", help="evaluate a formula on a system file")
    p.add_argument("system")
    p.add_argument("formula")
    add_format(p, ("text", "json"))

    p = sub.add_parser("valid", help="check a formula under every open valuation")
    p.add_argument("system")
    p.add_argument("formula")
    add_caps(p)

    p = sub.add_parser("countermodel", help="search small systems falsifying a formula")
    p.add_argument("formula")
    p.add_argument("--max-points", type=int, default=3)
    add_format(p, ("text", "json"))
    add_caps(p)

    p = sub.add_parser("analyze", help="minimality, recurrence, connectedness")
    p.add_argument("system")
    add_format(p, ("text", "json"))

    p = sub.add_parser("extract", help="project a system file onto its quasimodel")
    p.add_argument("system")
    p.add_argument("formula")
    p.add_argument("--out")
    add_format(p, ("text", "json", "dot"))
    add_caps(p)

    p = sub.add_parser("verify", help="verify a falsification certificate")
    p.add_argument("certificate")
    p.add_argument("formula")

    p = sub.add_parser("enumerate", help="irreducible moment statistics")
    p.add_argument("--sigma", required=True, metavar="FORMULA")
    add_caps(p)

    p = sub.add_parser("random-system", help="emit a seeded random system")
    p.add_argument("points", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return top


def _caps(args) -> Caps:
    return Caps(max_moments=getattr(args, "max_moments", 50_000),
                max_valuations=getattr(args, "max_valuations", 2**20),
                max_systems=getattr(args, "max_systems", 200_000),
                timeout=getattr(args, "timeout", None),
                jobs=getattr(args, "jobs", 1))


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def _quasimodel_json(q: quasimodel.Quasimodel) -> dict:
    sigma = q.sigma
    profile = [] if q.profile is None else [i for i in range(len(sigma))
                                            if q.profile >> i & 1]
    return {
        "sigma": [format_formula(f) for f in sigma.formulas],
        "profile": profile,
        "worlds": [{"id": i, "moment": m.to_json()} for i, m in enumerate(q.worlds)],
        "order": [list(p) for p in q.order_pairs()],
        "s_edges": [list(p) for p in sorted(q.s_edges)],
        "falsified": [format_formula(f) for f in quasimodel.falsified_members(q)],
    }


def _quasimodel_dot(q: quasimodel.Quasimodel) -> str:
    lines = ["digraph quasimodel {", "  rankdir=LR;"]
    for i, m in enumerate(q.worlds):
        label = q.sigma.format_mask(m.label).replace('"', "'")
        lines.append(f'  n{i} [label="{i}: {label}"];')
    for a, b in sorted(q.s_edges):
        lines.append(f"  n{a} -> n{b};")
    for a, b in q.order_pairs():
        lines.append(f"  n{a} -> n{b} [style=dashed, arrowhead=empty];")
    lines.append("}")
    return "\n".join(lines)


def _cmd_decide(args) -> int:
    target = parse(args.formula)
    verdict = quasimodel.decide(target, _caps(args))
    if verdict.kind == "VALID":
        if args.format == "json":
            _emit(json.dumps({"verdict": "VALID", "complete": True}, indent=2))
        else:
            _emit("VALID")
        return EXIT_OK
    if verdict.kind == "FALSIFIABLE":
        cert = verdict.certificate
        if args.out:
            quasimodel.save_certificate(cert, args.out)
        if args.format == "json":
            _emit(cert.to_json_text())
        elif args.format == "dot":
            _emit(_quasimodel_dot(cert.quasimodel))
        else:
            q = cert.quasimodel
            _emit("FALSIFIABLE")
            _emit(f"witness world {cert.witness} with root label "
                  f"{q.sigma.format_mask(q.worlds[cert.witness].label)}")
            _emit(f"quasimodel: {len(q.worlds)} worlds, {len(q.s_edges)} edges")
        return EXIT_FOUND
    _emit("RESOURCE LIMIT")
    return EXIT_RESOURCE


def _cmd_check(args) -> int:
    X, valuation = alexandroff.load_system(args.system)
    if valuation is None:
        raise SchemaError("system file carries no valuation")
    f = parse(args.formula)
    try:
        truth = alexandroff.evaluate(X, valuation, f)
    except KeyError as err:
        raise SchemaError(f"valuation missing an atom: {err}") from None
    failing = [name for name in X.names if name not in truth]
    if args.format == "json":
        _emit(json.dumps({"holds": not failing, "failing": failing}, indent=2))
    elif failing:
        _emit("fails at: " + " ".join(failing))
    else:
        _emit("holds everywhere")
    return EXIT_OK if not failing else EXIT_FOUND


def _cmd_valid(args) -> int:
    X, _ = alexandroff.load_system(args.system)
    f = parse(args.formula)
    if alexandroff.is_valid_on_system(X, f, _caps(args)):
        _emit("valid on this system (all open valuations)")
        return EXIT_OK
    _emit("falsified by some open valuation")
    return EXIT_FOUND


def _cmd_countermodel(args) -> int:
    f = parse(args.formula)
    found = alexandroff.find_countermodel(f, args.max_points, _caps(args))
    if found is None:
        _emit(f"no countermodel with at most {args.max_points} points")
        return EXIT_OK
    payload = alexandroff.system_to_json(found.system, found.valuation)
    payload["falsified_at"] = found.point
    if args.format == "json":
        _emit(json.dumps(payload, indent=2))
    else:
        _emit(f"countermodel with {len(found.system)} points; "
              f"formula fails at {found.point}")
        _emit(json.dumps(payload, indent=2))
    return EXIT_FOUND


def _cmd_analyze(args) -> int:
    X, _ = alexandroff.load_system(args.system)
    result = alexandroff.analyze(X).as_dict()
    if args.format == "json":
        _emit(json.dumps(result, indent=2))
    else:
        for key, value in result.items():
            _emit(f"{key}: {str(value).lower()}")
    return EXIT_OK


def _cmd_extract(args) -> int:
    X, valuation = alexandroff.load_system(args.system)
    if valuation is None:
        raise SchemaError("system file carries no valuation")
    f = parse(args.formula)
    reduced = eliminate_exists(f)
    if not in_diamond_fragment(reduced):
        raise FragmentError("extraction needs a next/eventually/forall formula")
    sigma = subformula_closure(reduced)
    q = quasimodel.extract_quasimodel(X, valuation, sigma, _caps(args))
    payload = _quasimodel_json(q)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    if args.format == "dot":
        _emit(_quasimodel_dot(q))
    else:
        _emit(json.dumps(payload, indent=2))
    falsifies = any(not m.label >> sigma.index[reduced] & 1 for m in q.worlds)
    return EXIT_FOUND if falsifies else EXIT_OK


def _cmd_verify(args) -> int:
    with open(args.certificate, encoding="utf-8") as fh:
        data = json.load(fh)
    f = parse(args.formula)
    outcome = quasimodel.verify_certificate(data, f)
    if outcome:
        _emit("certificate verified")
        return EXIT_OK
    _emit(f"certificate INVALID: {outcome.reason}")
    return EXIT_FOUND


def _cmd_enumerate(args) -> int:
    f = parse(args.sigma)
    reduced = eliminate_exists(f)
    if not in_diamond_fragment(reduced):
        raise FragmentError("enumeration needs a next/eventually/forall formula")
    sigma = subformula_closure(reduced)
    store = enumerate_irreducibles(sigma, _caps(args))
    _emit(f"context: {len(sigma)} formulas, {len(sigma.type_masks())} types")
    for height in sorted(store.by_height):
        _emit(f"height {height}: {len(store.by_height[height])} irreducible moments")
    _emit(f"total: {len(store)} ({'complete' if store.complete else 'INCOMPLETE'})")
    return EXIT_OK if store.complete else EXIT_RESOURCE


def _cmd_random_system(args) -> int:
    X = alexandroff.random_system(args.points, args.seed)
    payload = alexandroff.system_to_json(X, {})
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    _emit(json.dumps(payload, indent=2))
    return EXIT_OK


_HANDLERS = {
    "decide": _cmd_decide,
    "check": _cmd_check,
    "valid": _cmd_valid,
    "countermodel": _cmd_countermodel,
    "analyze": _cmd_analyze,
    "extract": _cmd_extract,
    "verify": _cmd_verify,
    "enumerate": _cmd_enumerate,
    "random-system": _cmd_random_system,
}


def run(argv) -> int:
    """Dispatch a command line; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except (ParseError, SchemaError, FragmentError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as err:
        print(f"resource limit: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvariantViolation, ItlcError) as err:
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
