"""linkform command line.

Exit codes: 0 success, 1 parse/validation error, 2 not a rational homology
sphere, 3 realization search exhausted, 4 internal inconsistency.
"""
from __future__ import annotations

import argparse
import json
import sys

from .invariants import NoCandidate, ResourceBound, decompose, invariant_table
from .pairing import (Asymmetric, Degenerate, DenominatorMismatch, InvalidGenerator,
                      blocksum_pairing, parse_blocksum, validate_pairing)
from .realize import (Exhausted, NotInCatalog, SearchConfig, known_realization,
                      realize_generator, search_realization, verify_realization)
from .seifert import (FormulaInapplicable, InvalidFiber, LinkingPairing,
                      NotRationalHomologySphere, ParseError, homology_snf,
                      linking_pairing, parse_presentation,
                      torsion_homology_formula, validate_presentation)

EXIT_OK, EXIT_INPUT, EXIT_NOT_QHS, EXIT_EXHAUSTED, EXIT_INTERNAL = range(5)


def parse_pairing(text: str) -> LinkingPairing:
    """Pairing JSON (``{"orders": ..., "matrix": ...}``) or a block sum."""
    if text.lstrip().startswith("{"):
        try:
            lam = LinkingPairing.from_json(text)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad pairing JSON ({exc})", 0, text) from exc
    else:
        lam = blocksum_pairing(parse_blocksum(text))
    return validate_pairing(lam)


def _pairing_arg(args, name="pairing"):
    text = getattr(args, name.replace("-", "_"))
    if text is None:
        raise ParseError(f"--{name} is required", 0)
    return parse_pairing(text)


def _source_pairing(args) -> LinkingPairing:
    if args.pairing is not None:
        return _pairing_arg(args)
    if args.seifert is not None:
        return linking_pairing(parse_presentation(args.seifert), 2, oracle=args.oracle)
    raise ParseError("one of --pairing or --seifert is required", 0)


def cmd_homology(args):
    P = parse_presentation(args.seifert)
    inv = validate_presentation(P, require_qhs=False)
    tors, free = homology_snf(P)
    report = {"presentation": str(P), "A": inv.A, "C": inv.C, "AeC": inv.AeC,
              "torsion": list(tors.orders), "free_rank": free,
              "rational_homology_sphere": inv.is_qhs}
    if not inv.is_qhs:
        return report, EXIT_NOT_QHS
    p = args.prime
    report["prime"] = p
    report["p_part_snf"] = list(tors.p_part(p).orders)
    try:
        report["p_part_formula"] = list(torsion_homology_formula(P, p).orders)
    except FormulaInapplicable:
        report["p_part_formula"] = None
    return report, EXIT_OK


def cmd_linkmat(args):
    P = parse_presentation(args.seifert)
    lam = linking_pairing(P, args.prime, oracle=args.oracle)
    path = "formula" if "fibers" in lam.meta else "plumbing"
    return {"prime": args.prime, "path": path, **lam.to_json()}, EXIT_OK


def cmd_invariants(args):
    return invariant_table(_source_pairing(args), args.workers), EXIT_OK


def cmd_iso(args):
    a, b = _pairing_arg(args, "pairing-a"), _pairing_arg(args, "pairing-b")
    Ta, Tb = invariant_table(a, args.workers), invariant_table(b, args.workers)
    return {"isomorphic": Ta == Tb, "table_a": Ta.to_json(), "table_b": Tb.to_json()}, EXIT_OK


def cmd_decompose(args):
    lam = _source_pairing(args)
    B = decompose(lam)
    return {"blocks": str(B), "table": invariant_table(lam).to_json()}, EXIT_OK


def cmd_realize(args):
    lam = _pairing_arg(args)
    B = decompose(lam)
    if len(B.blocks) == 1:
        try:
            P = realize_generator(B.blocks[0])
            return {"blocks": str(B), "presentation": str(P), "source": "catalog"}, EXIT_OK
        except NotInCatalog:
            pass
    P = known_realization(lam)
    if P is not None:
        return {"blocks": str(B), "presentation": str(P), "source": "pattern"}, EXIT_OK
    P = search_realization(lam, SearchConfig(args.max_fibers, args.bump, args.workers))
    return {"blocks": str(B), "presentation": str(P), "source": "search"}, EXIT_OK


def cmd_verify(args):
    P = parse_presentation(args.seifert)
    v = verify_realization(P, _pairing_arg(args), oracle=args.oracle)
    return v.to_json(), EXIT_OK


COMMANDS = {"homology": cmd_homology, "linkmat": cmd_linkmat,
            "invariants": cmd_invariants, "iso": cmd_iso, "decompose": cmd_decompose,
            "realize": cmd_realize, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linkform", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--seifert", help='presentation "e; a1/b1, a2/b2, ..." or its JSON form')
    ap.add_argument("--pairing", help='block sum like "E0(3)+A(5,2)" or pairing JSON')
    ap.add_argument("--pairing-a")
    ap.add_argument("--pairing-b")
    ap.add_argument("--prime", type=int, default=2)
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--max-fibers", type=int, default=4)
    ap.add_argument("--bump", type=int, default=2)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--oracle", action="store_true",
                    help="use the plumbing oracle instead of the block formula")
    return ap


def _text(command, report) -> str:
    if command == "invariants":
        return report.format_text()
    if command == "linkmat":
        rows = ["  [" + ", ".join(r) + "]" for r in report["matrix"]]
        return f"orders {report['orders']} ({report['path']})\n" + "\n".join(rows)
    return "\n".join(f"{k}: {v}" for k, v in report.items())


def run(argv=None, out=sys.stdout, err=sys.stderr) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = COMMANDS[args.command](args)
    except ParseError as exc:
        print(json.dumps({"error": str(exc), "position": exc.pos}), file=err)
        return EXIT_INPUT
    except (InvalidFiber, InvalidGenerator, Asymmetric, DenominatorMismatch,
            Degenerate, ValueError) as exc:
        if isinstance(exc, NotRationalHomologySphere):
            print(json.dumps({"error": str(exc)}), file=err)
            return EXIT_NOT_QHS
        print(json.dumps({"error": str(exc)}), file=err)
        return EXIT_INPUT
    except Exhausted as exc:
        print(json.dumps({"error": str(exc), "tried": exc.tried}), file=err)
        return EXIT_EXHAUSTED
    except (NoCandidate, ResourceBound) as exc:
        print(json.dumps({"error": str(exc)}), file=err)
        return EXIT_INTERNAL
    if args.format == "text":
        print(_text(args.command, report), file=out)
    else:
        payload = report.to_json() if hasattr(report, "to_json") else report
        print(json.dumps(payload), file=out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
