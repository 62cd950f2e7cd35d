"""Command line interface.

Subcommands ``type``, ``dual``, ``enumerate``, ``verify`` and ``random``.
Every subcommand prints one canonical JSON document on stdout (sorted keys,
integers inside matrices and type vectors as decimal strings, trailing
newline); diagnostics go to stderr.

Exit codes: 0 success, 1 an identity failed, 2 invalid input, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import complex_torus as ct
from . import fourier_mukai as fm
from . import polarization as pol
from .errors import (
    BoundTooLarge,
    ConventionMismatch,
    IllConditioned,
    PolarDualError,
    RankMismatch,
    ValidationError,
)
from .exact_core import IntMatrix, random_unimodular
from .moduli_types import orbit_report, validate_type

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"


def _strs(values) -> list[str]:
    return [str(x) for x in values]


def form_record(P: pol.PolarizationForm) -> dict:
    return {
        "g": P.g,
        "E": [_strs(r) for r in P.E.tolist()],
        "type": _strs(pol.type_of(P)),
    }


def _read_json(path: str) -> dict:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON input: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("input must be a JSON object")
    return data


def _entry(x) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise InputError(f"matrix entries must be integers or decimal strings, got {x!r}")
    try:
        return int(x)
    except ValueError as exc:
        raise InputError(f"bad integer {x!r}") from exc


def parse_form(data: dict) -> pol.PolarizationForm:
    if "E" not in data:
        raise InputError("input has no 'E' field")
    E = data["E"]
    if not isinstance(E, list) or not all(isinstance(r, list) for r in E):
        raise InputError("'E' must be a list of rows")
    P = pol.PolarizationForm(IntMatrix([[_entry(x) for x in r] for r in E]))
    if "g" in data and str(data["g"]) != str(P.g):
        raise InputError(f"g={data['g']} does not match a {2 * P.g}x{2 * P.g} form")
    return P


def parse_type(text: str):
    try:
        entries = [int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad type vector {text!r}") from exc
    return validate_type(entries)


def cmd_type(args) -> tuple[int, Any]:
    P = parse_form(_read_json(args.input))
    return EXIT_OK, _strs(pol.type_of(P))


DUAL_MODES = {
    "D": pol.dual_d_form,
    "delta": pol.dual_delta_form,
    "linebundle": pol.line_bundle_dual_form,
}


def cmd_dual(args) -> tuple[int, Any]:
    P = parse_form(_read_json(args.input))
    return EXIT_OK, form_record(DUAL_MODES[args.mode](P))


def cmd_enumerate(args) -> tuple[int, Any]:
    if args.g < 1 or args.max_dg < 1:
        raise InputError("--g and --max-dg must be positive")
    report = orbit_report(args.g, args.max_dg, cap=args.cap)
    out = report.to_json(fixed_only=args.fixed_only)
    if not (args.orbits or args.fixed_only):
        del out["orbits"]
    out["fixed_fraction"] = report.fixed_fraction
    return EXIT_OK, out


def _torus_suite(data: dict, P: pol.PolarizationForm, seed: int, tol: float) -> dict:
    if "pi_re" in data:
        T = ct.PolarizedTorus.from_json(data)
        chart = "input"
        transport = True
    else:
        # verify on the symplectic chart; the basis change itself is exact
        U, t = pol.frobenius_basis(P)
        transport = U.T @ P.E @ U == pol.standard_form(t).E
        T = ct.random_siegel(t, seed)
        chart = "frobenius"
    rep = ct.dual_polarization_verify(T, tol)
    out = rep.to_json()
    out["chart"] = chart
    out["checks"]["chart_transport"] = transport
    out["passed"] = out["passed"] and transport
    return out


def cmd_verify(args) -> tuple[int, Any]:
    data = _read_json(args.input)
    P = parse_form(data)
    suites = ["duality", "torus", "fm"] if args.suite == "all" else [args.suite]
    result: dict[str, Any] = {"type": _strs(pol.type_of(P)), "suites": {}}
    for name in suites:
        try:
            if name == "duality":
                out = pol.verify_duality(P).to_json()
            elif name == "torus":
                out = _torus_suite(data, P, args.seed, args.tol)
            else:
                out = fm.verify_fm_identities(P).to_json(pol.type_of(P))
        except (ConventionMismatch, RankMismatch, IllConditioned) as exc:
            out = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
        result["suites"][name] = out
    result["passed"] = all(s["passed"] for s in result["suites"].values())
    return (EXIT_OK if result["passed"] else EXIT_FAIL), result


def cmd_random(args) -> tuple[int, Any]:
    t = parse_type(args.type)
    if args.kind == "lattice":
        U = random_unimodular(2 * t.g, args.seed)
        return EXIT_OK, form_record(pol.standard_form(t).conjugate(U))
    out = ct.random_siegel(t, args.seed).to_json()
    out["type"] = _strs(t)
    return EXIT_OK, out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polardual",
        description="Dual polarizations of abelian varieties on lattices and cohomology.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_input(p):
        p.add_argument("-i", "--input", default="-", help="JSON file, or - for stdin")
        return p

    p = with_input(sub.add_parser("type", help="type of a polarization"))
    p.set_defaults(func=cmd_type)

    p = with_input(sub.add_parser("dual", help="dual polarization form"))
    p.add_argument("--mode", choices=sorted(DUAL_MODES), default="delta")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("enumerate", help="list types and their duality orbits")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--max-dg", type=int, required=True)
    p.add_argument("--orbits", action="store_true")
    p.add_argument("--fixed-only", action="store_true")
    p.add_argument("--cap", type=int, default=10**6)
    p.set_defaults(func=cmd_enumerate)

    p = with_input(sub.add_parser("verify", help="check duality identities"))
    p.add_argument("--suite", choices=["duality", "torus", "fm", "all"], default="all")
    for name in ("duality", "torus", "fm", "all"):
        p.add_argument(f"--{name}", dest="suite", action="store_const", const=name,
                       help=f"shorthand for --suite {name}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=ct.DEFAULT_TOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("random", help="seeded random lattice or torus")
    p.add_argument("--type", required=True, help="comma separated, e.g. 1,2,4")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=["lattice", "torus"], default="lattice")
    p.set_defaults(func=cmd_random)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, payload = args.func(args)
    except (InputError, ValidationError) as exc:
        print(f"polardual: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BoundTooLarge as exc:
        print(f"polardual: {exc}", file=sys.stderr)
        return EXIT_CAP
    except PolarDualError as exc:
        print(f"polardual: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(canonical_json(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
