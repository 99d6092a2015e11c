"""Command-line front end: ``tropsym COMMAND [flags]``.

Results go to stdout as JSON (or plain text / dot where requested).  Errors
are written to stderr as ``{"error": {...}}``; the exit status is 1 for
domain errors and 2 for malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io
from .chipfiring import divisor_class, q_reduced, rank
from .core import (
    ChainOfLoopsSpec,
    TropsymError,
    canonical_divisor,
    chain_of_loops,
    genus,
    is_generic_chain,
    validate_strictly_semistable,
)
from .maps import DeJonquieresQuery, abel_jacobi, dejonquieres_search
from .sympow import enumerate_cells, euler_characteristic, f_vector, to_dot, validate_complex

EXIT_DOMAIN = 1
EXIT_INPUT = 2


class InputError(Exception):
    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path


def _rational(s: str):
    try:
        return io.parse_rational(s)
    except io.SchemaError as exc:
        raise argparse.ArgumentTypeError(exc.message) from None


def _rationals(s: str):
    return tuple(_rational(x.strip()) for x in s.split(",") if x.strip())


def _ints(s: str):
    try:
        return tuple(int(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a comma-separated list of integers") from None


def _load_model(spec):
    try:
        return io.load_model(spec)
    except KeyError as exc:
        raise InputError(exc.args[0], "--model") from None
    except OSError as exc:
        raise InputError(f"cannot read {spec}: {exc.strerror}", "--model") from None


def _load_divisor(path, host, *, allow_class=False):
    if path in ("K", "canonical"):
        return canonical_divisor(host)
    try:
        data = io.load_json(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", "--divisor") from None
    if allow_class:
        return io.class_from_json(data, host)
    return io.divisor_from_json(data, host)


def _emit(obj) -> str:
    return io.dumps(obj)


# -- commands
def cmd_sympow(args):
    G = _load_model(args.model)
    c = enumerate_cells(G, args.d)
    if args.format == "fvector":
        return " ".join(map(str, f_vector(c))) + "\n"
    if args.format == "dot":
        return to_dot(c)
    return _emit(io.complex_to_json(c))


def cmd_fvector(args):
    c = enumerate_cells(_load_model(args.model), args.d)
    return _emit({"d": c.d, "f_vector": f_vector(c), "euler_characteristic": euler_characteristic(c)})


def cmd_validate(args):
    G = _load_model(args.model)
    report = {"model": validate_strictly_semistable(G)}
    if args.d is not None:
        report["complex"] = validate_complex(enumerate_cells(G, args.d))
    report["valid"] = not any(report[k] for k in ("model", "complex") if k in report)
    return _emit(report), (0 if report["valid"] else EXIT_DOMAIN)


def cmd_rank(args):
    G = _load_model(args.model)
    D = _load_divisor(args.divisor, G)
    return _emit({"degree": D.degree, "rank": rank(D)})


def cmd_rrcheck(args):
    G = _load_model(args.model)
    D = _load_divisor(args.divisor, G).to_root()
    K = canonical_divisor(D.host)
    g = genus(D.host)
    r, rk = rank(D), rank(K - D)
    return _emit({"degree": D.degree, "genus": g, "rank": r, "rank_K_minus_D": rk,
                  "defect": r - rk - (D.degree - g + 1)})


def cmd_reduce(args):
    G = _load_model(args.model)
    D = _load_divisor(args.divisor, G)
    base = args.base or G.base_vertex
    return _emit({"base": {"vertex": base}, "divisor": io.divisor_to_json(q_reduced(D, base))})


def cmd_abeljacobi(args):
    G = _load_model(args.model)
    D = _load_divisor(args.divisor, G)
    return _emit(io.class_to_json(abel_jacobi(D, args.base)))


def _chain_spec(args):
    return ChainOfLoopsSpec(args.l, args.m, args.bridges)


def cmd_chain(args):
    return _emit(io.model_to_json(chain_of_loops(_chain_spec(args))))


def cmd_generic(args):
    spec = _chain_spec(args)
    return _emit({"genus": spec.genus, "generic": is_generic_chain(spec)})


def cmd_dejonquieres(args):
    G = _load_model(args.model)
    target = _load_divisor(args.cls, G, allow_class=True)
    if args.base is not None:
        target = divisor_class(target, args.base)
    query = DeJonquieresQuery(G, target, args.shape, args.resolution)
    found = dejonquieres_search(query, workers=args.workers)
    return _emit([io.divisor_to_json(D) for D in found])


# -- parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropsym", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help, model=True):
        sp = sub.add_parser(name, help=help)
        if model:
            sp.add_argument("--model", required=True,
                            help="model JSON path, or fixture:NAME (" + ", ".join(io.FIXTURES) + ")")
        sp.set_defaults(func=func)
        return sp

    divisor_help = "divisor JSON path, or K for the canonical divisor"

    sp = add("sympow", cmd_sympow, "build the d-th symmetric power")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--format", choices=("json", "fvector", "dot"), default="json")

    sp = add("fvector", cmd_fvector, "f-vector and Euler characteristic")
    sp.add_argument("--d", type=int, required=True)

    sp = add("validate", cmd_validate, "check a model and, with --d, its symmetric power")
    sp.add_argument("--d", type=int)

    for name, func, help in (("rank", cmd_rank, "Baker-Norine rank"),
                             ("rrcheck", cmd_rrcheck, "Riemann-Roch defect of a divisor")):
        sp = add(name, func, help)
        sp.add_argument("--divisor", required=True, help=divisor_help)

    for name, func, help in (("reduce", cmd_reduce, "reduced divisor at a base vertex"),
                             ("abeljacobi", cmd_abeljacobi, "class of an effective divisor")):
        sp = add(name, func, help)
        sp.add_argument("--divisor", required=True, help=divisor_help)
        sp.add_argument("--base", metavar="VERTEX")

    for name, func, help in (("chain", cmd_chain, "emit a chain-of-loops model"),
                             ("generic", cmd_generic, "genericity test for a chain of loops")):
        sp = add(name, func, help, model=False)
        sp.add_argument("--l", type=_rationals, required=True, help="comma-separated loop lengths")
        sp.add_argument("--m", type=_rationals, required=True, help="comma-separated loop lengths")
        sp.add_argument("--bridges", type=_rationals, help="comma-separated bridge lengths")

    sp = add("dejonquieres", cmd_dejonquieres, "grid search for divisors of a given shape in a class")
    sp.add_argument("--class", dest="cls", required=True,
                    help="class or divisor JSON path, or K for the canonical class")
    sp.add_argument("--shape", type=_ints, required=True, help="comma-separated multiplicities")
    sp.add_argument("--resolution", type=_rational, required=True)
    sp.add_argument("--base", metavar="VERTEX")
    sp.add_argument("--workers", type=int, help="processes (default: TROPSYM_THREADS or 1)")
    return p


def _error(kind, message, path=None) -> str:
    err = {"type": kind, "message": message}
    if path:
        err["path"] = path
    return json.dumps({"error": err}) + "\n"


def run(argv=None) -> tuple[int, str, str]:
    """Run one command; return (exit code, stdout, stderr)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    try:
        out = args.func(args)
    except io.SchemaError as exc:
        return EXIT_INPUT, "", _error("SchemaError", exc.message, exc.path)
    except InputError as exc:
        return EXIT_INPUT, "", _error("InputError", str(exc), exc.path)
    except TropsymError as exc:
        return EXIT_DOMAIN, "", _error(type(exc).__name__, str(exc))
    code = 0
    if isinstance(out, tuple):
        out, code = out
    return code, out, ""


def main(argv=None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
