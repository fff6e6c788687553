"""Command-line front end.

Exit codes: 0 for success or a true verdict, 1 for a semantic negative
(distributions differ, no dominance, a failed obligation), 2 for bad input.
Exact values are written as strings; ``PROBEQ_PRECISION`` only changes how
many digits the decimal renderings carry.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import generators
from .certificates import (
    DistributionsDiffer,
    certificate_from_json,
    certificate_summary,
    certificate_to_json,
    certify_equivalence,
    verify_certificate,
)
from .coupling import comonotone_couple, skorokhod_represent
from .regret import RegretFunction, RegretFunctional, prefer, regret_lottery
from .rv import (
    Distribution,
    Dominance,
    SimpleRV,
    as_outcome,
    distribution,
    first_mismatch,
    fosd_compare_distributions,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2
DEFAULT_DIGITS = 20


class InputError(Exception):
    """Unreadable or malformed input; reported with exit status 2."""


def precision() -> int:
    raw = os.environ.get("PROBEQ_PRECISION")
    if raw is None:
        return DEFAULT_DIGITS
    try:
        digits = int(raw)
    except ValueError:
        raise InputError(f"PROBEQ_PRECISION must be a positive integer, got {raw!r}") from None
    if digits < 1:
        raise InputError(f"PROBEQ_PRECISION must be a positive integer, got {raw!r}")
    return digits


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"parse error in {path}: {exc.msg} at line {exc.lineno} column {exc.colno}") from None


def _parse(path: str, kind: str, loader):
    data = _read_json(path)
    try:
        return loader(data)
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        raise InputError(f"invalid {kind} in {path}: {exc}") from None


def load_rv(path: str) -> SimpleRV:
    return _parse(path, "random variable", SimpleRV.from_json)


def load_distribution(path: str) -> Distribution:
    """A distribution file, or a random-variable file reduced to its distribution."""

    def loader(data):
        if isinstance(data, dict) and "cells" in data:
            return distribution(SimpleRV.from_json(data))
        return Distribution.from_json(data)

    return _parse(path, "distribution", loader)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _write_json(path: str, obj) -> None:
    try:
        Path(path).write_text(json.dumps(obj, indent=2) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}") from None


# -- subcommands --------------------------------------------------------------

def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    x, y = generators.GENERATORS[args.kind](rng)
    if args.out_x:
        _write_json(args.out_x, x.to_json())
    if args.out_y:
        _write_json(args.out_y, y.to_json())
    if not (args.out_x or args.out_y):
        _emit({"x": x.to_json(), "y": y.to_json()})
    return EXIT_OK


def cmd_eq_dist(args) -> int:
    f, g = load_distribution(args.x), load_distribution(args.y)
    mismatch = first_mismatch(f, g)
    out: dict = {"equal": mismatch is None}
    if mismatch is not None:
        v, px, py = mismatch
        out["first_mismatch"] = {"outcome": str(v), "mass_x": str(px), "mass_y": str(py)}
    _emit(out)
    return EXIT_OK if mismatch is None else EXIT_NEGATIVE


def cmd_fosd(args) -> int:
    f, g = load_distribution(args.x), load_distribution(args.y)
    dom = fosd_compare_distributions(f, g)
    _emit({"dominance": "NOT_COMPARABLE" if dom is Dominance.INCOMPARABLE else dom.value})
    # x dominates y (weakly) when it is strictly better or identical in law
    return EXIT_OK if dom in (Dominance.STRICT_DOM, Dominance.EQUAL) else EXIT_NEGATIVE


def cmd_certify(args) -> int:
    x, y = load_rv(args.x), load_rv(args.y)
    if args.k_min is not None and args.k_min < 1:
        raise InputError("--k-min must be at least 1")
    if args.k_min is not None and args.k_max is not None and args.k_max < args.k_min:
        raise InputError("--k-max must not be below --k-min")
    try:
        cert = certify_equivalence(x, y, args.k_min, args.k_max)
    except DistributionsDiffer as exc:
        _emit({"error": "DISTRIBUTIONS_DIFFER", "outcome": str(exc.outcome),
               "mass_x": str(exc.mass_x), "mass_y": str(exc.mass_y)})
        return EXIT_NEGATIVE
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.out:
        _write_json(args.out, certificate_to_json(cert))
    _emit(certificate_summary(cert))
    return EXIT_OK


def _verify_one(triple: tuple[str, str, str]) -> dict:
    cert_path, x_path, y_path = triple
    try:
        cert = _parse(cert_path, "certificate", certificate_from_json)
        x, y = load_rv(x_path), load_rv(y_path)
    except InputError as exc:
        return {"certificate": cert_path, "input_error": str(exc)}
    report = verify_certificate(cert, x, y)
    return {"certificate": cert_path, "ok": report.ok, "report": report.to_json(), "text": report.to_text()}


def cmd_verify(args) -> int:
    paths = args.files
    if len(paths) % 3:
        raise InputError("verify takes CERT X Y triples")
    triples = [tuple(paths[i:i + 3]) for i in range(0, len(paths), 3)]
    if args.jobs > 1 and len(triples) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_one, triples))
    else:
        results = [_verify_one(t) for t in triples]
    errors = [r for r in results if "input_error" in r]
    for r in errors:
        print(f"error: {r['input_error']}", file=sys.stderr)
    if args.format == "text":
        for r in results:
            if "text" in r:
                print(f"== {r['certificate']}")
                print(r["text"])
    else:
        _emit([{k: v for k, v in r.items() if k != "text"} for r in results])
    if errors:
        return EXIT_INPUT
    return EXIT_OK if all(r["ok"] for r in results) else EXIT_NEGATIVE


def cmd_regret(args) -> int:
    psi = _parse(args.psi, "regret function", RegretFunction.from_json)
    v = _parse(args.functional, "functional", RegretFunctional.from_json)
    x, y = load_rv(args.x), load_rv(args.y)
    try:
        tol = as_outcome(args.tol)
    except (ValueError, TypeError):
        raise InputError(f"--tol must be a number, got {args.tol!r}") from None
    try:
        result = prefer(psi, v, x, y, tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = result.to_json(precision())
    out["lottery"] = regret_lottery(psi, x, y).to_json()
    _emit(out)
    return EXIT_OK


def cmd_couple(args) -> int:
    f, g = load_distribution(args.x), load_distribution(args.y)
    _emit(comonotone_couple(f, g).to_json())
    return EXIT_OK


def cmd_skorokhod(args) -> int:
    def load_seq(data):
        items = data["sequence"] if isinstance(data, dict) else data
        return [Distribution.from_json(d) for d in items]

    seq = _parse(args.sequence, "distribution sequence", load_seq)
    target = load_distribution(args.target)
    try:
        eps = [as_outcome(e) for e in args.eps.split(",")]
    except (ValueError, TypeError):
        raise InputError(f"--eps must be a comma-separated list of rationals, got {args.eps!r}") from None
    if any(e <= 0 for e in eps):
        raise InputError("--eps values must be positive")
    try:
        rows = skorokhod_represent(seq, target, eps, start=args.start)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    digits = precision()
    _emit([row.to_json(digits) for row in rows])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="probeq", description="Exact probabilistic-equivalence toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a seeded random pair of random variables")
    p.add_argument("--kind", choices=sorted(generators.GENERATORS), default="case2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-x")
    p.add_argument("--out-y")
    p.set_defaults(func=cmd_gen)

    for name, func, text in (("eq-dist", cmd_eq_dist, "are X and Y equal in distribution"),
                             ("fosd", cmd_fosd, "does X first-order dominate Y"),
                             ("couple", cmd_couple, "comonotone coupling of two distributions")):
        p = sub.add_parser(name, help=text)
        p.add_argument("x")
        p.add_argument("y")
        p.set_defaults(func=func)

    p = sub.add_parser("certify", help="build an equivalence certificate")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="check certificates against their random variables")
    p.add_argument("files", nargs="+", metavar="CERT X Y")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("regret", help="evaluate the regret preference of X over Y")
    p.add_argument("psi")
    p.add_argument("functional")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--tol", default="1e-9")
    p.set_defaults(func=cmd_regret)

    p = sub.add_parser("skorokhod", help="quantile representation table for a converging sequence")
    p.add_argument("sequence")
    p.add_argument("target")
    p.add_argument("--eps", default="1/8")
    p.add_argument("--start", type=int, default=1)
    p.set_defaults(func=cmd_skorokhod)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; keep --help at 0
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
