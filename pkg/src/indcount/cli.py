"""Command-line entry point."""

from __future__ import annotations

import argparse
import sys
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .basecase import verify_psi_kappa
from .count import BranchTrace, approximate_independent_sets, default_threads
from .decompose import describe, extended_decomposition, standard_decomposition
from .errors import IndCountError, InputError, PreconditionError, SizeError
from .exact import brute_force_z
from .graph import WeightedGraph, parse_graph
from .potential import PrePotential, d2, load_builtin, parse_potential, validate

BUILTINS = ("general", "bipartite")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _with_source(path: str, parse):
    try:
        return parse(_read(path))
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def _load_potential(spec: str) -> PrePotential:
    if spec in BUILTINS:
        return load_builtin(spec)
    return _with_source(spec, parse_potential)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _epsilon(text: str) -> Fraction:
    eps = _fraction(text)
    if not 0 < eps < 1:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1)")
    return eps


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _non_negative(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def format_number(x: Fraction, digits: int | None) -> str:
    """Exact fraction text, or a decimal rounded half-even to ``digits`` places."""
    x = Fraction(x)
    if digits is None:
        return str(x)
    with localcontext() as ctx:
        ctx.prec = max(28, len(str(x.numerator)) + digits + 10)
        q = Decimal(x.numerator) / Decimal(x.denominator)
        return str(q.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN))


def _cmd_count(args) -> int:
    g = _with_source(args.graph, parse_graph)
    p = _load_potential(args.potential)
    trace = BranchTrace() if args.trace else None
    result = approximate_independent_sets(
        g,
        args.eps,
        p,
        trace=trace,
        base_exact_threshold=args.base_exact_threshold,
        saw_depth=args.saw_depth,
        threads=args.threads,
    )
    print(f"value: {format_number(result.value, args.decimal)}")
    print(f"eps: {result.epsilon}")
    print(f"exact: {'yes' if result.exact else 'no'}")
    if trace is not None:
        try:
            with open(args.trace, "w") as fp:
                trace.write(fp)
        except OSError as e:
            raise InputError(f"cannot write {args.trace}: {e.strerror}") from None
    return 0


def _cmd_exact(args) -> int:
    g = _with_source(args.graph, parse_graph)
    print(brute_force_z(WeightedGraph.unit(g), cap=args.exact_cap))
    return 0


def _cmd_validate(args) -> int:
    report = validate(_load_potential(args.potential))
    sys.stdout.write(str(report))
    return 0 if report.passed else 1


def _cmd_d2(args) -> int:
    if args.k < 2:
        raise InputError("k must be at least 2")
    print(d2(args.k))
    return 0


def _cmd_verify_psi(args) -> int:
    bad = verify_psi_kappa()
    if not bad:
        print("OK (no counterexample)")
        return 0
    for c in bad:
        print(f"n={list(c.children)} d={c.d} p={c.p} lhs={c.lhs} rhs={c.rhs}")
    return 1


def _cmd_analyze(args) -> int:
    g = _with_source(args.graph, parse_graph)
    dec = standard_decomposition(g, args.vertex)
    if len(dec.s_set) == 2:
        dec = extended_decomposition(g, args.vertex)
    sys.stdout.write(describe(dec))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="indcount", description="Approximately count independent sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="approximate the number of independent sets")
    c.add_argument("graph", help="graph file, or - for stdin")
    c.add_argument("--eps", type=_epsilon, required=True, help="relative error, e.g. 1/10 or 0.1")
    c.add_argument("--potential", default="general", help="general, bipartite, or a CSV path")
    c.add_argument("--decimal", type=_non_negative, metavar="DIGITS", help="print a rounded decimal")
    c.add_argument("--threads", type=_positive, default=None, help="worker processes (default $INDCOUNT_THREADS or 1)")
    c.add_argument("--base-exact-threshold", type=_non_negative, default=24)
    c.add_argument("--saw-depth", type=_positive, default=None, help="fixed walk-tree truncation depth")
    c.add_argument("--trace", metavar="PATH", help="write one record per recursive call")
    c.set_defaults(run=_cmd_count)

    e = sub.add_parser("exact", help="exact count by brute force")
    e.add_argument("graph")
    e.add_argument("--exact-cap", type=_positive, default=30, help="refuse graphs with more vertices")
    e.set_defaults(run=_cmd_exact)

    v = sub.add_parser("validate-potential", help="check a pre-potential and its branching factors")
    v.add_argument("potential", help="general, bipartite, or a CSV path")
    v.set_defaults(run=_cmd_validate)

    d = sub.add_parser("d2", help="guaranteed 2-degree for average degree above k")
    d.add_argument("k", type=_fraction)
    d.set_defaults(run=_cmd_d2)

    s = sub.add_parser("verify-psi", help="exhaustive check of the walk-tree weights")
    s.set_defaults(run=_cmd_verify_psi)

    a = sub.add_parser("analyze", help="print the decomposition around a vertex")
    a.add_argument("graph")
    a.add_argument("vertex", type=int)
    a.set_defaults(run=_cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if getattr(args, "threads", 1) is None:
            args.threads = default_threads()
        return args.run(args)
    except (InputError, PreconditionError, SizeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except IndCountError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
