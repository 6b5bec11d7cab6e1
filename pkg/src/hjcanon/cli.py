"""Command line interface: analyze, integrate, quantize, vary.

Exit codes: 0 success, 1 analysis error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import HjcError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hjcanon",
        description="Canonical analysis of constrained Lagrangians with "
                    "commuting and anticommuting variables.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="run the full canonical analysis")
    p_an.add_argument("file")
    p_an.add_argument("--report", choices=["json", "text"], default="text")
    p_an.add_argument("--out", default=None, help="write the report to a file")

    p_int = sub.add_parser("integrate", help="integrate the closed system")
    p_int.add_argument("file")
    p_int.add_argument("--tau-max", type=float, required=True)
    p_int.add_argument("--steps", type=int, required=True)
    p_int.add_argument("--e-curve", default="const:1.0",
                       help="curve for an even parameter named 'e' (const:R)")
    p_int.add_argument("--chi-curve", default="zero",
                       help="curve for an odd parameter named 'chi' (const:R or zero)")
    p_int.add_argument("--odd-units", type=int, default=None)
    p_int.add_argument("--seed", type=int, default=0,
                       help="seeds the random initial momenta")

    p_q = sub.add_parser("quantize", help="matrix realization checks")
    p_q.add_argument("file")
    p_q.add_argument("--p", default="1,0,0,0",
                     help="four lower-index momentum components")
    p_q.add_argument("--mass", type=float, default=1.0)

    p_v = sub.add_parser("vary", help="first-order variation of the lagrangian")
    p_v.add_argument("file")
    p_v.add_argument("--transformation", required=True)
    return parser


def _parse_curve(spec: str, odd: bool):
    from .numerics import Curve

    if odd and spec == "zero":
        return Curve(0.0)
    if spec.startswith("const:"):
        return Curve(float(spec.split(":", 1)[1]))
    raise HjcError(f"unsupported curve spec {spec!r}")


def _cmd_analyze(args) -> int:
    from .pipeline import analyze_file
    from .report import emit_report

    analysis = analyze_file(args.file)
    payload = emit_report(analysis, args.report)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return 0


def _cmd_integrate(args, parser) -> int:
    import random

    from .numerics import (constraint_drift, default_initial_state, integrate,
                           make_setup, trajectory_csv)
    from .pipeline import analyze_file

    if args.steps < 1:
        parser.error("--steps must be at least 1")
    if args.tau_max <= 0:
        parser.error("--tau-max must be positive")
    analysis = analyze_file(args.file)
    curves = {"e": _parse_curve(args.e_curve, odd=False),
              "chi": _parse_curve(args.chi_curve, odd=True)}
    setup = make_setup(analysis.tdes, analysis.ledger, n_units=args.odd_units,
                       curves=curves)
    rng = random.Random(args.seed)
    even_values = {}
    for e in analysis.table.entries:
        if e.solvable and e.coordinate.parity == 0:
            even_values[e.momentum.name] = rng.uniform(-1.0, 1.0)
    initial = default_initial_state(setup, even_values=even_values)
    states = integrate(setup, initial, args.tau_max, args.steps)
    sys.stdout.write(trajectory_csv(setup, states, analysis.constraints()))
    return 0


def _cmd_quantize(args) -> int:
    from .dsl import parse_model
    from .quantize import build_representation, check_anticommutators, physical_states

    with open(args.file, "r", encoding="utf-8") as fh:
        model = parse_model(fh.read())
    rep = build_representation(model.metric)
    report = check_anticommutators(rep)
    p = tuple(float(x) for x in args.p.split(","))
    states = physical_states(rep, p, args.mass)
    out = []
    out.append("anticommutator deviations (tolerance 1e-12)")
    for name, dev in report.deviations.items():
        out.append(f"  {name}: {dev:.3e}")
    out.append(f"  max: {report.max_deviation:.3e} "
               f"({'pass' if report.passed() else 'FAIL'})")
    out.append(f"p = ({', '.join('%.17g' % x for x in p)}), mass = %.17g" % args.mass)
    out.append(f"mass shell: {'yes' if states.mass_shell else 'no'} "
               f"(residual {states.mass_shell_residual:.3e})")
    out.append(f"physical state space dimension: {states.null_dimension}")
    sys.stdout.write("\n".join(out) + "\n")
    return 0


def _cmd_vary(args) -> int:
    from .dsl import parse_model, parse_transformation
    from .printer import expr_str
    from .symmetry import is_total_derivative, vary_lagrangian

    with open(args.file, "r", encoding="utf-8") as fh:
        model = parse_model(fh.read())
    with open(args.transformation, "r", encoding="utf-8") as fh:
        tr = parse_transformation(fh.read(), model)
    delta = vary_lagrangian(model, tr)
    report = is_total_derivative(delta, model, tr)
    out = [f"transformation {tr.name}",
           f"delta L = {expr_str(delta)}",
           f"total derivative: {'yes' if report.is_total_derivative else 'no'}"]
    for g, residual in report.residuals.items():
        out.append(f"  residual[{g.name}] = {expr_str(residual)}")
    sys.stdout.write("\n".join(out) + "\n")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "integrate":
            return _cmd_integrate(args, parser)
        if args.command == "quantize":
            return _cmd_quantize(args)
        if args.command == "vary":
            return _cmd_vary(args)
        parser.error(f"unknown command {args.command!r}")
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    except HjcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
