"""Command-line interface.

Exit codes for ``analyze``: 0 separable, 1 entangled, 2 unknown.
``decompose`` exits 2 when the requested condition fails.  Any other
error exits 3 with a message on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench, criteria, decomp, io, states
from .bloch import generator_basis, to_bloch

EXIT_SEPARABLE, EXIT_ENTANGLED, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3
_OVERALL_EXIT = {criteria.SEPARABLE: EXIT_SEPARABLE, criteria.ENTANGLED: EXIT_ENTANGLED}


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the "unknown" exit code 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _text_report(rep: criteria.CriterionReport) -> str:
    lines = [
        f"state {rep.dims[0]}x{rep.dims[1]}: {rep.overall}",
        f"  |r| = {rep.norm_r:.10g}  |s| = {rep.norm_s:.10g}  ||T||_KF = {rep.kf_T:.10g}",
    ]
    for r in rep.results:
        lines.append(
            f"  {r.name:<10} {r.verdict:<12} statistic={r.statistic:.10g} "
            f"threshold={r.threshold:.10g} margin={r.margin:+.3e}"
        )
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    rho = io.load_state(args.input, tol=args.tol)
    rep = criteria.analyze(rho)
    payload = rep.to_dict()
    payload["tolerances"]["file"] = args.tol if args.tol is not None else io.default_tol()
    if args.format == "json":
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        _emit(_text_report(rep), args.out)
    return _OVERALL_EXIT.get(rep.overall, EXIT_UNKNOWN)


def cmd_decompose(args) -> int:
    rho = io.load_state(args.input, tol=args.tol)
    b = to_bloch(rho)
    try:
        d = decomp.decompose(b, args.method)
    except decomp.ConditionNotSatisfied as exc:
        print(f"decompose: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    d.residual = decomp.verify(rho, d)
    _emit(d.to_json(indent=2), args.out)
    print(f"source={d.source} terms={len(d)} residual={d.residual:.3e}", file=sys.stderr)
    return 0


def _family_state(args):
    name = args.name
    if name == "werner":
        return states.werner(_need(args, "D"), _need(args, "phi"))
    if name == "isotropic":
        return states.isotropic(_need(args, "D"), _need(args, "p"))
    if name == "bennett":
        return states.bennett_tiles()
    if name == "example2":
        return states.example2(_need(args, "p"), args.sign)
    if name == "bell-diagonal":
        if args.q is None:
            raise CLIError("bell-diagonal needs --q q1 q2 q3 q4")
        return states.bell_diagonal(args.q)
    raise CLIError(f"unknown family {name!r}")


def _need(args, attr):
    val = getattr(args, attr)
    if val is None:
        raise CLIError(f"family {args.name} needs --{attr}")
    return val


def cmd_family(args) -> int:
    _emit(io.dump_state(_family_state(args)), args.out)
    return 0


def cmd_basis(args) -> int:
    _emit(json.dumps(io.basis_to_dict(generator_basis(args.N, args.ordering))), args.out)
    return 0


def cmd_bench(args) -> int:
    rep = bench.run_bench(
        args.M, args.N, args.samples, seed=args.seed, measure=args.measure,
        workers=args.workers, max_tries=args.max_tries,
    )
    _emit(json.dumps(rep.to_dict(), indent=2), args.out)
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="blochsep", description="Bloch-representation separability criteria.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="run every criterion on a state file")
    a.add_argument("input")
    a.add_argument("--format", choices=("json", "text"), default="json")
    a.add_argument("--tol", type=float, default=None, help="state validation tolerance")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("decompose", help="product-state decomposition of a state file")
    d.add_argument("input")
    d.add_argument("--method", choices=("auto", "prop3", "theorem2", "remark2"), default="auto")
    d.add_argument("--tol", type=float, default=None)
    d.add_argument("--out")
    d.set_defaults(func=cmd_decompose)

    f = sub.add_parser("family", help="write a named example state")
    f.add_argument("name", choices=("werner", "isotropic", "bennett", "example2", "bell-diagonal"))
    f.add_argument("--D", type=int)
    f.add_argument("--phi", type=float)
    f.add_argument("--p", type=float)
    f.add_argument("--sign", choices=("+", "-"), default="+")
    f.add_argument("--q", type=float, nargs=4)
    f.add_argument("--out")
    f.set_defaults(func=cmd_family)

    b = sub.add_parser("basis", help="dump SU(N) generators as JSON")
    b.add_argument("--N", type=int, required=True)
    b.add_argument("--ordering", choices=("canonical", "gellmann3"), default="canonical")
    b.add_argument("--out")
    b.set_defaults(func=cmd_basis)

    m = sub.add_parser("bench", help="theorem1 vs CCNR on random PPT states")
    m.add_argument("--M", type=int, default=3)
    m.add_argument("--N", type=int, default=3)
    m.add_argument("--samples", type=int, default=1000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--measure", choices=states.MEASURES, default="bloch-rejection")
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--max-tries", type=int, default=100_000)
    m.add_argument("--out")
    m.add_argument("--csv", help="also write the per-criterion CSV here")
    m.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, ValueError, OSError, RuntimeError) as exc:
        print(f"blochsep {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
