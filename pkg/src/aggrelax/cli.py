"""Command line driver: ``run``, ``sweep-dx`` and ``sweep-eps``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .errors import CFLViolation, InvalidParameter, SchemeFailure
from .harness import BOUNDARIES, SCHEMES, RunConfig, convergence_sweep, epsilon_sweep, format_summary, run
from .potentials import POTENTIALS

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _domain(text: str) -> tuple[float, float]:
    values = _floats(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"domain must be XMIN,XMAX, got {text!r}")
    return values[0], values[1]


def _run_flags(p: argparse.ArgumentParser, with_cells: bool = True):
    p.add_argument("--scheme", choices=SCHEMES, default="splitting")
    p.add_argument("--potential", choices=POTENTIALS, default="newtonian")
    p.add_argument("--epsilon", type=float, default=1e-7)
    if with_cells:
        p.add_argument("--cells", type=int, default=1500)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--cfl", type=float, default=0.9)
    p.add_argument("--tfinal", type=float, default=1.2)
    p.add_argument("--domain", type=_domain, default=(-1.0, 1.0), help="XMIN,XMAX")
    p.add_argument("--init", default="0.5@-0.5,0.5@0.5", help='"m1@x1,m2@x2,..." or tanh')
    p.add_argument("--boundary", choices=BOUNDARIES, default="zero")
    p.add_argument("--exact-boundary", choices=("tanh",), default=None, help="same as --boundary exact-tanh")
    p.add_argument("--fp-tol", type=float, default=RunConfig.fp_tol)
    p.add_argument("--fp-max-iter", type=int, default=RunConfig.fp_max_iter)
    p.add_argument("--jobs", type=int, default=1, help="parallel runs in sweeps")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aggrelax", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single run; --out is a directory for state and summary CSVs")
    _run_flags(p_run)
    p_run.add_argument("--snapshot-every", type=int, default=0, help="write a state CSV every K steps")

    p_dx = sub.add_parser("sweep-dx", help="W1 error against an oracle over several meshes")
    _run_flags(p_dx, with_cells=False)
    p_dx.add_argument("--cells", type=_ints, required=True, help="N1,N2,...")
    p_dx.add_argument("--oracle", choices=("auto", "exact", "self"), default="auto")
    p_dx.add_argument("--reference-cells", type=int, default=None)

    p_eps = sub.add_parser("sweep-eps", help="W1 distance to the limit scheme over several epsilons")
    _run_flags(p_eps)
    p_eps.add_argument("--epsilons", type=_floats, required=True, help="E1,E2,...")
    p_eps.add_argument("--limit-scheme", choices=("rusanov", "gv"), default=None)
    p_eps.add_argument("--reference", choices=("limit", "exact"), default="limit")
    return parser


def _config(args, n_cells: int) -> RunConfig:
    return RunConfig(
        scheme=args.scheme,
        potential=args.potential,
        epsilon=args.epsilon,
        c=args.c,
        cfl=args.cfl,
        n_cells=n_cells,
        x_min=args.domain[0],
        x_max=args.domain[1],
        t_final=args.tfinal,
        init=args.init,
        boundary="exact-tanh" if args.exact_boundary else args.boundary,
        fp_tol=args.fp_tol,
        fp_max_iter=args.fp_max_iter,
        snapshot_every=getattr(args, "snapshot_every", 0),
    )


def _emit(result, out):
    if out:
        result.write(out)
    else:
        format_summary(sys.stdout, result.rows, result.slope)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "run":
            report = run(replace(_config(args, args.cells), out=args.out))
            if not args.out:
                format_summary(sys.stdout, [report.summary_row()])
        elif args.command == "sweep-dx":
            base = _config(args, args.cells[0])
            base.validate()
            result = convergence_sweep(base, args.cells, args.oracle, args.reference_cells, args.jobs)
            if result.degenerate:
                print("degenerate sweep: fewer than two nonzero errors, slope undefined", file=sys.stderr)
            _emit(result, args.out)
        else:
            base = _config(args, args.cells)
            base.validate()
            result = epsilon_sweep(base, args.epsilons, args.limit_scheme, args.jobs, args.reference)
            _emit(result, args.out)
    except (CFLViolation, SchemeFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InvalidParameter as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
