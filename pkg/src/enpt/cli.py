"""Command-line interface.

Three subcommands, each emitting CSV (stdout or --out) and, on request,
a PNG figure next to the output file:

* ``sweep``   -- error-vs-strength curves for the chosen methods/orders
* ``levels``  -- dense-diagonalization level diagram of the box
* ``bench``   -- per-order cost of the iteration vs literal nested-sum BWPT

Exit codes: 0 success, 1 configuration error, 2 every row failed.
State labels on the command line follow each system's own convention
(oscillator from 0, box from 1); they are mapped onto array slots
internally.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import sweep as sweep_mod
from .errors import EnptError


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def _comma_ints(text):
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise _CliError(f"expected a comma-separated integer list, got {text!r}") from exc


def _comma_strs(text):
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def build_parser():
    parser = _Parser(
        prog="enpt",
        description="Perturbation-theory sweeps, level diagrams, and cost benchmarks "
        "on two exactly solvable model systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, system_default="oscillator"):
        sp.add_argument("--system", choices=["oscillator", "box"], default=system_default)
        sp.add_argument("--lambda-min", type=float, default=None)
        sp.add_argument("--lambda-max", type=float, default=None)
        sp.add_argument("--lambda-steps", type=int, default=None,
                        help="number of grid points, endpoints included")
        sp.add_argument("--n-basis", type=int, default=None)
        sp.add_argument("--out", type=str, default=None, help="CSV output path")
        sp.add_argument("--plot", action="store_true",
                        help="also render a PNG next to --out")
        sp.add_argument("--seedless", action="store_true",
                        help="reserved; all runs are deterministic")

    sp = sub.add_parser("sweep", help="error-vs-strength sweep")
    common(sp)
    sp.add_argument("--partition", choices=["en", "standard"], default="en")
    sp.add_argument("--methods", type=str, default="iterative",
                    help=f"comma list from {','.join(sweep_mod.METHODS)}")
    sp.add_argument("--orders", type=str, default="2,4,6",
                    help="comma list of orders / iterate indices (>= 2)")
    sp.add_argument("--target-state", type=int, default=None,
                    help="state label in the system's own convention")
    sp.add_argument("--model-space", type=str, default=None,
                    help="comma list of state labels diagonalized exactly")
    sp.add_argument("--ratio-threshold", type=float, default=10.0,
                    help="gap/coupling ratio for automatic model-space selection")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--k-max", type=int, default=200)

    sp = sub.add_parser("levels", help="box level diagram (dense diagonalization)")
    common(sp, system_default="box")
    sp.add_argument("--levels", type=int, default=4, help="number of lowest states")

    sp = sub.add_parser("bench", help="per-order cost benchmark")
    common(sp)
    sp.add_argument("--k-max", type=int, default=16)
    sp.add_argument("--bw-orders", type=str, default="2,3,4",
                    help="orders for the literal nested-sum BWPT timing (2..5; "
                    "order 5 costs O(n_basis^4))")
    sp.add_argument("--repeats", type=int, default=5)
    return parser


def _lambda_grid(args, system):
    if args.lambda_min is None and args.lambda_max is None and args.lambda_steps is None:
        return sweep_mod.default_lambda_grid(system)
    defaults = {"oscillator": (0.0, 5.0, 51), "box": (-10.0, 50.0, 121)}[system]
    lo = defaults[0] if args.lambda_min is None else args.lambda_min
    hi = defaults[1] if args.lambda_max is None else args.lambda_max
    steps = defaults[2] if args.lambda_steps is None else args.lambda_steps
    if steps < 1:
        raise _CliError(f"--lambda-steps must be positive, got {steps}")
    if steps == 1:
        return (lo,)
    if hi < lo:
        raise _CliError("--lambda-max below --lambda-min")
    return tuple(np.linspace(lo, hi, steps))


def _emit(write_rows, rows, args, plot_fn):
    if args.out:
        out = Path(args.out)
        with out.open("w", encoding="utf-8", newline="") as fh:
            write_rows(rows, fh)
        print(f"wrote {len(rows)} rows to {out}")
        if args.plot:
            fig = out.with_suffix(".png")
            plot_fn(rows, fig)
            print(f"wrote figure to {fig}")
    else:
        if args.plot:
            raise _CliError("--plot requires --out")
        write_rows(rows, sys.stdout)


def _cmd_sweep(args):
    system = args.system
    offset = sweep_mod.first_state_label(system)
    n_basis = args.n_basis or sweep_mod.default_n_basis(system)
    target_label = offset if args.target_state is None else args.target_state
    target = target_label - offset
    if target < 0:
        raise _CliError(
            f"target state {target_label} below the first {system} label ({offset})"
        )
    model_space = None
    if args.model_space is not None:
        labels = _comma_ints(args.model_space)
        model_space = tuple(i - offset for i in labels)
        if any(i < 0 for i in model_space):
            raise _CliError(f"model-space labels {labels} below the first label")
    cfg = sweep_mod.SweepConfig(
        system=system,
        partition=args.partition,
        methods=_comma_strs(args.methods),
        orders=_comma_ints(args.orders),
        lambdas=_lambda_grid(args, system),
        n_basis=n_basis,
        target=target,
        model_space=model_space,
        ratio_threshold=args.ratio_threshold,
        tol=args.tol,
        k_max=args.k_max,
    )
    try:
        rows = sweep_mod.run_sweep(cfg)
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    from .plotting import plot_sweep  # deferred: pulls in matplotlib

    _emit(sweep_mod.write_sweep_csv, rows, args, plot_sweep)
    if rows and all(r.error for r in rows):
        print("every row failed; see the error column", file=sys.stderr)
        return 2
    return 0


def _cmd_levels(args):
    if args.system != "box":
        raise _CliError("levels is defined for the box system only")
    n_basis = args.n_basis or sweep_mod.default_n_basis("box")
    lambdas = _lambda_grid(args, "box")
    try:
        rows = sweep_mod.run_levels(lambdas, n_levels=args.levels, n_basis=n_basis)
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    except EnptError as exc:
        print(f"level computation failed: {exc}", file=sys.stderr)
        return 2
    from .plotting import plot_levels

    _emit(sweep_mod.write_levels_csv, rows, args, plot_levels)
    return 0


def _cmd_bench(args):
    print("benchmark: sequential single-threaded execution, "
          "monotonic clock, warmup excluded", file=sys.stderr)
    n_basis = args.n_basis or 200
    bw_orders = _comma_ints(args.bw_orders)
    if any(o < 2 or o > 5 for o in bw_orders):
        raise _CliError(f"--bw-orders must lie in 2..5, got {bw_orders}")
    try:
        rows = bench_mod.benchmark_order_scaling(
            n_basis=n_basis,
            k_max=args.k_max,
            bw_orders=bw_orders,
            repeats=args.repeats,
        )
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    except EnptError as exc:
        print(f"benchmark failed: {exc}", file=sys.stderr)
        return 2
    from .plotting import plot_bench

    _emit(bench_mod.write_bench_csv, rows, args, plot_bench)
    return 0


_COMMANDS = {"sweep": _cmd_sweep, "levels": _cmd_levels, "bench": _cmd_bench}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main():
    sys.exit(main())
