"""Command-line entry point.

Exit codes: 0 success, 2 configuration / domain error, 3 resource error.
"""
import argparse
import contextlib
import json
import sys

from . import tables
from .bounds import sample_size_bounds
from .covariance import asymptotic_gap, exact_delta_omega
from .errors import DomainError, ResourceError
from .experiments import (
    CONTOUR_COLUMNS,
    PHASE_COLUMNS,
    ExperimentConfig,
    emit_contour,
    emit_phase_diagram,
    run_recovery_curve,
    trial_columns,
)
from .magnetization import magnetization_law
from .model import ModelParams, Partition
from .recovery import Method, diamond_distance, recover
from .covariance import empirical_gamma
from .sampler import random_balanced_partition, sample_configurations


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _range(text):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from exc
    return lo, hi


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _model_args(sub, need_p=True):
    sub.add_argument("--alpha", type=float, required=True)
    sub.add_argument("--beta", type=float, required=True)
    if need_p:
        sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="ising-blockmodel", description="Ising blockmodel toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("sample", help="draw exact samples for a planted partition")
    _model_args(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--partition", default=None, help="0/1 membership string (default: random from seed)")

    s = subs.add_parser("law", help="exact law of the block magnetizations")
    _model_args(s)

    s = subs.add_parser("gap", help="within/cross covariance and their gap")
    _model_args(s)
    s.add_argument("--mode", choices=["exact", "asymptotic"], default="exact")

    s = subs.add_parser("contour", help="free energy on an open grid of (-1, 1)^2")
    _model_args(s, need_p=False)
    s.add_argument("--grid", type=int, default=101)

    s = subs.add_parser("phase-diagram", help="region labels on an (alpha, beta) grid")
    s.add_argument("--alpha-range", type=_range, default=(-4.0, 4.0))
    s.add_argument("--beta-range", type=_range, default=(0.0, 4.0))
    s.add_argument("--step", type=float, default=0.25)
    s.add_argument("--out", default=None)

    s = subs.add_parser("recover", help="recover the partition from a sample file")
    s.add_argument("--input", required=True)
    s.add_argument("--method", default="SDP", type=str.upper, choices=[m.value for m in Method])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--max-iters", type=int, default=2000)
    s.add_argument("--out", default=None)

    s = subs.add_parser("recovery-curve", help="Monte Carlo success rates over (p, n)")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--p", type=_int_list, required=True, help="comma-separated list")
    s.add_argument("--n", type=_int_list, default=[], help="comma-separated list")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--method", default="SDP", type=str.upper, choices=[m.value for m in Method])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--max-iters", type=int, default=2000)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--population", action="store_true", help="use the exact population matrix (n = infinity)")
    s.add_argument("--timing", action="store_true", help="add a wall_seconds column (not reproducible)")
    s.add_argument("--out", default=None)

    s = subs.add_parser("bounds", help="sample-complexity bounds at the exact gap")
    _model_args(s)
    s.add_argument("--gamma", type=float, default=0.5)
    s.add_argument("--delta", type=float, default=0.05)
    s.add_argument("--c-ab", type=float, default=None)
    s.add_argument("--n", type=float, default=None, help="sample size for the deviation radius")
    return parser


def cmd_sample(args):
    params = ModelParams(args.alpha, args.beta, args.p)
    if args.partition is None:
        part = random_balanced_partition(args.p, args.seed)
    else:
        part = Partition.from_string(args.partition)
        if part.p != args.p:
            raise DomainError(f"partition has {part.p} sites, expected {args.p}")
    batch = sample_configurations(params, part, args.n, args.seed)
    with _output(args.out) as fh:
        tables.write_samples(fh, batch)


def cmd_law(args):
    params = ModelParams(args.alpha, args.beta, args.p)
    law = magnetization_law(params)
    with _output(args.out) as fh:
        tables.write_table(fh, tables.LAW_COLUMNS, tables.law_rows(law), header={**params.to_dict(), "log_Z": law.log_Z})


def cmd_gap(args):
    params = ModelParams(args.alpha, args.beta, args.p)
    summary = exact_delta_omega(params) if args.mode == "exact" else asymptotic_gap(params)
    with _output(args.out) as fh:
        fh.write(summary.to_json() + "\n")


def cmd_contour(args):
    # p does not enter the free energy; any valid even p will do
    params = ModelParams(args.alpha, args.beta, 2)
    rows = emit_contour(params, args.grid)
    with _output(args.out) as fh:
        tables.write_table(fh, CONTOUR_COLUMNS, rows, header={"alpha": args.alpha, "beta": args.beta, "grid": args.grid})


def cmd_phase_diagram(args):
    rows = emit_phase_diagram(args.alpha_range, args.beta_range, args.step)
    header = {"alpha_range": list(args.alpha_range), "beta_range": list(args.beta_range), "step": args.step}
    with _output(args.out) as fh:
        tables.write_table(fh, PHASE_COLUMNS, rows, header=header)


def cmd_recover(args):
    with open(args.input) as fh:
        configs, header = tables.read_samples(fh)
    emp = empirical_gamma(configs)
    kwargs = {"tol": args.tol, "max_iters": args.max_iters, "seed": args.seed} if args.method == "SDP" else {}
    result = recover(args.method, emp.gamma_hat, sigma_hat=emp.sigma_hat, **kwargs)
    if header and "partition" in header:
        result.diamond = diamond_distance(result.labels, Partition.from_string(header["partition"]))
    with _output(args.out) as fh:
        fh.write(result.to_json() + "\n")


def cmd_recovery_curve(args):
    config = ExperimentConfig(
        alpha=args.alpha,
        beta=args.beta,
        p_list=args.p,
        n_list=args.n,
        trials=args.trials,
        method=args.method,
        master_seed=args.seed,
        output_path=args.out,
        population=args.population,
        tol=args.tol,
        max_iters=args.max_iters,
        workers=args.workers,
        timing=args.timing,
    )
    rows = run_recovery_curve(config)
    with _output(args.out) as fh:
        tables.write_table(fh, trial_columns(config), [r.as_dict() for r in rows], header=config.header())


def cmd_bounds(args):
    params = ModelParams(args.alpha, args.beta, args.p)
    report = sample_size_bounds(params, gamma=args.gamma, delta=args.delta, c_ab=args.c_ab, n=args.n)
    with _output(args.out) as fh:
        fh.write(report.to_json() + "\n")


COMMANDS = {
    "sample": cmd_sample,
    "law": cmd_law,
    "gap": cmd_gap,
    "contour": cmd_contour,
    "phase-diagram": cmd_phase_diagram,
    "recover": cmd_recover,
    "recovery-curve": cmd_recovery_curve,
    "bounds": cmd_bounds,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
