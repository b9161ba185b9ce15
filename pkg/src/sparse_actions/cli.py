"""Command-line front door.

One binary, six subcommands: ``gen`` writes a synthetic dataset (with its
ground truth embedded so later stages can audit against it), ``fit`` runs
the greedy recovery, ``diagnose`` evaluates the recovery events on a
generated file, ``sweep`` drives the Monte Carlo grid, ``oracle-check``
compares the greedy support against exhaustive search, and ``lowerbound``
runs the impossibility-side experiments.

Every command that consumes randomness takes ``--seed``; when omitted a
seed is drawn and printed, so any run can be reproduced after the fact.
Exit codes: 0 on success, 1 on a domain error (bad parameters, malformed
files, failed check), 2 on an I/O failure.  The parsed ``argparse``
namespace is the command object; ``run_command`` dispatches on it.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import secrets
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .bomp import StoppingRule, run_bomp
from .diagnostics import check_thm1_events, min_eigen_blockwise
from .envgen import Instance, InstanceSpec, SamplingPolicy, coverage_counts, min_coverage, sample_dataset, sample_instance
from .experiments import SweepGrid, sweep, write_results
from .lower_bounds import (
    BestArmInstance,
    TwoPointInstance,
    fano_error_lower_bound,
    pinsker_tv_bound,
    run_best_arm_trials,
    run_coverage_trials,
    support_packing,
    two_point_coverage_kl,
)
from .model import Dataset, build_block_design
from .oracle import exhaustive_support_search
from .seeding import mix_seed

PRESETS = ("phase", "sparsity", "noise")


def _ensure_seed(args: argparse.Namespace) -> int:
    """Resolve the run seed, drawing one when absent; always print it."""
    if args.seed is None:
        args.seed = secrets.randbits(63)
    print(f"seed={args.seed}")
    return args.seed


def _write_json(path, doc: dict | list) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _write_row_csv(path, columns: tuple[str, ...], row: dict) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)


def _load_dataset(path) -> tuple[dict, Dataset]:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return doc, Dataset.from_dict(doc)


def _cmd_gen(args: argparse.Namespace) -> int:
    seed = _ensure_seed(args)
    spec = InstanceSpec(
        m=args.m,
        d=args.d,
        k=args.k,
        b=args.b,
        noise_sigma=args.sigma,
        seed=mix_seed(seed, 1),
    )
    inst = sample_instance(spec)
    policy = SamplingPolicy.round_robin() if args.policy == "round-robin" else SamplingPolicy.uniform()
    data, eps = sample_dataset(inst, policy, args.t, seed=mix_seed(seed, 2), return_noise=True)
    doc = data.to_dict()
    doc["instance"] = inst.to_dict()
    if spec.noise_sigma > 0:
        doc["eps"] = [float(e) for e in eps]
    _write_json(args.out, doc)
    n_min = min_coverage(coverage_counts(data), inst.s_star)
    print(f"dataset: t={data.t} m={data.m} active={list(inst.s_star)} min_active_coverage={n_min} -> {args.out}")
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    _, data = _load_dataset(args.data)
    result = run_bomp(data, StoppingRule.fixed(args.k), allow_rank_deficient=args.allow_thin)
    _write_json(args.out, result.to_dict())
    print(f"support={list(result.support)} residual_norm={result.residual_norms[-1]:.6g}")
    return 0


def _cmd_diagnose(args: argparse.Namespace) -> int:
    doc, data = _load_dataset(args.data)
    if "instance" not in doc:
        raise ValueError(f"{args.data}: no embedded instance; diagnose needs a file written by gen")
    inst = Instance.from_dict(doc["instance"])
    eps = np.asarray(doc.get("eps", [0.0] * data.t), dtype=float)
    if eps.shape != (data.t,):
        raise ValueError(f"{args.data}: eps has length {eps.size}, expected t={data.t}")
    design = build_block_design(data)
    lam = min_eigen_blockwise(design, inst.s_star)
    if lam <= 0:
        raise ValueError("active-block gram is singular; events are undefined on this draw")
    report = check_thm1_events(inst, data, eps, alpha=lam / data.t)
    if args.out:
        _write_json(args.out, report.to_dict())
    print(
        f"mu={report.mu:.6g} lambda_min={report.lambda_min:.6g} alpha={report.alpha:.6g} "
        f"n_min={report.n_min_on_support} event_gram={report.event_gram} event_noise={report.event_noise}"
    )
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.preset is not None:
        text = resources.files("sparse_actions").joinpath(f"presets/{args.preset}.json").read_text()
        source = f"preset {args.preset}"
    else:
        text = Path(args.config).read_text()
        source = args.config
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError(f"{source}: expected a JSON object")
    if args.seed is not None:
        doc["seed"] = args.seed
    elif "seed" not in doc:
        doc["seed"] = secrets.randbits(63)
    print(f"seed={doc['seed']}")
    grid = SweepGrid.from_dict(doc)
    rows = sweep(grid)
    fmt = args.format or ("json" if Path(args.out).suffix == ".json" else "csv")
    write_results(rows, args.out, fmt)
    print(f"sweep: {len(rows)} cells x {grid.trials} trials -> {args.out}")
    return 0


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    seed = _ensure_seed(args)
    if args.k > args.m:
        raise ValueError(f"k={args.k} exceeds m={args.m}")
    if args.t // args.m < args.d:
        raise ValueError(
            f"t={args.t} gives some action fewer than d={args.d} rows under round-robin; "
            f"need t >= {args.m * args.d}"
        )
    agree = 0
    unique = 0
    for i in range(args.trials):
        spec = InstanceSpec(
            m=args.m, d=args.d, k=args.k, b=args.b, noise_sigma=args.sigma, seed=mix_seed(seed, i, 1)
        )
        inst = sample_instance(spec)
        data = sample_dataset(inst, SamplingPolicy.round_robin(), args.t, seed=mix_seed(seed, i, 2))
        greedy = run_bomp(data, StoppingRule.fixed(args.k))
        oracle = exhaustive_support_search(data, args.k)
        unique += oracle.unique
        agree += greedy.support.as_set() == oracle.best_support.as_set()
    print(f"agree={agree}/{args.trials} unique={unique}/{args.trials}")
    if agree != args.trials:
        print("greedy selection disagreed with exhaustive search", file=sys.stderr)
        return 1
    return 0


def _cmd_lb_best_arm(args: argparse.Namespace) -> int:
    seed = _ensure_seed(args)
    inst = BestArmInstance(m=args.m, delta=args.delta, j_star=args.jstar)
    est = run_best_arm_trials(inst, args.t, args.trials, seed)
    print(f"error_prob={est.error_prob:.4f} ci={est.ci_halfwidth:.4f} t={args.t} m={args.m} delta={args.delta:g}")
    if args.out:
        _write_row_csv(
            args.out,
            ("m", "delta", "j_star", "t", "trials", "error_prob", "ci"),
            {
                "m": args.m,
                "delta": args.delta,
                "j_star": args.jstar,
                "t": args.t,
                "trials": args.trials,
                "error_prob": est.error_prob,
                "ci": est.ci_halfwidth,
            },
        )
    return 0


def _cmd_lb_coverage(args: argparse.Namespace) -> int:
    seed = _ensure_seed(args)
    inst = TwoPointInstance.axis_aligned(args.d, args.b, args.n)
    est = run_coverage_trials(inst, args.trials, seed)
    kl = two_point_coverage_kl(args.n, args.b)
    floor = 1.0 - pinsker_tv_bound(kl)
    print(f"error_sum={est.test_error_sum:.4f} ci={est.ci_halfwidth:.4f} kl={kl:.6g} floor={floor:.4f}")
    if args.out:
        _write_row_csv(
            args.out,
            ("d", "b", "n", "trials", "error_sum", "ci", "kl", "floor"),
            {
                "d": args.d,
                "b": args.b,
                "n": args.n,
                "trials": args.trials,
                "error_sum": est.test_error_sum,
                "ci": est.ci_halfwidth,
                "kl": kl,
                "floor": floor,
            },
        )
    return 0


def _cmd_lb_fano(args: argparse.Namespace) -> int:
    seed = _ensure_seed(args)
    family = support_packing(args.m, args.k, seed)
    log_packing = math.log(len(family))
    if log_packing <= 0:
        raise ValueError(f"packing of size {len(family)} carries no information; try larger m")
    floor = fano_error_lower_bound(args.t, args.b, log_packing)
    print(f"packing_size={len(family)} log_packing={log_packing:.4f} error_floor={floor:.4f}")
    if args.out:
        _write_row_csv(
            args.out,
            ("m", "k", "b", "t", "packing_size", "log_packing", "error_floor"),
            {
                "m": args.m,
                "k": args.k,
                "b": args.b,
                "t": args.t,
                "packing_size": len(family),
                "log_packing": log_packing,
                "error_floor": floor,
            },
        )
    return 0


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-actions",
        description="Generate, fit, diagnose, and stress-test block-sparse reward models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic dataset with its ground truth embedded")
    p.add_argument("--m", type=_positive_int, required=True, help="number of actions")
    p.add_argument("--d", type=_positive_int, required=True, help="state dimension")
    p.add_argument("--k", type=_positive_int, required=True, help="number of active actions")
    p.add_argument("--t", type=_positive_int, required=True, help="number of logged samples")
    p.add_argument("--sigma", type=float, default=0.0, help="reward noise std dev (default 0)")
    p.add_argument("--b", type=float, default=1.0, help="active row norm (default 1)")
    p.add_argument("--policy", choices=("uniform", "round-robin"), default="uniform")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("fit", help="greedy block recovery on a dataset file")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=_positive_int, required=True, help="number of blocks to select")
    p.add_argument("--allow-thin", action="store_true", help="keep min-norm rows for rank-deficient blocks")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("diagnose", help="evaluate the recovery events on a generated dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="optional JSON report path")
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("sweep", help="run a Monte Carlo grid from a config file or preset")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON file mirroring the grid fields")
    src.add_argument("--preset", choices=PRESETS, help="named built-in grid")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--format", choices=("csv", "json"), help="default: by --out extension")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("oracle-check", help="compare greedy supports against exhaustive search")
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--m", type=_positive_int, default=8)
    p.add_argument("--d", type=_positive_int, default=2)
    p.add_argument("--k", type=_positive_int, default=2)
    p.add_argument("--t", type=_positive_int, default=32, help="round-robin length; needs t >= m*d")
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_oracle_check)

    p = sub.add_parser("lowerbound", help="impossibility-side Monte Carlo and formulas")
    lb = p.add_subparsers(dest="family", required=True)

    q = lb.add_parser("best-arm", help="error rate of empirical-mean argmax vs pull budget")
    q.add_argument("--m", type=_positive_int, required=True)
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--jstar", type=int, default=0)
    q.add_argument("--t", type=_positive_int, required=True)
    q.add_argument("--trials", type=_positive_int, default=2000)
    q.add_argument("--seed", type=int)
    q.add_argument("--out", help="optional single-row CSV")
    q.set_defaults(func=_cmd_lb_best_arm)

    q = lb.add_parser("coverage", help="summed LRT errors on the two-point detection pair")
    q.add_argument("--n", type=_positive_int, required=True, help="pulls of the probed action")
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--d", type=_positive_int, default=3)
    q.add_argument("--trials", type=_positive_int, default=5000)
    q.add_argument("--seed", type=int)
    q.add_argument("--out", help="optional single-row CSV")
    q.set_defaults(func=_cmd_lb_coverage)

    q = lb.add_parser("fano", help="packing-based identification error floor")
    q.add_argument("--m", type=_positive_int, required=True)
    q.add_argument("--k", type=_positive_int, required=True)
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--t", type=_positive_int, required=True)
    q.add_argument("--seed", type=int)
    q.add_argument("--out", help="optional single-row CSV")
    q.set_defaults(func=_cmd_lb_fano)

    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def run_command(args: argparse.Namespace) -> int:
    return args.func(args)


def main(argv: list[str] | None = None) -> int:
    try:
        return run_command(parse_args(argv))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
