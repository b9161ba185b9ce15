"""Monte Carlo harness: seeded recovery trials, grid sweeps, result tables.

A trial draws a fresh ground truth and log from a single 64-bit seed, runs
the greedy fit, and scores it (exact recovery, Hamming distance, parameter
error, plug-in regret, recovery-event booleans).  A sweep fans trials out
over a parameter grid and aggregates per-cell rates with normal 95%
intervals.  Everything downstream of a seed is deterministic, so a rerun
of any grid reproduces its output tables byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path

import numpy as np

from .bomp import StoppingRule, run_bomp
from .decision import DecisionModel, param_error, suboptimality_gap
from .diagnostics import check_thm1_events, min_eigen_blockwise
from .envgen import (
    InstanceSpec,
    SamplingPolicy,
    coverage_counts,
    min_coverage,
    sample_dataset,
    sample_instance,
)
from .model import build_block_design
from .seeding import mix_seed, rng_for

# fresh evaluation states drawn per trial for the plug-in regret estimate
EVAL_STATES = 100

# recomputing a residual from scratch can wobble its norm by a few ulps, so
# the monotonicity probe allows this much relative slack and no more
_MONOTONE_RTOL = 1e-12

RESULT_COLUMNS = (
    "m",
    "d",
    "k",
    "t",
    "noise_sigma",
    "b",
    "trials",
    "recovery_rate",
    "mean_hamming",
    "mean_param_err",
    "mean_gap",
    "ci_halfwidth",
    "seed",
)

_AXES = ("m", "d", "k", "t", "noise_sigma", "b")


def coverage_schedule(support, m: int, t: int, n_min: int, seed: int) -> tuple[int, ...]:
    """Length-``t`` action log giving each action in ``support`` at least ``n_min`` rows.

    The remaining pulls are uniform over all ``m`` actions and the whole
    log is shuffled, so the result looks like an interleaved exploration
    trace rather than a sorted block scan.
    """
    pinned = [int(j) for j in support for _ in range(n_min)]
    if len(pinned) > t:
        raise ValueError(
            f"coverage floor needs {len(pinned)} rows but the schedule has only t={t}"
        )
    rng = rng_for(seed, 0x5C)
    rest = rng.integers(0, m, size=t - len(pinned))
    log = np.concatenate([np.asarray(pinned, dtype=np.int64), rest])
    rng.shuffle(log)
    return tuple(int(a) for a in log)


@dataclass(frozen=True)
class TrialConfig:
    """One seeded recovery experiment.

    ``spec.seed`` is a placeholder: the trial derives its instance, log,
    and evaluation streams from ``trial_seed`` alone, so equal configs give
    bitwise-equal results and distinct trial seeds give independent draws.
    ``support_coverage_n`` switches the logging policy to an explicit
    schedule that guarantees that many rows for every truly active action
    (the rest uniform); it models a logger with an exploration floor and
    leaves cold actions exactly as unidentifiable as before.
    """

    spec: InstanceSpec
    policy: SamplingPolicy
    t: int
    trial_seed: int
    support_coverage_n: int | None = None

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ValueError("t must be at least 1")
        if self.support_coverage_n is not None and self.support_coverage_n < 1:
            raise ValueError("support_coverage_n must be at least 1 when given")


@dataclass(frozen=True)
class TrialResult:
    """Scores of one trial.  ``events`` is (gram event, noise event).

    The ``*_ok`` fields are per-trial audits: greedy-residual orthogonality
    against the selected blocks, residual-norm monotonicity, the regret
    bound on every evaluation state, and the stacked-error bound when the
    support was recovered.  ``mean_gap`` is None when nothing was selected
    (no plug-in decision exists).  ``runtime_ms`` is excluded from equality.
    """

    recovered: bool
    hamming: int
    param_err: float
    mean_gap: float | None
    events: tuple[bool, bool]
    n_min_on_support: int
    rank_deficient: bool
    ls_orthogonality_ok: bool
    residual_monotone_ok: bool
    gap_bound_ok: bool
    refit_bound_ok: bool
    runtime_ms: float = field(compare=False, default=0.0)

    def __post_init__(self) -> None:
        if (self.hamming == 0) != self.recovered:
            raise ValueError("hamming must be zero exactly when the support is recovered")


def run_trial(cfg: TrialConfig) -> TrialResult:
    """Draw instance and log, fit, and score one seeded trial.

    A block with no rows or fewer than ``d`` rows never crashes the fit:
    selection scores it as-is (an uncovered action scores zero and is never
    picked) and the refit keeps the minimum-norm solution, so a thin draw
    shows up as an unrecovered trial with ``rank_deficient`` set.
    """
    t0 = time.perf_counter()
    spec = replace(cfg.spec, seed=mix_seed(cfg.trial_seed, 1))
    inst = sample_instance(spec)

    policy = cfg.policy
    if cfg.support_coverage_n is not None:
        policy = SamplingPolicy.explicit(
            coverage_schedule(
                inst.s_star, spec.m, cfg.t, cfg.support_coverage_n, mix_seed(cfg.trial_seed, 4)
            )
        )
    data, eps = sample_dataset(inst, policy, cfg.t, seed=mix_seed(cfg.trial_seed, 2), return_noise=True)
    design = build_block_design(data)
    counts = coverage_counts(data)
    covered = int(np.count_nonzero(counts))

    result = run_bomp(
        data,
        StoppingRule.fixed(min(spec.k, covered)),
        allow_rank_deficient=True,
        design=design,
    )
    s_hat = result.support.as_set()
    s_true = inst.s_star.as_set()
    recovered = s_hat == s_true
    hamming = len(s_hat ^ s_true)
    rank_deficient = len(result.support) < spec.k or any(
        int(counts[j]) < spec.d for j in result.support
    )

    model = DecisionModel.from_bomp(result)
    perr = param_error(model, inst.w_star)

    mean_gap: float | None = None
    gap_bound_ok = True
    if len(result.support):
        rng = rng_for(cfg.trial_seed, 3)
        zs = rng.standard_normal((EVAL_STATES, spec.d))
        if spec.sigma_z is not None:
            zs = zs @ np.linalg.cholesky(spec.sigma_z).T
        gaps = np.empty(EVAL_STATES)
        for i, z in enumerate(zs):
            gap, bound = suboptimality_gap(inst.w_star, model, z)
            gaps[i] = gap
            if gap > bound + 1e-12:
                gap_bound_ok = False
        mean_gap = float(gaps.mean())

    n_min = min_coverage(counts, inst.s_star)
    lam = min_eigen_blockwise(design, inst.s_star)
    # a support block with < d rows has a singular gram whose floating-point
    # minimum eigenvalue may still print as 1e-18; gate on the row counts,
    # not on the sign of that rounding
    conditioned = n_min >= spec.d and lam > 0.0
    if conditioned:
        # rows partition by action here, so the cross-block term is 0 exactly
        report = check_thm1_events(inst, data, eps, alpha=lam / cfg.t, mu=0.0)
        events = (report.event_gram, report.event_noise)
    else:
        events = (False, False)  # degenerate conditioning, the guarantee is void

    refit_bound_ok = True
    if recovered and conditioned:
        corr = np.concatenate([design.states[design.groups[j]].T @ eps[design.groups[j]] for j in inst.s_star])
        refit_bound_ok = perr.err <= float(np.linalg.norm(corr)) / lam + 1e-10

    tol = 1e-8 * result.residual_norms[0]
    sel = list(result.support)
    orth_ok = all(
        float(result.scores_per_iter[i][sel[:i]].max()) <= tol
        for i in range(1, result.iterations + 1)
    )
    mono_ok = all(
        result.residual_norms[i + 1] <= result.residual_norms[i] * (1.0 + _MONOTONE_RTOL)
        for i in range(len(result.residual_norms) - 1)
    )

    return TrialResult(
        recovered=recovered,
        hamming=hamming,
        param_err=perr.err,
        mean_gap=mean_gap,
        events=events,
        n_min_on_support=n_min,
        rank_deficient=rank_deficient,
        ls_orthogonality_ok=orth_ok,
        residual_monotone_ok=mono_ok,
        gap_bound_ok=gap_bound_ok,
        refit_bound_ok=refit_bound_ok,
        runtime_ms=(time.perf_counter() - t0) * 1e3,
    )


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid of trial parameters plus trial count and base seed.

    Cells enumerate in ``itertools.product`` order over the axes as listed
    (m outermost, b innermost) and every aggregate row carries its own
    derived seed, so any cell can be reproduced in isolation.
    """

    m: tuple[int, ...]
    d: tuple[int, ...]
    k: tuple[int, ...]
    t: tuple[int, ...]
    noise_sigma: tuple[float, ...]
    b: tuple[float, ...]
    trials: int
    seed: int
    policy: SamplingPolicy = field(default_factory=SamplingPolicy.uniform)
    budget: int = 1_000_000

    def __post_init__(self) -> None:
        for name in ("m", "d", "k", "t"):
            vals = tuple(int(v) for v in getattr(self, name))
            if not vals:
                raise ValueError(f"axis {name!r} must not be empty")
            object.__setattr__(self, name, vals)
        for name in ("noise_sigma", "b"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise ValueError(f"axis {name!r} must not be empty")
            object.__setattr__(self, name, vals)
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        total = self.cell_count() * self.trials
        if total > self.budget:
            raise ValueError(
                f"grid needs {total} trials, over the budget of {self.budget}"
            )

    def cell_count(self) -> int:
        return math.prod(len(getattr(self, name)) for name in _AXES)

    def cells(self) -> list[dict]:
        return [dict(zip(_AXES, combo)) for combo in product(*(getattr(self, name) for name in _AXES))]

    def to_dict(self) -> dict:
        doc: dict = {name: list(getattr(self, name)) for name in _AXES}
        doc["trials"] = self.trials
        doc["seed"] = self.seed
        doc["policy"] = self.policy.to_dict()
        doc["budget"] = self.budget
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepGrid":
        def axis(name: str):
            try:
                v = doc[name]
            except KeyError as exc:
                raise ValueError(f"sweep config is missing {exc}") from exc
            return tuple(v) if isinstance(v, (list, tuple)) else (v,)

        try:
            return cls(
                m=axis("m"),
                d=axis("d"),
                k=axis("k"),
                t=axis("t"),
                noise_sigma=axis("noise_sigma"),
                b=axis("b"),
                trials=int(doc["trials"]),
                seed=int(doc["seed"]),
                policy=SamplingPolicy.from_dict(doc["policy"]) if "policy" in doc else SamplingPolicy.uniform(),
                budget=int(doc.get("budget", 1_000_000)),
            )
        except KeyError as exc:
            raise ValueError(f"sweep config is missing {exc}") from exc


def worker_cap() -> int:
    """Trial parallelism: SPARSE_ACTIONS_THREADS if set, else hardware width."""
    raw = os.environ.get("SPARSE_ACTIONS_THREADS")
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"SPARSE_ACTIONS_THREADS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError("SPARSE_ACTIONS_THREADS must be at least 1")
    return cap


def _cell_config(grid: SweepGrid, cell: dict, trial_seed: int) -> TrialConfig:
    spec = InstanceSpec(
        m=cell["m"],
        d=cell["d"],
        k=cell["k"],
        b=cell["b"],
        noise_sigma=cell["noise_sigma"],
        seed=0,  # replaced per trial
    )
    return TrialConfig(spec=spec, policy=grid.policy, t=cell["t"], trial_seed=trial_seed)


def run_cell(grid: SweepGrid, cell_index: int) -> list[TrialResult]:
    """All trial results for one cell, in trial order."""
    cells = grid.cells()
    if not 0 <= cell_index < len(cells):
        raise ValueError(f"cell_index must lie in [0, {len(cells)})")
    cell = cells[cell_index]
    cfgs = [
        _cell_config(grid, cell, mix_seed(grid.seed, cell_index, ti))
        for ti in range(grid.trials)
    ]
    cap = worker_cap()
    if cap > 1 and len(cfgs) > 1:
        with ThreadPoolExecutor(max_workers=cap) as pool:
            return list(pool.map(run_trial, cfgs))
    return [run_trial(c) for c in cfgs]


def aggregate_cell(cell: dict, results: list[TrialResult], seed: int) -> dict:
    """Fold one cell's trials into a result row (keys = RESULT_COLUMNS)."""
    n = len(results)
    if n == 0:
        raise ValueError("cannot aggregate zero trials")
    p = sum(r.recovered for r in results) / n
    gaps = [r.mean_gap for r in results if r.mean_gap is not None]
    return {
        "m": cell["m"],
        "d": cell["d"],
        "k": cell["k"],
        "t": cell["t"],
        "noise_sigma": cell["noise_sigma"],
        "b": cell["b"],
        "trials": n,
        "recovery_rate": p,
        "mean_hamming": float(np.mean([r.hamming for r in results])),
        "mean_param_err": float(np.mean([r.param_err for r in results])),
        "mean_gap": float(np.mean(gaps)) if gaps else float("nan"),
        "ci_halfwidth": 1.96 * math.sqrt(p * (1.0 - p) / n),
        "seed": seed,
    }


def sweep(grid: SweepGrid) -> list[dict]:
    """Run the whole grid; one aggregate row per cell, in grid order."""
    return [
        aggregate_cell(cell, run_cell(grid, ci), mix_seed(grid.seed, ci))
        for ci, cell in enumerate(grid.cells())
    ]


def write_results(rows: list[dict], path, fmt: str) -> None:
    """Persist sweep rows as CSV (fixed column order) or JSON (same keys)."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    path = Path(path)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({c: row[c] for c in RESULT_COLUMNS})
    else:
        doc = [{c: row[c] for c in RESULT_COLUMNS} for row in rows]
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
