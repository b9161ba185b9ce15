"""Brute-force references for validating the greedy solver on small problems.

Deliberately naive: enumerate every candidate support, refit each, keep the
best residual sum of squares.  Feasible only at desk scale, which is the
point; the greedy path is checked against these on instances where the
enumeration is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bomp import block_scores, refit_ls, residual_update
from .model import Dataset, SupportSet, build_block_design

# RSS ties within this margin make the argmin ill-posed; flagged, not resolved.
UNIQUENESS_MARGIN = 1e-9

_ENUMERATION_GUARD = 10**6


@dataclass(frozen=True)
class OracleResult:
    best_support: SupportSet
    best_rss: float
    unique: bool


def exhaustive_support_search(data: Dataset, k: int) -> OracleResult:
    """Best size-``k`` support by refit RSS over all subsets of covered actions.

    Ties keep the lexicographically smallest subset, making the reduction
    deterministic.  ``unique`` reports whether the winner beats the
    runner-up by more than :data:`UNIQUENESS_MARGIN`.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if math.comb(data.m, k) > _ENUMERATION_GUARD:
        raise ValueError(f"C({data.m}, {k}) exceeds the enumeration guard of {_ENUMERATION_GUARD}")
    design = build_block_design(data)
    covered = [j for j in range(data.m) if design.count(j) > 0]
    if k > len(covered):
        raise ValueError(f"k={k} exceeds the {len(covered)} covered actions")

    best_rss = math.inf
    second_rss = math.inf
    best: tuple[int, ...] | None = None
    for subset in itertools.combinations(covered, k):
        support = SupportSet(subset)
        w = refit_ls(design, support, data.rewards, allow_rank_deficient=True)
        u = residual_update(design, support, w, data.rewards)
        rss = float(u @ u)
        if rss < best_rss:
            second_rss = best_rss
            best_rss, best = rss, subset
        elif rss < second_rss:
            second_rss = rss
    assert best is not None
    return OracleResult(
        best_support=SupportSet(best),
        best_rss=best_rss,
        unique=(second_rss - best_rss) > UNIQUENESS_MARGIN,
    )


def topk_by_initial_score(data: Dataset, k: int) -> SupportSet:
    """The ``k`` actions with largest ``||Psi_j' r||_2``, descending, ties by index."""
    design = build_block_design(data)
    covered = sum(1 for g in design.groups if g.size)
    if not 1 <= k <= covered:
        raise ValueError(f"k must lie in [1, {covered}] (covered actions)")
    scores = block_scores(design, data.rewards)
    order = np.argsort(-scores, kind="stable")[:k]
    return SupportSet(tuple(int(j) for j in order))
