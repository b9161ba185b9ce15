"""Greedy block-sparse recovery on a block design.

One round = score every action block against the current residual, select
the best-scoring unselected action, refit least squares on the selected
blocks jointly, subtract the fit.  Because blocks from a logged dataset
are row-disjoint, the joint refit decomposes per block and the residual
stays exactly orthogonal to every selected block.

Scores of a residual ``u`` are ``||Psi_j' u||_2`` per action ``j``, zero
for actions with no rows.  Selection breaks ties toward the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BlockDesign, Dataset, ParamMatrix, SupportSet, build_block_design

# Relative floor under which a residual counts as orthogonal to every block:
# all scores <= SCORE_FLOOR_REL * ||r||_2 stops the loop early.
SCORE_FLOOR_REL = 1e-12


class RankDeficientBlockError(ValueError):
    """A selected block has fewer independent rows than coefficients."""


@dataclass(frozen=True)
class StoppingRule:
    """When the greedy loop halts.

    ``fixed(k)`` runs exactly ``k`` selections; ``residual_threshold(tau)``
    stops once the residual norm is ``<= tau``; ``score_threshold(eta)``
    stops before a selection whose best available score is ``<= eta``.
    Whatever the rule, the loop also stops when every action is selected
    or the residual is orthogonal to every block (reported via the
    ``early_stopped`` flag on the result).
    """

    kind: str
    value: float

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "residual", "score"):
            raise ValueError(f"unknown stopping rule {self.kind!r}")
        if self.kind == "fixed":
            if int(self.value) != self.value or self.value < 1:
                raise ValueError(f"fixed iteration count must be a positive integer, got {self.value!r}")
            object.__setattr__(self, "value", int(self.value))
        elif self.value < 0:
            raise ValueError("threshold must be nonnegative")

    @classmethod
    def fixed(cls, k: int) -> "StoppingRule":
        return cls("fixed", k)

    @classmethod
    def residual_threshold(cls, tau: float) -> "StoppingRule":
        return cls("residual", float(tau))

    @classmethod
    def score_threshold(cls, eta: float) -> "StoppingRule":
        return cls("score", float(eta))


@dataclass
class BompResult:
    """Outcome of a greedy run.

    ``support`` is in selection order.  ``residual_norms[i]`` is the
    residual norm after ``i`` selections (entry 0 is ``||r||_2``), so the
    list is non-increasing.  ``scores_per_iter[i]`` holds the per-action
    scores of that same residual; selection ``i+1`` reads row ``i``.
    """

    support: SupportSet
    w_hat: ParamMatrix
    scores_per_iter: tuple[np.ndarray, ...]
    residual_norms: tuple[float, ...]
    iterations: int
    early_stopped: bool = False

    def to_dict(self) -> dict:
        return {
            "support": list(self.support.indices),
            "w_hat": self.w_hat.rows.tolist(),
            "residual_norms": list(self.residual_norms),
            "iterations": self.iterations,
        }


def _flat_index(design: BlockDesign) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Concatenated (row, block, state-row) triples over all groups, cached."""
    cached = design.__dict__.get("_flat_index")
    if cached is None:
        sizes = [g.size for g in design.groups]
        rows = np.concatenate(design.groups) if any(sizes) else np.empty(0, dtype=np.int64)
        blocks = np.repeat(np.arange(design.m), sizes)
        cached = (rows, blocks, design.states[rows])
        design.__dict__["_flat_index"] = cached
    return cached


def block_scores(design: BlockDesign, residual: np.ndarray) -> np.ndarray:
    """Per-action correlation norms ``||Psi_j' u||_2`` of a residual."""
    residual = np.asarray(residual, dtype=float)
    if residual.shape != (design.t,):
        raise ValueError(f"residual must have shape ({design.t},), got {residual.shape}")
    rows, blocks, zflat = _flat_index(design)
    acc = np.zeros((design.m, design.d))
    if rows.size:
        ur = residual[rows]
        for c in range(design.d):
            acc[:, c] = np.bincount(blocks, weights=zflat[:, c] * ur, minlength=design.m)
    return np.linalg.norm(acc, axis=1)


def select_action(scores: np.ndarray, already_selected) -> int:
    """Best-scoring action outside ``already_selected``; ties go to the lowest index."""
    masked = np.asarray(scores, dtype=float).copy()
    for j in already_selected:
        masked[j] = -np.inf
    if np.all(np.isneginf(masked)):
        raise ValueError("every action is already selected")
    return int(np.argmax(masked))


def refit_ls(
    design: BlockDesign,
    support: SupportSet,
    rewards: np.ndarray,
    *,
    allow_rank_deficient: bool = False,
) -> ParamMatrix:
    """Joint least squares over the selected blocks; zero rows elsewhere.

    Row-disjoint blocks make the joint problem block-separable, so each
    selected action is solved on its own rows via an orthogonal
    factorization (SVD-backed ``lstsq``; the Gram is never inverted
    explicitly).  A block with fewer independent rows than ``d`` raises
    :class:`RankDeficientBlockError` unless ``allow_rank_deficient`` is
    set, in which case the minimum-norm solution is kept.
    """
    rewards = np.asarray(rewards, dtype=float)
    w = np.zeros((design.m, design.d))
    for j in support:
        g = design.groups[j]
        if g.size == 0:
            if allow_rank_deficient:
                continue
            raise RankDeficientBlockError(f"block {j} has no rows")
        sol, _, rank, _ = np.linalg.lstsq(design.states[g], rewards[g], rcond=None)
        if rank < design.d and not allow_rank_deficient:
            raise RankDeficientBlockError(
                f"block {j} is rank deficient: rank {rank} < d={design.d} with {g.size} rows"
            )
        w[j] = sol
    return ParamMatrix(w)


def residual_update(
    design: BlockDesign,
    support: SupportSet,
    w_hat: ParamMatrix,
    rewards: np.ndarray,
) -> np.ndarray:
    """Residual ``r - sum_j Psi_j w_hat[j]`` over the supported blocks."""
    u = np.asarray(rewards, dtype=float).copy()
    for j in support:
        g = design.groups[j]
        if g.size:
            u[g] -= design.states[g] @ w_hat.rows[j]
    return u


def run_bomp(
    data: Dataset,
    stop: StoppingRule,
    *,
    allow_rank_deficient: bool = False,
    design: BlockDesign | None = None,
) -> BompResult:
    """Run the greedy loop on a dataset until the stopping rule fires.

    With ``fixed(k)`` the loop performs exactly ``k`` selections unless the
    residual becomes orthogonal to every block first (``early_stopped``).
    An action with no rows scores zero and is therefore never selected.
    """
    if design is None:
        design = build_block_design(data)
    rewards = data.rewards
    r_norm = float(np.linalg.norm(rewards))
    covered = sum(1 for g in design.groups if g.size)
    if stop.kind == "fixed" and stop.value > covered:
        raise ValueError(f"cannot select {stop.value} actions: only {covered} have rows")

    u = rewards.copy()
    selected: list[int] = []
    w_hat = ParamMatrix(np.zeros((design.m, design.d)))
    score_hist: list[np.ndarray] = []
    res_norms: list[float] = [r_norm]
    floor = SCORE_FLOOR_REL * r_norm
    early = False

    while True:
        scores = block_scores(design, u)
        score_hist.append(scores)
        if stop.kind == "fixed" and len(selected) == stop.value:
            break
        if stop.kind == "residual" and res_norms[-1] <= stop.value:
            break
        if len(selected) == covered:
            break
        masked = scores.copy()
        masked[selected] = -np.inf
        best = float(masked.max())
        if stop.kind == "score" and best <= stop.value:
            break
        if best <= floor:
            early = True
            break
        selected.append(select_action(scores, selected))
        w_hat = refit_ls(design, SupportSet(tuple(selected)), rewards, allow_rank_deficient=allow_rank_deficient)
        u = residual_update(design, SupportSet(tuple(selected)), w_hat, rewards)
        res_norms.append(float(np.linalg.norm(u)))

    return BompResult(
        support=SupportSet(tuple(selected)),
        w_hat=w_hat,
        scores_per_iter=tuple(score_hist),
        residual_norms=tuple(res_norms),
        iterations=len(selected),
        early_stopped=early,
    )
