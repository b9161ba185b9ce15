"""Plug-in action selection from a recovered model, with its error accounting.

The decision rule picks, for a new state, the recovered action with the
largest estimated mean reward.  The gap it is charged is measured against
the best action in the model's own menu (the recovered support): off-menu
rows of both matrices are zero, so whenever some supported action has
positive value this coincides with the best action overall, and it is the
quantity the parameter-error bound controls deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bomp import BompResult
from .model import ParamMatrix, SupportSet, _as_state


@dataclass
class DecisionModel:
    """A recovered support plus its refitted parameters (zero off support)."""

    support: SupportSet
    w_hat: ParamMatrix

    def __post_init__(self) -> None:
        norms = np.linalg.norm(self.w_hat.rows, axis=1)
        for j in range(self.w_hat.m):
            if j not in self.support and norms[j] != 0.0:
                raise ValueError(f"row {j} is nonzero but outside the support")

    @classmethod
    def from_bomp(cls, result: BompResult) -> "DecisionModel":
        return cls(result.support, result.w_hat)


def plugin_action(model: DecisionModel, z) -> int:
    """Supported action with the largest estimated reward; ties to lowest index."""
    if len(model.support) == 0:
        raise ValueError("cannot choose an action from an empty support")
    zz = _as_state(z, model.w_hat.d)
    values = {j: float(model.w_hat.rows[j] @ zz) for j in model.support}
    best = max(values.values())
    return min(j for j, v in values.items() if v == best)


def suboptimality_gap(w_star: ParamMatrix, model: DecisionModel, z) -> tuple[float, float]:
    """Realized regret of the plug-in choice at ``z`` and its deterministic bound.

    Returns ``(gap, bound)`` where ``gap`` is the best true mean reward over
    the model's support minus the true mean reward of the chosen action, and
    ``bound = 2 * max_{j in support} ||w_hat[j] - w_star[j]|| * ||z||``.
    ``gap <= bound`` holds for every state by the three-term telescoping
    argument; both are evaluated exactly, nothing is asserted here.
    """
    if w_star.rows.shape != model.w_hat.rows.shape:
        raise ValueError("parameter matrices must have matching shape")
    zz = _as_state(z, w_star.d)
    chosen = plugin_action(model, zz)
    true_vals = [float(w_star.rows[j] @ zz) for j in model.support]
    gap = max(true_vals) - float(w_star.rows[chosen] @ zz)
    row_err = max(float(np.linalg.norm(model.w_hat.rows[j] - w_star.rows[j])) for j in model.support)
    bound = 2.0 * row_err * float(np.linalg.norm(zz))
    return gap, bound


@dataclass(frozen=True)
class ParamError:
    """Stacked and per-row estimation error of a recovered model."""

    err: float
    per_row: np.ndarray
    support_mismatch: bool


def param_error(model: DecisionModel, w_star: ParamMatrix) -> ParamError:
    """Euclidean distance between recovered and true parameters.

    ``per_row`` follows the support's selection order.  When the recovered
    support differs from the true one the stacked error runs over the union
    of both supports (absent rows are zero there by construction) and the
    mismatch flag is set.
    """
    if w_star.rows.shape != model.w_hat.rows.shape:
        raise ValueError("parameter matrices must have matching shape")
    diff = model.w_hat.rows - w_star.rows
    per_row = np.array([float(np.linalg.norm(diff[j])) for j in model.support])
    mismatch = model.support.as_set() != w_star.support().as_set()
    rows = sorted(model.support.as_set() | w_star.support().as_set())
    err = float(np.linalg.norm(diff[rows].reshape(-1))) if rows else 0.0
    return ParamError(err, per_row, mismatch)
