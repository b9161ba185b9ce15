"""Realized-design diagnostics: every quantity the recovery guarantee conditions on.

Given a design and a candidate support this module computes the support
Gram and its smallest eigenvalue, the cross-block incoherence, per-action
noise correlations, and the two sufficient events for exact recovery
(Gram lower bound and noise ceiling).  On canonical designs the
incoherence is exactly zero because distinct blocks share no rows; it is
still computed, not assumed, so the structural fact stays testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .envgen import Instance, coverage_counts, min_coverage
from .model import BlockDesign, Dataset, SupportSet, build_block_design

# Events are compared with this relative slack so that the self-consistent
# alpha = lambda_min/T case cannot flip on a rounding ulp.
_EVENT_RTOL = 1e-12


@dataclass
class DiagnosticsReport:
    """Snapshot of the recovery preconditions on one realized dataset.

    ``alpha`` is always the realized ratio ``lambda_min / t``; the event
    booleans are evaluated at whatever alpha the caller supplied, with
    ``margins`` holding the raw ``lhs - rhs`` slack of each comparison
    (gram event holds when its margin is >= 0, noise event when <= 0).
    """

    mu: float
    lambda_min: float
    alpha: float
    coverage: np.ndarray
    n_min_on_support: int
    noise_corr_max: float | None
    event_gram: bool
    event_noise: bool
    margins: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "lambda_min": self.lambda_min,
            "alpha": self.alpha,
            "coverage": [int(c) for c in self.coverage],
            "n_min_on_support": self.n_min_on_support,
            "noise_corr_max": self.noise_corr_max,
            "event_gram": self.event_gram,
            "event_noise": self.event_noise,
            "margins": dict(self.margins),
        }


def _stack_support(design: BlockDesign, support: SupportSet) -> np.ndarray:
    """Dense ``(t, |S|*d)`` matrix whose p-th column block is block ``support[p]``."""
    d = design.d
    psi = np.zeros((design.t, len(support) * d))
    for p, j in enumerate(support):
        g = design.groups[j]
        psi[g, p * d : (p + 1) * d] = design.states[g]
    return psi


def gram(design: BlockDesign, support: SupportSet) -> np.ndarray:
    """Support Gram matrix in support order, exactly symmetric.

    Block (p, q) is the cross product of blocks ``support[p]`` and
    ``support[q]``; on a canonical design the off-diagonal blocks are
    exactly zero since the row groups are disjoint.
    """
    psi = _stack_support(design, support)
    g = psi.T @ psi
    return (g + g.T) * 0.5


def min_eigen(g: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {g.shape}")
    if g.size == 0:
        raise ValueError("matrix is empty")
    if not np.allclose(g, g.T, rtol=1e-10, atol=1e-12):
        raise ValueError("matrix is not symmetric")
    return float(np.linalg.eigvalsh(g)[0])


def min_eigen_blockwise(design: BlockDesign, support: SupportSet) -> float:
    """Min over per-block smallest eigenvalues.

    Equals :func:`min_eigen` of the full support Gram on canonical designs
    (block-diagonal structure) and is much cheaper, so the per-trial
    harness uses this form.
    """
    if len(support) == 0:
        raise ValueError("support is empty")
    return min(float(np.linalg.eigvalsh(design.block_gram(j))[0]) for j in support)


def block_incoherence(design: BlockDesign, support: SupportSet) -> float:
    """Worst off-support cross-correlation ``max_{j not in S} ||Psi_j' Psi_S G_S^{-1}||_2``.

    The operator norm is taken via SVD of the explicit ``d x |S|d`` matrix.
    Zero exactly on canonical designs (the cross products are sums over an
    empty row intersection) and zero by convention when the complement is
    empty.  Raises on a singular support Gram.
    """
    if len(support) == 0:
        return 0.0
    outside = [j for j in range(design.m) if j not in support]
    if not outside:
        return 0.0
    psi = _stack_support(design, support)
    g = psi.T @ psi
    g = (g + g.T) * 0.5
    worst = 0.0
    for j in outside:
        rows = design.groups[j]
        cross = design.states[rows].T @ psi[rows]  # (d, |S|d)
        try:
            c = np.linalg.solve(g, cross.T).T
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"support gram is singular: {exc}") from exc
        val = float(np.linalg.norm(c, 2)) if c.size else 0.0
        worst = max(worst, val)
    return worst


def noise_correlations(design: BlockDesign, eps: np.ndarray) -> np.ndarray:
    """Per-action correlation norms ``||Psi_j' eps||_2`` of a noise vector.

    Same formula as the residual scores; computed here with a direct
    per-group loop, which doubles as a cross-check of the vectorized path.
    """
    eps = np.asarray(eps, dtype=float)
    if eps.shape != (design.t,):
        raise ValueError(f"noise vector must have shape ({design.t},), got {eps.shape}")
    out = np.zeros(design.m)
    for j, g in enumerate(design.groups):
        if g.size:
            out[j] = float(np.linalg.norm(design.states[g].T @ eps[g]))
    return out


def realized_alpha(design: BlockDesign, support: SupportSet) -> float:
    """The realized Gram ratio ``lambda_min(G_S) / t``."""
    return min_eigen(gram(design, support)) / design.t


def check_thm1_events(
    inst: Instance,
    data: Dataset,
    eps: np.ndarray,
    alpha: float,
    *,
    mu: float | None = None,
) -> DiagnosticsReport:
    """Evaluate the two recovery-sufficient events on a realized trial.

    ``event_gram`` is ``lambda_min(G_{S*}) >= alpha*t``; ``event_noise`` is
    ``max_j ||Psi_j' eps||_2 <= ((1-mu)/2) * alpha * t * b``.  ``mu`` may be
    passed when it is already known (canonical designs have mu = 0), else
    it is computed.  ``alpha`` must be positive; use
    :func:`realized_alpha` for the self-consistent value.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    design = build_block_design(data)
    s_star = inst.s_star
    lam = min_eigen(gram(design, s_star))
    if mu is None:
        mu = block_incoherence(design, s_star)
    corr = noise_correlations(design, eps)
    corr_max = float(corr.max())
    coverage = coverage_counts(data)

    gram_rhs = alpha * data.t
    noise_rhs = 0.5 * (1.0 - mu) * alpha * data.t * inst.spec.b
    margin_gram = lam - gram_rhs
    margin_noise = corr_max - noise_rhs
    return DiagnosticsReport(
        mu=float(mu),
        lambda_min=lam,
        alpha=lam / data.t,
        coverage=coverage,
        n_min_on_support=min_coverage(coverage, s_star),
        noise_corr_max=corr_max,
        event_gram=margin_gram >= -_EVENT_RTOL * max(1.0, gram_rhs),
        event_noise=margin_noise <= _EVENT_RTOL * max(1.0, noise_rhs),
        margins={"gram": margin_gram, "noise": margin_noise},
    )


def sample_size_threshold(k: int, d: int, m: float, c: float) -> int:
    """Sample budget at scale ``c``: ``ceil(c * k * d * ln m)``, at least 1."""
    if k < 1 or d < 1:
        raise ValueError("k and d must be positive")
    if m <= 0:
        raise ValueError("m must be positive")
    if c <= 0:
        raise ValueError("c must be positive")
    return max(1, math.ceil(c * k * d * math.log(m)))
