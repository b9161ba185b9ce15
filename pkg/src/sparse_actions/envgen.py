"""Synthetic instances and logged datasets for the row-sparse reward model.

An instance is a ground-truth parameter matrix with ``k`` active rows of
prescribed norm; a dataset is a log of states, actions and noisy rewards
drawn from it under a sampling policy.  Generation is deterministic given
the seeds; a dataset draws its streams in a fixed order (states, then
actions, then noise) so the state/action realization is unchanged when
only the noise level differs.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .model import Dataset, ParamMatrix, SupportSet

_POLICY_KINDS = ("uniform", "round-robin", "schedule")


@dataclass(frozen=True)
class SamplingPolicy:
    """How actions are logged: iid uniform, cyclic, or a fixed schedule."""

    kind: str
    schedule: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in _POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}, expected one of {_POLICY_KINDS}")
        if self.kind == "schedule":
            if self.schedule is None:
                raise ValueError("schedule policy needs an action list")
            object.__setattr__(self, "schedule", tuple(int(a) for a in self.schedule))
        elif self.schedule is not None:
            raise ValueError(f"policy {self.kind!r} does not take a schedule")

    @classmethod
    def uniform(cls) -> "SamplingPolicy":
        return cls("uniform")

    @classmethod
    def round_robin(cls) -> "SamplingPolicy":
        return cls("round-robin")

    @classmethod
    def explicit(cls, schedule) -> "SamplingPolicy":
        return cls("schedule", tuple(int(a) for a in schedule))

    def to_dict(self) -> dict:
        doc: dict = {"kind": self.kind}
        if self.schedule is not None:
            doc["schedule"] = list(self.schedule)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "SamplingPolicy":
        return cls(doc["kind"], tuple(doc["schedule"]) if "schedule" in doc else None)


@dataclass(frozen=True)
class InstanceSpec:
    """Parameters of a synthetic problem.

    Args:
        m: number of actions.
        d: state dimension.
        k: number of active rows, ``1 <= k <= m``.
        b: Euclidean norm of every active row.  A per-row list is accepted
            in the file format; ``b`` is then the smallest norm.
        noise_sigma: reward noise standard deviation, ``>= 0``.
        seed: base seed for instance sampling.
        sigma_z: state covariance, symmetric with positive smallest
            eigenvalue.  ``None`` means identity.
        row_norms: optional per-active-row norms, length ``k``, all ``> 0``.
    """

    m: int
    d: int
    k: int
    b: float
    noise_sigma: float
    seed: int
    sigma_z: np.ndarray | None = None
    row_norms: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.m < 1 or self.d < 1:
            raise ValueError("m and d must be at least 1")
        if not 1 <= self.k <= self.m:
            raise ValueError(f"k must satisfy 1 <= k <= m, got k={self.k}, m={self.m}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.row_norms is not None:
            norms = tuple(float(v) for v in self.row_norms)
            if len(norms) != self.k:
                raise ValueError(f"row_norms must have length k={self.k}")
            if any(v <= 0 for v in norms):
                raise ValueError("row norms must be positive")
            object.__setattr__(self, "row_norms", norms)
            object.__setattr__(self, "b", min(norms))
        if self.b <= 0:
            raise ValueError("b must be positive")
        if self.sigma_z is not None:
            cov = np.asarray(self.sigma_z, dtype=float)
            if cov.shape != (self.d, self.d):
                raise ValueError(f"sigma_z must be ({self.d}, {self.d}), got {cov.shape}")
            if not np.allclose(cov, cov.T, rtol=1e-10, atol=1e-12):
                raise ValueError("sigma_z must be symmetric")
            if np.linalg.eigvalsh((cov + cov.T) * 0.5).min() <= 0:
                raise ValueError("sigma_z must have a positive smallest eigenvalue")
            object.__setattr__(self, "sigma_z", cov)

    def covariance(self) -> np.ndarray:
        return np.eye(self.d) if self.sigma_z is None else self.sigma_z

    def active_norms(self) -> tuple[float, ...]:
        return self.row_norms if self.row_norms is not None else (float(self.b),) * self.k

    def to_dict(self) -> dict:
        doc: dict = {
            "m": self.m,
            "d": self.d,
            "k": self.k,
            "b": list(self.row_norms) if self.row_norms is not None else float(self.b),
            "noise_sigma": float(self.noise_sigma),
            "seed": int(self.seed),
        }
        if self.sigma_z is not None:
            doc["sigma_z"] = self.sigma_z.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "InstanceSpec":
        try:
            b = doc["b"]
            row_norms = tuple(float(v) for v in b) if isinstance(b, (list, tuple)) else None
            return cls(
                m=int(doc["m"]),
                d=int(doc["d"]),
                k=int(doc["k"]),
                b=min(row_norms) if row_norms is not None else float(b),
                noise_sigma=float(doc.get("noise_sigma", 0.0)),
                seed=int(doc.get("seed", 0)),
                sigma_z=np.asarray(doc["sigma_z"], dtype=float) if doc.get("sigma_z") is not None else None,
                row_norms=row_norms,
            )
        except KeyError as exc:
            raise ValueError(f"malformed instance spec: missing {exc}") from exc


@dataclass
class Instance:
    """A concrete ground truth: parameter matrix plus its active support."""

    spec: InstanceSpec
    w_star: ParamMatrix
    s_star: SupportSet

    def __post_init__(self) -> None:
        if len(self.s_star) != self.spec.k:
            raise ValueError(f"support size {len(self.s_star)} != k={self.spec.k}")
        norms = np.linalg.norm(self.w_star.rows, axis=1)
        # norms pair with support indices positionally
        expected = dict(zip(self.s_star.indices, self.spec.active_norms()))
        for j in range(self.spec.m):
            if j in expected:
                want = expected[j]
                if abs(norms[j] - want) > 1e-12 * max(1.0, want):
                    raise ValueError(f"active row {j} has norm {norms[j]}, expected {want}")
            elif norms[j] != 0.0:
                raise ValueError(f"inactive row {j} is nonzero")

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "w_star": self.w_star.to_dict(),
            "s_star": list(self.s_star.indices),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Instance":
        return cls(
            spec=InstanceSpec.from_dict(doc["spec"]),
            w_star=ParamMatrix.from_dict(doc["w_star"]),
            s_star=SupportSet(tuple(int(j) for j in doc["s_star"])),
        )


def sample_instance(spec: InstanceSpec) -> Instance:
    """Draw a ground truth from ``spec.seed``.

    The support is uniform among size-``k`` subsets (reported ascending) and
    each active row is an independent uniform direction scaled to its norm.
    """
    rng = np.random.default_rng(spec.seed)
    s_star = np.sort(rng.choice(spec.m, size=spec.k, replace=False))
    w = np.zeros((spec.m, spec.d))
    for j, norm_b in zip(s_star, spec.active_norms()):
        u = rng.standard_normal(spec.d)
        length = np.linalg.norm(u)
        while length == 0.0:  # measure-zero, but keeps the invariant unconditional
            u = rng.standard_normal(spec.d)
            length = np.linalg.norm(u)
        w[j] = (norm_b / length) * u
    return Instance(spec, ParamMatrix(w), SupportSet(tuple(int(j) for j in s_star)))


def _draw_actions(rng: np.random.Generator, policy: SamplingPolicy, m: int, t: int) -> np.ndarray:
    if policy.kind == "uniform":
        return rng.integers(0, m, size=t)
    if policy.kind == "round-robin":
        return np.arange(t, dtype=np.int64) % m
    schedule = np.asarray(policy.schedule, dtype=np.int64)
    if schedule.size != t:
        raise ValueError(f"schedule has length {schedule.size}, expected t={t}")
    if schedule.size and (schedule.min() < 0 or schedule.max() >= m):
        raise ValueError(f"schedule entries must lie in [0, {m})")
    return schedule


def sample_dataset(
    inst: Instance,
    policy: SamplingPolicy,
    t: int,
    seed: int,
    return_noise: bool = False,
):
    """Log ``t`` interactions from ``inst`` under ``policy``.

    States are iid ``N(0, sigma_z)`` via the Cholesky factor of the
    covariance.  Streams are consumed in the order states, actions, noise;
    with ``noise_sigma == 0`` the noise stream is never touched, so the
    state/action realization matches the noisy run at the same seed.

    Returns the :class:`Dataset`, or ``(Dataset, eps)`` with the realized
    noise vector when ``return_noise`` is true.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    spec = inst.spec
    rng = np.random.default_rng(seed)
    std = rng.standard_normal((t, spec.d))
    if spec.sigma_z is None:
        states = std
    else:
        states = std @ np.linalg.cholesky(spec.sigma_z).T
    actions = _draw_actions(rng, policy, spec.m, t)
    means = np.einsum("ij,ij->i", inst.w_star.rows[actions], states)
    if spec.noise_sigma > 0:
        eps = rng.normal(0.0, spec.noise_sigma, size=t)
    else:
        eps = np.zeros(t)
    data = Dataset(states, actions, means + eps, spec.m)
    return (data, eps) if return_noise else data


def coverage_counts(data: Dataset) -> np.ndarray:
    """Number of logged rows per action, length ``m``."""
    return np.bincount(data.actions, minlength=data.m)


def min_coverage(counts: np.ndarray, support: SupportSet) -> int:
    """Smallest per-action count over ``support``."""
    if len(support) == 0:
        raise ValueError("support is empty")
    return int(min(int(counts[j]) for j in support))
