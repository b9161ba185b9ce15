"""Core data contracts for the block-sparse contextual reward model.

A logged interaction is a state ``z`` in R^d, an action index ``a`` in
``[0, m)`` and a scalar reward.  The reward model is linear per action:
``r = <W[a], z> + noise`` for an ``(m, d)`` parameter matrix ``W`` whose
nonzero rows form the active-action support.  Stacking one regression
block per action gives a design whose blocks are row-disjoint; that
structure is what every downstream routine exploits, so it is represented
explicitly here as :class:`BlockDesign` (row-index groups, never a dense
``(T, m*d)`` matrix).

Action indices are 0-based everywhere.  Flattening a parameter matrix is
always row-major, matching :func:`feature_map`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Sample",
    "Dataset",
    "ParamMatrix",
    "SupportSet",
    "BlockDesign",
    "feature_map",
    "build_block_design",
    "predict_reward",
]


def _as_state(z: Sequence[float] | np.ndarray, d: int | None = None) -> np.ndarray:
    """Validate a single state vector: 1-D, float, finite, optional length check."""
    arr = np.asarray(z, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"state must be a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("state must have at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError("state has non-finite entries")
    if d is not None and arr.size != d:
        raise ValueError(f"state has length {arr.size}, expected {d}")
    return arr


@dataclass(frozen=True)
class Sample:
    """One logged interaction: state ``z``, action index ``a``, reward ``r``."""

    z: np.ndarray
    a: int
    r: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", _as_state(self.z))
        if int(self.a) != self.a or self.a < 0:
            raise ValueError(f"action index must be a nonnegative integer, got {self.a!r}")
        object.__setattr__(self, "a", int(self.a))
        if not np.isfinite(self.r):
            raise ValueError("reward must be finite")
        object.__setattr__(self, "r", float(self.r))


@dataclass
class Dataset:
    """A log of T interactions against an action set of size ``m``.

    Stored column-wise (``states`` is ``(t, d)``, ``actions`` and ``rewards``
    are length ``t``) because everything downstream is vectorized; the
    sample view and the JSON form are row-wise.

    Args:
        states: real matrix, one state per row, all entries finite.
        actions: integer vector, each entry in ``[0, m)``.
        rewards: real vector, entries finite.
        m: number of actions (may exceed the number of distinct logged actions).
    """

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    m: int

    def __post_init__(self) -> None:
        self.states = np.asarray(self.states, dtype=float)
        self.actions = np.asarray(self.actions, dtype=np.int64)
        self.rewards = np.asarray(self.rewards, dtype=float)
        if self.states.ndim != 2 or self.states.shape[0] == 0 or self.states.shape[1] == 0:
            raise ValueError(f"states must be a nonempty (t, d) matrix, got shape {self.states.shape}")
        t = self.states.shape[0]
        if self.actions.shape != (t,) or self.rewards.shape != (t,):
            raise ValueError("states, actions and rewards must agree on t")
        if not np.all(np.isfinite(self.states)) or not np.all(np.isfinite(self.rewards)):
            raise ValueError("dataset has non-finite entries")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.actions.min() < 0 or self.actions.max() >= self.m:
            raise ValueError(f"action indices must lie in [0, {self.m})")

    @property
    def t(self) -> int:
        return self.states.shape[0]

    @property
    def d(self) -> int:
        return self.states.shape[1]

    @classmethod
    def from_samples(cls, samples: Iterable[Sample], m: int) -> "Dataset":
        rows = list(samples)
        if not rows:
            raise ValueError("dataset needs at least one sample")
        d = rows[0].z.size
        states = np.stack([_as_state(s.z, d) for s in rows])
        actions = np.array([s.a for s in rows], dtype=np.int64)
        rewards = np.array([s.r for s in rows], dtype=float)
        return cls(states, actions, rewards, m)

    def samples(self) -> Iterator[Sample]:
        for i in range(self.t):
            yield Sample(self.states[i].copy(), int(self.actions[i]), float(self.rewards[i]))

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "d": self.d,
            "samples": [
                {"z": self.states[i].tolist(), "a": int(self.actions[i]), "r": float(self.rewards[i])}
                for i in range(self.t)
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Dataset":
        try:
            m = int(doc["m"])
            d = int(doc["d"])
            raw = doc["samples"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed dataset document: {exc}") from exc
        samples = [Sample(_as_state(s["z"], d), int(s["a"]), float(s["r"])) for s in raw]
        return cls.from_samples(samples, m)


@dataclass
class ParamMatrix:
    """Per-action linear parameters: row ``j`` predicts rewards of action ``j``."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2 or self.rows.shape[0] == 0 or self.rows.shape[1] == 0:
            raise ValueError(f"rows must be a nonempty (m, d) matrix, got shape {self.rows.shape}")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("parameter matrix has non-finite entries")

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def vec(self) -> np.ndarray:
        """Row-major flattening, consistent with :func:`feature_map`."""
        return self.rows.reshape(-1)

    def support(self) -> "SupportSet":
        """Indices of rows with strictly positive Euclidean norm, ascending."""
        norms = np.linalg.norm(self.rows, axis=1)
        return SupportSet(tuple(int(j) for j in np.flatnonzero(norms > 0.0)))

    def to_dict(self) -> dict:
        return {"rows": self.rows.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "ParamMatrix":
        if "rows" not in doc:
            raise ValueError("malformed parameter document: missing 'rows'")
        return cls(np.asarray(doc["rows"], dtype=float))


@dataclass(frozen=True)
class SupportSet:
    """Ordered collection of distinct action indices.

    Order is meaningful: greedy recovery reports actions in selection order.
    Set-style membership and equality-as-set go through :meth:`as_set`.
    """

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = tuple(int(j) for j in self.indices)
        if any(j < 0 for j in idx):
            raise ValueError("action indices must be nonnegative")
        if len(set(idx)) != len(idx):
            raise ValueError(f"support has repeated indices: {idx}")
        object.__setattr__(self, "indices", idx)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, j: object) -> bool:
        return j in self.indices

    def as_set(self) -> frozenset[int]:
        return frozenset(self.indices)


@dataclass
class BlockDesign:
    """Row-group view of a dataset's regression blocks.

    ``groups[j]`` holds the (ascending) row indices whose action is ``j``;
    the implicit block matrix for action ``j`` has row ``t`` equal to
    ``states[t]`` when ``t`` is in ``groups[j]`` and zero otherwise.  Designs
    built from a :class:`Dataset` partition the rows (each row belongs to
    exactly one group), which makes distinct blocks exactly orthogonal.
    Hand-built designs with shared rows are permitted; the cross-block
    diagnostics are defined for them too.
    """

    states: np.ndarray
    groups: tuple[np.ndarray, ...]
    m: int = field(init=False)

    def __post_init__(self) -> None:
        self.states = np.asarray(self.states, dtype=float)
        if self.states.ndim != 2:
            raise ValueError("states must be a (t, d) matrix")
        t = self.states.shape[0]
        norm_groups = []
        for j, g in enumerate(self.groups):
            arr = np.asarray(g, dtype=np.int64)
            if arr.ndim != 1:
                raise ValueError(f"group {j} must be a 1-D index list")
            if arr.size:
                if arr.min() < 0 or arr.max() >= t:
                    raise ValueError(f"group {j} has row indices outside [0, {t})")
                if np.any(np.diff(arr) <= 0):
                    raise ValueError(f"group {j} must be strictly increasing")
            norm_groups.append(arr)
        self.groups = tuple(norm_groups)
        self.m = len(self.groups)

    @property
    def t(self) -> int:
        return self.states.shape[0]

    @property
    def d(self) -> int:
        return self.states.shape[1]

    def count(self, j: int) -> int:
        """Number of rows in block ``j``."""
        return int(self.groups[j].size)

    def block(self, j: int) -> np.ndarray:
        """Dense ``(t, d)`` matrix of block ``j``.  Diagnostics only; the
        solvers work from the row groups."""
        psi = np.zeros((self.t, self.d))
        g = self.groups[j]
        psi[g] = self.states[g]
        return psi

    def block_gram(self, j: int) -> np.ndarray:
        """Exactly symmetric ``(d, d)`` Gram of block ``j``."""
        g = self.groups[j]
        if g.size == 0:
            return np.zeros((self.d, self.d))
        zj = self.states[g]
        gram = zj.T @ zj
        return (gram + gram.T) * 0.5


def feature_map(z: Sequence[float] | np.ndarray, a: int, m: int) -> np.ndarray:
    """Embed (state, action) as a length ``m*d`` vector.

    The result is zero outside the contiguous block of coordinates
    ``[a*d, (a+1)*d)``, where it equals ``z``.  Together with row-major
    flattening this makes ``<vec(W), feature_map(z, a, m)> == <W[a], z>``.
    """
    zz = _as_state(z)
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 0 <= a < m:
        raise ValueError(f"action index {a} outside [0, {m})")
    d = zz.size
    phi = np.zeros(m * d)
    phi[a * d : (a + 1) * d] = zz
    return phi


def build_block_design(data: Dataset) -> BlockDesign:
    """Group dataset rows by action.  Groups are ascending and partition the rows."""
    counts = np.bincount(data.actions, minlength=data.m)
    order = np.argsort(data.actions, kind="stable")
    groups = np.split(order, np.cumsum(counts)[:-1])
    return BlockDesign(data.states, tuple(groups))


def predict_reward(w: ParamMatrix, z: Sequence[float] | np.ndarray, a: int) -> float:
    """Modeled mean reward ``<W[a], z>``."""
    zz = _as_state(z, w.d)
    if not 0 <= a < w.m:
        raise ValueError(f"action index {a} outside [0, {w.m})")
    return float(w.rows[a] @ zz)
