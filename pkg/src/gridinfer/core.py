"""Shared domain types and the data-misfit potential.

Every sampler and forward solver in the package consumes these types. The
potential is one half of the noise-weighted squared residual between observed
data and the discretized forward model's prediction; a forward-solver failure
(non-finite output, blow-up guard trip, nonpositive material parameter) maps
to an infinite potential so the offending proposal is always rejected instead
of aborting the chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np


class ContractViolation(ValueError):
    """Raised when an operation's preconditions are not met."""


class SolverFailure(Exception):
    """Signals numerical failure of a forward solve (treated as potential = +inf)."""


@dataclass(frozen=True)
class NoiseModel:
    """Diagonal Gaussian observation-noise model.

    Only diagonal covariances are supported; every experiment uses an
    isotropic gamma^2 * I.
    """

    covariance_diagonal: np.ndarray

    def __post_init__(self):
        var = np.asarray(self.covariance_diagonal, dtype=float)
        if var.ndim != 1:
            raise ContractViolation("covariance_diagonal must be a 1-d vector")
        if not np.all(var > 0.0):
            raise ContractViolation("all noise variances must be strictly positive")
        object.__setattr__(self, "covariance_diagonal", var)

    @property
    def dimension(self) -> int:
        return self.covariance_diagonal.shape[0]

    @staticmethod
    def isotropic(variance: float, m: int) -> "NoiseModel":
        return NoiseModel(np.full(m, float(variance)))


@dataclass(frozen=True)
class ObservationModel:
    """Sensor locations, observed data vector and the noise model."""

    sensor_locations: np.ndarray
    data: np.ndarray
    noise: NoiseModel

    def __post_init__(self):
        locs = np.asarray(self.sensor_locations, dtype=float)
        data = np.asarray(self.data, dtype=float)
        if len(data) != len(locs):
            raise ContractViolation("data length must match sensor count")
        if len(data) != self.noise.dimension:
            raise ContractViolation("data length must match noise dimension")
        object.__setattr__(self, "sensor_locations", locs)
        object.__setattr__(self, "data", data)

    @property
    def m(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class GridParam:
    """Grid-based discretization: k movable interior points.

    The fixed endpoints are owned by the forward problem and never stored here.
    Point order is irrelevant: solvers sort a copy before marching.
    """

    interior_points: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.interior_points, dtype=float))
        lo, hi = self.domain
        if pts.ndim == 1:
            inside = (pts > lo) & (pts < hi)
        else:
            inside = np.all((pts > lo) & (pts < hi), axis=1)
        if not np.all(inside):
            raise ContractViolation("interior points must lie in the open domain")
        object.__setattr__(self, "interior_points", pts)

    @property
    def k(self) -> int:
        return self.interior_points.shape[0]


BETA_PARAM_BOX = (1.0, 10.0)


@dataclass(frozen=True)
class DensityParam:
    """Density-based discretization: k points drawn as a product-Beta tessellation.

    theta = (alpha1, beta1, alpha2, beta2), each confined to [1, 10].
    """

    k: int
    theta: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        if th.shape != (4,):
            raise ContractViolation("theta must have exactly 4 entries")
        lo, hi = BETA_PARAM_BOX
        if not np.all((th >= lo) & (th <= hi)):
            raise ContractViolation("theta entries must lie in [1, 10]")
        if self.k < 1:
            raise ContractViolation("k must be positive")
        object.__setattr__(self, "theta", th)


DiscretizationParam = Union[GridParam, DensityParam]


@dataclass(frozen=True)
class FiniteVector:
    """Finite-dimensional unknown (e.g. per-segment material parameters)."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


@dataclass(frozen=True)
class Field:
    """Function-valued unknown sampled on a fixed, strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if np.any(np.diff(g) <= 0):
            raise ContractViolation("representation grid must be strictly increasing")
        if g.shape != v.shape:
            raise ContractViolation("field values must match the grid length")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def at(self, x) -> np.ndarray:
        """Linear interpolation between representation-grid nodes."""
        return np.interp(x, self.grid, self.values)


@dataclass(frozen=True)
class PlanarPoint:
    """Point unknown in the open unit square."""

    x: float
    y: float

    def __post_init__(self):
        if not (0.0 < self.x < 1.0 and 0.0 < self.y < 1.0):
            raise ContractViolation("planar point must lie in the open unit square")

    @property
    def values(self) -> np.ndarray:
        return np.array([self.x, self.y])


UnknownState = Union[FiniteVector, Field, PlanarPoint]

ForwardEvaluator = Callable[[UnknownState, DiscretizationParam], np.ndarray]


@dataclass
class SolverStats:
    """Mutable counter for forward-solver failures over a chain."""

    failures: int = 0


@dataclass(frozen=True)
class MoveTallies:
    """Accept/attempt counts per kernel family."""

    u_accepted: int = 0
    u_attempted: int = 0
    fixed_dim_accepted: int = 0
    fixed_dim_attempted: int = 0
    birth_death_accepted: int = 0
    birth_death_attempted: int = 0

    def bump(self, kind: str, accepted: bool) -> "MoveTallies":
        acc = 1 if accepted else 0
        if kind == "u":
            return replace(self, u_accepted=self.u_accepted + acc,
                           u_attempted=self.u_attempted + 1)
        if kind == "fixed_dim":
            return replace(self, fixed_dim_accepted=self.fixed_dim_accepted + acc,
                           fixed_dim_attempted=self.fixed_dim_attempted + 1)
        if kind == "birth_death":
            return replace(self, birth_death_accepted=self.birth_death_accepted + acc,
                           birth_death_attempted=self.birth_death_attempted + 1)
        raise ValueError(f"unknown move kind {kind!r}")


@dataclass(frozen=True)
class ChainState:
    """Current (u, a) with the cached potential and acceptance counters."""

    u: UnknownState
    a: DiscretizationParam
    cached_potential: float
    iteration: int = 0
    tallies: MoveTallies = field(default_factory=MoveTallies)


def gamma_norm_sq(residual: np.ndarray, noise: NoiseModel) -> float:
    """Squared noise-weighted norm: sum_i residual_i^2 / variance_i."""
    r = np.asarray(residual, dtype=float)
    if r.shape != (noise.dimension,):
        raise ContractViolation(
            f"residual length {r.shape} does not match noise dimension {noise.dimension}"
        )
    return float(np.sum(r * r / noise.covariance_diagonal))


def potential(
    u: UnknownState,
    a: DiscretizationParam,
    obs: ObservationModel,
    forward: ForwardEvaluator,
    stats: SolverStats | None = None,
) -> float:
    """Data-misfit potential: half the squared weighted residual of the forward prediction.

    Forward failures (exceptions or non-finite outputs) return +inf and bump
    the failure counter, so the enclosing Metropolis step rejects the proposal
    and the chain survives unstable discretizations.
    """
    try:
        predicted = np.asarray(forward(u, a), dtype=float)
    except SolverFailure:
        if stats is not None:
            stats.failures += 1
        return np.inf
    if predicted.shape != (obs.m,) or not np.all(np.isfinite(predicted)):
        if stats is not None:
            stats.failures += 1
        return np.inf
    return 0.5 * gamma_norm_sq(obs.data - predicted, obs.noise)
