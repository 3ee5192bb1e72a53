"""Prior distributions: samplers and the log-densities the kernels need.

Gaussian-type priors (i.i.d. vector, squared-exponential Gaussian process,
Wiener path) expose both a full draw and a centered draw so the pCN proposal
can be formed around a nonzero mean. Grid-size priors expose an unnormalized
log-pmf; only ratios ever enter acceptance probabilities, so truncation to the
allowed size range needs no renormalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log

import numpy as np

from .core import ContractViolation, Field, FiniteVector


@dataclass(frozen=True)
class GaussianVectorPrior:
    """i.i.d. N(mean, variance) on each of d coordinates."""

    mean: float
    variance: float
    dimension: int

    def __post_init__(self):
        if self.variance < 0:
            raise ContractViolation("variance must be nonnegative")

    @property
    def mean_values(self) -> np.ndarray:
        return np.full(self.dimension, self.mean)

    def sample(self, rng: np.random.Generator) -> FiniteVector:
        return FiniteVector(self.mean_values + self.sample_centered(rng))

    def sample_centered(self, rng: np.random.Generator) -> np.ndarray:
        return np.sqrt(self.variance) * rng.standard_normal(self.dimension)

    def wrap(self, values: np.ndarray) -> FiniteVector:
        return FiniteVector(values)


def squared_exponential_kernel(x, x_prime, variance: float = 50.0,
                               length_denominator: float = 0.5):
    """Covariance variance * exp(-(x - x')^2 / length_denominator)."""
    d = np.subtract(x, x_prime)
    return variance * np.exp(-(d * d) / length_denominator)


# Jitter schedule for rank-deficient squared-exponential covariances on fine
# grids: start at 1e-8 * variance, escalate by 10x up to 1e-4 * variance.
_JITTER_START = 1e-8
_JITTER_CEILING = 1e-4


@dataclass(frozen=True)
class GaussianProcessPrior:
    """Stationary GP on a fixed representation grid, squared-exponential kernel."""

    mean: float
    kernel_variance: float
    length_denominator: float
    grid: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))

    def covariance(self) -> np.ndarray:
        x = self.grid
        return squared_exponential_kernel(
            x[:, None], x[None, :], self.kernel_variance, self.length_denominator
        )

    def cholesky_factor(self) -> np.ndarray:
        cached = getattr(self, "_factor", None)
        if cached is not None:
            return cached
        cov = self.covariance()
        asym = np.max(np.abs(cov - cov.T))
        if asym >= 1e-12:
            raise ContractViolation(f"covariance asymmetry {asym:g} exceeds 1e-12")
        jitter = _JITTER_START * self.kernel_variance
        ceiling = _JITTER_CEILING * self.kernel_variance
        factor = None
        while factor is None:
            try:
                factor = np.linalg.cholesky(cov + jitter * np.eye(len(self.grid)))
            except np.linalg.LinAlgError:
                jitter *= 10.0
                if jitter > ceiling:
                    raise
        object.__setattr__(self, "_factor", factor)
        return factor

    @property
    def mean_values(self) -> np.ndarray:
        return np.full(len(self.grid), self.mean)

    def sample(self, rng: np.random.Generator) -> Field:
        return Field(self.grid, self.mean_values + self.sample_centered(rng))

    def sample_centered(self, rng: np.random.Generator) -> np.ndarray:
        return self.cholesky_factor() @ rng.standard_normal(len(self.grid))

    def wrap(self, values: np.ndarray) -> Field:
        return Field(self.grid, values)


@dataclass(frozen=True)
class WienerPrior:
    """Standard Wiener measure sampled on a representation grid starting at 0.

    Values between grid nodes are linear interpolants; increments over grid
    steps are independent N(0, dt).
    """

    grid: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g[0] != 0.0:
            raise ContractViolation("Wiener representation grid must start at 0")
        object.__setattr__(self, "grid", g)

    @property
    def mean_values(self) -> np.ndarray:
        return np.zeros(len(self.grid))

    def sample(self, rng: np.random.Generator) -> Field:
        return Field(self.grid, self.sample_centered(rng))

    def sample_centered(self, rng: np.random.Generator) -> np.ndarray:
        dt = np.diff(self.grid)
        increments = np.sqrt(dt) * rng.standard_normal(len(dt))
        path = np.empty(len(self.grid))
        path[0] = 0.0
        np.cumsum(increments, out=path[1:])
        return path

    def wrap(self, values: np.ndarray) -> Field:
        return Field(self.grid, values)


GaussianTypePrior = GaussianVectorPrior | GaussianProcessPrior | WienerPrior


@dataclass(frozen=True)
class UniformBoxPrior:
    """Uniform distribution on an axis-aligned box, one (lo, hi) per coordinate."""

    bounds: tuple[tuple[float, float], ...]

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return lo + (hi - lo) * rng.random(len(self.bounds))

    def contains(self, values) -> bool:
        v = np.asarray(values, dtype=float)
        return all(b[0] <= x <= b[1] for b, x in zip(self.bounds, v))


@dataclass(frozen=True)
class PoissonKPrior:
    """Poisson prior on the grid size, truncated to the support [k_min, k_max].

    The paper's experiments never state the allowed size range; the default is
    a generous [2, 10 * mean] so the truncation never binds in practice.
    """

    mean: float
    k_min: int = 2
    k_max: int | None = None

    def __post_init__(self):
        if self.k_max is None:
            object.__setattr__(self, "k_max", int(10 * self.mean))

    def log_pmf(self, k: int) -> float:
        if k < self.k_min or k > self.k_max:
            return -np.inf
        return k * log(self.mean) - self.mean - lgamma(k + 1)


@dataclass(frozen=True)
class PointMassKPrior:
    """Degenerate prior pinning the grid size to a single value."""

    k: int

    def log_pmf(self, k: int) -> float:
        return 0.0 if k == self.k else -np.inf


KPrior = PoissonKPrior | PointMassKPrior


def sample_uniform_box(bounds, rng: np.random.Generator) -> np.ndarray:
    return UniformBoxPrior(tuple(tuple(b) for b in bounds)).sample(rng)
