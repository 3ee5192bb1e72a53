"""Metropolis-within-Gibbs over the joint (input, discretization) posterior.

One sweep does a Stage I update of the unknown input u given the current
discretization (pCN for Gaussian-type priors, box random walk for the uniform
planar prior), then a Stage II update of the discretization: with probability
zeta a fixed-dimension move (grid-point relocation, or a random walk on the
density parameters), otherwise a birth/death move on the number of grid
points. All acceptance decisions go through the small ratio helpers below so
the transition-matrix oracle tests exercise exactly the arithmetic the chain
uses.

Grid states are treated as unordered point sets: solvers sort a copy, the
location prior is exchangeable, and birth appends / death deletes uniformly
chosen points, which together make the simple prior-ratio acceptance rule
exact on the space of point configurations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .core import (
    ChainState,
    ContractViolation,
    DensityParam,
    GridParam,
    ObservationModel,
    SolverStats,
    potential,
)
from .priors import GaussianTypePrior, KPrior, UniformBoxPrior


@dataclass(frozen=True)
class SamplerConfig:
    """Chain-level knobs shared by every scenario."""

    beta: float
    zeta: float
    n_iterations: int
    seed: int
    k_step_choices: tuple[int, ...] = (-1, 1)
    theta_step_size: float = 0.5
    u_walk_step_size: float = 0.1
    thin: int = 10
    burn_in_fraction: float = 0.2

    def __post_init__(self):
        if not (0.0 <= self.beta <= 1.0):
            raise ContractViolation("beta must lie in [0, 1]")
        if not (0.0 <= self.zeta <= 1.0):
            raise ContractViolation("zeta must lie in [0, 1]")
        if self.n_iterations < 0:
            raise ContractViolation("n_iterations must be nonnegative")
        steps = tuple(int(s) for s in self.k_step_choices)
        if any(s == 0 for s in steps) or sorted(steps) != sorted(-s for s in steps):
            raise ContractViolation("k-step set must be symmetric and exclude 0")
        object.__setattr__(self, "k_step_choices", steps)


def metropolis_accept_prob(psi_current: float, psi_proposed: float,
                           log_prior_ratio: float = 0.0) -> float:
    """min{1, exp(log_prior_ratio + psi_current - psi_proposed)}.

    Infinities follow rejection semantics: a proposal with infinite potential
    is never accepted; if the current state is already infinite and the
    proposal is not worse, accept so the chain can leave the failure plateau.
    """
    if np.isneginf(log_prior_ratio):
        return 0.0
    if np.isinf(psi_current) and psi_current > 0:
        return 1.0
    if np.isinf(psi_proposed) and psi_proposed > 0:
        return 0.0
    log_r = log_prior_ratio + psi_current - psi_proposed
    if log_r >= 0:
        return 1.0
    return float(np.exp(log_r))


def _accept(rng: np.random.Generator, prob: float) -> bool:
    return rng.random() < prob


def pcn_step(
    state: ChainState,
    prior: GaussianTypePrior,
    obs: ObservationModel,
    forward,
    beta: float,
    rng: np.random.Generator,
    stats: SolverStats | None = None,
) -> ChainState:
    """Prior-reversible autoregressive proposal on u; accepts on potential difference only.

    The proposal contracts the centered state by sqrt(1 - beta^2) and adds a
    centered prior draw scaled by beta; the prior mean is reinstated so the
    move is reversible for nonzero-mean Gaussian priors.
    """
    mean = prior.mean_values
    centered = state.u.values - mean
    xi = prior.sample_centered(rng)
    proposed_values = mean + np.sqrt(1.0 - beta * beta) * centered + beta * xi
    proposed_u = prior.wrap(proposed_values)
    psi_new = potential(proposed_u, state.a, obs, forward, stats)
    accepted = _accept(rng, metropolis_accept_prob(state.cached_potential, psi_new))
    tallies = state.tallies.bump("u", accepted)
    if accepted:
        return replace(state, u=proposed_u, cached_potential=psi_new, tallies=tallies)
    return replace(state, tallies=tallies)


def pcn_kernel(prior, obs, forward, beta, stats=None) -> Callable:
    if not isinstance(prior, GaussianTypePrior):
        raise ContractViolation("pCN requires a Gaussian-type prior on u")
    return lambda state, rng: pcn_step(state, prior, obs, forward, beta, rng, stats)


def box_walk_step(
    state: ChainState,
    prior: UniformBoxPrior,
    obs: ObservationModel,
    forward,
    step_size: float,
    rng: np.random.Generator,
    wrap,
    stats: SolverStats | None = None,
) -> ChainState:
    """Gaussian random walk on a box-supported uniform prior for the unknown.

    Proposals leaving the box have zero prior density and are rejected outright.
    """
    proposed_values = state.u.values + step_size * rng.standard_normal(len(state.u.values))
    tallies_rejected = state.tallies.bump("u", False)
    if not prior.contains(proposed_values):
        return replace(state, tallies=tallies_rejected)
    proposed_u = wrap(proposed_values)
    psi_new = potential(proposed_u, state.a, obs, forward, stats)
    if _accept(rng, metropolis_accept_prob(state.cached_potential, psi_new)):
        return replace(state, u=proposed_u, cached_potential=psi_new,
                       tallies=state.tallies.bump("u", True))
    return replace(state, tallies=tallies_rejected)


def box_walk_kernel(prior, obs, forward, step_size, wrap, stats=None) -> Callable:
    return lambda state, rng: box_walk_step(state, prior, obs, forward,
                                            step_size, rng, wrap, stats)


def relocation_step(
    state: ChainState,
    obs: ObservationModel,
    forward,
    domain: tuple[float, float],
    rng: np.random.Generator,
    stats: SolverStats | None = None,
) -> ChainState:
    """Replace one uniformly chosen grid point by a fresh uniform draw in the domain."""
    if not isinstance(state.a, GridParam):
        raise ContractViolation("relocation requires a grid-based discretization")
    k = state.a.k
    if k == 0:
        return replace(state, tallies=state.tallies.bump("fixed_dim", False))
    idx = int(rng.integers(k))
    lo, hi = domain
    new_point = lo + (hi - lo) * rng.random()
    points = state.a.interior_points.copy()
    points[idx] = new_point
    proposed_a = GridParam(points, state.a.domain)
    psi_new = potential(state.u, proposed_a, obs, forward, stats)
    if _accept(rng, metropolis_accept_prob(state.cached_potential, psi_new)):
        return replace(state, a=proposed_a, cached_potential=psi_new,
                       tallies=state.tallies.bump("fixed_dim", True))
    return replace(state, tallies=state.tallies.bump("fixed_dim", False))


def relocation_kernel(obs, forward, domain, stats=None) -> Callable:
    return lambda state, rng: relocation_step(state, obs, forward, domain, rng, stats)


def birth_death_step(
    state: ChainState,
    obs: ObservationModel,
    forward,
    domain: tuple[float, float],
    k_prior: KPrior,
    k_step_choices: tuple[int, ...],
    rng: np.random.Generator,
    stats: SolverStats | None = None,
) -> ChainState:
    """Symmetric random-walk proposal on the grid size with uniform birth locations.

    Births append uniform draws; deaths delete uniformly chosen points. Sizes
    outside the k-prior support (log-pmf -inf) are rejected before any solver
    work. For density-based discretizations the same size update applies with
    the density parameters untouched.
    """
    a = state.a
    k = a.k
    step = int(rng.choice(np.asarray(k_step_choices)))
    k_new = k + step
    log_ratio = k_prior.log_pmf(k_new) - k_prior.log_pmf(k)
    tallies_rejected = state.tallies.bump("birth_death", False)
    if np.isneginf(log_ratio):
        return replace(state, tallies=tallies_rejected)

    if isinstance(a, GridParam):
        lo, hi = a.domain
        if k_new > k:
            births = lo + (hi - lo) * rng.random(k_new - k)
            points = np.concatenate([a.interior_points, births])
        else:
            keep = rng.choice(k, size=k_new, replace=False)
            points = a.interior_points[np.sort(keep)]
        proposed_a: GridParam | DensityParam = GridParam(points, a.domain)
    else:
        proposed_a = DensityParam(k_new, a.theta)

    psi_new = potential(state.u, proposed_a, obs, forward, stats)
    if _accept(rng, metropolis_accept_prob(state.cached_potential, psi_new, log_ratio)):
        return replace(state, a=proposed_a, cached_potential=psi_new,
                       tallies=state.tallies.bump("birth_death", True))
    return replace(state, tallies=tallies_rejected)


def birth_death_kernel(obs, forward, domain, k_prior, k_step_choices, stats=None) -> Callable:
    return lambda state, rng: birth_death_step(
        state, obs, forward, domain, k_prior, k_step_choices, rng, stats)


def density_param_step(
    state: ChainState,
    obs: ObservationModel,
    forward,
    box: UniformBoxPrior,
    step_size: float,
    rng: np.random.Generator,
    stats: SolverStats | None = None,
) -> ChainState:
    """Gaussian random walk on the Beta density parameters inside their box.

    The tessellation behind the proposed parameters is regenerated
    deterministically by the forward evaluator, so the potential remains a
    function of (u, a) alone.
    """
    if not isinstance(state.a, DensityParam):
        raise ContractViolation("density-parameter step requires a density-based discretization")
    proposed_theta = state.a.theta + step_size * rng.standard_normal(4)
    tallies_rejected = state.tallies.bump("fixed_dim", False)
    if not box.contains(proposed_theta):
        return replace(state, tallies=tallies_rejected)
    proposed_a = DensityParam(state.a.k, proposed_theta)
    psi_new = potential(state.u, proposed_a, obs, forward, stats)
    if _accept(rng, metropolis_accept_prob(state.cached_potential, psi_new)):
        return replace(state, a=proposed_a, cached_potential=psi_new,
                       tallies=state.tallies.bump("fixed_dim", True))
    return replace(state, tallies=tallies_rejected)


def density_param_kernel(obs, forward, box, step_size, stats=None) -> Callable:
    return lambda state, rng: density_param_step(state, obs, forward, box,
                                                 step_size, rng, stats)


@dataclass
class ChainRecord:
    """Thinned chain plus full tallies; the raw material for all diagnostics."""

    iterations: list[int] = field(default_factory=list)
    u_values: list[np.ndarray] = field(default_factory=list)
    a_params: list = field(default_factory=list)
    potentials: list[float] = field(default_factory=list)
    forward_outputs: list[np.ndarray] = field(default_factory=list)
    final_state: ChainState | None = None
    solver_failures: int = 0
    thin: int = 10
    burn_in_fraction: float = 0.2
    n_iterations: int = 0

    def kept_after_burn_in(self) -> np.ndarray:
        """Indices into the thinned record past the burn-in cut."""
        cut = self.burn_in_fraction * self.n_iterations
        return np.array([i for i, it in enumerate(self.iterations) if it >= cut], dtype=int)


def run_gibbs(
    initial: ChainState,
    config: SamplerConfig,
    u_kernel: Callable,
    fixed_dim_kernel: Callable | None,
    birth_death: Callable | None,
    forward=None,
    obs: ObservationModel | None = None,
    stats: SolverStats | None = None,
) -> ChainRecord:
    """Alternate Stage I and Stage II kernels for the configured number of sweeps.

    Stage II draws the fixed-dimension move with probability zeta each
    iteration, independently; otherwise the birth/death move runs. Every
    thin-th state is recorded (plus the initial state), along with the forward
    output at the recorded state when the evaluator is supplied.
    """
    rng = np.random.default_rng(config.seed)
    record = ChainRecord(thin=config.thin, burn_in_fraction=config.burn_in_fraction,
                         n_iterations=config.n_iterations)

    def snapshot(state: ChainState):
        record.iterations.append(state.iteration)
        record.u_values.append(np.array(state.u.values, copy=True))
        record.a_params.append(state.a)
        record.potentials.append(state.cached_potential)
        if forward is not None and obs is not None:
            try:
                out = np.asarray(forward(state.u, state.a), dtype=float)
            except Exception:
                out = np.full(obs.m, np.nan)
            record.forward_outputs.append(out)

    state = initial
    snapshot(state)
    for n in range(1, config.n_iterations + 1):
        state = u_kernel(state, rng)
        if fixed_dim_kernel is not None and rng.random() < config.zeta:
            state = fixed_dim_kernel(state, rng)
        elif birth_death is not None:
            state = birth_death(state, rng)
        state = replace(state, iteration=n)
        if n % config.thin == 0:
            snapshot(state)
    record.final_state = state
    if stats is not None:
        record.solver_failures = stats.failures
    return record
