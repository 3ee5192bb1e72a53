"""Chain statistics: percentile bands, grid-occupancy tables, reconstruction
error, acceptance summaries, running means, and the discretized total-variation
bound experiment.

Everything here is a pure reduction over the thinned chain record; no solver
calls except through values already stored on the record.
"""

from __future__ import annotations

import numpy as np

from .core import ContractViolation, GridParam, MoveTallies


PERCENTILE_LEVELS = (5.0, 10.0, 90.0, 95.0)


def percentile_bands(samples: np.ndarray, levels=PERCENTILE_LEVELS):
    """Per-coordinate empirical quantiles (linear interpolation) plus the mean.

    samples: (n_states, n_coordinates). Returns dict level -> vector, with the
    mean under the key "mean".
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ContractViolation("percentile_bands needs a non-empty (n, d) sample array")
    bands = {f"p{level:g}": np.percentile(arr, level, axis=0) for level in levels}
    bands["mean"] = arr.mean(axis=0)
    return bands


def subinterval_counts(grids, domain: tuple[float, float], n_subintervals: int = 10) -> np.ndarray:
    """Count of grid points per unit subinterval for each recorded state."""
    lo, hi = domain
    edges = np.linspace(lo, hi, n_subintervals + 1)
    counts = np.empty((len(grids), n_subintervals), dtype=int)
    for i, g in enumerate(grids):
        if not isinstance(g, GridParam):
            raise ContractViolation("grid histogram requires grid-based states")
        counts[i] = np.histogram(g.interior_points, bins=edges)[0]
    return counts


def grid_histogram(grids, domain: tuple[float, float], n_subintervals: int = 10,
                   bucket_width: int = 2):
    """Occupancy distribution in the paired-count-bucket by subinterval layout.

    Returns (bucket_labels, probabilities, mean_counts): probabilities has one
    row per count bucket (e.g. "2-3") and one column per subinterval; each
    column sums to one.
    """
    counts = subinterval_counts(grids, domain, n_subintervals)
    max_count = int(counts.max(initial=0))
    n_buckets = max_count // bucket_width + 1
    probs = np.zeros((n_buckets, n_subintervals))
    buckets = counts // bucket_width
    for j in range(n_subintervals):
        binned = np.bincount(buckets[:, j], minlength=n_buckets)
        probs[:, j] = binned / len(grids)
    labels = [f"{b * bucket_width}-{(b + 1) * bucket_width - 1}" for b in range(n_buckets)]
    return labels, probs, counts.mean(axis=0)


def modal_bucket_midpoint(probs_column: np.ndarray, bucket_width: int = 2) -> float:
    """Midpoint of the most probable count bucket in one subinterval column."""
    b = int(np.argmax(probs_column))
    return b * bucket_width + (bucket_width - 1) / 2.0


def reconstruction_error(chain_outputs: np.ndarray, reference: np.ndarray):
    """Root-sum-square discrepancy between chain forward outputs and the
    fine-grid reference, per sensor and aggregated."""
    outs = np.asarray(chain_outputs, dtype=float)
    ref = np.asarray(reference, dtype=float)
    sq = (outs - ref[None, :]) ** 2
    per_sensor = np.sqrt(sq.sum(axis=0))
    return per_sensor, float(np.sqrt(sq.sum()))


def acceptance_summary(tallies: MoveTallies) -> dict[str, float]:
    """Averaged acceptance probabilities per kernel family and combined a-moves."""
    def rate(acc, att):
        return acc / att if att > 0 else float("nan")

    a_attempted = tallies.fixed_dim_attempted + tallies.birth_death_attempted
    a_accepted = tallies.fixed_dim_accepted + tallies.birth_death_accepted
    return {
        "acceptance_u": rate(tallies.u_accepted, tallies.u_attempted),
        "acceptance_fixed_dim": rate(tallies.fixed_dim_accepted, tallies.fixed_dim_attempted),
        "acceptance_birth_death": rate(tallies.birth_death_accepted, tallies.birth_death_attempted),
        "acceptance_a": rate(a_accepted, a_attempted),
    }


def running_mean(trace: np.ndarray) -> np.ndarray:
    t = np.asarray(trace, dtype=float)
    return np.cumsum(t) / np.arange(1, len(t) + 1)


def tv_distance_discretized(density_a: np.ndarray, density_b: np.ndarray,
                            weights: np.ndarray) -> float:
    """Half the weighted L1 distance between two quadrature-normalized densities."""
    a = np.asarray(density_a, dtype=float)
    b = np.asarray(density_b, dtype=float)
    w = np.asarray(weights, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise ContractViolation("densities must be nonnegative")
    for name, d in (("first", a), ("second", b)):
        mass = float(np.sum(d * w))
        if abs(mass - 1.0) > 1e-8:
            raise ContractViolation(f"{name} density is not normalized (mass {mass:.2e})")
    return 0.5 * float(np.sum(np.abs(a - b) * w))


def surrogate_tv_experiment(epsilons=(0.1, 0.05, 0.025, 0.0125),
                            y: float = 0.5, noise_std: float = 0.5,
                            n_quad: int = 4001):
    """Brute-force check that surrogate-averaged posteriors converge in TV.

    Scalar toy problem: standard normal prior on u, identity forward map
    g(u) = u, surrogate family g_a(u) = u + eps * e(a) over a small discrete
    set of error patterns with uniform weight. Both the exact posterior and
    the surrogate-marginalized posterior are computed by quadrature on a fixed
    u-grid; returns the list of (eps, tv distance) pairs.
    """
    u = np.linspace(-6.0, 6.0, n_quad)
    w = np.full(n_quad, u[1] - u[0])
    prior = np.exp(-0.5 * u * u)
    # one-sided patterns: the leading-order term survives the mixture average,
    # so the measured distance scales linearly with the error amplitude
    error_patterns = np.array([0.25, 0.5, 0.75, 1.0])

    def normalize(unnorm):
        return unnorm / np.sum(unnorm * w)

    exact = normalize(prior * np.exp(-0.5 * ((y - u) / noise_std) ** 2))
    results = []
    for eps in epsilons:
        mixture = np.zeros_like(u)
        for e in error_patterns:
            mixture += np.exp(-0.5 * ((y - u - eps * e) / noise_std) ** 2)
        surrogate = normalize(prior * mixture / len(error_patterns))
        results.append((eps, tv_distance_discretized(surrogate, exact, w)))
    return results
