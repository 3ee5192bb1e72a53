import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from gridinfer.core import ContractViolation, GridParam, MoveTallies
from gridinfer.diagnostics import (
    acceptance_summary,
    grid_histogram,
    modal_bucket_midpoint,
    percentile_bands,
    reconstruction_error,
    running_mean,
    subinterval_counts,
    surrogate_tv_experiment,
    tv_distance_discretized,
)

DOMAIN = (0.0, 10.0)


class TestPercentileBands:
    def test_constant_chain(self):
        bands = percentile_bands(np.full((50, 4), 3.0))
        for key in ("p5", "p10", "p90", "p95", "mean"):
            assert np.all(bands[key] == 3.0)

    def test_symmetric_two_value_chain(self):
        samples = np.array([[-1.0], [1.0]] * 500)
        bands = percentile_bands(samples)
        assert bands["p5"][0] == -1.0
        assert bands["p95"][0] == 1.0

    def test_standard_normal_quantile(self):
        rng = np.random.default_rng(0)
        bands = percentile_bands(rng.standard_normal((10_000, 1)))
        assert bands["p5"][0] == pytest.approx(-1.645, abs=0.05)

    def test_empty_chain_raises(self):
        with pytest.raises(ContractViolation):
            percentile_bands(np.empty((0, 3)))

    @given(hnp.arrays(np.float64, (30, 3),
                      elements=st.floats(min_value=-1e6, max_value=1e6)))
    def test_band_monotonicity(self, samples):
        bands = percentile_bands(samples)
        assert np.all(bands["p5"] <= bands["p10"])
        assert np.all(bands["p10"] <= bands["p90"])
        assert np.all(bands["p90"] <= bands["p95"])


class TestGridHistogram:
    def test_single_state_counts(self):
        grids = [GridParam(np.array([0.5, 1.5, 1.7]), DOMAIN)]
        counts = subinterval_counts(grids, DOMAIN)
        assert counts.tolist() == [[1, 2, 0, 0, 0, 0, 0, 0, 0, 0]]

    def test_columns_sum_to_one(self):
        rng = np.random.default_rng(1)
        grids = [GridParam(rng.uniform(0.1, 9.9, rng.integers(5, 40)), DOMAIN)
                 for _ in range(200)]
        _, probs, _ = grid_histogram(grids, DOMAIN)
        assert np.allclose(probs.sum(axis=0), 1.0, atol=1e-12)

    def test_bucket_labels_and_modal_midpoint(self):
        grids = [GridParam(np.array([0.5, 0.6, 0.7]), DOMAIN)] * 10
        labels, probs, mean_counts = grid_histogram(grids, DOMAIN)
        assert labels[0] == "0-1"
        assert labels[1] == "2-3"
        assert modal_bucket_midpoint(probs[:, 0]) == 2.5  # count 3 sits in "2-3"
        assert mean_counts[0] == 3.0


class TestReconstructionError:
    def test_exact_chain_gives_zero(self):
        ref = np.array([1.0, 2.0, 3.0])
        per, total = reconstruction_error(np.tile(ref, (20, 1)), ref)
        assert np.all(per == 0.0)
        assert total == 0.0

    def test_unit_deviation_over_24_sensors(self):
        ref = np.zeros(24)
        per, total = reconstruction_error(np.ones((1, 24)), ref)
        assert np.all(per == 1.0)
        assert total == pytest.approx(np.sqrt(24.0), rel=1e-12)


class TestTvDistance:
    def grid(self, n=2001):
        u = np.linspace(-5, 5, n)
        w = np.full(n, u[1] - u[0])
        return u, w

    def normal_density(self, u, mu):
        d = np.exp(-0.5 * (u - mu) ** 2) / np.sqrt(2 * np.pi)
        return d

    def test_identical_densities(self):
        u, w = self.grid()
        d = self.normal_density(u, 0.0)
        d = d / np.sum(d * w)
        assert tv_distance_discretized(d, d, w) == 0.0

    def test_disjoint_supports(self):
        u, w = self.grid()
        a = np.where(u < 0, 1.0, 0.0)
        b = np.where(u >= 0, 1.0, 0.0)
        a = a / np.sum(a * w)
        b = b / np.sum(b * w)
        assert tv_distance_discretized(a, b, w) == pytest.approx(1.0, abs=1e-9)

    def test_symmetry_and_range(self):
        u, w = self.grid()
        a = self.normal_density(u, 0.0)
        b = self.normal_density(u, 1.0)
        a = a / np.sum(a * w)
        b = b / np.sum(b * w)
        ab = tv_distance_discretized(a, b, w)
        assert ab == tv_distance_discretized(b, a, w)
        assert 0.0 < ab < 1.0

    def test_unnormalized_input_rejected(self):
        u, w = self.grid()
        with pytest.raises(ContractViolation):
            tv_distance_discretized(np.ones_like(u), np.ones_like(u) / 10.0, w)


class TestSurrogateTvExperiment:
    def test_monotone_decrease_and_bounded_ratio(self):
        results = surrogate_tv_experiment()
        eps = [e for e, _ in results]
        tv = [t for _, t in results]
        assert eps == [0.1, 0.05, 0.025, 0.0125]
        for i in range(len(tv) - 1):
            assert tv[i + 1] < tv[i]
        ratios = [t / e for e, t in results]
        assert max(ratios) <= 2.0 * min(ratios)  # first-order behavior, bounded constant


class TestAcceptanceSummary:
    def test_all_accepted(self):
        t = MoveTallies(u_accepted=10, u_attempted=10,
                        fixed_dim_accepted=5, fixed_dim_attempted=5,
                        birth_death_accepted=5, birth_death_attempted=5)
        s = acceptance_summary(t)
        assert s["acceptance_u"] == 1.0
        assert s["acceptance_a"] == 1.0

    def test_combined_a_rate(self):
        t = MoveTallies(u_accepted=0, u_attempted=10,
                        fixed_dim_accepted=3, fixed_dim_attempted=10,
                        birth_death_accepted=1, birth_death_attempted=10)
        assert acceptance_summary(t)["acceptance_a"] == pytest.approx(0.2)


class TestRunningMean:
    def test_constant_trace(self):
        assert np.all(running_mean(np.full(20, 2.5)) == 2.5)

    def test_alternating_trace_converges_to_zero(self):
        trace = np.tile([1.0, -1.0], 500)
        rm = running_mean(trace)
        assert abs(rm[-1]) < 1e-12
        assert abs(rm[-2]) <= 1.0 / 999

    def test_iid_normal_within_clt_band(self):
        rng = np.random.default_rng(2)
        trace = rng.standard_normal(10_000)
        rm = running_mean(trace)
        assert abs(rm[-1]) < 3.0 / np.sqrt(10_000)
