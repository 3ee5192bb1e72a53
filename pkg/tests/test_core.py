import numpy as np
import pytest

from gridinfer.core import (
    ChainState,
    ContractViolation,
    Field,
    FiniteVector,
    GridParam,
    DensityParam,
    NoiseModel,
    ObservationModel,
    PlanarPoint,
    SolverFailure,
    SolverStats,
    gamma_norm_sq,
    potential,
)


def make_obs(data, variances):
    data = np.asarray(data, dtype=float)
    return ObservationModel(np.arange(len(data), dtype=float), data,
                            NoiseModel(np.asarray(variances, dtype=float)))


class TestNoiseModel:
    def test_rejects_nonpositive_variance(self):
        with pytest.raises(ContractViolation):
            NoiseModel(np.array([1.0, 0.0]))

    def test_dimension(self):
        assert NoiseModel(np.array([1.0, 2.0, 3.0])).dimension == 3


class TestObservationModel:
    def test_rejects_length_mismatch(self):
        with pytest.raises(ContractViolation):
            ObservationModel(np.array([0.0]), np.array([1.0, 2.0]),
                             NoiseModel(np.array([1.0, 1.0])))

    def test_rejects_noise_mismatch(self):
        with pytest.raises(ContractViolation):
            ObservationModel(np.array([0.0, 1.0]), np.array([1.0, 2.0]),
                             NoiseModel(np.array([1.0])))


class TestDomainTypes:
    def test_grid_param_open_domain(self):
        with pytest.raises(ContractViolation):
            GridParam(np.array([0.0, 5.0]), (0.0, 10.0))
        g = GridParam(np.array([3.0, 1.0]), (0.0, 10.0))
        assert g.k == 2

    def test_density_param_box(self):
        with pytest.raises(ContractViolation):
            DensityParam(10, np.array([0.5, 1.0, 1.0, 1.0]))
        with pytest.raises(ContractViolation):
            DensityParam(10, np.array([1.0, 1.0, 1.0]))

    def test_field_requires_increasing_grid(self):
        with pytest.raises(ContractViolation):
            Field(np.array([0.0, 0.0, 1.0]), np.zeros(3))

    def test_planar_point_open_square(self):
        with pytest.raises(ContractViolation):
            PlanarPoint(0.0, 0.5)
        p = PlanarPoint(0.25, 0.75)
        assert p.values.tolist() == [0.25, 0.75]


class TestGammaNormSq:
    def test_zero_residual(self):
        assert gamma_norm_sq(np.zeros(3), NoiseModel(np.array([1.0, 2.0, 3.0]))) == 0.0

    def test_unit_case(self):
        assert gamma_norm_sq(np.array([1.0, 0.0]), NoiseModel(np.ones(2))) == 1.0

    def test_scaled_coordinate(self):
        # (0.2 / 0.1)^2 = 4
        got = gamma_norm_sq(np.array([0.2]), NoiseModel(np.array([0.01])))
        assert got == pytest.approx(4.0, rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ContractViolation):
            gamma_norm_sq(np.ones(2), NoiseModel(np.ones(3)))


class TestPotential:
    def test_perfect_fit(self):
        obs = make_obs([1.0, 2.0], [1.0, 1.0])
        assert potential(FiniteVector([0.0]), None, obs, lambda u, a: obs.data) == 0.0

    def test_unit_residual(self):
        obs = make_obs([1.0, 1.0], [1.0, 1.0])
        got = potential(FiniteVector([0.0]), None, obs, lambda u, a: np.zeros(2))
        assert got == pytest.approx(1.0)

    def test_nonfinite_output_gives_inf_and_counts(self):
        obs = make_obs([1.0], [1.0])
        stats = SolverStats()
        got = potential(FiniteVector([0.0]), None, obs,
                        lambda u, a: np.array([np.nan]), stats)
        assert np.isinf(got)
        assert stats.failures == 1

    def test_solver_failure_gives_inf_and_counts(self):
        obs = make_obs([1.0], [1.0])
        stats = SolverStats()

        def broken(u, a):
            raise SolverFailure("boom")

        assert np.isinf(potential(FiniteVector([0.0]), None, obs, broken, stats))
        assert stats.failures == 1


def test_potential_invariant_under_grid_permutation():
    from gridinfer.beam import BeamConfig, beam_forward

    cfg = BeamConfig()
    rng = np.random.default_rng(11)
    pts = rng.uniform(0.05, 9.95, size=40)
    sensors = np.array([2.0, 5.0, 8.0])
    obs = make_obs([0.1, 0.2, 0.3], [1e-3] * 3)
    forward = beam_forward(sensors, cfg)
    u = FiniteVector(np.full(5, 200.0))
    psi_sorted = potential(u, GridParam(np.sort(pts), cfg.domain), obs, forward)
    psi_shuffled = potential(u, GridParam(rng.permutation(pts), cfg.domain), obs, forward)
    assert psi_sorted == psi_shuffled


def test_cached_potential_matches_recomputation():
    from gridinfer.beam import BeamConfig, beam_forward, generate_beam_data
    from gridinfer.priors import GaussianVectorPrior, PoissonKPrior
    from gridinfer.samplers import (SamplerConfig, birth_death_kernel, pcn_kernel,
                                    relocation_kernel, run_gibbs)

    cfg = BeamConfig()
    sensors = np.array([3.0, 6.0, 9.0])
    true_u = FiniteVector(np.array([190.0, 213.0, 195.0, 208.0, 200.0]))
    obs, _ = generate_beam_data(true_u, sensors, cfg, seed=1)
    forward = beam_forward(sensors, cfg)
    prior = GaussianVectorPrior(200.0, 25.0, 5)
    init_a = GridParam(np.linspace(0.5, 9.5, 30), cfg.domain)
    init_u = FiniteVector(prior.mean_values)
    state = ChainState(init_u, init_a, potential(init_u, init_a, obs, forward))
    sc = SamplerConfig(beta=0.1, zeta=0.5, n_iterations=200, seed=4, thin=1)
    record = run_gibbs(state, sc,
                       pcn_kernel(prior, obs, forward, 0.1),
                       relocation_kernel(obs, forward, cfg.domain),
                       birth_death_kernel(obs, forward, cfg.domain,
                                          PoissonKPrior(30.0), (-1, 1)))
    final = record.final_state
    fresh = potential(final.u, final.a, obs, forward)
    assert final.cached_potential == pytest.approx(fresh, rel=1e-10)
