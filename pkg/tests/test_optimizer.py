import numpy as np
import pytest

from codel.errors import ContractError, ParameterError
from codel.mlp import CandidateSolution
from codel.optimizer import (
    CodelConfig,
    Population,
    _lloyd_iterations,
    binomial_crossover,
    cluster_update,
    kmeans,
    mutate,
    opposite,
    qobl_population,
    quasi_opposite,
    run_codel,
    run_plain_de,
    select,
)


def _sphere(v):
    return float(np.sum(np.asarray(v) ** 2))


def _evaluated_population(vectors, objective, nfe=0, iteration=0):
    members = tuple(
        CandidateSolution(np.asarray(v, dtype=float), objective(v))
        for v in vectors
    )
    return Population(members=members, nfe=nfe, iteration=iteration,
                      best=min(members, key=lambda m: m.fitness))


class _FixedChoice:
    """Stands in for an rng whose choice() is pinned to one answer."""

    def __init__(self, picks):
        self.picks = np.asarray(picks)

    def choice(self, options, size, replace):
        assert size == self.picks.size and not replace
        return self.picks


class TestOpposite:

    def test_reflection(self):
        assert opposite(0.3, 0.0, 1.0) == 0.7
        assert opposite(0.5, 0.0, 1.0) == 0.5

    def test_out_of_bounds_clamped_first(self):
        assert opposite(2.0, 0.0, 1.0) == 0.0
        assert opposite(-3.0, 0.0, 1.0) == 1.0

    def test_involution_on_symmetric_bounds_is_exact(self):
        """With a = -b the reflection is a plain negation, so it is exact."""
        rng = np.random.default_rng(0)
        x = rng.uniform(-10, 10, 200)
        np.testing.assert_array_equal(opposite(opposite(x, -10, 10), -10, 10), x)

    def test_involution_on_general_bounds(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a = rng.uniform(-5, 0)
            b = a + rng.uniform(0.5, 10)
            x = rng.uniform(a, b)
            assert np.isclose(opposite(opposite(x, a, b), a, b), x, rtol=1e-12)


class TestQuasiOpposite:

    def test_low_sample_lands_in_upper_half(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            q = quasi_opposite(0.0, 0.0, 1.0, rng)
            assert 0.5 <= q <= 1.0

    def test_high_sample_lands_between_opposite_and_midpoint(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            q = quasi_opposite(0.9, 0.0, 1.0, rng)
            assert 0.1 <= q <= 0.5

    def test_midpoint_is_fixed(self):
        rng = np.random.default_rng(4)
        assert quasi_opposite(0.5, 0.0, 1.0, rng) == 0.5

    def test_always_inside_ordered_interval(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            a = rng.uniform(-8, 0)
            b = a + rng.uniform(1, 12)
            x = rng.uniform(a, b)
            mid = (a + b) / 2.0
            opp = a + b - x
            q = quasi_opposite(x, a, b, rng)
            assert min(mid, opp) <= q <= max(mid, opp)
            assert a <= q <= b


class TestSelect:

    def test_better_trial_wins(self):
        target = CandidateSolution(np.zeros(2), 20.0)
        trial = CandidateSolution(np.ones(2), 10.0)
        assert select(target, trial) is trial

    def test_better_target_survives(self):
        target = CandidateSolution(np.zeros(2), 10.0)
        trial = CandidateSolution(np.ones(2), 20.0)
        assert select(target, trial) is target

    def test_tie_goes_to_trial(self):
        target = CandidateSolution(np.zeros(2), 10.0)
        trial = CandidateSolution(np.ones(2), 10.0)
        assert select(target, trial) is trial

    def test_unevaluated_input_rejected(self):
        target = CandidateSolution(np.zeros(2), 10.0)
        with pytest.raises(ContractError):
            select(target, CandidateSolution(np.ones(2)))


class TestMutate:

    def test_difference_arithmetic(self):
        vectors = np.array([[1.0, 1.0], [2.0, 0.0], [0.0, 2.0], [9.0, 9.0]])
        v = mutate(vectors, 3, 0.5, -10.0, 10.0, _FixedChoice([0, 1, 2]))
        np.testing.assert_array_equal(v, [2.0, 0.0])

    def test_zero_difference_returns_base(self):
        vectors = np.array([[1.0, 1.0], [3.0, 3.0], [3.0, 3.0], [9.0, 9.0]])
        v = mutate(vectors, 3, 0.5, -10.0, 10.0, _FixedChoice([0, 1, 2]))
        np.testing.assert_array_equal(v, [1.0, 1.0])

    def test_zero_scale_returns_base(self):
        rng = np.random.default_rng(6)
        vectors = rng.uniform(-5, 5, (6, 3))
        v = mutate(vectors, 0, 0.0, -10.0, 10.0, _FixedChoice([3, 1, 4]))
        np.testing.assert_array_equal(v, vectors[3])

    def test_result_clamped_to_bounds(self):
        rng = np.random.default_rng(7)
        vectors = np.array([[1.0], [-1.0], [1.0], [-1.0], [1.0], [-1.0]])
        for _ in range(50):
            v = mutate(vectors, 0, 2.0, -1.0, 1.0, rng)
            assert -1.0 <= v[0] <= 1.0

    def test_needs_four_members(self):
        with pytest.raises(ParameterError):
            mutate(np.zeros((3, 2)), 0, 0.5, -1.0, 1.0, np.random.default_rng(8))


class TestBinomialCrossover:

    def test_full_rate_copies_mutant(self):
        rng = np.random.default_rng(9)
        target = np.zeros(10)
        mutant = np.arange(10.0)
        np.testing.assert_array_equal(
            binomial_crossover(target, mutant, 1.0, rng), mutant
        )

    def test_zero_rate_flips_exactly_one_component(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            u = binomial_crossover(np.zeros(8), np.ones(8), 0.0, rng)
            assert np.count_nonzero(u) == 1

    def test_identical_parents_are_a_fixed_point(self):
        rng = np.random.default_rng(11)
        x = np.arange(5.0)
        for cr in (0.0, 0.4, 1.0):
            np.testing.assert_array_equal(binomial_crossover(x, x, cr, rng), x)

    def test_components_come_from_a_parent(self):
        rng = np.random.default_rng(12)
        target = np.zeros(6)
        mutant = np.full(6, 7.0)
        for _ in range(50):
            u = binomial_crossover(target, mutant, 0.5, rng)
            assert np.all(np.isin(u, (0.0, 7.0)))


class TestQoblPopulation:

    def test_optimum_survives_union(self):
        rng = np.random.default_rng(13)
        vectors = list(rng.uniform(-10, 10, (7, 3)))
        vectors.append(np.zeros(3))
        pop = _evaluated_population(vectors, _sphere, nfe=8)
        config = CodelConfig(population_size=8, nfe_max=1000)
        out = qobl_population(pop, config, _sphere, rng)
        assert out.best.fitness == 0.0
        assert min(m.fitness for m in out.members) == 0.0

    def test_size_preserved_and_budget_spent(self):
        rng = np.random.default_rng(14)
        pop = _evaluated_population(rng.uniform(-10, 10, (10, 4)), _sphere,
                                    nfe=10)
        config = CodelConfig(population_size=10, nfe_max=1000)
        out = qobl_population(pop, config, _sphere, rng)
        assert len(out.members) == 10
        assert out.nfe == 20

    def test_union_never_worsens_any_rank(self):
        """Sorted fitnesses of the output dominate the input elementwise."""
        rng = np.random.default_rng(15)
        config = CodelConfig(population_size=12, nfe_max=10_000)
        for _ in range(20):
            pop = _evaluated_population(rng.uniform(-10, 10, (12, 3)), _sphere,
                                        nfe=12)
            out = qobl_population(pop, config, _sphere, rng)
            before = np.sort(pop.fitnesses())
            after = np.sort(out.fitnesses())
            assert np.all(after <= before)

    def test_samples_respect_bounds(self):
        rng = np.random.default_rng(16)
        config = CodelConfig(population_size=6, nfe_max=1000,
                             lower=-2.0, upper=3.0)
        pop = _evaluated_population(rng.uniform(-2, 3, (6, 5)), _sphere, nfe=6)
        out = qobl_population(pop, config, _sphere, rng)
        assert np.all(out.vectors() >= -2.0) and np.all(out.vectors() <= 3.0)

    def test_exhausted_budget_is_a_no_op(self):
        rng = np.random.default_rng(17)
        pop = _evaluated_population(rng.uniform(-10, 10, (5, 2)), _sphere,
                                    nfe=100)
        config = CodelConfig(population_size=5, nfe_max=100)
        assert qobl_population(pop, config, _sphere, rng) is pop


class TestKmeans:

    def test_two_gaps_in_one_dimension(self):
        points = np.array([[0.0], [1.0], [10.0], [11.0]])
        for seed in range(5):
            centers, assignments = kmeans(points, 2, np.random.default_rng(seed))
            np.testing.assert_allclose(np.sort(centers.ravel()), [0.5, 10.5])
            assert assignments[0] == assignments[1]
            assert assignments[2] == assignments[3]
            assert assignments[0] != assignments[2]

    def test_k_equals_n_reproduces_points(self):
        rng = np.random.default_rng(18)
        points = rng.uniform(-5, 5, (6, 2))
        centers, assignments = kmeans(points, 6, rng)
        order = np.lexsort(points.T)
        corder = np.lexsort(centers.T)
        np.testing.assert_allclose(centers[corder], points[order])
        sse = np.sum((points - centers[assignments]) ** 2)
        assert sse == 0.0

    def test_k_bounds_enforced(self):
        points = np.zeros((4, 2))
        for bad in (1, 5):
            with pytest.raises(ParameterError):
                kmeans(points, bad, np.random.default_rng(19))
        with pytest.raises(ParameterError):
            kmeans(np.zeros(4), 2, np.random.default_rng(19))

    def test_within_cluster_error_never_increases(self):
        rng = np.random.default_rng(20)
        for _ in range(10):
            points = np.vstack([
                rng.normal(0, 1, (12, 3)),
                rng.normal(6, 1, (12, 3)),
            ])
            previous = np.inf
            for centers, assignments in _lloyd_iterations(points, 3, rng):
                sse = float(np.sum((points - centers[assignments]) ** 2))
                assert sse <= previous + 1e-9
                previous = sse

    def test_final_assignments_are_nearest_center(self):
        rng = np.random.default_rng(21)
        points = rng.uniform(-5, 5, (30, 2))
        centers, assignments = kmeans(points, 4, rng)
        dist = np.linalg.norm(points[:, None, :] - centers[None, :, :], axis=2)
        np.testing.assert_array_equal(assignments, np.argmin(dist, axis=1))


class TestClusterUpdate:

    def _two_blob_population(self):
        vectors = np.array([
            [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0],
            [6.0, 5.0], [4.0, 5.0], [5.0, 6.0], [5.0, 4.0],
        ])
        return _evaluated_population(vectors, _sphere, nfe=8)

    def test_blob_mean_enters_population(self):
        """The near-origin cluster mean beats every member on the sphere.

        Both blobs are symmetric, so the discovered centers are the
        exact blob means when the clustering separates them; the seed is
        chosen so it does.
        """
        pop = self._two_blob_population()
        config = CodelConfig(population_size=8, nfe_max=1000)
        out = cluster_update(pop, config, _sphere, np.random.default_rng(1))
        assert len(out.members) == 8
        assert out.nfe == pop.nfe + 2
        assert out.best.fitness == 0.0
        assert any(np.array_equal(m.params, [0.0, 0.0]) for m in out.members)

    def test_best_never_degrades(self):
        rng = np.random.default_rng(22)
        config = CodelConfig(population_size=16, nfe_max=10_000)
        for _ in range(15):
            pop = _evaluated_population(rng.uniform(-10, 10, (16, 3)), _sphere,
                                        nfe=16)
            out = cluster_update(pop, config, _sphere, rng)
            assert len(out.members) == 16
            assert out.best.fitness <= pop.best.fitness
            # k is drawn from [2, floor(sqrt(16))]
            assert 2 <= out.nfe - pop.nfe <= 4

    def test_exhausted_budget_is_a_no_op(self):
        pop = self._two_blob_population()
        config = CodelConfig(population_size=8, nfe_max=8)
        out = cluster_update(pop, config, _sphere, np.random.default_rng(23))
        assert out is pop


class TestRunCodel:

    def test_constant_objective_gives_flat_zero_history(self):
        config = CodelConfig(population_size=10, nfe_max=300, seed=0)
        result = run_codel(lambda v: 0.0, 4, config)
        assert result.best.fitness == 0.0
        assert np.all(result.history == 0.0)

    def test_history_non_increasing(self):
        for seed in range(3):
            config = CodelConfig(population_size=10, nfe_max=800, seed=seed)
            result = run_codel(_sphere, 3, config)
            assert np.all(np.diff(result.history) <= 0.0)

    def test_budget_accounting(self):
        """The counter agrees with actual objective calls and overshoot is
        bounded by one generation."""
        calls = 0

        def counted(v):
            nonlocal calls
            calls += 1
            return _sphere(v)

        config = CodelConfig(population_size=12, nfe_max=500, seed=4)
        result = run_codel(counted, 3, config)
        assert calls == result.nfe
        assert 500 <= result.nfe <= 500 + 12
        assert np.all(np.diff(result.nfe_history) >= 0)
        assert result.nfe_history[-1] == result.nfe

    def test_same_seed_reproduces_bits(self):
        config = CodelConfig(population_size=10, nfe_max=600, seed=7)
        a = run_codel(_sphere, 4, config)
        b = run_codel(_sphere, 4, config)
        np.testing.assert_array_equal(a.best.params, b.best.params)
        assert a.best.fitness == b.best.fitness
        np.testing.assert_array_equal(a.history, b.history)

    def test_small_sphere_descends(self):
        config = CodelConfig(population_size=20, nfe_max=4000, seed=1)
        result = run_codel(_sphere, 3, config)
        assert result.best.fitness < 0.1

    def test_plain_de_baseline_behaves(self):
        calls = 0

        def counted(v):
            nonlocal calls
            calls += 1
            return _sphere(v)

        config = CodelConfig(population_size=10, nfe_max=500, seed=5)
        result = run_plain_de(counted, 3, config)
        assert calls == result.nfe
        assert np.all(np.diff(result.history) <= 0.0)

    def test_dimension_validated(self):
        with pytest.raises(ParameterError):
            run_codel(_sphere, 0, CodelConfig(population_size=10, nfe_max=100))

    def test_config_validation(self):
        bad = [
            dict(population_size=3),
            dict(scale_factor=0.0),
            dict(scale_factor=2.5),
            dict(crossover_rate=1.5),
            dict(jumping_rate=0.5),
            dict(clustering_period=0),
            dict(lower=1.0, upper=1.0),
            dict(nfe_max=0),
        ]
        for kwargs in bad:
            with pytest.raises(ParameterError):
                CodelConfig(**kwargs)
