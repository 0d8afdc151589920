import numpy as np
import pytest

from codel.datasets import two_gaussian_dataset, xor_dataset
from codel.errors import ParameterError
from codel.evaluation import METRIC_NAMES
from codel.local_search import METHODS, LocalSearchConfig
from codel.mlp import classification_error
from codel.optimizer import CodelConfig
from codel.training import (
    VARIANT_NAMES,
    build_comparison,
    evaluate_grid,
    make_trainer,
    paired_methods,
    train_variant,
    variant_name,
)

_TINY_DATA = two_gaussian_dataset(n_per_class=12, n_features=2,
                                  separation=1.0, seed=5)
_TINY_CODEL = CodelConfig(population_size=8, nfe_max=160, seed=0)
_TINY_LS = LocalSearchConfig(epochs=20, patience=20)


def _tiny_grid(jobs: int = 1, seed: int = 2):
    return evaluate_grid(_TINY_DATA, 4, seed, (3,), _TINY_CODEL, _TINY_LS,
                         jobs=jobs)


class TestVariantNames:

    def test_order_and_count(self):
        assert len(VARIANT_NAMES) == 12
        for i, method in enumerate(METHODS):
            assert VARIANT_NAMES[2 * i] == method
            assert VARIANT_NAMES[2 * i + 1] == f"codel-{method}"

    def test_variant_name(self):
        assert variant_name("rp", boosted=False) == "rp"
        assert variant_name("rp", boosted=True) == "codel-rp"


class TestPairedMethods:

    def test_full_grid_pairs_every_method(self):
        pairs = paired_methods(VARIANT_NAMES)
        assert pairs == [(m, f"codel-{m}") for m in METHODS]

    def test_unpaired_names_dropped(self):
        assert paired_methods(["rp", "codel-rp", "oss", "codel-gd"]) == [
            ("rp", "codel-rp")
        ]
        assert paired_methods(["alone"]) == []
        assert paired_methods([]) == []


class TestTrainVariant:

    def test_base_form_skips_global_search(self):
        model = train_variant(_TINY_DATA, 7, (3,), _TINY_CODEL, _TINY_LS,
                              boosted=False)
        assert model.nfe_used == 0
        assert model.search_history.size == 0
        assert model.topology.layer_sizes == (2, 3, 1)
        assert model.params.shape == (model.topology.param_count,)

    def test_boosted_form_reports_search(self):
        model = train_variant(_TINY_DATA, 7, (3,), _TINY_CODEL, _TINY_LS,
                              boosted=True)
        assert 0 < model.nfe_used <= 160 + 8
        assert model.search_history.size > 0
        assert np.all(np.diff(model.search_history) <= 0)
        # The refiner starts at the searched weights, so it can only
        # hold or improve the searched training error.
        assert model.train_error <= model.search_history[-1] + 1e-12

    def test_train_error_matches_weights(self):
        model = train_variant(_TINY_DATA, 3, (3,), _TINY_CODEL, _TINY_LS,
                              boosted=True)
        assert model.train_error == classification_error(
            model.params, model.topology, _TINY_DATA
        )

    def test_seed_determinism(self):
        a = train_variant(_TINY_DATA, 9, (3,), _TINY_CODEL, _TINY_LS, True)
        b = train_variant(_TINY_DATA, 9, (3,), _TINY_CODEL, _TINY_LS, True)
        np.testing.assert_array_equal(a.params, b.params)
        c = train_variant(_TINY_DATA, 10, (3,), _TINY_CODEL, _TINY_LS, True)
        assert not np.array_equal(a.params, c.params)

    def test_xor_is_learnable(self):
        config = CodelConfig(population_size=10, nfe_max=2000, seed=0)
        ls = LocalSearchConfig(method="rp", epochs=200)
        model = train_variant(xor_dataset(), 0, (4,), config, ls, True)
        assert model.train_error == 0.0


class TestMakeTrainer:

    def test_trainer_contract(self):
        trainer = make_trainer((3,), _TINY_CODEL, _TINY_LS, boosted=False)
        predictor = trainer(_TINY_DATA, seed=4)
        out = predictor(_TINY_DATA.rows)
        assert out.shape == (len(_TINY_DATA.labels),)
        assert set(np.unique(out)) <= {0, 1}


class TestEvaluateGrid:

    def test_grid_shape(self):
        results = _tiny_grid()
        assert tuple(results) == VARIANT_NAMES
        for result in results.values():
            assert len(result.fold_reports) == 4
            assert set(result.summaries) == set(METRIC_NAMES)

    def test_deterministic_across_calls(self):
        a = _tiny_grid()
        b = _tiny_grid()
        for name in VARIANT_NAMES:
            np.testing.assert_array_equal(a[name].means(), b[name].means())

    def test_worker_count_is_invisible(self):
        """Task seeds are positional, so a process pool changes nothing."""
        serial = _tiny_grid(jobs=1)
        parallel = _tiny_grid(jobs=2)
        for name in VARIANT_NAMES:
            np.testing.assert_array_equal(
                serial[name].means(), parallel[name].means()
            )

    def test_single_class_rejected(self):
        data = two_gaussian_dataset(6, 2, 1.0, seed=0)
        bad = data.subset(np.flatnonzero(data.labels == 1))
        with pytest.raises(ParameterError):
            evaluate_grid(bad, 2, 0, (3,), _TINY_CODEL, _TINY_LS)


class TestBuildComparison:

    def _table(self):
        names = ("rp", "codel-rp", "oss", "codel-oss")
        means = np.array([
            [70.0, 80.0, 60.0, 75.0, 72.0, 66.0],
            [74.0, 79.0, 64.0, 77.0, 74.0, 69.0],
            [68.0, 81.0, 58.0, 74.0, 71.0, 65.0],
            [68.0, 82.0, 59.0, 78.0, 75.0, 70.0],
        ])
        return names, means

    def test_ranks_and_mean_ranks(self):
        names, means = self._table()
        comparison = build_comparison(names, means)
        np.testing.assert_array_equal(comparison.ranks[:, 0], [2, 1, 3.5, 3.5])
        assert comparison.mean_ranks.shape == (4,)
        np.testing.assert_allclose(
            comparison.mean_ranks, comparison.ranks.mean(axis=1)
        )

    def test_wtl_counts_pairs_only(self):
        names, means = self._table()
        comparison = build_comparison(names, means)
        assert comparison.pairs == (("rp", "codel-rp"), ("oss", "codel-oss"))
        # accuracy column: rp 70->74 wins, oss 68->68 ties.
        assert comparison.wtl_per_metric["accuracy"] == (1, 1, 0)
        # sensitivity column: 80->79 loses, 81->82 wins.
        assert comparison.wtl_per_metric["sensitivity"] == (1, 0, 1)

    def test_ee_table_values(self):
        names, means = self._table()
        comparison = build_comparison(names, means)
        assert comparison.ee_table.shape == (2, 6)
        # rp accuracy 70 -> 74: (30 - 26) / 30 * 100.
        np.testing.assert_allclose(comparison.ee_table[0, 0], 400.0 / 30.0)
        np.testing.assert_allclose(comparison.ee_table[1, 0], 0.0)

    def test_no_pairs_is_empty_not_error(self):
        comparison = build_comparison(("a", "b"), np.full((2, 6), 50.0))
        assert comparison.pairs == ()
        assert comparison.ee_table.shape == (0, 6)

    def test_perfect_base_gives_nan_cell_not_crash(self):
        """A base variant at 100% leaves that enhancement undefined.

        Easy to hit on small separable datasets; the rest of the report
        must still come out.
        """
        means = np.full((2, 6), 90.0)
        means[0, 0] = 100.0
        means[1, 0] = 100.0
        comparison = build_comparison(("gd", "codel-gd"), means)
        assert np.isnan(comparison.ee_table[0, 0])
        assert np.all(np.isfinite(comparison.ee_table[0, 1:]))
        assert comparison.wtl_per_metric["accuracy"] == (0, 1, 0)

    def test_shape_mismatch(self):
        with pytest.raises(ParameterError):
            build_comparison(("a", "b"), np.zeros((2, 5)))
        with pytest.raises(ParameterError):
            build_comparison(("a",), np.zeros((2, 6)))
