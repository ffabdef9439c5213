import numpy as np
import pytest

from brt.boosting import BoostConfig, BoostedModel, Stage, fit_ensemble, predict, predict_batch
from brt.data import Dataset
from brt.interpret import (
    interaction_report,
    overall_interaction,
    pairwise_interaction,
    partial_dependence_1d,
    partial_dependence_2d,
    relative_influence,
)
from brt.tree import RegressionTree

from conftest import lattice_dataset, random_dataset
from oracles import naive_pd_1d, naive_pd_2d


def make_manual_model(trees_gammas, n_features, lr=1.0, f0=0.0):
    names = tuple(f"x{i}" for i in range(n_features))
    cfg = BoostConfig(n_trees=len(trees_gammas), learn_rate=lr, min_leaf_obs=1)
    return BoostedModel(f0=f0, stages=tuple(Stage(t, g) for t, g in trees_gammas), config=cfg, feature_names=names)


def split_tree(feature, threshold, left_val, right_val, n_features, improvement=1.0):
    return RegressionTree(
        feature=[feature, -1, -1],
        threshold=[threshold, 0.0, 0.0],
        missing_right=[False, False, False],
        left=[1, -1, -1],
        right=[2, -1, -1],
        value=[0.0, left_val, right_val],
        improvement=[improvement, 0.0, 0.0],
        n_features=n_features,
    )


class TestRelativeInfluence:
    def test_single_feature_gets_everything(self):
        model = make_manual_model([(split_tree(0, 0.5, -1.0, 1.0, 2), 1.0)] * 3, 2)
        rep = relative_influence(model)
        assert rep.percent == (100.0, 0.0)

    def test_normalisation_arithmetic(self):
        trees = [
            (split_tree(0, 0.5, -1, 1, 2, improvement=30.0), 1.0),
            (split_tree(1, 0.5, -1, 1, 2, improvement=10.0), 1.0),
        ]
        rep = relative_influence(make_manual_model(trees, 2))
        assert rep.percent[0] == pytest.approx(75.0)
        assert rep.percent[1] == pytest.approx(25.0)
        assert sum(rep.percent) == pytest.approx(100.0, abs=1e-9)

    def test_no_splits_anywhere_rejected(self):
        stump = RegressionTree([-1], [0.0], [False], [-1], [-1], [2.0], [0.0], 2)
        with pytest.raises(ValueError, match="no splits to attribute"):
            relative_influence(make_manual_model([(stump, 1.0)], 2))

    def test_sums_to_100_on_fitted_models(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            ds = random_dataset(rng, 20, 4, missing=True)
            model = fit_ensemble(
                ds, BoostConfig(n_trees=50, learn_rate=0.2, min_leaf_obs=2, subsample_fraction=0.85, seed=6)
            )
            rep = relative_influence(model)
            assert sum(rep.percent) == pytest.approx(100.0, abs=1e-9)
            assert all(p >= 0 for p in rep.percent)

    def test_ranked_ordering(self):
        trees = [
            (split_tree(1, 0.5, -1, 1, 3, improvement=5.0), 1.0),
            (split_tree(2, 0.5, -1, 1, 3, improvement=15.0), 1.0),
        ]
        rep = relative_influence(make_manual_model(trees, 3))
        assert [name for name, _ in rep.ranked()] == ["x2", "x1", "x0"]


class TestPartialDependence:
    def test_constant_model_flat_profile(self):
        stump = RegressionTree([-1], [0.0], [False], [-1], [-1], [0.0], [0.0], 2)
        model = make_manual_model([(stump, 1.0)], 2, f0=4.0)
        ds = Dataset.from_arrays(np.random.default_rng(0).uniform(size=(10, 2)), np.zeros(10))
        profile = partial_dependence_1d(model, 0, ds)
        np.testing.assert_allclose(profile.values, 0.0, atol=1e-15)

    def test_identity_model_returns_centered_grid(self):
        # model output = x0 exactly, via two stumps? simplest: deep manual tree set
        ds = lattice_dataset(lambda a, b: a, lo=0.0, hi=2.0, side=5)
        model = fit_ensemble(
            ds, BoostConfig(n_trees=2500, learn_rate=0.1, max_nodes=3, min_leaf_obs=1, subsample_fraction=1.0, seed=3)
        )
        profile = partial_dependence_1d(model, 0, ds)
        centered_grid = profile.grid - profile.grid.mean()
        np.testing.assert_allclose(profile.values, centered_grid, atol=5e-3)

    def test_additive_structure_separates_in_profiles(self):
        # y = x1 + x2^2 with no noise: the x1 profile comes back essentially
        # linear with unit slope while the x2 profile does not
        rng = np.random.default_rng(14)
        X = rng.uniform(-1.5, 1.5, size=(25, 2))
        y = X[:, 0] + X[:, 1] ** 2
        ds = Dataset.from_arrays(X, y)
        model = fit_ensemble(
            ds, BoostConfig(n_trees=3000, learn_rate=0.1, max_nodes=3, min_leaf_obs=1, subsample_fraction=1.0, seed=2)
        )

        def line_fit(profile):
            A = np.vstack([profile.grid, np.ones_like(profile.grid)]).T
            coef, *_ = np.linalg.lstsq(A, profile.values, rcond=None)
            resid = profile.values - A @ coef
            sst = float(np.sum((profile.values - profile.values.mean()) ** 2))
            return coef[0], 1.0 - float(np.sum(resid**2)) / sst

        slope_0, linearity_0 = line_fit(partial_dependence_1d(model, 0, ds))
        _, linearity_1 = line_fit(partial_dependence_1d(model, 1, ds))
        assert slope_0 == pytest.approx(1.0, abs=0.1)
        assert linearity_0 > 0.8
        assert linearity_1 < 0.5  # the squared column is anything but a line

    def test_profile_centres_to_zero_and_grid_in_range(self):
        rng = np.random.default_rng(8)
        ds = random_dataset(rng, 15, 3, missing=True)
        model = fit_ensemble(ds, BoostConfig(n_trees=40, learn_rate=0.3, min_leaf_obs=2, subsample_fraction=1.0))
        for j in range(3):
            p = partial_dependence_1d(model, j, ds)
            assert abs(float(p.values.mean())) < 1e-9
            col = ds.X[:, j]
            finite = col[np.isfinite(col)]
            assert p.grid.min() >= finite.min() and p.grid.max() <= finite.max()
            assert np.all(np.diff(p.grid) > 0)

    def test_linear_grid_spec(self):
        rng = np.random.default_rng(9)
        ds = random_dataset(rng, 12, 2)
        model = fit_ensemble(ds, BoostConfig(n_trees=10, learn_rate=0.3, min_leaf_obs=2, subsample_fraction=1.0))
        p = partial_dependence_1d(model, 0, ds, grid_spec=7)
        assert len(p.grid) == 7
        with pytest.raises(ValueError):
            partial_dependence_1d(model, 0, ds, grid_spec=1)

    def test_fully_missing_feature_rejected(self):
        X = np.array([[np.nan, 1.0], [np.nan, 2.0], [np.nan, 3.0], [np.nan, 4.0]])
        ds = Dataset.from_arrays(X, [1.0, 2.0, 3.0, 4.0])
        model = fit_ensemble(ds, BoostConfig(n_trees=5, learn_rate=0.5, min_leaf_obs=1, subsample_fraction=1.0))
        with pytest.raises(ValueError, match="fully missing"):
            partial_dependence_1d(model, 0, ds)

    def test_surface_of_additive_model_equals_profile_sum(self, additive_lattice_model):
        model, ds = additive_lattice_model
        surf = partial_dependence_2d(model, 0, 1, ds)
        p0 = partial_dependence_1d(model, 0, ds)
        p1 = partial_dependence_1d(model, 1, ds)
        recon = p0.values[:, None] + p1.values[None, :]
        recon = recon - recon.mean()
        np.testing.assert_allclose(surf.values, recon, atol=1e-9)
        assert abs(float(surf.values.mean())) < 1e-9
        assert np.all(np.isfinite(surf.values))

    def test_surface_same_feature_rejected(self, additive_lattice_model):
        model, ds = additive_lattice_model
        with pytest.raises(ValueError, match="features must differ"):
            partial_dependence_2d(model, 1, 1, ds)

    def test_multiplicative_surface_not_additive(self, multiplicative_lattice_model):
        model, ds = multiplicative_lattice_model
        surf = partial_dependence_2d(model, 0, 1, ds)
        p0 = partial_dependence_1d(model, 0, ds)
        p1 = partial_dependence_1d(model, 1, ds)
        recon = p0.values[:, None] + p1.values[None, :]
        recon = recon - recon.mean()
        assert float(np.max(np.abs(surf.values - recon))) > 0.1

    def test_matches_naive_double_loop(self):
        rng = np.random.default_rng(11)
        for _ in range(4):
            ds = random_dataset(rng, 8, 3, missing=True)
            model = fit_ensemble(
                ds, BoostConfig(n_trees=12, learn_rate=0.4, min_leaf_obs=1, subsample_fraction=1.0, seed=2)
            )
            keep = np.isfinite(ds.y)
            rows = [list(r) for r in ds.X[keep]]

            def predict_fn(row):
                return predict(model, row)

            p = partial_dependence_1d(model, 1, ds)
            ref = naive_pd_1d(predict_fn, rows, 1, list(p.grid))
            np.testing.assert_allclose(p.values, ref, atol=1e-12)

            s = partial_dependence_2d(model, 0, 2, ds)
            ref2 = naive_pd_2d(predict_fn, rows, 0, 2, list(s.grid_j), list(s.grid_k))
            np.testing.assert_allclose(s.values, np.asarray(ref2), atol=1e-12)


class TestInteractions:
    def test_additive_fit_scores_zero(self, additive_lattice_model):
        model, ds = additive_lattice_model
        score = pairwise_interaction(model, 0, 1, ds)
        assert score == pytest.approx(0.0, abs=1e-9)
        assert score < 2.0

    def test_multiplicative_fit_scores_high(self, multiplicative_lattice_model):
        model, ds = multiplicative_lattice_model
        assert pairwise_interaction(model, 0, 1, ds) > 10.0

    def test_symmetry_is_exact(self, multiplicative_lattice_model):
        model, ds = multiplicative_lattice_model
        assert pairwise_interaction(model, 0, 1, ds) == pairwise_interaction(model, 1, 0, ds)

    def test_same_feature_rejected(self, additive_lattice_model):
        model, ds = additive_lattice_model
        with pytest.raises(ValueError, match="features must differ"):
            pairwise_interaction(model, 1, 1, ds)

    def test_tree_additive_model_scores_exact_zero(self):
        # no single tree splits on both features: decomposition is exact
        trees = [
            (split_tree(0, 0.4, -2.0, 2.0, 2), 1.0),
            (split_tree(1, 0.6, -1.0, 1.0, 2), 0.5),
            (split_tree(0, 0.7, -0.5, 0.5, 2), 1.0),
        ]
        model = make_manual_model(trees, 2, lr=1.0, f0=0.5)
        rng = np.random.default_rng(1)
        ds = Dataset.from_arrays(rng.uniform(size=(12, 2)), rng.uniform(size=12))
        assert pairwise_interaction(model, 0, 1, ds) == pytest.approx(0.0, abs=1e-9)

    def test_constant_model_degenerate(self):
        stump = RegressionTree([-1], [0.0], [False], [-1], [-1], [0.0], [0.0], 2)
        model = make_manual_model([(stump, 1.0)], 2, f0=3.0)
        ds = Dataset.from_arrays(np.random.default_rng(0).uniform(size=(6, 2)), np.ones(6))
        with pytest.raises(ValueError, match="degenerate model: no output variation"):
            pairwise_interaction(model, 0, 1, ds)

    def test_two_feature_overall_equals_single_pairwise(self, multiplicative_lattice_model):
        model, ds = multiplicative_lattice_model
        pair = pairwise_interaction(model, 0, 1, ds)
        overall = overall_interaction(model, ds)
        assert overall[0] == pytest.approx(pair, rel=1e-12)
        assert overall[1] == pytest.approx(pair, rel=1e-12)

    def test_additive_overall_small(self, additive_lattice_model):
        model, ds = additive_lattice_model
        overall = overall_interaction(model, ds)
        assert all(v < 4.0 for v in overall.values())

    def test_report_consistency_and_ranking(self):
        rng = np.random.default_rng(21)
        X = rng.uniform(0, 2, size=(20, 3))
        y = X[:, 0] * X[:, 1] + 0.3 * X[:, 2]
        ds = Dataset.from_arrays(X, y)
        model = fit_ensemble(
            ds, BoostConfig(n_trees=800, learn_rate=0.1, max_nodes=6, min_leaf_obs=1, subsample_fraction=1.0, seed=9)
        )
        rep = interaction_report(model, ds)
        assert set(rep.pairwise) == {(0, 1), (0, 2), (1, 2)}
        for (a, b), score in rep.pairwise.items():
            assert score == pytest.approx(pairwise_interaction(model, a, b, ds), rel=1e-12)
        assert rep.overall[0] == pytest.approx(rep.pairwise[(0, 1)] + rep.pairwise[(0, 2)], rel=1e-12)
        top_pair, _ = rep.pairwise_ranked()[0]
        assert top_pair == (0, 1)

    def test_response_denominator_option(self, multiplicative_lattice_model):
        model, ds = multiplicative_lattice_model
        a = pairwise_interaction(model, 0, 1, ds, denominator="model")
        b = pairwise_interaction(model, 0, 1, ds, denominator="response")
        assert a > 10 and b > 10
        assert a != b  # different normalisations
        with pytest.raises(ValueError):
            pairwise_interaction(model, 0, 1, ds, denominator="other")


class TestResponseShiftInvariance:
    def test_constant_shift_only_moves_f0(self):
        rng = np.random.default_rng(31)
        X = rng.uniform(0, 2, size=(18, 3))
        y = X[:, 0] * X[:, 1] + X[:, 2]
        cfg = BoostConfig(n_trees=300, learn_rate=0.1, max_nodes=6, min_leaf_obs=2, subsample_fraction=0.9, seed=17)
        base = fit_ensemble(Dataset.from_arrays(X, y), cfg)
        shifted = fit_ensemble(Dataset.from_arrays(X, y + 100.0), cfg)
        ds, ds_s = Dataset.from_arrays(X, y), Dataset.from_arrays(X, y + 100.0)

        inf_a = relative_influence(base).percent
        inf_b = relative_influence(shifted).percent
        np.testing.assert_allclose(inf_a, inf_b, atol=1e-9)

        pa = partial_dependence_1d(base, 0, ds)
        pb = partial_dependence_1d(shifted, 0, ds_s)
        np.testing.assert_allclose(pa.values, pb.values, atol=1e-9)

        sa = partial_dependence_2d(base, 0, 1, ds)
        sb = partial_dependence_2d(shifted, 0, 1, ds_s)
        np.testing.assert_allclose(sa.values, sb.values, atol=1e-9)

        ia = pairwise_interaction(base, 0, 1, ds)
        ib = pairwise_interaction(shifted, 0, 1, ds_s)
        assert ia == pytest.approx(ib, abs=1e-9)

        assert shifted.f0 == pytest.approx(base.f0 + 100.0, rel=1e-12)
