"""Hyperparameter search tests: encoding, surrogate math, acquisition, loop.

The Gaussian-process posterior is checked against a dense linear-algebra
oracle, expected improvement against its Monte-Carlo definition, and the
optimization loop against a quadratic with a known minimum.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from wavecast.hyperopt import (
    AcquisitionConfig,
    BoEntry,
    BoHistory,
    Dimension,
    OutOfBounds,
    SearchSpace,
    default_search_space,
    expected_improvement_plus,
    gp_fit,
    gp_posterior,
    log_marginal_likelihood,
    make_surrogate,
    matern52,
    propose_next,
    run_bo,
    with_output_var,
)


class TestDimension:
    def test_rejects_bad_definitions(self):
        with pytest.raises(ValueError):
            Dimension("", "real_linear", 0.0, 1.0)
        with pytest.raises(ValueError):
            Dimension("x", "spline", 0.0, 1.0)
        with pytest.raises(ValueError):
            Dimension("x", "real_linear", 1.0, 1.0)
        with pytest.raises(ValueError):
            Dimension("x", "real_linear", None, 1.0)
        with pytest.raises(ValueError):
            Dimension("x", "real_log", 0.0, 1.0)
        with pytest.raises(ValueError):
            Dimension("x", "integer_linear", 0.5, 4.0)
        with pytest.raises(ValueError):
            Dimension("x", "categorical", categories=("only",))
        with pytest.raises(ValueError):
            Dimension("x", "categorical", categories=("a", "a"))

    def test_encoded_width(self):
        assert Dimension("x", "real_linear", 0.0, 1.0).encoded_width == 1
        assert Dimension("x", "categorical", categories=("a", "b", "c")).encoded_width == 3


class TestSearchSpaceEncoding:
    def small_space(self):
        return SearchSpace(
            (
                Dimension("units", "integer_linear", 60, 250),
                Dimension("rate", "real_log", 1e-2, 1.0),
                Dimension("drop", "real_linear", 0.1, 0.9),
                Dimension("mode", "categorical", categories=("bilstm", "lstm")),
            )
        )

    def test_unit_interval_endpoints(self):
        space = self.small_space()
        low = space.encode({"units": 60, "rate": 1e-2, "drop": 0.1, "mode": "bilstm"})
        assert_array_equal(low, [0.0, 0.0, 0.0, 1.0, 0.0])
        high = space.encode({"units": 250, "rate": 1.0, "drop": 0.9, "mode": "lstm"})
        assert_array_equal(high, [1.0, 1.0, 1.0, 0.0, 1.0])

    def test_log_midpoint(self):
        space = self.small_space()
        assert space.encode({"units": 60, "rate": 0.1, "drop": 0.1, "mode": "bilstm"})[
            1
        ] == pytest.approx(0.5, abs=1e-12)

    def test_decode_encode_round_trips(self):
        space = self.small_space()
        rng = np.random.default_rng(5)
        for _ in range(25):
            point = {
                "units": int(rng.integers(60, 251)),
                "rate": float(np.exp(rng.uniform(np.log(1e-2), 0.0))),
                "drop": float(rng.uniform(0.1, 0.9)),
                "mode": ("bilstm", "lstm")[rng.integers(2)],
            }
            back = space.decode(space.encode(point))
            # The log dimension goes through exp(log(.)), which cannot always
            # reproduce the exact double; everything else must be bit-exact.
            assert back["rate"] == pytest.approx(point["rate"], rel=1e-14)
            assert back["units"] == point["units"]
            assert back["drop"] == point["drop"]
            assert back["mode"] == point["mode"]

    def test_decode_clamps_to_bounds(self):
        space = self.small_space()
        point = space.decode(np.array([1.0, 1.5, -0.25, 0.0, 0.0]))
        assert point["units"] == 250
        assert point["rate"] == 1.0
        assert point["drop"] == 0.1

    def test_integer_decode_rounds_to_levels(self):
        space = SearchSpace((Dimension("k", "integer_linear", 1, 5),))
        assert space.decode(np.array([0.0]))["k"] == 1
        assert space.decode(np.array([0.6]))["k"] == 3
        assert isinstance(space.decode(np.array([0.6]))["k"], int)

    def test_categorical_blocks(self):
        space = SearchSpace((Dimension("m", "categorical", categories=("a", "b", "c")),))
        assert_array_equal(space.encode({"m": "b"}), [0.0, 1.0, 0.0])
        assert space.decode(np.array([0.2, 0.9, 0.1]))["m"] == "b"
        assert space.decode(np.array([0.5, 0.5, 0.5]))["m"] == "a"
        with pytest.raises(OutOfBounds):
            space.encode({"m": "d"})

    def test_encode_rejects_bad_points(self):
        space = self.small_space()
        base = {"units": 100, "rate": 0.1, "drop": 0.5, "mode": "lstm"}
        with pytest.raises(OutOfBounds):
            space.encode(dict(base, units=59))
        with pytest.raises(OutOfBounds):
            space.encode(dict(base, units=70.5))
        with pytest.raises(OutOfBounds):
            space.encode(dict(base, rate=2.0))
        with pytest.raises(ValueError):
            space.encode(dict(base, extra=1.0))
        missing = dict(base)
        del missing["drop"]
        with pytest.raises(ValueError):
            space.encode(missing)

    def test_snap_is_idempotent(self):
        space = self.small_space()
        rng = np.random.default_rng(11)
        for _ in range(10):
            vec = rng.random(space.encoded_dim)
            snapped = space.snap(vec)
            assert_array_equal(space.snap(snapped), snapped)
            assert space.decode(snapped) == space.decode(vec)

    def test_subset_preserves_order(self):
        space = self.small_space()
        sub = space.subset(["drop", "units"])
        assert sub.names == ("drop", "units")
        with pytest.raises(ValueError):
            space.subset(["nope"])

    def test_default_space_contents(self):
        space = default_search_space()
        assert space.names == (
            "units",
            "layers",
            "learning_rate",
            "l2_penalty",
            "dropout_rate",
            "mode",
        )
        assert space.encoded_dim == 7
        point = space.decode(np.full(7, 0.5))
        assert 60 <= point["units"] <= 250
        assert 1 <= point["layers"] <= 8
        assert point["mode"] in ("bilstm", "lstm")

    def test_duplicate_dimension_names_rejected(self):
        dim = Dimension("x", "real_linear", 0.0, 1.0)
        with pytest.raises(ValueError):
            SearchSpace((dim, dim))
        with pytest.raises(ValueError):
            SearchSpace(())


class TestMatern52:
    def test_zero_distance_gives_output_var(self):
        x = np.array([[0.3, 0.7]])
        k = matern52(x, x, np.array([0.5, 0.5]), 2.5)
        assert k[0, 0] == 2.5

    def test_closed_form_single_pair(self):
        d, ls, ov = 0.3, 0.5, 2.0
        r = d / ls
        expected = ov * (1.0 + math.sqrt(5) * r + 5.0 * r * r / 3.0) * math.exp(-math.sqrt(5) * r)
        k = matern52(np.array([[0.0]]), np.array([[d]]), np.array([ls]), ov)
        assert k[0, 0] == pytest.approx(expected, rel=1e-14)

    def test_symmetric_and_positive_semidefinite(self):
        rng = np.random.default_rng(3)
        x = rng.random((20, 3))
        k = matern52(x, x, np.array([0.4, 0.8, 1.2]), 1.7)
        assert_allclose(k, k.T, rtol=0, atol=1e-14)
        eigenvalues = np.linalg.eigvalsh(k)
        assert eigenvalues.min() > -1e-9

    def test_longer_length_scale_raises_correlation(self):
        a, b = np.array([[0.0]]), np.array([[1.0]])
        near = matern52(a, b, np.array([2.0]), 1.0)[0, 0]
        far = matern52(a, b, np.array([0.5]), 1.0)[0, 0]
        assert near > far

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            matern52(np.zeros((2, 2)), np.zeros((2, 3)), np.ones(2), 1.0)
        with pytest.raises(ValueError):
            matern52(np.zeros((2, 2)), np.zeros((2, 2)), np.ones(3), 1.0)


class TestGpSurrogate:
    def seeded_design(self):
        rng = np.random.default_rng(7)
        x = rng.random((5, 2))
        y = rng.normal(2.0, 0.5, 5)
        return x, y

    def test_posterior_matches_dense_oracle(self):
        x, y = self.seeded_design()
        ls, ov, nv = np.array([0.7, 0.9]), 1.3, 1e-4
        surrogate = make_surrogate(x, y, ls, ov, nv)
        assert surrogate.jitter == 0.0
        query = np.random.default_rng(9).random((4, 2))

        y_std = (y - y.mean()) / y.std()
        kernel = matern52(x, x, ls, ov) + nv * np.eye(5)
        k_star = matern52(x, query, ls, ov)
        mean_std = k_star.T @ np.linalg.solve(kernel, y_std)
        cov_reduction = k_star.T @ np.linalg.solve(kernel, k_star)
        var_std = ov - np.diag(cov_reduction)
        expected_mean = y.mean() + y.std() * mean_std
        expected_var = y.std() ** 2 * var_std

        mean, var = gp_posterior(surrogate, query)
        assert_allclose(mean, expected_mean, rtol=1e-9)
        assert_allclose(var, expected_var, rtol=1e-9)

    def test_single_point_query_returns_scalars(self):
        x, y = self.seeded_design()
        surrogate = make_surrogate(x, y, 0.7, 1.3, 1e-4)
        mean, var = gp_posterior(surrogate, x[0])
        assert np.ndim(mean) == 0 and np.ndim(var) == 0
        batch_mean, batch_var = gp_posterior(surrogate, x[:1])
        assert mean == batch_mean[0] and var == batch_var[0]

    def test_reverts_to_prior_far_from_data(self):
        x, y = self.seeded_design()
        surrogate = make_surrogate(x, y, 0.2, 1.3, 1e-4)
        mean, var = gp_posterior(surrogate, np.array([50.0, -50.0]))
        assert mean == pytest.approx(surrogate.loss_mean, rel=1e-9)
        assert var == pytest.approx(surrogate.loss_scale**2 * 1.3, rel=1e-9)

    def test_variance_never_negative(self):
        x, y = self.seeded_design()
        surrogate = make_surrogate(x, y, 0.7, 1.3, 0.0)
        _, var = gp_posterior(surrogate, x)
        assert np.all(var >= 0.0)

    def test_fit_interpolates_two_points(self):
        x = np.array([[0.2], [0.8]])
        y = np.array([1.0, 3.0])
        surrogate = gp_fit(x, y)
        mean, _ = gp_posterior(surrogate, x)
        assert_allclose(mean, y, rtol=0, atol=1e-6)

    def test_fit_likelihood_beats_default_start(self):
        x, y = self.seeded_design()
        fitted = gp_fit(x, y)
        baseline = make_surrogate(x, y, 1.0, 1.0, 1e-4)
        assert fitted.log_marginal >= baseline.log_marginal - 1e-9

    def test_duplicate_inputs_with_equal_losses(self):
        x = np.array([[0.5], [0.5], [0.9]])
        y = np.array([2.0, 2.0, 4.0])
        surrogate = gp_fit(x, y)
        assert surrogate.noise_var <= 1e-9
        mean, _ = gp_posterior(surrogate, np.array([[0.5]]))
        assert mean[0] == pytest.approx(2.0, abs=1e-8)

    def test_incumbent_properties(self):
        x, y = self.seeded_design()
        surrogate = make_surrogate(x, y, 0.7, 1.3, 1e-4)
        assert surrogate.incumbent_loss == y.min()
        assert_array_equal(surrogate.incumbent_point_encoded, x[np.argmin(y)])
        assert surrogate.num_observations == 5

    def test_with_output_var_rescales_prior(self):
        x, y = self.seeded_design()
        surrogate = make_surrogate(x, y, 0.2, 1.0, 1e-4)
        doubled = with_output_var(surrogate, 2.0)
        assert doubled.output_var == 2.0
        _, far_var = gp_posterior(doubled, np.array([50.0, 50.0]))
        assert far_var == pytest.approx(surrogate.loss_scale**2 * 2.0, rel=1e-9)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            make_surrogate(np.zeros((2, 1)), np.zeros(3), 1.0, 1.0, 1e-4)
        with pytest.raises(ValueError):
            make_surrogate(np.zeros((0, 1)), np.zeros(0), 1.0, 1.0, 1e-4)
        with pytest.raises(ValueError):
            make_surrogate(np.array([[np.nan]]), np.array([1.0]), 1.0, 1.0, 1e-4)
        with pytest.raises(ValueError):
            make_surrogate(np.zeros((2, 1)), np.zeros(2), -1.0, 1.0, 1e-4)
        with pytest.raises(ValueError):
            gp_fit(np.zeros((2, 1)), np.array([1.0, np.inf]))

    def test_log_marginal_likelihood_gaussian_identity(self):
        x = np.array([[0.1], [0.6], [0.9]])
        y = np.array([0.5, -0.2, 0.4])
        ls, ov, nv = np.array([0.5]), 1.2, 1e-3
        kernel = matern52(x, x, ls, ov) + nv * np.eye(3)
        expected = float(
            -0.5 * y @ np.linalg.solve(kernel, y)
            - 0.5 * np.log(np.linalg.det(kernel))
            - 1.5 * np.log(2.0 * np.pi)
        )
        got = log_marginal_likelihood(x, y, ls, ov, nv)
        assert got == pytest.approx(expected, rel=1e-10)


class TestExpectedImprovementPlus:
    def test_degenerate_deviation_reduces_to_hinge(self):
        assert expected_improvement_plus(np.array([1.0]), np.array([0.0]), 0.9, xi=0.0)[0] == 0.0
        got = expected_improvement_plus(np.array([0.5]), np.array([0.0]), 0.9, xi=0.1)
        assert got[0] == pytest.approx(0.3, rel=1e-12)

    def test_zero_gap_equals_sd_times_density_peak(self):
        sd = 0.7
        got = expected_improvement_plus(np.array([0.99]), np.array([sd]), 1.0, xi=0.01)
        assert got[0] == pytest.approx(sd / math.sqrt(2.0 * math.pi), rel=1e-12)

    def test_matches_monte_carlo_definition(self):
        rng = np.random.default_rng(0)
        mean, sd, incumbent, xi = 0.5, 0.3, 0.6, 0.01
        draws = rng.normal(mean, sd, 1_000_000)
        empirical = np.mean(np.maximum(incumbent - xi - draws, 0.0))
        got = expected_improvement_plus(np.array([mean]), np.array([sd]), incumbent, xi)
        assert got[0] == pytest.approx(empirical, abs=1e-3)

    def test_never_negative_and_monotone_in_mean(self):
        means = np.linspace(-2.0, 4.0, 41)
        sds = np.full_like(means, 0.5)
        values = expected_improvement_plus(means, sds, 1.0, xi=0.01)
        assert np.all(values >= 0.0)
        assert np.all(np.diff(values) <= 1e-12)

    def test_vectorized_matches_elementwise(self):
        means = np.array([0.2, 0.8, 1.5])
        sds = np.array([0.1, 0.0, 0.4])
        batch = expected_improvement_plus(means, sds, 1.0, xi=0.05)
        singles = [
            expected_improvement_plus(means[i : i + 1], sds[i : i + 1], 1.0, xi=0.05)[0]
            for i in range(3)
        ]
        assert_allclose(batch, singles, rtol=0, atol=0)


class TestProposeNext:
    def two_dim_space(self):
        return SearchSpace(
            (
                Dimension("a", "real_linear", 0.0, 1.0),
                Dimension("b", "real_linear", 0.0, 1.0),
            )
        )

    def test_deterministic_and_in_bounds(self):
        space = self.two_dim_space()
        x = np.array([[0.2, 0.2], [0.8, 0.8], [0.5, 0.1]])
        y = np.array([3.0, 1.0, 2.0])
        surrogate = make_surrogate(x, y, 0.3, 1.0, 1e-4)
        config = AcquisitionConfig(candidate_pool=256)
        first = propose_next(surrogate, space, config, seed=4)
        second = propose_next(surrogate, space, config, seed=4)
        assert first == second
        assert 0.0 <= first["a"] <= 1.0 and 0.0 <= first["b"] <= 1.0

    def test_avoids_noiseless_observations(self):
        space = self.two_dim_space()
        x = np.array([[0.25, 0.25], [0.75, 0.75]])
        y = np.array([1.0, 2.0])
        surrogate = make_surrogate(x, y, 0.3, 1.0, 0.0)
        proposal = propose_next(surrogate, space, AcquisitionConfig(candidate_pool=256), seed=0)
        encoded = space.encode(proposal)
        for row in x:
            assert np.linalg.norm(encoded - row) > 1e-6

    def test_respects_integer_and_categorical_structure(self):
        space = SearchSpace(
            (
                Dimension("k", "integer_linear", 1, 5),
                Dimension("m", "categorical", categories=("x", "y")),
            )
        )
        x = np.array([space.encode({"k": 2, "m": "x"}), space.encode({"k": 4, "m": "y"})])
        surrogate = make_surrogate(x, np.array([1.0, 2.0]), 0.5, 1.0, 1e-4)
        proposal = propose_next(surrogate, space, AcquisitionConfig(candidate_pool=128), seed=1)
        assert proposal["k"] in (1, 2, 3, 4, 5)
        assert proposal["m"] in ("x", "y")

    def test_acquisition_config_validation(self):
        with pytest.raises(ValueError):
            AcquisitionConfig(xi=-0.1)
        with pytest.raises(ValueError):
            AcquisitionConfig(exploit_threshold=0.0)
        with pytest.raises(ValueError):
            AcquisitionConfig(escalation_factor=1.0)
        with pytest.raises(ValueError):
            AcquisitionConfig(max_escalations=-1)
        with pytest.raises(ValueError):
            AcquisitionConfig(candidate_pool=0)


class TestRunBo:
    def quadratic_space(self):
        return SearchSpace((Dimension("z", "real_linear", 0.0, 1.0),))

    def test_minimizes_a_quadratic(self):
        history = run_bo(lambda p: (p["z"] - 0.3) ** 2, self.quadratic_space(), budget=20, seed=0)
        assert history.best_loss < 1e-3
        assert len(history.entries) == 20
        assert [e.iteration for e in history.entries] == list(range(20))

    def test_incumbent_is_non_increasing_and_consistent(self):
        history = run_bo(lambda p: (p["z"] - 0.7) ** 2, self.quadratic_space(), budget=12, seed=3)
        incumbents = [e.incumbent_loss for e in history.entries]
        assert all(b <= a for a, b in zip(incumbents, incumbents[1:]))
        running = min(e.loss for e in history.entries)
        assert history.best_loss == running
        assert history.best_point == history.entries[-1].incumbent_point

    def test_same_seed_reproduces_the_run(self):
        objective = lambda p: math.sin(5.0 * p["z"]) + p["z"] ** 2
        a = run_bo(objective, self.quadratic_space(), budget=10, seed=5)
        b = run_bo(objective, self.quadratic_space(), budget=10, seed=5)
        assert [e.point for e in a.entries] == [e.point for e in b.entries]
        assert [e.loss for e in a.entries] == [e.loss for e in b.entries]

    def test_pure_design_when_budget_equals_init(self):
        history = run_bo(
            lambda p: p["z"], self.quadratic_space(), budget=4, init_design_size=4, seed=0
        )
        assert len(history.entries) == 4

    def test_failed_evaluations_are_penalized_not_fatal(self):
        def patchy(point):
            if point["z"] < 0.5:
                raise RuntimeError("simulated failure")
            return point["z"]

        history = run_bo(patchy, self.quadratic_space(), budget=8, init_design_size=4, seed=2)
        assert len(history.entries) == 8
        losses = [e.loss for e in history.entries]
        assert all(np.isfinite(losses))
        failed = [l for l in losses if l > 1.0]
        assert failed, "at least one draw below 0.5 should have failed"
        assert history.best_loss <= 1.0

    def test_budget_validation(self):
        space = self.quadratic_space()
        with pytest.raises(ValueError):
            run_bo(lambda p: 0.0, space, budget=1)
        with pytest.raises(ValueError):
            run_bo(lambda p: 0.0, space, budget=4, init_design_size=1)
        with pytest.raises(ValueError):
            run_bo(lambda p: 0.0, space, budget=4, init_design_size=5)

    def test_history_validation(self):
        entry = lambda i, inc: BoEntry(i, {"z": 0.5}, 1.0, inc, {"z": 0.5})
        with pytest.raises(ValueError):
            BoHistory((entry(0, 1.0), entry(1, 2.0)))
        with pytest.raises(ValueError):
            BoHistory().best_loss
