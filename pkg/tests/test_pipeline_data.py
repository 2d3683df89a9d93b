"""Pipeline data-layer tests: feature taxonomy, file formats, generators,
window assembly, and configuration loading."""

import json
import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from wavecast.ewt import EwtConfig
from wavecast.leaders import (
    GameParams,
    LeaderWeights,
    SearchConfig,
    SynergyParams,
    TrustModel,
)
from wavecast.nn import TrainingConfig
from wavecast.pipeline import (
    AlignmentError,
    Bundle,
    FEATURE_MODES,
    FeatureTable,
    PipelineConfig,
    SyntheticSpec,
    TooShort,
    VALENCE_FEATURES,
    VOLUME_FEATURES,
    apply_leader_weights,
    assemble_component_windows,
    assemble_windows,
    build_config,
    columns_for_mode,
    config_to_ini,
    feature_kind,
    generate_scenario,
    generate_series,
    load_bundle,
    load_pipeline_config,
    normalize_columns,
    read_feature_csv,
    read_graph_csv,
    resample_to_monthly,
    tone_signal,
    write_feature_csv,
    write_graph_csv,
    write_scenario,
)
from wavecast.series import Frequency, ParseError, TimeSeries, read_series_csv


def monthly_periods(n, start=(2018, 1)):
    year, month = start
    labels = []
    for _ in range(n):
        labels.append(f"{year:04d}-{month:02d}")
        month += 1
        if month == 13:
            year, month = year + 1, 1
    return tuple(labels)


def small_table(n=6, weighted=False, contributors=None):
    values = np.column_stack(
        [
            np.arange(1.0, n + 1.0),
            np.linspace(-0.5, 0.5, n),
        ]
    )
    return FeatureTable(
        periods=monthly_periods(n),
        columns=("social.num_posts", "reviews.avg_sentiment"),
        values=values,
        contributors=contributors,
        weighted=weighted,
    )


class TestFeatureTaxonomy:
    def test_kind_classification(self):
        assert feature_kind("social.num_posts") == "volume"
        assert feature_kind("reviews.avg_sentiment") == "valence"
        with pytest.raises(ValueError):
            feature_kind("num_posts")
        with pytest.raises(ValueError):
            feature_kind("social.page_rank")

    def test_modes_partition_the_full_set(self):
        columns = [f"p{i}.{f}" for i, f in enumerate(VOLUME_FEATURES + VALENCE_FEATURES)]
        attention = columns_for_mode(columns, "attention_only")
        endorsement = columns_for_mode(columns, "endorsement_only")
        assert set(attention) | set(endorsement) == set(columns)
        assert set(attention) & set(endorsement) == set()
        assert all(feature_kind(c) == "volume" for c in attention)
        assert all(feature_kind(c) == "valence" for c in endorsement)
        assert columns_for_mode(columns, "full") == tuple(columns)
        assert columns_for_mode(columns, "none") == ()
        with pytest.raises(ValueError):
            columns_for_mode(columns, "some")
        assert FEATURE_MODES == ("full", "attention_only", "endorsement_only", "none")


class TestFeatureTable:
    def test_validation(self):
        good = small_table()
        assert len(good) == 6
        assert good.frequency is Frequency.MONTHLY
        with pytest.raises(ValueError):
            FeatureTable(
                periods=("2018-01", "2018-01"),
                columns=("a.num_posts",),
                values=np.ones((2, 1)),
            )
        with pytest.raises(ValueError):
            FeatureTable(
                periods=("2018-01", "2018-W05"),
                columns=("a.num_posts",),
                values=np.ones((2, 1)),
            )
        with pytest.raises(ValueError):
            FeatureTable(
                periods=monthly_periods(2),
                columns=("a.num_posts", "a.num_posts"),
                values=np.ones((2, 2)),
            )
        with pytest.raises(ValueError):
            FeatureTable(
                periods=monthly_periods(2),
                columns=("a.num_posts",),
                values=np.ones((3, 1)),
            )
        with pytest.raises(ValueError):
            FeatureTable(
                periods=monthly_periods(2),
                columns=("a.num_posts",),
                values=np.array([[1.0], [np.inf]]),
            )

    def test_physical_ranges_on_raw_tables_only(self):
        with pytest.raises(ValueError):
            FeatureTable(
                periods=monthly_periods(2),
                columns=("a.avg_sentiment",),
                values=np.array([[0.5], [1.5]]),
            )
        with pytest.raises(ValueError):
            FeatureTable(
                periods=monthly_periods(2),
                columns=("a.num_posts",),
                values=np.array([[1.0], [-2.0]]),
            )
        weighted = FeatureTable(
            periods=monthly_periods(2),
            columns=("a.avg_sentiment", "a.num_posts"),
            values=np.array([[1.5, -2.0], [-3.0, 4.0]]),
            weighted=True,
        )
        assert weighted.weighted

    def test_select_and_modes(self):
        table = small_table()
        sub = table.select(["reviews.avg_sentiment"])
        assert sub.columns == ("reviews.avg_sentiment",)
        assert_array_equal(sub.values[:, 0], table.values[:, 1])
        assert table.for_mode("attention_only").columns == ("social.num_posts",)
        assert table.for_mode("none") is None
        with pytest.raises(KeyError):
            table.column_index("nope.num_posts")

    def test_contributor_annotations_checked(self):
        with pytest.raises(ValueError):
            small_table(contributors={"ghost.num_likes": ("a",)})
        table = small_table(contributors={"social.num_posts": ("a", "b")})
        assert table.contributors == {"social.num_posts": ("a", "b")}

    def test_aligned_with(self):
        table = small_table()
        series = TimeSeries("demand", (2018, 1), Frequency.MONTHLY, np.arange(6.0) + 1)
        assert table.aligned_with(series)
        shifted = TimeSeries("demand", (2018, 2), Frequency.MONTHLY, np.arange(6.0) + 1)
        assert not table.aligned_with(shifted)


def weights_for(nodes, values):
    return LeaderWeights(
        node_ids=tuple(nodes),
        weights=dict(zip(nodes, values)),
        hops={n: 0 for n in nodes},
        leaders=frozenset(nodes[:1]),
        decay_kappa=math.log(2.0),
        max_hops=3,
    )


class TestApplyLeaderWeights:
    def test_unit_weights_change_nothing(self):
        table = small_table(
            contributors={"social.num_posts": ("a", "b"), "reviews.avg_sentiment": ("b",)}
        )
        weighted = apply_leader_weights(table, weights_for(["a", "b"], [1.0, 1.0]))
        assert_array_equal(weighted.values, table.values)
        assert weighted.weighted

    def test_mean_signed_weight_scales_columns(self):
        table = small_table(
            contributors={"social.num_posts": ("a", "b"), "reviews.avg_sentiment": ("b",)}
        )
        weighted = apply_leader_weights(table, weights_for(["a", "b"], [1.0, -0.5]))
        assert_allclose(weighted.values[:, 0], table.values[:, 0] * 0.25, rtol=1e-15)
        assert_allclose(weighted.values[:, 1], table.values[:, 1] * -0.5, rtol=1e-15)

    def test_unannotated_column_is_untouched(self):
        table = small_table(contributors={"reviews.avg_sentiment": ("a",)})
        weighted = apply_leader_weights(table, weights_for(["a"], [0.5]))
        assert_array_equal(weighted.values[:, 0], table.values[:, 0])
        assert_allclose(weighted.values[:, 1], table.values[:, 1] * 0.5, rtol=1e-15)

    def test_empty_contributor_list_is_untouched(self):
        table = small_table(contributors={"social.num_posts": ()})
        weighted = apply_leader_weights(table, weights_for(["a"], [0.25]))
        assert_array_equal(weighted.values, table.values)

    def test_missing_annotations_warn_and_pass_through(self, caplog):
        table = small_table(contributors=None)
        with caplog.at_level(logging.WARNING):
            weighted = apply_leader_weights(table, weights_for(["a"], [0.5]))
        assert "no contributor annotations" in caplog.text
        assert_array_equal(weighted.values, table.values)
        assert weighted.weighted

    def test_unknown_contributor_rejected(self):
        table = small_table(contributors={"social.num_posts": ("stranger",)})
        with pytest.raises(ValueError):
            apply_leader_weights(table, weights_for(["a"], [1.0]))


class TestNormalizeColumns:
    def test_prefix_only_scaling(self):
        values = np.array([[0.0, 10.0], [4.0, 10.0], [8.0, 10.0], [100.0, 99.0]])
        table = FeatureTable(
            periods=monthly_periods(4),
            columns=("a.num_posts", "b.num_likes"),
            values=values,
        )
        scaled, scaling = normalize_columns(table, fit_rows=3)
        assert_allclose(scaled.values[:3, 0], [0.0, 0.5, 1.0], rtol=1e-15)
        assert scaled.values[3, 0] == pytest.approx(12.5)
        assert_array_equal(scaled.values[:, 1], np.zeros(4))
        assert_array_equal(scaling.minima, [0.0, 10.0])
        assert_array_equal(scaling.ranges, [8.0, 1.0])

    def test_constant_column_maps_to_zero(self):
        values = np.array([[5.0], [5.0], [5.0]])
        table = FeatureTable(
            periods=monthly_periods(3), columns=("a.num_posts",), values=values
        )
        scaled, _ = normalize_columns(table)
        assert_array_equal(scaled.values, np.zeros((3, 1)))

    def test_fit_rows_bounds(self):
        table = small_table()
        with pytest.raises(ValueError):
            normalize_columns(table, fit_rows=0)
        with pytest.raises(ValueError):
            normalize_columns(table, fit_rows=7)


class TestFeatureCsv:
    def test_round_trip_with_contributors(self, tmp_path):
        table = small_table(contributors={"social.num_posts": ("v01", "v02")})
        csv_path = tmp_path / "features.csv"
        side_path = tmp_path / "contributors.json"
        write_feature_csv(table, csv_path, side_path)
        back = read_feature_csv(csv_path, side_path)
        assert back.periods == table.periods
        assert back.columns == table.columns
        assert_array_equal(back.values, table.values)
        assert back.contributors == {"social.num_posts": ("v01", "v02")}

    def test_rejects_malformed_files(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,social.num_posts\n2018-01,3\n", encoding="utf-8")
        with pytest.raises(ParseError):
            read_feature_csv(path)
        path.write_text("period,social.num_posts\n2018-01,3,9\n", encoding="utf-8")
        with pytest.raises(ParseError):
            read_feature_csv(path)
        path.write_text("period,social.num_posts\n2018-01,three\n", encoding="utf-8")
        with pytest.raises(ParseError):
            read_feature_csv(path)
        path.write_text("", encoding="utf-8")
        with pytest.raises(ParseError):
            read_feature_csv(path)

    def test_out_of_range_sentiment_is_a_parse_error(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "period,reviews.avg_sentiment\n2018-01,0.5\n2018-02,1.5\n", encoding="utf-8"
        )
        with pytest.raises(ParseError):
            read_feature_csv(path)


class TestGraphCsv:
    def test_round_trip(self, tmp_path):
        scenario = generate_scenario(SyntheticSpec(length=16), seed=4)
        nodes, edges = tmp_path / "nodes.csv", tmp_path / "edges.csv"
        write_graph_csv(scenario.graph, nodes, edges)
        back = read_graph_csv(nodes, edges)
        assert back.node_ids == scenario.graph.node_ids
        assert_array_equal(back.counts, scenario.graph.counts)
        for node in back.node_ids:
            assert back.attributes[node] == scenario.graph.attributes[node]

    def test_rejects_wrong_headers(self, tmp_path):
        nodes, edges = tmp_path / "nodes.csv", tmp_path / "edges.csv"
        nodes.write_text("id,goodwill,power,valence\n", encoding="utf-8")
        edges.write_text("source,target,interaction_count\n", encoding="utf-8")
        with pytest.raises(ParseError):
            read_graph_csv(nodes, edges)
        nodes.write_text("id,goodwill,power,uprightness,valence\na,.5,.5,.5,1\n", encoding="utf-8")
        edges.write_text("source,target,weight\n", encoding="utf-8")
        with pytest.raises(ParseError):
            read_graph_csv(nodes, edges)


class TestLoadBundle:
    def write_pair(self, tmp_path, feature_periods):
        series = TimeSeries("demand", (2018, 1), Frequency.MONTHLY, [1.0, 2.0, 3.0])
        from wavecast.series import write_series_csv

        series_path = tmp_path / "series.csv"
        write_series_csv(series, series_path)
        table = FeatureTable(
            periods=feature_periods,
            columns=("a.num_posts",),
            values=np.ones((len(feature_periods), 1)),
        )
        features_path = tmp_path / "features.csv"
        write_feature_csv(table, features_path)
        return series_path, features_path

    def test_aligned_bundle_loads(self, tmp_path):
        series_path, features_path = self.write_pair(
            tmp_path, ("2018-01", "2018-02", "2018-03")
        )
        bundle = load_bundle(series_path, features_path)
        assert isinstance(bundle, Bundle)
        assert bundle.features.aligned_with(bundle.series)
        assert bundle.graph is None

    def test_alignment_error_names_the_period(self, tmp_path):
        series_path, features_path = self.write_pair(
            tmp_path, ("2018-01", "2018-02", "2018-04")
        )
        with pytest.raises(AlignmentError, match="2018-04"):
            load_bundle(series_path, features_path)

    def test_missing_period_reported(self, tmp_path):
        series_path, features_path = self.write_pair(tmp_path, ("2018-01", "2018-02"))
        with pytest.raises(AlignmentError, match="2018-03"):
            load_bundle(series_path, features_path)

    def test_contributors_require_features(self, tmp_path):
        series_path, _ = self.write_pair(tmp_path, ("2018-01", "2018-02", "2018-03"))
        side = tmp_path / "contributors.json"
        side.write_text("{}", encoding="utf-8")
        with pytest.raises(ValueError):
            load_bundle(series_path, contributors_path=side)

    def test_graph_needs_both_files(self, tmp_path):
        series_path, _ = self.write_pair(tmp_path, ("2018-01", "2018-02", "2018-03"))
        with pytest.raises(ValueError):
            load_bundle(series_path, nodes_path=tmp_path / "nodes.csv")


class TestResampleToMonthly:
    def test_weekly_average_by_month_of_monday(self):
        series = TimeSeries(
            "visits", (2021, 1), Frequency.WEEKLY, np.arange(1.0, 9.0)
        )
        resampled = resample_to_monthly(series)
        assert resampled.frequency is Frequency.MONTHLY
        assert resampled.labels == ["2021-01", "2021-02"]
        assert_allclose(resampled.values, [2.5, 6.5], rtol=1e-15)

    def test_monthly_is_a_passthrough(self):
        series = TimeSeries("visits", (2021, 1), Frequency.MONTHLY, [1.0, 2.0])
        assert resample_to_monthly(series) is series


class TestSyntheticSeries:
    def test_noiseless_series_matches_the_formula(self):
        spec = SyntheticSpec(
            length=48,
            base_level=200.0,
            trend_slope=1.5,
            seasonal_amplitude=30.0,
            seasonal_period=12.0,
            cycle_amplitude=10.0,
            cycle_period=36.0,
            noise_sd=0.0,
            tones=((5.0, 0.4, 1.0),),
        )
        series = generate_series(spec, seed=0)
        t = np.arange(48.0)
        expected = (
            200.0
            + 1.5 * t
            + 30.0 * np.sin(2.0 * np.pi * t / 12.0)
            + 10.0 * np.sin(2.0 * np.pi * t / 36.0)
            + 5.0 * np.cos(0.4 * t + 1.0)
        )
        assert_allclose(series.values, expected, rtol=0, atol=1e-12)
        assert series.labels[0] == "2015-01"

    def test_tone_signal_hand_formula(self):
        tones = ((2.0, 0.5, 0.25), (1.0, 1.2, 0.0))
        t = np.arange(16.0)
        expected = 2.0 * np.cos(0.5 * t + 0.25) + 1.0 * np.cos(1.2 * t)
        assert_allclose(tone_signal(16, tones), expected, rtol=0, atol=1e-15)

    def test_seeded_determinism(self):
        spec = SyntheticSpec(length=30, noise_sd=4.0)
        assert_array_equal(generate_series(spec, 7).values, generate_series(spec, 7).values)
        assert not np.array_equal(
            generate_series(spec, 7).values, generate_series(spec, 8).values
        )

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SyntheticSpec(length=7)
        with pytest.raises(ValueError):
            SyntheticSpec(noise_sd=-1.0)
        with pytest.raises(ValueError):
            SyntheticSpec(seasonal_period=1.0)
        with pytest.raises(ValueError):
            SyntheticSpec(coalition_size=1)
        with pytest.raises(ValueError):
            SyntheticSpec(graph_size=6, coalition_size=3)
        with pytest.raises(ValueError):
            SyntheticSpec(noise_feature_count=13)
        with pytest.raises(ValueError):
            SyntheticSpec(start_period="January 2015")


@pytest.fixture(scope="module")
def scenario():
    return generate_scenario(SyntheticSpec(length=60, noise_feature_count=6), seed=0)


class TestSyntheticScenario:
    def test_planted_coalition_leads_the_id_range(self, scenario):
        assert scenario.planted == ("v00", "v01", "v02")
        assert len(scenario.graph.node_ids) == 20

    def test_interaction_count_bands(self, scenario):
        graph = scenario.graph
        ids = list(graph.node_ids)
        index = {node: k for k, node in enumerate(ids)}
        counts = graph.counts
        planted = set(scenario.planted)
        bots = set(ids[-3:])
        audience = set(ids) - planted - bots
        for bot in bots:
            assert graph.attributes[bot].valence <= -0.5
        for node in audience:
            assert -0.2 <= graph.attributes[node].valence <= 0.5

        for a in planted:
            for b in planted:
                if a != b:
                    assert 25 <= counts[index[a], index[b]] <= 40
        for bot in bots:
            assert counts[index[bot]].sum() == 0
            assert counts[:, index[bot]].sum() == 0
        for u in audience:
            for p in planted:
                follow = counts[index[u], index[p]]
                assert follow == 0 or 15 <= follow <= 30
                reply = counts[index[p], index[u]]
                assert reply == 0 or 1 <= reply <= 3
            for v in audience:
                if u != v:
                    within = counts[index[u], index[v]]
                    assert within <= 6

    def test_each_audience_member_follows_someone_planted(self, scenario):
        graph = scenario.graph
        ids = list(graph.node_ids)
        index = {node: k for k, node in enumerate(ids)}
        bots = set(ids[-3:])
        audience = [n for n in ids if n not in bots and n not in set(scenario.planted)]
        for u in audience:
            assert any(
                graph.counts[index[u], index[p]] >= 15 for p in scenario.planted
            )

    def test_driver_moves_the_target_one_period_later(self):
        base = SyntheticSpec(length=60, coupling_strength=0.0)
        coupled = SyntheticSpec(length=60, coupling_strength=40.0)
        off = generate_scenario(base, seed=5)
        on = generate_scenario(coupled, seed=5)
        assert_array_equal(off.driver, on.driver)
        diff = on.series.values - off.series.values
        assert diff[0] == 0.0
        assert_allclose(diff[1:], 40.0 * on.driver[:-1], rtol=1e-12, atol=1e-9)

    def test_feature_attribution(self, scenario):
        table = scenario.features
        assert table.columns[:2] == ("social.num_posts", "reviews.avg_sentiment")
        assert len(table.columns) == 8
        assert table.contributors["social.num_posts"] == scenario.planted
        assert table.contributors["reviews.avg_sentiment"] == scenario.planted
        bots = set(scenario.graph.node_ids[-3:])
        for column in table.columns[2:]:
            nodes = table.contributors[column]
            assert nodes and set(nodes) <= bots
        assert tuple(table.periods) == tuple(scenario.series.labels)

    def test_noise_feature_count_zero(self):
        scenario = generate_scenario(SyntheticSpec(length=20, noise_feature_count=0), seed=1)
        assert scenario.features.columns == ("social.num_posts", "reviews.avg_sentiment")

    def test_write_scenario_round_trips(self, tmp_path, scenario):
        paths = write_scenario(scenario, tmp_path)
        for path in paths.values():
            assert path.exists()
        series = read_series_csv(paths["series"])
        assert_array_equal(series.values, scenario.series.values)
        bundle = load_bundle(
            paths["series"],
            paths["features"],
            paths["contributors"],
            paths["nodes"],
            paths["edges"],
        )
        assert_array_equal(bundle.features.values, scenario.features.values)
        assert bundle.graph.node_ids == scenario.graph.node_ids
        planted = json.loads(paths["planted"].read_text(encoding="utf-8"))
        assert planted == {"planted": list(scenario.planted)}


class TestAssembleWindows:
    def test_counting_and_content(self):
        target = np.arange(10.0)
        windows, targets = assemble_windows(target, 3)
        assert windows.shape == (7, 3, 1)
        assert_array_equal(targets, target[3:])
        assert_array_equal(windows[2, :, 0], [2.0, 3.0, 4.0])

    def test_component_channels_replace_the_raw_series(self):
        target = np.arange(10.0)
        components = np.vstack([target * 0.25, target * 0.75])
        windows, targets = assemble_windows(target, 4, components=components)
        assert windows.shape == (6, 4, 2)
        assert_array_equal(windows[1, :, 0], target[1:5] * 0.25)
        assert_array_equal(windows[1, :, 1], target[1:5] * 0.75)
        assert_array_equal(targets, target[4:])

    def test_feature_channels_append_after_components(self):
        target = np.arange(8.0)
        features = np.column_stack([np.full(8, 2.0), np.arange(8.0) * 10.0])
        windows, _ = assemble_windows(target, 3, features=features)
        assert windows.shape == (5, 3, 3)
        assert_array_equal(windows[0, :, 0], target[:3])
        assert_array_equal(windows[0, :, 1], [2.0, 2.0, 2.0])
        assert_array_equal(windows[0, :, 2], [0.0, 10.0, 20.0])

    def test_errors(self):
        with pytest.raises(TooShort):
            assemble_windows(np.arange(5.0), 5)
        with pytest.raises(ValueError):
            assemble_windows(np.arange(5.0), 0)
        with pytest.raises(ValueError):
            assemble_windows(np.ones((3, 2)), 2)
        with pytest.raises(ValueError):
            assemble_windows(np.arange(8.0), 3, components=np.ones((2, 7)))
        with pytest.raises(ValueError):
            assemble_windows(np.arange(8.0), 3, features=np.ones((7, 2)))

    def test_component_window_sets_sum_to_the_series(self):
        target = np.arange(12.0) + 1.0
        components = np.vstack([0.3 * target, 0.7 * target])
        pairs = assemble_component_windows(components, 4)
        assert len(pairs) == 2
        for k, (windows, targets) in enumerate(pairs):
            assert windows.shape == (8, 4, 1)
            assert_array_equal(targets, components[k][4:])
            assert_array_equal(windows[0, :, 0], components[k][:4])
        summed = pairs[0][1] + pairs[1][1]
        assert_allclose(summed, target[4:], rtol=1e-15)

    def test_component_window_sets_share_features(self):
        components = np.vstack([np.arange(10.0)])
        features = np.ones((10, 2))
        pairs = assemble_component_windows(components, 3, features=features)
        assert pairs[0][0].shape == (7, 3, 3)


class TestPipelineConfig:
    def test_defaults(self):
        config = PipelineConfig()
        assert config.feature_mode == "full"
        assert config.use_ewt and config.use_leaders
        assert config.horizons == (1, 2, 3)
        assert config.window_length == 12
        assert config.units_per_layer == 32
        assert config.test_length is None
        spec = config.network_spec(5)
        assert spec.input_dim == 5
        assert spec.window_length == 12
        assert spec.mode == "bilstm"

    def test_validation(self):
        with pytest.raises(ValueError):
            PipelineConfig(feature_mode="everything")
        with pytest.raises(ValueError):
            PipelineConfig(horizons=(2, 1))
        with pytest.raises(ValueError):
            PipelineConfig(horizons=())
        with pytest.raises(ValueError):
            PipelineConfig(test_length=1)
        with pytest.raises(ValueError):
            PipelineConfig(bo_budget=1)
        with pytest.raises(ValueError):
            PipelineConfig(x_low=1.0, x_high=1.0)
        with pytest.raises(ValueError):
            PipelineConfig(dropout_rate=1.0)

    def custom_config(self):
        return PipelineConfig(
            feature_mode="attention_only",
            use_ewt=False,
            use_leaders=False,
            ewt=EwtConfig(
                num_components=4, gamma=0.2, min_peak_prominence=0.05, max_auto_components=5
            ),
            trust=TrustModel(k=0.6, l=0.7, s=0.8, w_d=0.4, w_i=0.35, w_r=0.25),
            game=GameParams(
                x_pay=2.0,
                y_pay=3.0,
                i_pay=0.75,
                d=2.0,
                u_a=0.4,
                u_b=0.6,
                lam=0.2,
                rho=0.3,
                mu=0.25,
                eta=0.05,
            ),
            synergy=SynergyParams(delta=0.9, partial=0.8, c=0.7),
            detector=SearchConfig(
                ec_percentile=75.0, max_coalition_size=4, beam_width=4, mc_samples=2000
            ),
            decay_kappa=0.5,
            max_hops=2,
            window_length=8,
            units_per_layer=16,
            num_layers=2,
            dropout_rate=0.2,
            mode="lstm",
            training=TrainingConfig(
                learning_rate=0.005,
                l2_penalty=1e-5,
                max_epochs=200,
                patience=20,
                grad_clip_norm=2.0,
                restarts=3,
            ),
            bo_budget=10,
            bo_init=4,
            test_length=10,
            horizons=(1, 3, 6),
            x_low=0.1,
            x_high=0.9,
            seed=42,
        )

    def test_ini_round_trip_is_exact(self, tmp_path):
        custom = self.custom_config()
        path = tmp_path / "config.ini"
        path.write_text(config_to_ini(custom), encoding="utf-8")
        assert load_pipeline_config(path) == custom

    def test_default_round_trip(self, tmp_path):
        config = PipelineConfig()
        path = tmp_path / "config.ini"
        path.write_text(config_to_ini(config), encoding="utf-8")
        assert load_pipeline_config(path) == config

    def test_network_and_training_sections_place_the_fields(self, tmp_path):
        path = tmp_path / "config.ini"
        path.write_text(
            "[network]\nwindow_length = 9\nunits_per_layer = 24\n"
            "[training]\nrestarts = 5\nlearning_rate = 0.002\n",
            encoding="utf-8",
        )
        config = load_pipeline_config(path)
        assert config.window_length == 9
        assert config.units_per_layer == 24
        assert config.training.restarts == 5
        assert config.training.learning_rate == 0.002

    def test_lambda_key_maps_onto_the_game_field(self, tmp_path):
        path = tmp_path / "config.ini"
        path.write_text("[game]\nlambda = 0.15\n", encoding="utf-8")
        assert load_pipeline_config(path).game.lam == 0.15

    def test_unknown_sections_and_keys_are_errors(self, tmp_path):
        path = tmp_path / "config.ini"
        path.write_text("[plotting]\nstyle = dark\n", encoding="utf-8")
        with pytest.raises(ValueError, match="plotting"):
            load_pipeline_config(path)
        path.write_text("[network]\nwindow = 9\n", encoding="utf-8")
        with pytest.raises(ValueError, match="window"):
            load_pipeline_config(path)
        with pytest.raises(ValueError):
            build_config({"nonsense": {}})
        with pytest.raises(ValueError):
            build_config({"network": {"window": 9}})

    def test_bad_values_name_the_key(self, tmp_path):
        path = tmp_path / "config.ini"
        path.write_text("[pipeline]\nseed = soon\n", encoding="utf-8")
        with pytest.raises(ValueError, match="pipeline.seed"):
            load_pipeline_config(path)

    def test_auto_and_none_tokens(self, tmp_path):
        path = tmp_path / "config.ini"
        path.write_text(
            "[ewt]\nnum_components = auto\ngamma = auto\n"
            "[game]\nd = none\n"
            "[tuning]\nbudget = none\ninit_design_size = none\n",
            encoding="utf-8",
        )
        config = load_pipeline_config(path)
        assert config.ewt.num_components == "auto"
        assert config.ewt.gamma == "auto"
        assert config.game.d is None
        assert config.bo_budget is None and config.bo_init is None

    def test_build_config_with_typed_sections(self):
        config = build_config(
            {
                "pipeline": {"use_ewt": False, "horizons": (1, 2)},
                "network": {"window_length": 6},
                "tuning": {"budget": 8},
            }
        )
        assert not config.use_ewt
        assert config.horizons == (1, 2)
        assert config.window_length == 6
        assert config.bo_budget == 8
