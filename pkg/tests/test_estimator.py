import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigdist import (
    InvalidParameter,
    NonFiniteInput,
    NumericError,
    SchemaError,
    SldEstimator,
    Threshold,
    build_estimator,
    in_prediction_region,
    required_sample_count,
    theoretical_rmse,
)
from sigdist import jsonio
from sigdist.models import DensityModel

TOY_DENSITIES = np.log([1.0, 2.0, 3.0, 4.0])
TOY_FRACTIONS = np.log([0.1, 0.2, 0.3, 0.4])


def heaviside_cdf(values, query):
    """Linear-scan oracle: (1/n) * sum of step(query - value), step(0) = 1."""
    values = np.asarray(values)
    return np.sum(values <= query) / values.size


class TestRequiredSampleCount:
    def test_worked_examples(self):
        assert required_sample_count(0.005) == 10_000
        assert required_sample_count(0.05) == 100
        assert required_sample_count(0.5) == 1

    def test_out_of_range(self):
        for bad in (0.0, -0.1, 0.6, float("nan")):
            with pytest.raises(InvalidParameter):
                required_sample_count(bad)

    @given(st.floats(min_value=1e-4, max_value=0.5, allow_nan=False))
    def test_minimal_count_meeting_budget(self, rmse):
        n = required_sample_count(rmse)
        assert 1.0 / math.sqrt(4.0 * n) <= rmse + 1e-15
        if n > 1:
            assert 1.0 / math.sqrt(4.0 * (n - 1)) > rmse - 1e-15


class TestTheoreticalRmse:
    def test_worked_examples(self):
        assert theoretical_rmse(0.5, 100) == pytest.approx(0.05, abs=1e-15)
        assert theoretical_rmse(0.05, 10_000) == pytest.approx(0.002179449471770337, abs=1e-15)

    def test_worst_case_bound(self):
        levels = np.linspace(0.0, 1.0, 101)
        assert all(theoretical_rmse(level, 25) <= 0.1 + 1e-15 for level in levels)

    def test_out_of_range(self):
        with pytest.raises(InvalidParameter):
            theoretical_rmse(1.2, 10)
        with pytest.raises(InvalidParameter):
            theoretical_rmse(0.5, 0)


class TestBuild:
    def test_cardinality_and_order(self, std_gaussian_1d):
        est = SldEstimator.build(std_gaussian_1d, 4, seed=0)
        assert est.n == 4
        assert (np.diff(est.sorted_log_densities) >= 0).all()

    def test_deterministic_given_seed(self, mixture_2d):
        a = SldEstimator.build(mixture_2d, 500, seed=9)
        b = SldEstimator.build(mixture_2d, 500, seed=9)
        np.testing.assert_array_equal(a.sorted_log_densities, b.sorted_log_densities)

    def test_tuple_seed(self, std_gaussian_1d):
        a = SldEstimator.build(std_gaussian_1d, 50, seed=(3, 16, 0))
        b = SldEstimator.build(std_gaussian_1d, 50, seed=(3, 16, 0))
        np.testing.assert_array_equal(a.sorted_log_densities, b.sorted_log_densities)

    def test_invalid_count(self, std_gaussian_1d):
        with pytest.raises(InvalidParameter):
            SldEstimator.build(std_gaussian_1d, 0, seed=0)

    def test_non_finite_log_density_aborts(self):
        class BrokenModel(DensityModel):
            _dim = 1

            def sample(self, rng, count):
                return rng.normal(size=(count, 1))

            def log_pdf(self, x):
                return np.full(np.asarray(x).shape[0], -np.inf)

        with pytest.raises(NumericError):
            SldEstimator.build(BrokenModel(), 10, seed=0)

    def test_module_level_alias(self, std_gaussian_1d):
        est = build_estimator(std_gaussian_1d, 10, seed=1)
        assert est.n == 10


class TestEmpiricalCdf:
    def test_toy_values(self):
        est = SldEstimator(TOY_FRACTIONS)
        assert est.empirical_cdf(math.log(0.25)) == 0.5
        assert est.empirical_cdf(math.log(0.05)) == 0.0
        assert est.empirical_cdf(math.log(0.4)) == 1.0
        assert est.empirical_cdf(math.log(0.9)) == 1.0

    def test_tie_counts_as_below(self):
        est = SldEstimator(TOY_DENSITIES)
        assert est.empirical_cdf(TOY_DENSITIES[1]) == 0.5

    def test_infinite_queries(self):
        est = SldEstimator(TOY_DENSITIES)
        assert est.empirical_cdf(-math.inf) == 0.0
        assert est.empirical_cdf(math.inf) == 1.0

    def test_nan_query_rejected(self):
        est = SldEstimator(TOY_DENSITIES)
        with pytest.raises(NonFiniteInput):
            est.empirical_cdf(float("nan"))

    def test_matches_linear_oracle_on_random_and_adversarial_queries(self):
        rng = np.random.default_rng(10)
        values = np.sort(rng.normal(size=537))
        est = SldEstimator(values)
        queries = np.concatenate([
            rng.normal(size=1000),
            values[rng.integers(0, values.size, 50)],          # exact ties
            [values[0], values[-1], -np.inf, np.inf],          # endpoints
            np.nextafter(values[:25], -np.inf),                # just below entries
            np.nextafter(values[:25], np.inf),                 # just above entries
        ])
        got = est.empirical_cdf(queries)
        expected = np.array([heaviside_cdf(values, q) for q in queries])
        np.testing.assert_array_equal(got, expected)

    def test_monotone_and_lattice_valued(self):
        rng = np.random.default_rng(12)
        values = np.sort(rng.normal(size=64))
        est = SldEstimator(values)
        queries = np.sort(rng.normal(size=500))
        cdf = est.empirical_cdf(queries)
        assert (np.diff(cdf) >= 0).all()
        assert ((cdf >= 0) & (cdf <= 1)).all()
        lattice = np.arange(65) / 64
        assert np.isin(cdf, lattice).all()
        sweep = est.empirical_cdf(np.concatenate([[-np.inf], values, [np.inf]]))
        assert set(np.unique(sweep)) <= set(lattice)

    @given(
        data=st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=80),
        queries=st.lists(st.floats(min_value=-1e7, max_value=1e7), min_size=1, max_size=40),
        pick_entries=st.booleans(),
    )
    def test_oracle_equivalence_property(self, data, queries, pick_entries):
        values = np.sort(np.asarray(data, dtype=np.float64))
        est = SldEstimator(values)
        probe = np.asarray(queries, dtype=np.float64)
        if pick_entries:
            probe = np.concatenate([probe, values])
        got = est.empirical_cdf(probe)
        expected = np.array([heaviside_cdf(values, q) for q in probe])
        np.testing.assert_array_equal(got, expected)


class TestScoring:
    def test_mode_scores_near_one(self, std_gaussian_1d):
        est = SldEstimator.build(std_gaussian_1d, 10_000, seed=13)
        assert 0.99 <= est.significance_level_of([0.0]) <= 1.0

    def test_five_sigma_scores_near_zero(self, std_gaussian_1d):
        est = SldEstimator.build(std_gaussian_1d, 10_000, seed=13)
        assert est.significance_level_of([5.0]) < 0.001

    def test_rank_shift_invariance(self):
        rng = np.random.default_rng(14)
        values = np.sort(rng.normal(size=400))
        queries = rng.normal(size=200)
        base = SldEstimator(values).empirical_cdf(queries)
        for shift in (123.456, -77.0, 1e4):
            shifted = SldEstimator(np.sort(values + shift)).empirical_cdf(queries + shift)
            np.testing.assert_array_equal(base, shifted)

    def test_batch_scoring_matches_scalar(self, mixture_2d):
        est = SldEstimator.build(mixture_2d, 2000, seed=15)
        points = mixture_2d.sample(np.random.default_rng(16), 50)
        batch = est.significance_level_of(points)
        singles = np.array([est.significance_level_of(p) for p in points])
        np.testing.assert_array_equal(batch, singles)

    def test_scoring_requires_model(self):
        with pytest.raises(InvalidParameter):
            SldEstimator(TOY_DENSITIES).significance_level_of([0.0])


class TestThreshold:
    def test_alpha_zero_rejects_nothing(self):
        est = SldEstimator(TOY_DENSITIES)
        th = est.threshold_for(0.0)
        assert th.theta == 0.0
        assert th.log_theta == -math.inf

    def test_toy_median(self):
        est = SldEstimator(TOY_DENSITIES)
        assert est.threshold_for(0.5).theta == pytest.approx(2.0, rel=1e-12)

    def test_alpha_one_returns_max_entry(self):
        est = SldEstimator(TOY_DENSITIES)
        assert est.threshold_for(1.0).log_theta == TOY_DENSITIES[-1]

    def test_plateau_returns_smallest_admissible(self):
        values = np.log([1.0, 2.0, 2.0, 2.0, 5.0])
        est = SldEstimator(np.sort(values))
        # k = ceil(0.4 * 5) = 2 -> the first of the tied entries
        assert est.threshold_for(0.4).log_theta == math.log(2.0)

    def test_out_of_range_alpha(self):
        est = SldEstimator(TOY_DENSITIES)
        for bad in (-0.01, 1.01, float("nan")):
            with pytest.raises(InvalidParameter):
                est.threshold_for(bad)

    @given(
        st.lists(st.floats(min_value=-100, max_value=100), min_size=1, max_size=60, unique=True),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_round_trip_within_one_step(self, data, alpha):
        # distinct entries: continuous densities produce ties with probability 0
        est = SldEstimator(np.sort(np.asarray(data)))
        recovered = est.empirical_cdf(est.threshold_for(alpha).log_theta)
        assert alpha - 1.0 / est.n <= recovered <= alpha + 1.0 / est.n

    def test_tied_entries_keep_rejected_mass_at_most_alpha(self):
        # on a CDF plateau the smallest admissible entry is returned, so the
        # strictly-below mass never exceeds alpha even with duplicates
        values = np.sort(np.array([0.0, 0.0, 0.0, 1.0]))
        est = SldEstimator(values)
        th = est.threshold_for(0.5)
        assert th.log_theta == 0.0
        strictly_below = np.sum(values < th.log_theta) / est.n
        assert strictly_below <= 0.5


class TestClassify:
    def test_boundary_is_inlier(self, stub_model):
        est = SldEstimator(TOY_DENSITIES, model=stub_model)
        # query pinned to the 2nd entry: z = 0.5 exactly
        outcome = est.classify([TOY_DENSITIES[1]], alpha=0.5)
        assert outcome.z == 0.5
        assert not outcome.outlier
        assert outcome.label == "inlier"

    def test_gaussian_mode_and_tail(self, std_gaussian_1d):
        est = SldEstimator.build(std_gaussian_1d, 10_000, seed=17)
        assert not est.classify([0.0], 0.05).outlier
        tail = est.classify([5.0], 0.05)
        assert tail.outlier
        assert tail.label == "outlier"

    def test_coverage_near_alpha(self, std_gaussian_1d):
        est = SldEstimator.build(std_gaussian_1d, 10_000, seed=18)
        fresh = std_gaussian_1d.sample(np.random.default_rng(19), 100_000)
        fraction = est.classify(fresh, 0.05).outlier.mean()
        assert 0.045 <= fraction <= 0.055


class TestPredictionRegion:
    def test_zero_threshold_accepts_everything(self, mixture_2d):
        th = Threshold(-math.inf)
        rng = np.random.default_rng(20)
        points = rng.normal(scale=10.0, size=(100, 2))
        assert in_prediction_region(mixture_2d, th, points).all()

    def test_gaussian_interval(self, std_gaussian_1d):
        # threshold at the density value of x = 1.96: keeps the center, drops x = 3
        th = Threshold(std_gaussian_1d.log_pdf([1.96]))
        assert in_prediction_region(std_gaussian_1d, th, [0.0])
        assert not in_prediction_region(std_gaussian_1d, th, [3.0])

    def test_region_agrees_with_classify_off_ties(self, mixture_2d):
        est = SldEstimator.build(mixture_2d, 1000, seed=21)
        alpha = 0.1
        th = est.threshold_for(alpha)
        rng = np.random.default_rng(22)
        points = mixture_2d.sample(rng, 500)
        log_densities = mixture_2d.log_pdf(points)
        off_ties = ~np.isin(log_densities, est.sorted_log_densities)
        inside = in_prediction_region(mixture_2d, th, points[off_ties])
        verdict_inlier = ~est.classify(points[off_ties], alpha).outlier
        np.testing.assert_array_equal(inside, verdict_inlier)


class TestValidationAndPersistence:
    def test_unsorted_rejected(self):
        with pytest.raises(InvalidParameter):
            SldEstimator([0.3, 0.1, 0.2])

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteInput):
            SldEstimator([0.1, np.inf])

    def test_empty_rejected(self):
        with pytest.raises(InvalidParameter):
            SldEstimator([])

    def test_round_trip(self, tmp_path, mixture_2d):
        est = SldEstimator.build(mixture_2d, 256, seed=23)
        path = tmp_path / "estimator.json"
        est.save(path)
        restored = SldEstimator.load(path)
        assert restored.n == est.n
        assert restored.seed == 23
        np.testing.assert_array_equal(restored.sorted_log_densities, est.sorted_log_densities)
        np.testing.assert_array_equal(
            restored.model.log_pdf(np.zeros((1, 2))), est.model.log_pdf(np.zeros((1, 2)))
        )

    def test_loading_unsorted_document_rejected(self, tmp_path, std_gaussian_1d):
        est = SldEstimator.build(std_gaussian_1d, 8, seed=24)
        document = est.to_dict()
        document["sorted_log_densities"] = document["sorted_log_densities"][::-1]
        with pytest.raises(SchemaError):
            SldEstimator.from_dict(document)

    def test_unknown_schema_rejected(self, std_gaussian_1d):
        document = SldEstimator.build(std_gaussian_1d, 8, seed=25).to_dict()
        document["schema"] = 99
        with pytest.raises(SchemaError):
            SldEstimator.from_dict(document)

    def test_count_mismatch_rejected(self, std_gaussian_1d):
        document = SldEstimator.build(std_gaussian_1d, 8, seed=26).to_dict()
        document["n"] = 9
        with pytest.raises(SchemaError):
            SldEstimator.from_dict(document)

    def test_json_floats_round_trip_exactly(self, std_gaussian_1d):
        est = SldEstimator.build(std_gaussian_1d, 64, seed=27)
        document = json.loads(jsonio.dumps(est.to_dict()))
        np.testing.assert_array_equal(
            np.asarray(document["sorted_log_densities"]), est.sorted_log_densities
        )
