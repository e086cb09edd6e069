import numpy as np
import pytest

from abyss.sensing.features import FeatureVector, extract_features


class TestExtractFeatures:
    def test_constant_trace(self):
        fv = extract_features(np.full(100, 3.5))
        assert fv.mean == 3.5
        assert fv.variance == 0.0
        assert fv.iqr == 0.0
        assert fv.lag1_autocorr == 0.0
        assert fv.minimum == fv.maximum == 3.5

    def test_one_two_three_four(self):
        fv = extract_features(np.array([1.0, 2.0, 3.0, 4.0]))
        assert fv.mean == 2.5
        assert fv.variance == 1.25  # population variance
        assert fv.minimum == 1.0
        assert fv.maximum == 4.0

    def test_alternating_signal_lag1_near_minus_one(self):
        x = np.tile([0.0, 1.0], 500)
        fv = extract_features(x)
        assert fv.lag1_autocorr == pytest.approx(-1.0, abs=2e-3)

    def test_lag1_matches_formula_on_random_data(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=200)
        fv = extract_features(x)
        xc = x - x.mean()
        expected = (xc[:-1] * xc[1:]).sum() / (xc**2).sum()
        assert fv.lag1_autocorr == pytest.approx(expected, abs=1e-12)

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            extract_features(np.array([1.0]))

    def test_min_mean_max_invariant(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            fv = extract_features(rng.uniform(0, 100, size=50))
            assert fv.minimum <= fv.mean <= fv.maximum
            assert fv.variance >= 0

    def test_as_array_order(self):
        fv = FeatureVector(1.0, 2.0, 0.0, 3.0, 0.5, 0.1)
        assert list(fv.as_array()) == [1.0, 2.0, 0.0, 3.0, 0.5, 0.1]
