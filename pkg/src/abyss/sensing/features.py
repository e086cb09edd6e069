"""Six summary statistics per trace; the classifiers see nothing else."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .traces import LightTrace

FEATURE_NAMES = ("mean", "variance", "minimum", "maximum", "iqr", "lag1_autocorr")


@dataclass(frozen=True)
class FeatureVector:
    mean: float
    variance: float
    minimum: float
    maximum: float
    iqr: float
    lag1_autocorr: float

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be >= 0")
        if not (self.minimum <= self.mean <= self.maximum):
            raise ValueError("min <= mean <= max must hold")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.mean, self.variance, self.minimum, self.maximum,
             self.iqr, self.lag1_autocorr]
        )


def extract_features(trace: LightTrace | np.ndarray) -> FeatureVector:
    """Population variance; IQR via linear-interpolated percentiles; lag-1
    autocorrelation is 0 for a constant trace."""
    x = trace.samples if isinstance(trace, LightTrace) else np.asarray(trace, float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("need a 1-D trace with at least 2 samples")
    mean = float(x.mean())
    centered = x - mean
    denom = float((centered**2).sum())
    if denom > 0:
        lag1 = float((centered[:-1] * centered[1:]).sum() / denom)
    else:
        lag1 = 0.0
    q25, q75 = np.percentile(x, [25, 75])
    return FeatureVector(
        mean=mean,
        variance=float(x.var()),
        minimum=float(x.min()),
        maximum=float(x.max()),
        iqr=float(q75 - q25),
        lag1_autocorr=lag1,
    )
