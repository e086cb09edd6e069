"""Condition-dependent confusion model used by simulated AUV classification.

Full confusion matrices are rarely available, so the default model places the
per-condition correct-classification mass on the diagonal and spreads the
remainder uniformly: in-air conditions use the luminosity bench values,
underwater uses the k-NN reading (the underwater row's figures disagree with
each other, and 0.667 is the value this artifact standardizes on).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import MaterialClass
from ..engine import RngStream
from .traces import CONDITIONS, Condition, Luminosity, Medium

N = len(MaterialClass)

DEFAULT_DIAGONALS: dict[Condition, float] = {
    Condition(Medium.AIR, Luminosity.AMBIENT): 0.817,
    Condition(Medium.AIR, Luminosity.DARKNESS): 0.792,
    Condition(Medium.WATER, Luminosity.AMBIENT): 0.667,
    Condition(Medium.WATER, Luminosity.DARKNESS): 0.667,
}


@dataclass
class ConfusionModel:
    rows: dict[Condition, np.ndarray]  # per condition: 6x6, rows true class

    def __post_init__(self):
        for condition, matrix in self.rows.items():
            matrix = np.asarray(matrix, dtype=float)
            self.rows[condition] = matrix
            if matrix.shape != (N, N):
                raise ValueError(f"{condition.label}: matrix must be {N}x{N}")
            if np.any(matrix < 0) or np.any(matrix > 1):
                raise ValueError(f"{condition.label}: entries must be in [0, 1]")
            sums = matrix.sum(axis=1)
            if np.any(np.abs(sums - 1.0) > 1e-9):
                raise ValueError(f"{condition.label}: rows must sum to 1")

    def diagonal(self, condition: Condition) -> np.ndarray:
        return np.diag(self.rows[condition])


def uniform_offdiagonal_matrix(diagonal: float) -> np.ndarray:
    """Diagonal mass `diagonal`, remainder spread evenly over the other 5."""
    if not 0.0 <= diagonal <= 1.0:
        raise ValueError("diagonal mass must be in [0, 1]")
    off = (1.0 - diagonal) / (N - 1)
    matrix = np.full((N, N), off)
    np.fill_diagonal(matrix, diagonal)
    return matrix


def confusion_from_diagonals(diagonals: dict[Condition, float]) -> ConfusionModel:
    return ConfusionModel(
        {c: uniform_offdiagonal_matrix(d) for c, d in diagonals.items()}
    )


def default_confusion_model() -> ConfusionModel:
    return confusion_from_diagonals(DEFAULT_DIAGONALS)


def identity_confusion_model() -> ConfusionModel:
    return ConfusionModel({c: np.eye(N) for c in CONDITIONS})


def sample_confusion(
    model: ConfusionModel,
    true: MaterialClass,
    condition: Condition,
    rng: RngStream,
) -> MaterialClass:
    """One categorical draw from the true-class row."""
    if condition not in model.rows:
        raise ValueError(f"confusion model has no row set for {condition.label}")
    row = model.rows[condition][true.value]
    u = rng.uniform()
    acc = 0.0
    for j in range(N):
        acc += row[j]
        if u < acc:
            return MaterialClass(j)
    return MaterialClass(N - 1)
