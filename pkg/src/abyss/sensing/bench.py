"""Cross-validated accuracy bench over condition subsets.

Produces one row per subset (all four conditions pooled, then each
luminosity and each medium on its own) with k-NN, random-forest, and average
accuracy, mirroring how the material-sensing experiment is scored.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import MaterialClass
from ..engine import derive_stream
from .classifiers import Dataset, ForestSpec, KnnSpec, kfold_cv
from .features import FeatureVector, extract_features
from .traces import CONDITIONS, Condition, GeneratorSpec, generate_trace

SUBSETS: tuple[tuple[str, ...], ...] = (
    ("all", ""),
    ("ambient", "luminosity"),
    ("darkness", "luminosity"),
    ("air", "medium"),
    ("water", "medium"),
)


@dataclass(frozen=True)
class BenchRow:
    subset: str
    knn_accuracy: float
    rf_accuracy: float

    @property
    def average(self) -> float:
        return 0.5 * (self.knn_accuracy + self.rf_accuracy)


def _in_subset(condition: Condition, subset: str) -> bool:
    if subset == "all":
        return True
    return subset in (condition.medium.value, condition.luminosity.value)


def build_dataset(
    generator: GeneratorSpec, repetitions: int, seed: int
) -> list[tuple[FeatureVector, MaterialClass, Condition]]:
    """repetitions traces per (material, condition), features precomputed."""
    rng = derive_stream(seed, "sensing-bench")
    rows = []
    for condition in CONDITIONS:
        for material in MaterialClass:
            for rep in range(repetitions):
                gen = rng.child(f"gen/{condition.label}/{material.name}/{rep}")
                trace = generate_trace(generator, material, condition, gen)
                rows.append((extract_features(trace), material, condition))
    return rows


def bench_sensing(
    generator: GeneratorSpec,
    repetitions: int = 6,
    seed: int = 0,
    folds: int = 6,
    knn: KnnSpec | None = None,
    forest: ForestSpec | None = None,
) -> list[BenchRow]:
    knn = knn or KnnSpec()
    forest = forest or ForestSpec()
    rows = build_dataset(generator, repetitions, seed)
    rng = derive_stream(seed, "sensing-bench-cv")
    table = []
    for subset, _ in SUBSETS:
        data: Dataset = [
            (fv, mat) for fv, mat, cond in rows if _in_subset(cond, subset)
        ]
        acc_knn = kfold_cv(data, folds, knn, rng.child(f"{subset}/knn"))
        acc_rf = kfold_cv(data, folds, forest, rng.child(f"{subset}/rf"))
        table.append(BenchRow(subset, acc_knn, acc_rf))
    return table


def format_table(table: list[BenchRow]) -> str:
    lines = [f"{'subset':<10} {'k-NN':>7} {'forest':>7} {'average':>8}"]
    for row in table:
        lines.append(
            f"{row.subset:<10} {row.knn_accuracy:>7.3f} "
            f"{row.rf_accuracy:>7.3f} {row.average:>8.3f}"
        )
    return "\n".join(lines)
