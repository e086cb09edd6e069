"""k-NN and random-forest classifiers built directly on feature arrays.

Both are deliberately small and fully deterministic given their stream: ties
in votes always resolve to the lowest material index, nearest-neighbor ties
to the earliest training row, and every random choice (bootstrap rows,
per-split feature subsets, fold shuffles) comes from the caller's RngStream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import MaterialClass
from ..engine import RngStream
from .features import FeatureVector

N_CLASSES = len(MaterialClass)

Dataset = list[tuple[FeatureVector, MaterialClass]]


@dataclass(frozen=True)
class KnnSpec:
    k: int = 5

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError("k must be an odd integer >= 1")


@dataclass(frozen=True)
class ForestSpec:
    trees: int = 50
    max_depth: int = 8
    feature_subsample: int = 3

    def __post_init__(self):
        if self.trees < 1:
            raise ValueError("need at least one tree")


ClassifierSpec = KnnSpec | ForestSpec


def dataset_arrays(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([fv.as_array() for fv, _ in dataset])
    y = np.array([label.value for _, label in dataset], dtype=int)
    return X, y


class KnnModel:
    def __init__(self, spec: KnnSpec, X: np.ndarray, y: np.ndarray):
        self.spec = spec
        self.X = X
        self.y = y

    def predict_one(self, features: FeatureVector) -> MaterialClass:
        d2 = ((self.X - features.as_array()) ** 2).sum(axis=1)
        nearest = np.argsort(d2, kind="stable")[: self.spec.k]
        votes = np.bincount(self.y[nearest], minlength=N_CLASSES)
        return MaterialClass(int(votes.argmax()))


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "label")

    def __init__(self, label=None, feature=None, threshold=None, left=None, right=None):
        self.label = label
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right


def _majority(y: np.ndarray) -> int:
    return int(np.bincount(y, minlength=N_CLASSES).argmax())


def _best_split(X: np.ndarray, y: np.ndarray, features: list[int]):
    """Lowest weighted Gini over candidate midpoints; None when unsplittable."""
    n = len(y)
    best = (np.inf, None, None)
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        cuts = np.nonzero(xs[:-1] < xs[1:])[0]
        if len(cuts) == 0:
            continue
        onehot = np.zeros((n, N_CLASSES))
        onehot[np.arange(n), ys] = 1.0
        left_counts = np.cumsum(onehot, axis=0)[cuts]
        total = np.bincount(ys, minlength=N_CLASSES).astype(float)
        right_counts = total - left_counts
        nl = (cuts + 1).astype(float)
        nr = n - nl
        gini_l = 1.0 - ((left_counts / nl[:, None]) ** 2).sum(axis=1)
        gini_r = 1.0 - ((right_counts / nr[:, None]) ** 2).sum(axis=1)
        weighted = (nl * gini_l + nr * gini_r) / n
        i = int(weighted.argmin())
        if weighted[i] < best[0]:
            best = (float(weighted[i]), f, 0.5 * (xs[cuts[i]] + xs[cuts[i] + 1]))
    if best[1] is None:
        return None
    return best[1], best[2]


def _sample_features(rng: RngStream, n_features: int, k: int) -> list[int]:
    pool = list(range(n_features))
    k = min(k, n_features)
    for i in range(k):
        j = i + rng.randint(n_features - i)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def _grow(X, y, rng, spec: ForestSpec, depth: int) -> _Node:
    if depth >= spec.max_depth or len(np.unique(y)) == 1:
        return _Node(label=_majority(y))
    features = _sample_features(rng, X.shape[1], spec.feature_subsample)
    split = _best_split(X, y, features)
    if split is None:
        return _Node(label=_majority(y))
    f, threshold = split
    mask = X[:, f] <= threshold
    return _Node(
        feature=f,
        threshold=threshold,
        left=_grow(X[mask], y[mask], rng, spec, depth + 1),
        right=_grow(X[~mask], y[~mask], rng, spec, depth + 1),
    )


def _tree_predict(node: _Node, x: np.ndarray) -> int:
    while node.label is None:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.label


class ForestModel:
    def __init__(self, spec: ForestSpec, trees: list[_Node]):
        self.spec = spec
        self.trees = trees

    def predict_one(self, features: FeatureVector) -> MaterialClass:
        x = features.as_array()
        votes = np.bincount(
            [_tree_predict(t, x) for t in self.trees], minlength=N_CLASSES
        )
        return MaterialClass(int(votes.argmax()))


ClassifierModel = KnnModel | ForestModel


def fit(spec: ClassifierSpec, dataset: Dataset, rng: RngStream) -> ClassifierModel:
    if not dataset:
        raise ValueError("dataset must be non-empty")
    X, y = dataset_arrays(dataset)
    if isinstance(spec, KnnSpec):
        if len(dataset) < spec.k:
            raise ValueError(f"k-NN with k={spec.k} needs at least {spec.k} examples")
        return KnnModel(spec, X, y)
    trees = []
    for _ in range(spec.trees):
        idx = np.array([rng.randint(len(y)) for _ in range(len(y))])
        trees.append(_grow(X[idx], y[idx], rng, spec, 0))
    return ForestModel(spec, trees)


def predict(model: ClassifierModel, features: FeatureVector) -> MaterialClass:
    return model.predict_one(features)


def kfold_cv(
    dataset: Dataset, folds: int, spec: ClassifierSpec, rng: RngStream
) -> float:
    """Stratified k-fold accuracy, pooled over held-out folds.

    Folds are dealt per class round-robin after a seeded shuffle, so every
    fold sees close to the same class mix.
    """
    if len(dataset) < folds:
        raise ValueError("fewer examples than folds")
    by_class: dict[int, list[int]] = {}
    for i, (_, label) in enumerate(dataset):
        by_class.setdefault(label.value, []).append(i)
    assignment = [0] * len(dataset)
    position = 0
    for label in sorted(by_class):
        indices = by_class[label]
        rng.shuffle(indices)
        for idx in indices:
            assignment[idx] = position % folds
            position += 1
    correct = 0
    for fold in range(folds):
        train = [dataset[i] for i in range(len(dataset)) if assignment[i] != fold]
        test = [dataset[i] for i in range(len(dataset)) if assignment[i] == fold]
        if not train or not test:
            continue
        model = fit(spec, train, rng.child(f"fold{fold}"))
        correct += sum(predict(model, fv) is label for fv, label in test)
    return correct / len(dataset)
