"""Simulated fuzzy pairwise constraints from labelled data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist

from .core import BadParameter, ConstraintSet, Dataset, FdcError, FuzzyConstraint


class NotEnoughPairs(FdcError):
    pass


class Correctness(str, Enum):
    ALL_OPPOSITE = "all-opposite"
    HALF_HALF = "half-half"
    ALL_CORRECT = "all-correct"


@dataclass(frozen=True)
class GroupSpec:
    fraction: float = 0.1
    correctness: Correctness = Correctness.ALL_CORRECT
    knn: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.fraction > 0:
            raise BadParameter("fraction must be positive", "fraction")
        if self.knn < 1:
            raise BadParameter("knn must be positive", "knn")
        object.__setattr__(self, "correctness", Correctness(self.correctness))


# the four benchmark groups, in order (i)-(iv)
BENCHMARK_GROUPS = (
    GroupSpec(0.05, Correctness.ALL_OPPOSITE),
    GroupSpec(0.10, Correctness.HALF_HALF),
    GroupSpec(0.05, Correctness.ALL_CORRECT),
    GroupSpec(0.10, Correctness.ALL_CORRECT),
)


def knn_neighbors(X, knn: int) -> np.ndarray:
    """Boolean m x m matrix: [i, j] is True when j is among i's knn nearest (self excluded)."""
    D = cdist(X, X, "sqeuclidean")
    np.fill_diagonal(D, np.inf)
    kk = min(knn, X.shape[0] - 1)
    nb = np.zeros(D.shape, dtype=bool)
    if kk > 0:
        idx = np.argsort(D, axis=1, kind="stable")[:, :kk]
        np.put_along_axis(nb, idx, True, axis=1)
    return nb


def sample_pairs(m: int, count: int, rng) -> list[tuple[int, int]]:
    """Distinct unordered pairs, uniform without replacement."""
    total = m * (m - 1) // 2
    if count > total:
        raise NotEnoughPairs(f"{count} pairs requested but only {total} exist for m={m}")
    if total <= 2_000_000:
        iu, ju = np.triu_indices(m, 1)
        flat = rng.choice(total, size=count, replace=False)
        return [(int(iu[r]), int(ju[r])) for r in flat]
    # large m: rejection sampling, count is tiny relative to total
    seen: set[tuple[int, int]] = set()
    pairs = []
    while len(pairs) < count:
        p, q = rng.choice(m, size=2, replace=False)
        key = (int(min(p, q)), int(max(p, q)))
        if key not in seen:
            seen.add(key)
            pairs.append(key)
    return pairs


def _nonzero_uniform(rng, low, high):
    while True:
        v = rng.uniform(low, high)
        if v != 0.0:
            return v


def generate_constraints(data, truth_labels, spec: GroupSpec) -> ConstraintSet:
    X = data.samples if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    y = np.asarray(truth_labels)
    m = X.shape[0]
    if y.shape[0] != m:
        raise BadParameter(f"{y.shape[0]} labels for {m} samples", "truth_labels")
    rng = np.random.default_rng(spec.seed)
    count = math.ceil(spec.fraction * m - 1e-9)
    pairs = sample_pairs(m, count, rng)
    nb = knn_neighbors(X, spec.knn)

    values = []
    for p, q in pairs:
        near = nb[p, q] or nb[q, p]
        if y[p] == y[q]:
            s = 0.5 + rng.uniform(0.0, 0.5) if near else _nonzero_uniform(rng, 0.0, 1.0)
        else:
            s = -0.5 - rng.uniform(0.0, 0.5) if not near else _nonzero_uniform(rng, -1.0, 0.0)
        values.append(s)
    values = np.asarray(values)

    if spec.correctness is Correctness.ALL_OPPOSITE:
        values = -values
    elif spec.correctness is Correctness.HALF_HALF:
        flip = rng.choice(len(values), size=len(values) // 2, replace=False)
        values[flip] = -values[flip]

    return ConstraintSet(tuple(FuzzyConstraint(p, q, float(s)) for (p, q), s in zip(pairs, values)))
