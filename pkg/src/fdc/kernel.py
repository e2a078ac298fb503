"""Kernel FDC: prototypes stay implicit in feature space.

The squared feature-space distance of x to prototype j is

    K(x, x) - 2 * sum_i w_ij K(x_i, x) / W_j + sum_{i,l} w_ij w_lj K(x_i, x_l) / W_j^2

with ``w_ij = u_ij^2 - alpha`` and ``W_j = sum_i w_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .core import BadParameter, ConstraintSet, Dataset, FdcConfig, FdcError
from .mem import FdcModel, fit


class DeletedCluster(FdcError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "gaussian"
    mu: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "gaussian"):
            raise BadParameter(f"unknown kernel {self.kind!r}", "kind")
        if self.kind == "gaussian" and not self.mu > 0:
            raise BadParameter(f"gaussian width mu must be positive, got {self.mu}", "mu")

    def __call__(self, A, B) -> np.ndarray:
        A, B = np.atleast_2d(A), np.atleast_2d(B)
        if self.kind == "linear":
            return A @ B.T
        return np.exp(-self.mu * cdist(A, B, "sqeuclidean"))


@dataclass(frozen=True)
class KernelCache:
    gram: np.ndarray
    spec: KernelSpec
    samples: np.ndarray


def gram_matrix(data, spec: KernelSpec) -> KernelCache:
    X = data.samples if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    K = spec(X, X)
    K = 0.5 * (K + K.T)
    if spec.kind == "gaussian":
        np.fill_diagonal(K, 1.0)
    K.setflags(write=False)
    return KernelCache(K, spec, X)


def _weights(u, alpha):
    W = np.asarray(u, dtype=float) ** 2 - alpha
    return W, W.sum(axis=0)


def kernel_distance(x, j: int, u, alpha: float, cache: KernelCache) -> float:
    """Distance of sample index ``x`` (int) or out-of-sample point ``x`` to cluster j."""
    W, tot = _weights(u, alpha)
    if tot[j] <= 0:
        raise DeletedCluster(f"cluster {j} has non-positive weight {tot[j]}")
    w = W[:, j]
    if isinstance(x, (int, np.integer)):
        kxx, kx = cache.gram[x, x], cache.gram[x]
    else:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        kxx = float(cache.spec(x, x)[0, 0])
        kx = cache.spec(cache.samples, x)[:, 0]
    d = kxx - 2.0 * (w @ kx) / tot[j] + (w @ cache.gram @ w) / tot[j] ** 2
    return max(float(d), 0.0)


def kernel_distances(u, alpha: float, cache: KernelCache) -> np.ndarray:
    """All (sample, cluster) distances, clamped at zero."""
    W, tot = _weights(u, alpha)
    K = cache.gram
    KW = K @ W
    cross = KW / tot
    self_term = np.einsum("ij,ij->j", W, KW) / tot**2
    d = np.diag(K)[:, None] - 2.0 * cross + self_term[None, :]
    return np.maximum(d, 0.0)


class KernelMetric:
    has_prototypes = False

    def __init__(self, cache: KernelCache):
        self.cache = cache

    def prototypes_and_distances(self, u, alpha):
        return None, kernel_distances(u, alpha, self.cache)


def kernel_fit(data, cons: ConstraintSet | None, cfg: FdcConfig, spec: KernelSpec, u0=None) -> FdcModel:
    data = data if isinstance(data, Dataset) else Dataset(data)
    return fit(data, cons, cfg, metric=KernelMetric(gram_matrix(data, spec)), u0=u0)
