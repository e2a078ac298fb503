"""Classical fuzzy c-means, the unsupervised baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BadParameter, Dataset
from .mem import ZERO_DISTANCE, init_memberships


@dataclass
class FcmModel:
    memberships: np.ndarray
    prototypes: np.ndarray
    objective_trace: list
    n_iter: int
    converged: bool


def fcm_objective(u, dist, gamma: float = 2.0) -> float:
    return float(np.sum(u**gamma * dist))


def fcm_memberships(dist, gamma: float = 2.0) -> np.ndarray:
    dist = np.asarray(dist, dtype=float)
    zero = dist < ZERO_DISTANCE
    safe = np.where(zero, 1.0, dist)
    inv = np.where(zero, 0.0, safe ** (-1.0 / (gamma - 1.0)))
    u = inv / np.maximum(inv.sum(axis=1, keepdims=True), np.finfo(float).tiny)
    rows = zero.any(axis=1)
    if rows.any():
        z = zero[rows].astype(float)
        u[rows] = z / z.sum(axis=1, keepdims=True)
    return u


def fcm_fit(
    data,
    k: int,
    gamma: float = 2.0,
    tol: float = 1e-6,
    max_iters: int = 300,
    seed=0,
    u0=None,
) -> FcmModel:
    X = data.samples if isinstance(data, Dataset) else Dataset(data).samples
    if k < 1:
        raise BadParameter("k must be at least 1", "k")
    if not gamma > 1:
        raise BadParameter("gamma must exceed 1", "gamma")
    u = init_memberships(X.shape[0], k, seed) if u0 is None else np.array(u0, dtype=float)

    trace = []
    c = None
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        w = u**gamma
        c = (w.T @ X) / w.sum(axis=0)[:, None]
        dist = ((X[:, None, :] - c[None, :, :]) ** 2).sum(axis=-1)
        trace.append(fcm_objective(u, dist, gamma))
        u_new = fcm_memberships(dist, gamma)
        trace.append(fcm_objective(u_new, dist, gamma))
        change = float(np.abs(u_new - u).max())
        u = u_new
        if change < tol:
            converged = True
            break
    return FcmModel(u, c, trace, it, converged)
