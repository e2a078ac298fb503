"""Modified EM for fuzzy discriminant clustering (gamma = 2).

The objective is

    sum_ij (u_ij^2 - alpha) * d_ij + beta * sum_{(p,q)} C(u_p, u_q)

with ``C = 0.5 * s * ||u_p - u_q||^2`` for ``s >= 0`` and ``-s * u_p'u_q``
otherwise, and ``d_ij`` the squared distance from sample i to prototype j.
Prototypes are recomputed in the expectation step, where a cluster whose
weight ``sum_i (u_ij^2 - alpha)`` is not positive is deleted. The maximization
step updates free samples in closed form and every constraint component with
``dbcd.solve_component``.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .blockqp import build_block_qp
from .core import (
    Component,
    ConstraintSet,
    Dataset,
    FdcConfig,
    check_memberships,
    connected_components,
    validate_inputs,
)
from .dbcd import solve_component

log = logging.getLogger(__name__)

ZERO_DISTANCE = 1e-12


class EuclideanMetric:
    """Explicit prototypes and squared Euclidean distances."""

    has_prototypes = True

    def __init__(self, samples):
        self.X = np.asarray(samples.samples if isinstance(samples, Dataset) else samples, dtype=float)

    def prototypes_and_distances(self, u, alpha):
        W = u * u - alpha
        c = (W.T @ self.X) / W.sum(axis=0)[:, None]
        dist = ((self.X[:, None, :] - c[None, :, :]) ** 2).sum(axis=-1)
        return c, dist


def cluster_weights(u, alpha) -> np.ndarray:
    return (u * u - alpha).sum(axis=0)


@dataclass
class EStep:
    u: np.ndarray  # memberships after any deletion
    prototypes: np.ndarray | None
    distances: np.ndarray
    deleted: list  # positions (in the incoming column order) that were removed
    collapsed: bool = False

    @property
    def k_effective(self) -> int:
        return self.u.shape[1]


def delete_clusters(u, alpha, eps: float | None = None):
    """Drop columns whose weight is not positive and renormalise the rows.

    Returns ``(u_kept, deleted_positions)``. At least one cluster is always
    kept (the one with the largest weight).
    """
    m, k = u.shape
    eps = 1e-12 * m if eps is None else eps
    w = cluster_weights(u, alpha)
    dead = w <= eps
    if dead.all():
        dead[int(np.argmax(w))] = False
    if not dead.any():
        return u, []
    keep = ~dead
    v = u[:, keep]
    s = v.sum(axis=1, keepdims=True)
    v = np.where(s > 0, v / np.where(s > 0, s, 1.0), 1.0 / keep.sum())
    return v, [int(j) for j in np.flatnonzero(dead)]


def expectation_step(u, data, alpha: float) -> EStep:
    metric = data if hasattr(data, "prototypes_and_distances") else EuclideanMetric(data)
    k_in = u.shape[1]
    u, deleted = delete_clusters(np.asarray(u, dtype=float), alpha)
    c, dist = metric.prototypes_and_distances(u, alpha)
    return EStep(u, c, dist, deleted, collapsed=(u.shape[1] == 1 and k_in > 1 and bool(deleted)))


def closed_form_memberships(dist) -> np.ndarray:
    """Row-wise minimiser of sum_j u_j^2 d_j on the simplex: u_j proportional to 1/d_j.

    A row with distances below ``ZERO_DISTANCE`` puts its mass equally on those
    clusters.
    """
    dist = np.atleast_2d(np.asarray(dist, dtype=float))
    zero = dist < ZERO_DISTANCE
    has_zero = zero.any(axis=1)
    with np.errstate(divide="ignore"):
        inv = np.where(zero, 0.0, 1.0 / np.where(zero, 1.0, dist))
    u = inv / np.where(has_zero, 1.0, inv.sum(axis=1))[:, None]
    if has_zero.any():
        z = zero[has_zero].astype(float)
        u[has_zero] = z / z.sum(axis=1, keepdims=True)
    return u


def constraint_cost(u_p, u_q, s: float) -> float:
    if s >= 0:
        diff = np.asarray(u_p) - np.asarray(u_q)
        return 0.5 * s * float(diff @ diff)
    return -s * float(np.dot(u_p, u_q))


def objective(u, dist, cons: ConstraintSet, alpha: float, beta: float) -> float:
    u = np.asarray(u, dtype=float)
    total = float(np.sum((u * u - alpha) * dist))
    if beta and len(cons):
        p, q, s = cons.arrays()
        up, uq = u[p], u[q]
        sq = np.sum((up - uq) ** 2, axis=1)
        ip = np.sum(up * uq, axis=1)
        total += beta * float(np.sum(np.where(s >= 0, 0.5 * s * sq, -s * ip)))
    return total


@dataclass
class MStepStats:
    routes: Counter = field(default_factory=Counter)
    reduction_psd_violations: int = 0
    unconverged: int = 0
    results: list = field(default_factory=list)


def maximization_step(dist, u_prev, components: list[Component], cfg: FdcConfig, stats: MStepStats | None = None):
    """Free samples in closed form, constrained samples component by component."""
    dist = np.asarray(dist, dtype=float)
    u = closed_form_memberships(dist)
    for comp in components:
        idx = list(comp.samples)
        qp = build_block_qp(comp, dist[idx], cfg.beta)
        res = solve_component(
            qp, u_prev[idx], tol=cfg.dbcd_tol, psd_tol=cfg.psd_tol, max_sweeps=cfg.dbcd_max_sweeps
        )
        u[idx] = res.u
        if stats is not None:
            stats.routes[res.route.value] += 1
            stats.reduction_psd_violations += int(res.reduction_psd_violated)
            stats.unconverged += int(not res.converged)
            stats.results.append(res)
    return u


@dataclass
class FdcModel:
    memberships: np.ndarray
    prototypes: np.ndarray | None
    k_effective: int
    objective_trace: list
    k_trace: list  # cluster count at each objective_trace entry
    deleted_clusters: list  # (iteration, original cluster index)
    cluster_ids: list  # original indices of the surviving clusters
    n_iter: int
    converged: bool
    collapsed: bool
    route_counts: dict
    reduction_psd_violations: int
    dbcd_unconverged: int

    def stable_trace(self) -> np.ndarray:
        """Objective values recorded after the last cluster deletion."""
        k = np.asarray(self.k_trace)
        start = int(np.flatnonzero(k == k[-1])[0])
        return np.asarray(self.objective_trace[start:])


def init_memberships(m: int, k: int, seed) -> np.ndarray:
    """Rows drawn uniformly from the simplex."""
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.ones(k), size=m)


def fit(
    data,
    cons: ConstraintSet | None = None,
    cfg: FdcConfig | None = None,
    metric=None,
    u0=None,
    keep_results: bool = False,
) -> FdcModel:
    data = data if isinstance(data, Dataset) else Dataset(data)
    cons = cons if cons is not None else ConstraintSet()
    cfg = cfg if cfg is not None else FdcConfig()
    validate_inputs(data, cons, cfg)
    metric = metric if metric is not None else EuclideanMetric(data)

    u = init_memberships(data.m, cfg.k_max, cfg.seed) if u0 is None else np.array(u0, dtype=float)
    check_memberships(u)
    components = connected_components(cons, data.m)
    ids = list(range(u.shape[1]))
    trace, k_trace, deleted = [], [], []
    stats = MStepStats()
    prototypes = None
    converged = False
    collapsed = False

    t = 0
    for t in range(1, cfg.max_outer_iters + 1):
        e = expectation_step(u, metric, cfg.alpha)
        for j in sorted(e.deleted, reverse=True):
            deleted.append((t, ids.pop(j)))
        if e.deleted:
            log.debug("iteration %d: deleted clusters, k=%d", t, e.k_effective)
        collapsed = collapsed or e.collapsed
        u, prototypes = e.u, e.prototypes
        trace.append(objective(u, e.distances, cons, cfg.alpha, cfg.beta))
        k_trace.append(e.k_effective)

        u_new = maximization_step(e.distances, u, components, cfg, stats)
        check_memberships(u_new)
        trace.append(objective(u_new, e.distances, cons, cfg.alpha, cfg.beta))
        k_trace.append(e.k_effective)

        change = float(np.abs(u_new - u).max())
        u = u_new
        if not keep_results:
            stats.results.clear()
        if change < cfg.outer_tol and not e.deleted:
            converged = True
            break

    return FdcModel(
        memberships=u,
        prototypes=prototypes if getattr(metric, "has_prototypes", False) else None,
        k_effective=u.shape[1],
        objective_trace=trace,
        k_trace=k_trace,
        deleted_clusters=deleted,
        cluster_ids=ids,
        n_iter=t,
        converged=converged,
        collapsed=collapsed or (u.shape[1] == 1 and cfg.k_max > 1),
        route_counts=dict(stats.routes),
        reduction_psd_violations=stats.reduction_psd_violations,
        dbcd_unconverged=stats.unconverged,
    )
