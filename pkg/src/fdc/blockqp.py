"""Structured quadratic program for one constraint component.

For the samples of a component (ordered by ascending global index) the
maximization-step subproblem is ``min 0.5 u'Du`` over a product of simplices,
with

    D_ii = diag(dist_i) + (beta/2) * sum_{s_ij > 0} s_ij * I
    D_ij = -(beta * s_ij / 2) * I            (i != j)

``0.5 u'Du`` is exactly half the component's share of the clustering
objective, so both have the same minimisers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Component, FdcError


class InfeasibleReducedPoint(FdcError):
    pass


@dataclass(frozen=True)
class BlockQP:
    diag: np.ndarray  # (r, k): diagonal of each D_ii
    coupling: np.ndarray  # (r, r): D_ij = coupling[i, j] * I, zero on the diagonal
    sample_order: tuple = ()

    @property
    def r(self) -> int:
        return self.diag.shape[0]

    @property
    def k(self) -> int:
        return self.diag.shape[1]

    def dense(self) -> np.ndarray:
        r, k = self.r, self.k
        D = np.zeros((r, k, r, k))
        idx = np.arange(k)
        D[:, idx, :, idx] = self.coupling
        D = D.reshape(r * k, r * k)
        D.flat[:: r * k + 1] += self.diag.ravel()
        return D

    def objective(self, u) -> float:
        U = np.reshape(u, (self.r, self.k))
        return float(0.5 * (np.sum(self.diag * U * U) + np.sum(self.coupling * (U @ U.T))))

    def block_linear(self, i: int, U: np.ndarray) -> np.ndarray:
        """Linear coefficient of block i given the other blocks: sum_j D_ij u_j."""
        return self.coupling[i] @ U


def build_block_qp(component: Component, dist, beta: float) -> BlockQP:
    """Assemble D for ``component`` from its (r, k) squared distances."""
    dist = np.asarray(dist, dtype=float)
    order = tuple(component.samples)
    r = len(order)
    if dist.shape[0] != r:
        raise FdcError(f"expected {r} distance rows, got {dist.shape[0]}", "dist")
    pos = {g: a for a, g in enumerate(order)}
    diag = dist.copy()
    coupling = np.zeros((r, r))
    for c in component.constraints:
        a, b = pos[c.p], pos[c.q]
        coupling[a, b] = coupling[b, a] = -0.5 * beta * c.s
        if c.s > 0:
            diag[a] += 0.5 * beta * c.s
            diag[b] += 0.5 * beta * c.s
    return BlockQP(diag, coupling, order)


def null_basis(k: int) -> np.ndarray:
    """k x (k-1) basis of {x : sum(x) = 0}: first row -1, identity below."""
    return np.vstack([-np.ones((1, k - 1)), np.eye(k - 1)])


@dataclass(frozen=True)
class ReducedQP:
    H: np.ndarray  # B'DB
    g: np.ndarray  # B'D u_hat
    u_hat: np.ndarray
    const: float  # 0.5 u_hat' D u_hat
    r: int
    k: int

    def objective(self, v) -> float:
        v = np.ravel(v)
        return float(0.5 * v @ self.H @ v + self.g @ v)


def reduce(qp: BlockQP, D: np.ndarray | None = None) -> ReducedQP:
    r, k = qp.r, qp.k
    D = qp.dense() if D is None else D
    B = np.kron(np.eye(r), null_basis(k))
    u_hat = np.zeros((r, k))
    u_hat[:, 0] = 1.0
    u_hat = u_hat.ravel()
    H = B.T @ D @ B
    H = 0.5 * (H + H.T)
    return ReducedQP(H, B.T @ (D @ u_hat), u_hat, 0.5 * float(u_hat @ D @ u_hat), r, k)


def expand(v, k: int) -> np.ndarray:
    """Map a reduced point back to memberships: block = (1 - sum(v_b), v_b)."""
    V = np.reshape(np.asarray(v, dtype=float), (-1, k - 1))
    if np.any(V < -1e-12) or np.any(V.sum(axis=1) > 1 + 1e-9):
        raise InfeasibleReducedPoint("reduced point violates v >= 0 or Gv <= 1", "v")
    V = np.clip(V, 0.0, None)
    s = V.sum(axis=1, keepdims=True)
    V = np.where(s > 1.0, V / np.where(s > 0, s, 1.0), V)
    return np.hstack([1.0 - V.sum(axis=1, keepdims=True), V])


def contract(u, k: int) -> np.ndarray:
    """Inverse of ``expand`` on feasible memberships."""
    return np.reshape(u, (-1, k))[:, 1:].ravel().copy()
