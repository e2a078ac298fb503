"""Diagonal block coordinate descent for the (possibly indefinite) component QP.

``solve_component`` dispatches on definiteness:

1. D positive semi-definite: convex, solved globally over the simplex product.
2. B'DB positive semi-definite: convex in the null-space coordinates, solved
   globally there and mapped back.
3. k = r = 2: cyclic block descent from every vertex, best result kept.
4. otherwise: one cyclic block descent run warm-started at ``u_init``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .blockqp import BlockQP, contract, expand, reduce
from .core import FdcError
from .simplex_qp import PolytopeQP, is_psd, solve_diag_simplex, solve_psd_polytope


class ShapeUnsupported(FdcError):
    pass


class Route(str, Enum):
    PSD_FULL = "PsdFull"
    PSD_REDUCED = "PsdReduced"
    VERTEX_EXHAUSTIVE = "VertexExhaustive"
    LOCAL_DESCENT = "LocalDescent"


@dataclass
class DbcdResult:
    u: np.ndarray  # (r, k)
    route: Route
    objective: float
    iterations: int
    converged: bool
    d_psd: bool = True
    reduced_psd: bool = True
    objective_trace: tuple = ()

    @property
    def reduction_psd_violated(self) -> bool:
        # D PSD must imply B'DB PSD
        return self.d_psd and not self.reduced_psd


def bcd_sweep(qp: BlockQP, u) -> np.ndarray:
    """One Gauss-Seidel pass over the blocks, each solved exactly."""
    U = np.array(np.reshape(u, (qp.r, qp.k)), dtype=float)
    for i in range(qp.r):
        U[i] = solve_diag_simplex(qp.diag[i], qp.block_linear(i, U))
    return U


def run_dbcd(qp: BlockQP, u0, tol: float = 1e-3, max_sweeps: int = 500):
    """Sweep until the whole-vector change drops below ``tol``.

    Returns ``(u, sweeps, converged, objective_trace)``.
    """
    U = np.reshape(np.asarray(u0, dtype=float), (qp.r, qp.k))
    trace = [qp.objective(U)]
    for sweep in range(1, max_sweeps + 1):
        U_new = bcd_sweep(qp, U)
        trace.append(qp.objective(U_new))
        step = np.linalg.norm(U_new - U)
        U = U_new
        if step < tol:
            return U, sweep, True, tuple(trace)
    return U, max_sweeps, False, tuple(trace)


def vertex_starts(k: int, r: int) -> list[np.ndarray]:
    if k != 2 or r != 2:
        raise ShapeUnsupported(f"vertex enumeration is only defined for k = r = 2 (got k={k}, r={r})")
    e = np.eye(2)
    return [np.vstack([e[a], e[b]]) for a in range(2) for b in range(2)]


def solve_component(
    qp: BlockQP,
    u_init,
    tol: float = 1e-3,
    psd_tol: float = 1e-9,
    max_sweeps: int = 500,
    qp_tol: float = 1e-10,
) -> DbcdResult:
    r, k = qp.r, qp.k
    U0 = np.reshape(np.asarray(u_init, dtype=float), (r, k))
    U0 = np.maximum(U0, 0.0)
    U0 = U0 / U0.sum(axis=1, keepdims=True)
    if k == 1:
        ones = np.ones((r, 1))
        return DbcdResult(ones, Route.PSD_FULL, qp.objective(ones), 0, True)

    D = qp.dense()
    d_psd = is_psd(D, psd_tol)
    red = reduce(qp, D)
    red_psd = is_psd(red.H, psd_tol)
    f0 = qp.objective(U0)

    if d_psd:
        sol = solve_psd_polytope(PolytopeQP(D, np.zeros(r * k), k, "full"), U0.ravel(), qp_tol)
        U = np.reshape(sol.x, (r, k))
        return _finish(qp, U, U0, f0, Route.PSD_FULL, sol.iterations, sol.converged, d_psd, red_psd)

    if red_psd:
        sol = solve_psd_polytope(PolytopeQP(red.H, red.g, k - 1, "reduced"), contract(U0, k), qp_tol)
        U = expand(sol.x, k)
        return _finish(qp, U, U0, f0, Route.PSD_REDUCED, sol.iterations, sol.converged, d_psd, red_psd)

    if k == 2 and r == 2:
        best = None
        total = 0
        # the warm start is included so the result never ascends from u_init
        for start in vertex_starts(k, r) + [U0]:
            U, sweeps, conv, trace = run_dbcd(qp, start, tol, max_sweeps)
            total += sweeps
            f = qp.objective(U)
            if best is None or f < best[0]:
                best = (f, U, conv, trace)
        f, U, conv, trace = best
        return DbcdResult(U, Route.VERTEX_EXHAUSTIVE, f, total, conv, d_psd, red_psd, trace)

    U, sweeps, conv, trace = run_dbcd(qp, U0, tol, max_sweeps)
    return DbcdResult(U, Route.LOCAL_DESCENT, qp.objective(U), sweeps, conv, d_psd, red_psd, trace)


def _finish(qp, U, U0, f0, route, iterations, converged, d_psd, red_psd) -> DbcdResult:
    f = qp.objective(U)
    if f > f0:
        U, f = U0, f0
    return DbcdResult(U, route, f, iterations, converged, d_psd, red_psd)
