"""Convex quadratic programs over a simplex or a product of simplices.

Two feasible regions show up in the maximization step:

* ``"full"``: each length-k block lies on the probability simplex
  (``sum(u_block) == 1, u_block >= 0``);
* ``"reduced"``: each length-(k-1) block satisfies ``sum(v_block) <= 1, v_block >= 0``,
  the null-space parametrisation of the former.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FdcError

ZERO_CURVATURE = 1e-12


class EigenFailure(FdcError):
    pass


def solve_diag_simplex(d, g) -> np.ndarray:
    """Exact minimiser of ``0.5 * sum(d * u**2) + g @ u`` on the probability simplex.

    Water-filling: ``u_j = max(0, (lam - g_j) / d_j)`` with ``lam`` chosen so the
    masses sum to one. Entries with ``d_j`` below ``ZERO_CURVATURE`` have a purely
    linear cost; if the water level reaches their ``g_j`` the remaining mass is
    split equally among the cheapest of them.
    """
    d = np.asarray(d, dtype=float)
    g = np.asarray(g, dtype=float)
    k = d.shape[0]
    if k == 1:
        return np.ones(1)
    if np.any(d < 0):
        raise FdcError("negative curvature passed to solve_diag_simplex", "d")

    flat = d < ZERO_CURVATURE
    pos = np.flatnonzero(~flat)
    u = np.zeros(k)

    lam = np.inf
    if pos.size:
        order = pos[np.argsort(g[pos], kind="stable")]
        gs, ds = g[order], d[order]
        inv = 1.0 / ds
        lams = (1.0 + np.cumsum(gs * inv)) / np.cumsum(inv)
        t = np.flatnonzero(gs < lams)[-1]
        lam = lams[t]

    if flat.any():
        g_flat = g[flat].min()
        if lam > g_flat:
            lam = g_flat
            if pos.size:
                u[pos] = np.maximum(0.0, (lam - g[pos]) / d[pos])
            cheapest = np.flatnonzero(flat & (g == g_flat))
            u[cheapest] = max(0.0, 1.0 - u.sum()) / cheapest.size
            return _renormalize(u)

    u[pos] = np.maximum(0.0, (lam - g[pos]) / d[pos])
    return _renormalize(u)


def _renormalize(u):
    u = np.maximum(u, 0.0)
    return u / u.sum()


def is_psd(H, tol: float = 1e-9) -> bool:
    """True iff the smallest eigenvalue is >= -tol * (1 + max |eigenvalue|)."""
    H = np.asarray(H, dtype=float)
    if H.size == 0:
        return True
    try:
        w = np.linalg.eigvalsh(H)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"symmetric eigenvalue routine failed: {exc}") from exc
    return bool(w[0] >= -tol * (1.0 + np.abs(w).max()))


def project_simplex_rows(V: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of V onto the probability simplex."""
    k = V.shape[1]
    U = np.sort(V, axis=1)[:, ::-1]
    cssv = np.cumsum(U, axis=1) - 1.0
    ind = np.arange(1, k + 1)
    rho = np.count_nonzero(U - cssv / ind > 0, axis=1)
    theta = cssv[np.arange(V.shape[0]), rho - 1] / rho
    return np.maximum(V - theta[:, None], 0.0)


def project_capped_rows(V: np.ndarray) -> np.ndarray:
    """Projection of each row onto ``{v >= 0, sum(v) <= 1}``."""
    W = np.maximum(V, 0.0)
    over = W.sum(axis=1) > 1.0
    if over.any():
        W[over] = project_simplex_rows(V[over])
    return W


@dataclass
class PolytopeQP:
    """``min 0.5 x'Hx + g'x`` over a product of (full or reduced) simplices."""

    H: np.ndarray
    g: np.ndarray
    block: int
    structure: str = "full"

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=float)
        self.g = np.asarray(self.g, dtype=float).ravel()
        if self.structure not in ("full", "reduced"):
            raise FdcError(f"unknown structure {self.structure!r}", "structure")
        if self.H.shape != (self.g.size, self.g.size) or self.g.size % self.block:
            raise FdcError("inconsistent PolytopeQP dimensions", "H")
        if not np.allclose(self.H, self.H.T, atol=1e-10, rtol=0):
            raise FdcError("Hessian is not symmetric", "H")

    def objective(self, x) -> float:
        x = np.ravel(x)
        return float(0.5 * x @ self.H @ x + self.g @ x)

    def project(self, x) -> np.ndarray:
        X = np.reshape(x, (-1, self.block))
        if self.structure == "full":
            return project_simplex_rows(X).ravel()
        return project_capped_rows(X).ravel()


@dataclass
class PolytopeResult:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool
    residual: float


def gradient_mapping_residual(qp: PolytopeQP, x, L: float | None = None) -> float:
    """``L * max|x - P(x - grad/L)|``: zero exactly at KKT points."""
    if L is None:
        L = max(float(np.linalg.eigvalsh(qp.H)[-1]), 1e-12) if qp.H.size else 1.0
    grad = qp.H @ x + qp.g
    return L * float(np.abs(x - qp.project(x - grad / L)).max())


def _null_basis(f: int) -> np.ndarray:
    return np.vstack([-np.ones((1, f - 1)), np.eye(f - 1)])


def active_set_simplex_product(H, g, x0, block: int, max_iter: int | None = None):
    """Primal active-set method for ``min 0.5 x'Hx + g'x`` over a product of simplices.

    Needs only that H be positive semi-definite on every face visited (true when
    H is PSD). Each step is a descent step from the feasible start, so the final
    objective never exceeds the starting one. Returns ``(x, iterations, ok)``;
    ``ok`` is False if the iteration cap is hit.
    """
    x = np.array(x0, dtype=float)
    n = x.size
    nb = n // block
    blocks = np.arange(n) // block
    active = x <= 0.0
    x[active] = 0.0
    max_iter = max_iter if max_iter is not None else 20 * n + 50
    scale = 1.0 + np.abs(H).max() + np.abs(g).max()

    for it in range(1, max_iter + 1):
        grad = H @ x + g
        free = np.flatnonzero(~active)
        # null space of the block sums restricted to the free variables
        cols, pos = [], 0
        Z = np.zeros((free.size, free.size))
        for b in range(nb):
            fb = free[blocks[free] == b]
            f = fb.size
            if f > 1:
                Z[pos : pos + f, len(cols) : len(cols) + f - 1] = _null_basis(f)
                cols.extend(range(f - 1))
            pos += f
        Z = Z[:, : len(cols)]

        unbounded = False
        if Z.shape[1]:
            M = Z.T @ H[np.ix_(free, free)] @ Z
            rhs = -Z.T @ grad[free]
            w, *_ = np.linalg.lstsq(M, rhs, rcond=1e-13)
            if np.abs(M @ w - rhs).max() > 1e-10 * scale:
                # flat, descending direction: move along it until a bound blocks
                w = rhs - M @ w
                unbounded = True
            p_free = Z @ w
        else:
            p_free = np.zeros(free.size)

        if not unbounded and np.abs(p_free).max(initial=0.0) <= 1e-13 * (1.0 + np.abs(x).max()):
            # stationary on this face: check bound multipliers
            lam = np.zeros(nb)
            for b in range(nb):
                fb = free[blocks[free] == b]
                lam[b] = grad[fb].mean()
            mu = grad - lam[blocks]
            mu[~active] = 0.0
            j = int(np.argmin(mu))
            if mu[j] >= -1e-12 * scale:
                return x, it, True
            active[j] = False
            continue

        step = np.inf if unbounded else 1.0
        blocking = -1
        neg = np.flatnonzero(p_free < 0)
        if neg.size:
            ratios = -x[free[neg]] / p_free[neg]
            r = int(np.argmin(ratios))
            if ratios[r] < step:
                step, blocking = float(ratios[r]), int(free[neg[r]])
        if not np.isfinite(step):
            return x, it, False
        x[free] += step * p_free
        if blocking >= 0:
            x[blocking] = 0.0
            active[blocking] = True
        np.maximum(x, 0.0, out=x)
    return x, max_iter, False


def solve_psd_polytope(qp: PolytopeQP, x0, tol: float = 1e-10, max_iter: int = 50_000) -> PolytopeResult:
    """Global minimiser of a convex QP over the product of (full or reduced) simplices.

    An exact active-set method runs first; if it stalls, accelerated projected
    gradient with function-value restarts takes over. Both start at the feasible
    ``x0`` and never return a point with a larger objective. ``converged`` is
    False when the gradient-mapping residual is still above ``tol``.
    """
    H, g = qp.H, qp.g
    x = np.array(x0, dtype=float).ravel()
    f_x = qp.objective(x)

    offdiag = H - np.diag(np.diag(H))
    if qp.structure == "full" and not offdiag.any() and np.all(np.diag(H) >= 0):
        # blocks decouple: solve each exactly
        d = np.diag(H).reshape(-1, qp.block)
        G = g.reshape(-1, qp.block)
        sol = np.vstack([solve_diag_simplex(d[i], G[i]) for i in range(d.shape[0])]).ravel()
        f_sol = qp.objective(sol)
        if f_sol <= f_x:
            return PolytopeResult(sol, f_sol, 1, True, 0.0)
        return PolytopeResult(x, f_x, 1, True, 0.0)

    if qp.structure == "full":
        H_full, g_full, u0, k = H, g, x, qp.block
    else:
        # v = (u_2..u_k) per block maps the capped simplex onto the full simplex
        k = qp.block + 1
        nb = g.size // qp.block
        P = np.zeros((g.size, nb * k))
        for b in range(nb):
            P[b * qp.block : (b + 1) * qp.block, b * k + 1 : (b + 1) * k] = np.eye(qp.block)
        H_full, g_full = P.T @ H @ P, P.T @ g
        V = x.reshape(nb, qp.block)
        u0 = np.hstack([1.0 - V.sum(axis=1, keepdims=True), V]).ravel()

    u, iters, ok = active_set_simplex_product(H_full, g_full, u0, k)
    sol = u if qp.structure == "full" else u.reshape(-1, k)[:, 1:].ravel()
    f_sol = qp.objective(sol)
    if ok:
        res = gradient_mapping_residual(qp, sol)
        if res <= tol:
            return PolytopeResult(sol, f_sol, iters, True, res) if f_sol <= f_x else PolytopeResult(x, f_x, iters, True, res)
    if f_sol <= f_x:
        x, f_x = sol, f_sol
    fallback = _accelerated_projected_gradient(qp, x, tol, max_iter)
    fallback.iterations += iters
    return fallback


def _accelerated_projected_gradient(qp: PolytopeQP, x0, tol: float, max_iter: int) -> PolytopeResult:
    H, g = qp.H, qp.g
    x = np.array(x0, dtype=float).ravel()
    f_x = qp.objective(x)
    L = float(np.linalg.eigvalsh(H)[-1]) if H.size else 0.0
    L = max(L, 1e-12)

    def residual(z):
        grad = H @ z + g
        return L * float(np.abs(z - qp.project(z - grad / L)).max())

    best, f_best = x.copy(), f_x
    y, t = x.copy(), 1.0
    res = residual(x)
    it = 0
    while res > tol and it < max_iter:
        it += 1
        x_new = qp.project(y - (H @ y + g) / L)
        f_new = qp.objective(x_new)
        if f_new > f_x:
            # momentum overshoot: restart from the last accepted point
            y, t = x.copy(), 1.0
            x_new = qp.project(x - (H @ x + g) / L)
            f_new = qp.objective(x_new)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, f_x, t = x_new, f_new, t_new
        if f_x < f_best:
            best, f_best = x.copy(), f_x
        res = residual(x)
    return PolytopeResult(best, f_best, it, res <= tol, res)
