"""Domain types, input validation and the constraint graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class FdcError(ValueError):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DimensionMismatch(FdcError):
    pass


class ConstraintOutOfRange(FdcError):
    pass


class BadParameter(FdcError):
    pass


class ConstraintConflict(FdcError):
    pass


@dataclass(frozen=True)
class Dataset:
    samples: np.ndarray
    ids: tuple = ()

    def __post_init__(self):
        x = np.array(self.samples, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise DimensionMismatch(f"samples must be a non-empty m x n matrix, got shape {x.shape}", "samples")
        if not np.all(np.isfinite(x)):
            raise BadParameter("samples contain non-finite entries", "samples")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        ids = tuple(self.ids) if len(self.ids) else tuple(range(x.shape[0]))
        if len(ids) != x.shape[0]:
            raise DimensionMismatch(f"{len(ids)} ids for {x.shape[0]} samples", "ids")
        object.__setattr__(self, "ids", ids)

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    @property
    def n(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True, order=True)
class FuzzyConstraint:
    """Graded similarity (s > 0) or dissimilarity (s < 0) between samples p and q."""

    p: int
    q: int
    s: float

    def __post_init__(self):
        if self.p == self.q:
            raise BadParameter(f"constraint pairs a sample with itself ({self.p})", "p")
        if not np.isfinite(self.s) or abs(self.s) > 1:
            raise BadParameter(f"constraint value {self.s} outside [-1, 1]", "s")
        if self.s == 0:
            raise BadParameter(f"constraint ({self.p}, {self.q}) has s = 0, which means 'unknown'", "s")
        if self.p > self.q:
            p, q = self.q, self.p
            object.__setattr__(self, "p", int(p))
            object.__setattr__(self, "q", int(q))
        else:
            object.__setattr__(self, "p", int(self.p))
            object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "s", float(self.s))


@dataclass(frozen=True)
class ConstraintSet:
    """At most one constraint per unordered pair, stored with p < q."""

    constraints: tuple = ()
    index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        merged: dict[tuple[int, int], FuzzyConstraint] = {}
        for c in self.constraints:
            if not isinstance(c, FuzzyConstraint):
                c = FuzzyConstraint(*c)
            key = (c.p, c.q)
            if key in merged:
                if merged[key].s != c.s:
                    raise ConstraintConflict(
                        f"pair ({c.p}, {c.q}) given twice with different values "
                        f"{merged[key].s} and {c.s}",
                        "constraints",
                    )
                continue
            merged[key] = c
        cons = tuple(sorted(merged.values()))
        index: dict[int, list[FuzzyConstraint]] = {}
        for c in cons:
            index.setdefault(c.p, []).append(c)
            index.setdefault(c.q, []).append(c)
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "index", {i: tuple(v) for i, v in index.items()})

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[float]]) -> "ConstraintSet":
        return cls(tuple(FuzzyConstraint(int(p), int(q), float(s)) for p, q, s in triples))

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def constrained_indices(self) -> list[int]:
        return sorted(self.index)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self.constraints:
            return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
        p, q, s = zip(*((c.p, c.q, c.s) for c in self.constraints))
        return np.array(p), np.array(q), np.array(s, dtype=float)

    def max_index(self) -> int:
        return max((c.q for c in self.constraints), default=-1)


@dataclass(frozen=True)
class FdcConfig:
    k_max: int = 2
    alpha: float = 0.0
    beta: float = 0.1
    gamma: float = 2.0
    max_outer_iters: int = 300
    outer_tol: float = 1e-6
    dbcd_tol: float = 1e-3
    dbcd_max_sweeps: int = 500
    seed: int = 0
    psd_tol: float = 1e-9

    def __post_init__(self):
        if int(self.k_max) != self.k_max or self.k_max < 1:
            raise BadParameter(f"k_max must be a positive integer, got {self.k_max}", "k_max")
        if not 0 <= self.alpha < 1:
            raise BadParameter(f"alpha must lie in [0, 1), got {self.alpha}", "alpha")
        # beta = 0 is accepted: it is the first point of the benchmark grid.
        if not self.beta >= 0 or not np.isfinite(self.beta):
            raise BadParameter(f"beta must be non-negative, got {self.beta}", "beta")
        if self.gamma != 2:
            raise BadParameter("only gamma = 2 is supported", "gamma")
        if int(self.max_outer_iters) != self.max_outer_iters or self.max_outer_iters < 1:
            raise BadParameter("max_outer_iters must be a positive integer", "max_outer_iters")
        for name in ("outer_tol", "dbcd_tol", "psd_tol"):
            if not getattr(self, name) > 0:
                raise BadParameter(f"{name} must be positive", name)
        if self.dbcd_max_sweeps < 1:
            raise BadParameter("dbcd_max_sweeps must be positive", "dbcd_max_sweeps")


def validate_inputs(data: Dataset, cons: ConstraintSet, cfg: FdcConfig) -> None:
    if not isinstance(data, Dataset):
        data = Dataset(data)
    if cons.max_index() >= data.m:
        bad = next(c for c in cons if c.q >= data.m)
        raise ConstraintOutOfRange(
            f"constraint ({bad.p}, {bad.q}) references sample {bad.q} but only {data.m} samples exist",
            "constraints",
        )
    if min((c.p for c in cons), default=0) < 0:
        raise ConstraintOutOfRange("negative sample index in constraints", "constraints")
    if cfg.k_max > data.m:
        raise BadParameter(f"k_max={cfg.k_max} exceeds sample count {data.m}", "k_max")


def check_memberships(u: np.ndarray, atol: float = 1e-9) -> None:
    """Raise if ``u`` is not row-stochastic with entries in [0, 1]."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[1] < 1:
        raise DimensionMismatch(f"memberships must be m x k, got shape {u.shape}", "u")
    if np.any(u < -atol) or np.any(u > 1 + atol):
        raise BadParameter("memberships outside [0, 1]", "u")
    if np.any(np.abs(u.sum(axis=1) - 1) > atol):
        raise BadParameter("membership rows do not sum to 1", "u")


@dataclass(frozen=True)
class Component:
    samples: tuple  # ascending global indices
    constraints: tuple


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, a: int) -> int:
        self.parent.setdefault(a, a)
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller index becomes the root so roots are component minima
            lo, hi = min(ra, rb), max(ra, rb)
            self.parent[hi] = lo


def connected_components(cons: ConstraintSet, m: int | None = None) -> list[Component]:
    """Group constrained samples that are linked directly or indirectly.

    Components are ordered by their smallest member.
    """
    uf = _UnionFind()
    for c in cons:
        uf.union(c.p, c.q)
    members: dict[int, list[int]] = {}
    for i in cons.constrained_indices():
        members.setdefault(uf.find(i), []).append(i)
    edges: dict[int, list[FuzzyConstraint]] = {}
    for c in cons:
        edges.setdefault(uf.find(c.p), []).append(c)
    return [Component(tuple(sorted(members[r])), tuple(edges[r])) for r in sorted(members)]
