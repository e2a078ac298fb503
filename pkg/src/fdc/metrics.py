"""Evaluation: hard labels, ARI/NMI/accuracy, and the rank-based fuzzy criteria."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from .core import FdcError

MAX_PERMUTED_CLUSTERS = 8


class TooManyClusters(FdcError):
    pass


def harden(u) -> np.ndarray:
    """Per-row argmax (0-based); ties go to the lowest index."""
    return np.argmax(np.asarray(u), axis=1)


def ari_pct(pred, truth) -> float:
    """Adjusted Rand index mapped from [-1, 1] onto [0, 100]."""
    return 50.0 * (adjusted_rand_score(truth, pred) + 1.0)


def nmi_pct(pred, truth) -> float:
    return 100.0 * normalized_mutual_info_score(truth, pred, average_method="arithmetic")


def accuracy_pct(pred, truth) -> float:
    """Best one-to-one cluster-to-class matching accuracy."""
    pred, truth = np.asarray(pred), np.asarray(truth)
    if pred.shape != truth.shape:
        raise FdcError("label vectors differ in length", "pred")
    C = contingency_matrix(truth, pred)
    rows, cols = linear_sum_assignment(C, maximize=True)
    return 100.0 * C[rows, cols].sum() / pred.size


def rank_matrix(u) -> np.ndarray:
    """Cluster indices of each row sorted by descending membership (stable)."""
    return np.argsort(-np.asarray(u, dtype=float), axis=1, kind="stable")


def mahd(u_pred, u_truth) -> float:
    """Minimal average Hamming distance between ranked fuzzy matrices.

    Predicted cluster ids are relabelled by every permutation; for each the
    per-row fraction of rank positions holding different clusters is averaged.
    """
    u_pred, u_truth = np.asarray(u_pred), np.asarray(u_truth)
    if u_pred.shape != u_truth.shape:
        raise FdcError(f"shape mismatch {u_pred.shape} vs {u_truth.shape}", "u_pred")
    k = u_pred.shape[1]
    if k > MAX_PERMUTED_CLUSTERS:
        raise TooManyClusters(f"k={k} exceeds the permutation bound {MAX_PERMUTED_CLUSTERS}")
    rp, rt = rank_matrix(u_pred), rank_matrix(u_truth)
    best = np.inf
    for perm in itertools.permutations(range(k)):
        mapped = np.asarray(perm)[rp]
        best = min(best, float(np.mean(mapped != rt)))
    return best


def lia_accuracy(u_pred, u_truth, k_star: int) -> list[float]:
    """Accuracy of the j-th largest-index labelling for j = 1..k_star."""
    rp, rt = rank_matrix(u_pred), rank_matrix(u_truth)
    if rp.shape[1] < k_star or rt.shape[1] < k_star:
        raise FdcError(f"need at least {k_star} clusters in both matrices", "k_star")
    return [accuracy_pct(rp[:, j], rt[:, j]) for j in range(k_star)]


@dataclass
class MetricReport:
    ari_pct: float
    nmi_pct: float
    acc_pct: float
    mahd: float | None = None
    lia_acc: list | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(u_pred, truth, k_star: int | None = None) -> MetricReport:
    """Report for predicted memberships against hard labels or a fuzzy matrix."""
    u_pred = np.asarray(u_pred, dtype=float)
    truth = np.asarray(truth)
    pred = harden(u_pred)
    fuzzy = truth.ndim == 2
    labels = harden(truth) if fuzzy else truth
    rep = MetricReport(ari_pct(pred, labels), nmi_pct(pred, labels), accuracy_pct(pred, labels))
    if fuzzy:
        if truth.shape == u_pred.shape and u_pred.shape[1] <= MAX_PERMUTED_CLUSTERS:
            rep.mahd = mahd(u_pred, truth)
        ks = min(u_pred.shape[1], truth.shape[1]) if k_star is None else k_star
        rep.lia_acc = lia_accuracy(u_pred, truth, ks)
    return rep
