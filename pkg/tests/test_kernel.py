import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdc.core import BadParameter, ConstraintSet, FdcConfig
from fdc.kernel import DeletedCluster, KernelSpec, gram_matrix, kernel_distance, kernel_distances, kernel_fit
from fdc.mem import EuclideanMetric, fit, init_memberships
from fdc.metrics import ari_pct, harden


def test_gaussian_values():
    k = KernelSpec("gaussian", 1.0)
    assert k([1.0, 2.0], [1.0, 2.0])[0, 0] == 1.0
    assert k([0.0], [1.0])[0, 0] == pytest.approx(0.367879, abs=1e-6)


def test_bad_spec():
    with pytest.raises(BadParameter):
        KernelSpec("poly")
    with pytest.raises(BadParameter):
        KernelSpec("gaussian", 0.0)


def test_single_sample_distance_zero():
    for spec in (KernelSpec("linear"), KernelSpec("gaussian", 0.7)):
        cache = gram_matrix(np.array([[1.5, -2.0]]), spec)
        assert kernel_distance(0, 0, np.ones((1, 1)), 0.0, cache) == 0.0


def test_two_sample_gaussian_hand_expansion():
    X = np.array([[0.0, 0.0], [1.0, 2.0]])
    delta = 5.0
    cache = gram_matrix(X, KernelSpec("gaussian", 1.0))
    u = np.full((2, 1), 1.0)
    expected = 1 - (1 + np.exp(-delta)) + (2 + 2 * np.exp(-delta)) / 4
    assert kernel_distance(0, 0, u, 0.0, cache) == pytest.approx(expected, abs=1e-12)


def test_deleted_cluster_raises():
    cache = gram_matrix(np.eye(2), KernelSpec("linear"))
    with pytest.raises(DeletedCluster):
        kernel_distance(0, 1, np.array([[1.0, 0.0], [1.0, 0.0]]), 0.0, cache)


def test_out_of_sample_point_matches_in_sample(rng):
    X = rng.normal(size=(6, 2))
    cache = gram_matrix(X, KernelSpec("gaussian", 0.5))
    u = rng.dirichlet(np.ones(2), 6)
    assert kernel_distance(X[3], 1, u, 0.0, cache) == pytest.approx(kernel_distance(3, 1, u, 0.0, cache), abs=1e-12)


@given(st.integers(0, 100_000), st.sampled_from([0.0, 0.1]))
def test_linear_kernel_matches_explicit_distances(seed, alpha):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(int(rng.integers(3, 20)), int(rng.integers(1, 4))))
    u = rng.dirichlet(np.ones(3), X.shape[0])
    if np.any((u**2 - alpha).sum(axis=0) <= 0):
        return
    _, dist = EuclideanMetric(X).prototypes_and_distances(u, alpha)
    kd = kernel_distances(u, alpha, gram_matrix(X, KernelSpec("linear")))
    np.testing.assert_allclose(kd, np.maximum(dist, 0), atol=1e-10)
    assert kernel_distance(1, 2, u, alpha, gram_matrix(X, KernelSpec("linear"))) == pytest.approx(kd[1, 2], abs=1e-12)


@settings(max_examples=10)
@given(st.integers(0, 100_000))
def test_linear_kernel_fit_reproduces_plain_fit(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(25, 2)) + rng.integers(0, 2, size=(25, 1)) * 4
    cons = ConstraintSet.from_triples([(0, 1, 0.6), (2, 7, -0.4)])
    cfg = FdcConfig(k_max=3, beta=0.2, seed=seed)
    a = fit(X, cons, cfg)
    b = kernel_fit(X, cons, cfg, KernelSpec("linear"))
    assert len(a.objective_trace) == len(b.objective_trace)
    np.testing.assert_allclose(a.objective_trace, b.objective_trace, atol=1e-8)


def test_gaussian_separates_concentric_rings():
    rng = np.random.default_rng(4)
    t = rng.uniform(0, 2 * np.pi, 120)
    radius = np.r_[np.full(60, 1.0), np.full(60, 5.0)] + 0.1 * rng.normal(size=120)
    X = np.c_[radius * np.cos(t), radius * np.sin(t)]
    y = np.r_[np.zeros(60), np.ones(60)]
    cfg = FdcConfig(k_max=2, beta=0.0, seed=1)
    lin = ari_pct(harden(fit(X, None, cfg).memberships), y)
    best = max(ari_pct(harden(kernel_fit(X, None, cfg, KernelSpec("gaussian", mu)).memberships), y) for mu in (0.5, 1.0, 2.0))
    assert best > lin


def test_vanishing_width_gives_uniform_memberships(rng):
    # once every kernel distance is numerically zero, the zero-distance rule splits mass evenly
    X = rng.normal(size=(10, 2))
    cache = gram_matrix(X, KernelSpec("gaussian", 1e-20))
    np.testing.assert_array_equal(cache.gram, 1.0)
    m = kernel_fit(X, None, FdcConfig(k_max=3, beta=0.0), KernelSpec("gaussian", 1e-20), u0=init_memberships(10, 3, 0))
    np.testing.assert_allclose(m.memberships, 1 / 3, atol=1e-6)


def test_linear_kernel_with_alpha_agrees_relatively():
    # alpha > 0 lets a dying cluster push the objective far below zero, so compare relatively
    rng = np.random.default_rng(110_008)
    X = rng.normal(size=(30, 3))
    cfg = FdcConfig(k_max=3, alpha=0.1, beta=0.1, seed=8)
    a = fit(X, None, cfg)
    b = kernel_fit(X, None, cfg, KernelSpec("linear"))
    np.testing.assert_allclose(a.objective_trace, b.objective_trace, rtol=1e-9, atol=1e-8)
