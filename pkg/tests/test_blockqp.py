import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdc.blockqp import InfeasibleReducedPoint, build_block_qp, contract, expand, null_basis, reduce
from fdc.core import Component, ConstraintSet, FuzzyConstraint, connected_components
from fdc.mem import objective

WORKED_D = np.array([[1.0, 0, 2, 0], [0, 5, 0, 2], [2, 0, 1, 0], [0, 2, 0, 5]])


def pair(s):
    c = FuzzyConstraint(0, 1, s)
    return Component((0, 1), (c,))


def qp_from_dense(D, k):
    from fdc.blockqp import BlockQP

    r = D.shape[0] // k
    diag = np.diag(D).reshape(r, k)
    coupling = np.array([[0.0 if a == b else D[a * k, b * k] for b in range(r)] for a in range(r)])
    return BlockQP(diag, coupling)


def grid_pairs(step=1e-2):
    t = np.arange(0, 1 + step / 2, step)
    return [(np.array([a, 1 - a]), np.array([b, 1 - b])) for a in t for b in t]


def test_unconstrained_single_sample():
    qp = build_block_qp(Component((0,), ()), [[1.0, 4.0]], beta=0.3)
    np.testing.assert_array_equal(qp.dense(), np.diag([1.0, 4.0]))


def test_similar_pair_blocks():
    qp = build_block_qp(pair(1.0), np.zeros((2, 2)), beta=2.0)
    D = qp.dense()
    np.testing.assert_array_equal(D[:2, :2], np.eye(2))
    np.testing.assert_array_equal(D[2:, 2:], np.eye(2))
    np.testing.assert_array_equal(D[:2, 2:], -np.eye(2))
    for u1, u2 in grid_pairs():
        u = np.concatenate([u1, u2])
        assert abs(0.5 * u @ D @ u - 0.5 * (2.0 / 2) * np.sum((u1 - u2) ** 2)) < 1e-12


def test_dissimilar_pair_blocks():
    qp = build_block_qp(pair(-1.0), np.zeros((2, 2)), beta=2.0)
    D = qp.dense()
    np.testing.assert_array_equal(D[:2, :2], np.zeros((2, 2)))
    np.testing.assert_array_equal(D[:2, 2:], np.eye(2))
    for u1, u2 in grid_pairs():
        u = np.concatenate([u1, u2])
        assert abs(0.5 * u @ D @ u - 0.5 * (-2.0 * -1.0) * (u1 @ u2)) < 1e-12


def test_reduced_hessian_of_indefinite_example():
    assert np.linalg.eigvalsh(WORKED_D)[0] == pytest.approx(-1.0)
    red = reduce(qp_from_dense(WORKED_D, 2))
    np.testing.assert_array_equal(red.H, [[6.0, 4.0], [4.0, 6.0]])
    assert np.linalg.eigvalsh(red.H)[0] > 0


def test_reduced_hessian_identity():
    red = reduce(qp_from_dense(np.eye(2), 2))
    np.testing.assert_array_equal(red.H, [[2.0]])


def test_null_basis():
    B = null_basis(4)
    np.testing.assert_array_equal(B.sum(axis=0), 0)
    assert np.linalg.matrix_rank(B) == 3


def test_expand_examples():
    np.testing.assert_array_equal(expand([0.0, 0.0], 3), [[1, 0, 0]])
    np.testing.assert_array_equal(expand([1.0], 2), [[0, 1]])
    np.testing.assert_allclose(expand([0.2, 0.3], 3), [[0.5, 0.2, 0.3]])
    with pytest.raises(InfeasibleReducedPoint):
        expand([0.7, 0.6], 3)


def random_component_qp(rng, r, k, beta):
    triples = [(a, b, rng.choice([-1, 1]) * rng.uniform(0.05, 1)) for a in range(r) for b in range(a + 1, r) if rng.random() < 0.6]
    if not triples:
        triples = [(0, 1, 0.5)] if r > 1 else []
    cons = ConstraintSet.from_triples(triples)
    comp = connected_components(cons)[0] if r > 1 else Component((0,), ())
    return comp, cons, build_block_qp(comp, rng.random((len(comp.samples), k)) * 3, beta)


@given(st.integers(0, 10_000), st.integers(2, 5), st.integers(2, 4))
def test_reduction_identity(seed, r, k):
    rng = np.random.default_rng(seed)
    _, _, qp = random_component_qp(rng, r, k, beta=rng.uniform(0, 2))
    red = reduce(qp)
    u = rng.dirichlet(np.ones(k), qp.r)
    v = contract(u, k)
    np.testing.assert_allclose(expand(v, k), u, atol=1e-15)
    assert abs(qp.objective(red.u_hat + np.kron(np.eye(qp.r), null_basis(k)) @ v) - red.objective(v) - red.const) < 1e-10


@given(st.integers(0, 10_000), st.integers(2, 5), st.integers(2, 4))
def test_block_objective_is_half_the_clustering_cost(seed, r, k):
    rng = np.random.default_rng(seed)
    beta = rng.uniform(0, 2)
    comp, cons, _ = random_component_qp(rng, r, k, beta)
    pos = {g: a for a, g in enumerate(comp.samples)}
    local = ConstraintSet.from_triples([(pos[c.p], pos[c.q], c.s) for c in comp.constraints])
    dist = rng.random((len(pos), k)) * 3
    qp = build_block_qp(comp, dist, beta)
    u = rng.dirichlet(np.ones(k), qp.r)
    assert abs(qp.objective(u) - 0.5 * objective(u, dist, local, 0.0, beta)) < 1e-10
    assert abs(qp.objective(u) - 0.5 * u.ravel() @ qp.dense() @ u.ravel()) < 1e-10
