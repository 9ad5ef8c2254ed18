import itertools

import numpy as np
import pytest

from fctklt.blockscan import SubBlockStack
from fctklt.errors import DimensionError
from fctklt.klt import (
    KltBasis,
    compute_covariance,
    compute_mean,
    eigen_symmetric,
    fit_basis,
    jacobi_eigh,
    klt_forward,
    klt_inverse,
)
from fctklt.reduce import prune, zero_pad

SQRT5 = np.sqrt(5.0)


def hand_stack():
    # blocks [1, 3] and [2, 6]; each sample appears twice so the blocks are 2x2
    return SubBlockStack(np.array([[[1, 3], [1, 3]], [[2, 6], [2, 6]]], dtype=float), 1, 2)


def random_stack(rng, n, b, correlated=True):
    base = rng.normal(size=(b * b,))
    mix = rng.normal(size=(n, n)) * np.geomspace(10, 0.1, n)[None, :]
    x = mix @ rng.normal(size=(n, b * b)) + (np.outer(rng.normal(size=n), base) if correlated else 0)
    gr = 1
    while gr * gr < n:
        gr += 1
    grid_rows = gr if gr * gr == n else 1
    grid_cols = n // grid_rows
    return SubBlockStack(x.reshape(n, b, b) + rng.normal(size=(n, 1, 1)) * 5, grid_rows, grid_cols)


def brute_covariance(stack):
    x = stack.vectors()
    samples = [x[:, p] for p in range(x.shape[1])]
    mean = sum(samples) / len(samples)
    return mean, sum(np.outer(s - mean, s - mean) for s in samples) / len(samples)


def test_mean_hand_case():
    assert compute_mean(hand_stack()).tolist() == [2.0, 4.0]


def test_mean_degenerate():
    zeros = SubBlockStack(np.zeros((3, 2, 2)), 1, 3)
    assert compute_mean(zeros).tolist() == [0.0, 0.0, 0.0]
    block = np.arange(9.0).reshape(3, 3)
    same = SubBlockStack(np.stack([block] * 4), 2, 2)
    assert np.allclose(compute_mean(same), 4.0)


def test_covariance_hand_case():
    s = hand_stack()
    c = compute_covariance(s, compute_mean(s))
    assert c.tolist() == [[1.0, 2.0], [2.0, 4.0]]


def test_covariance_matches_brute_force(rng):
    s = random_stack(rng, 6, 4)
    mean, cov = brute_covariance(s)
    assert np.allclose(compute_mean(s), mean, atol=1e-12)
    assert np.allclose(compute_covariance(s, compute_mean(s)), cov, atol=1e-9)


def test_covariance_degenerate():
    block = np.arange(4.0).reshape(2, 2)
    same = SubBlockStack(np.stack([block] * 3), 1, 3)
    c = compute_covariance(same, compute_mean(same))
    assert np.linalg.matrix_rank(c) == 1
    const = SubBlockStack(np.full((3, 2, 2), 7.0), 1, 3)
    assert np.array_equal(compute_covariance(const, compute_mean(const)), np.zeros((3, 3)))


def test_covariance_shape_check():
    with pytest.raises(DimensionError):
        compute_covariance(hand_stack(), np.zeros(3))


def test_eigen_hand_case():
    vals, vecs = eigen_symmetric([[1.0, 2.0], [2.0, 4.0]])
    assert np.allclose(vals, [5.0, 0.0], atol=1e-12)
    assert np.allclose(vecs[:, 0], np.array([1.0, 2.0]) / SQRT5, atol=1e-12)


def test_eigen_identity():
    vals, vecs = eigen_symmetric(np.eye(4))
    assert np.allclose(vals, 1.0)
    assert np.allclose(vecs @ np.diag(vals) @ vecs.T, np.eye(4), atol=1e-12)


def test_eigen_diagonal():
    vals, vecs = eigen_symmetric(np.diag([3.0, 1.0, 7.0]))
    assert vals.tolist() == [7.0, 3.0, 1.0]
    assert np.array_equal(vecs, np.eye(3)[:, [2, 0, 1]])


@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 33, 64])
def test_eigen_against_numpy(n, rng):
    a = rng.normal(size=(n, n + 5))
    c = a @ a.T / n
    vals, vecs = eigen_symmetric(c)
    ref = np.linalg.eigvalsh(c)[::-1]
    assert np.allclose(vals, ref, rtol=1e-10, atol=1e-10)
    assert np.abs(vecs @ np.diag(vals) @ vecs.T - c).max() < 1e-8
    assert np.abs(vecs.T @ vecs - np.eye(n)).max() < 1e-9
    assert np.all(np.diff(vals) <= 0)
    lead = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(n)]
    assert np.all(lead >= 0)


def test_eigen_indefinite(rng):
    a = rng.normal(size=(8, 8))
    c = a + a.T
    vals, vecs = eigen_symmetric(c)
    assert np.allclose(vals, np.linalg.eigvalsh(c)[::-1], atol=1e-10)
    assert np.abs(vecs @ np.diag(vals) @ vecs.T - c).max() < 1e-8


def test_eigen_rejects_asymmetric():
    with pytest.raises(DimensionError):
        eigen_symmetric([[1.0, 2.0], [0.0, 1.0]])


def test_jacobi_stops_within_sweep_limit(rng):
    a = rng.normal(size=(20, 20))
    _, _, sweeps = jacobi_eigh(a @ a.T)
    assert 0 < sweeps < 20


def test_forward_hand_case():
    s = hand_stack()
    basis = fit_basis(s)
    y = klt_forward(s, basis).vectors()
    assert np.allclose(y[0], [-SQRT5, SQRT5, -SQRT5, SQRT5], atol=1e-12)
    assert np.allclose(y[1], 0.0, atol=1e-12)


def test_forward_of_mean_is_zero():
    mean = np.array([1.5, -2.0, 4.0])
    s = SubBlockStack(np.broadcast_to(mean[:, None, None], (3, 2, 2)).copy(), 1, 3)
    basis = KltBasis(mean, np.eye(3), np.zeros(3))
    assert np.array_equal(klt_forward(s, basis).blocks, np.zeros((3, 2, 2)))


def test_identity_basis(rng):
    s = random_stack(rng, 4, 3)
    basis = KltBasis(np.zeros(4), np.eye(4), np.ones(4))
    assert np.array_equal(klt_forward(s, basis).blocks, s.blocks)


def test_round_trip_64_by_64(rng):
    s = SubBlockStack(rng.uniform(0, 255, size=(64, 64, 64)), 8, 8)
    basis = fit_basis(s)
    back = klt_inverse(klt_forward(s, basis), basis)
    assert np.abs(back.blocks - s.blocks).max() < 1e-9


def test_inverse_of_zero_is_mean(rng):
    s = random_stack(rng, 4, 3)
    basis = fit_basis(s)
    out = klt_inverse(SubBlockStack(np.zeros((4, 3, 3)), s.grid_rows, s.grid_cols), basis)
    assert np.allclose(out.vectors(), basis.mean[:, None])


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_truncation_error_is_tail_energy(m, rng):
    s = random_stack(rng, 6, 5)
    basis = fit_basis(s)
    y = klt_forward(s, basis)
    rec = klt_inverse(zero_pad(prune(y, m), 6), basis)
    per_vector = np.mean(np.sum((rec.vectors() - s.vectors()) ** 2, axis=0))
    assert per_vector == pytest.approx(basis.eigenvalues[m:].sum(), rel=1e-6)


@pytest.mark.parametrize("n", [4, 9, 16, 64])
def test_transformed_statistics(n, rng):
    s = random_stack(rng, n, 8)
    basis = fit_basis(s)
    y = klt_forward(s, basis)
    assert np.abs(compute_mean(y)).max() < 1e-9
    cy = compute_covariance(y, np.zeros(n))
    trace = np.trace(cy)
    off = cy - np.diag(np.diag(cy))
    assert np.abs(off).max() < 1e-8 * trace
    assert np.allclose(np.diag(cy), basis.eigenvalues, rtol=1e-8, atol=1e-12 * trace)
    assert np.abs(basis.eigenvectors.T @ basis.eigenvectors - np.eye(n)).max() < 1e-9
    assert np.all(basis.eigenvalues >= 0)


def test_prefix_sums_are_maximal(rng):
    s = random_stack(rng, 5, 4)
    basis = fit_basis(s)
    cov = compute_covariance(s, compute_mean(s))
    prefix = np.cumsum(basis.eigenvalues)
    for k in range(1, 5):
        # variance captured by any k original channels never beats the first k eigen-channels
        best_subset = max(np.trace(cov[np.ix_(idx, idx)]) for idx in itertools.combinations(range(5), k))
        assert prefix[k - 1] >= best_subset - 1e-9


def test_dimension_mismatch(rng):
    s = random_stack(rng, 4, 3)
    basis = KltBasis(np.zeros(3), np.eye(3), np.ones(3))
    with pytest.raises(DimensionError):
        klt_forward(s, basis)
    with pytest.raises(DimensionError):
        klt_inverse(s, basis)
