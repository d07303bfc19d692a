import numpy as np
import pytest

from aecf import Batch, masked_mse, masked_mse_gradient, rmse_from_mmse


def naive_masked_mse(predicted, target, mask):
    """Double-loop oracle, deliberately dumb."""
    num, den = 0.0, 0.0
    for i in range(predicted.shape[0]):
        for j in range(predicted.shape[1]):
            num += mask[i, j] * (predicted[i, j] - target[i, j]) ** 2
            den += mask[i, j]
    return num / den


def naive_masked_mse_gradient(predicted, target, mask):
    den = 0.0
    for i in range(mask.shape[0]):
        for j in range(mask.shape[1]):
            den += mask[i, j]
    out = np.zeros_like(predicted, dtype=np.float64)
    for i in range(predicted.shape[0]):
        for j in range(predicted.shape[1]):
            out[i, j] = 2.0 * mask[i, j] * (predicted[i, j] - target[i, j]) / den
    return out


def test_hand_worked_example():
    predicted = np.array([[1.0, 2.0], [3.0, 4.0]])
    target = np.array([[2.0, 2.0], [0.0, 1.0]])
    mask = np.array([[1.0, 0.0], [1.0, 1.0]])
    # Errors on masked entries: -1, 3, 3 -> (1 + 9 + 9) / 3
    assert masked_mse(predicted, target, mask) == pytest.approx(19.0 / 3.0)
    grad = masked_mse_gradient(predicted, target, mask)
    assert grad == pytest.approx(np.array([[-2.0 / 3.0, 0.0], [2.0, 2.0]]))


def test_matches_naive_oracle_on_random_batches():
    rng = np.random.default_rng(3)
    for _ in range(25):
        rows, cols = rng.integers(1, 7), rng.integers(1, 9)
        predicted = rng.normal(size=(rows, cols))
        target = rng.normal(size=(rows, cols))
        mask = (rng.random((rows, cols)) < 0.6).astype(np.float64)
        if mask.sum() == 0:
            mask[0, 0] = 1.0
        assert masked_mse(predicted, target, mask) == pytest.approx(
            naive_masked_mse(predicted, target, mask), abs=1e-12)
        assert masked_mse_gradient(predicted, target, mask) == pytest.approx(
            naive_masked_mse_gradient(predicted, target, mask), abs=1e-12)


def test_dense_mask_reduces_to_plain_mse():
    rng = np.random.default_rng(5)
    predicted = rng.normal(size=(4, 6))
    target = rng.normal(size=(4, 6))
    mask = np.ones_like(predicted)
    assert masked_mse(predicted, target, mask) == pytest.approx(
        np.mean((predicted - target) ** 2))


def test_gradient_is_zero_off_mask():
    predicted = np.array([[5.0, -7.0, 2.0]])
    target = np.zeros((1, 3))
    mask = np.array([[0.0, 1.0, 0.0]])
    grad = masked_mse_gradient(predicted, target, mask)
    assert grad[0, 0] == 0.0 and grad[0, 2] == 0.0
    assert grad[0, 1] == pytest.approx(-14.0)


def test_gradient_direction_is_descent():
    rng = np.random.default_rng(9)
    predicted = rng.normal(size=(3, 5))
    target = rng.normal(size=(3, 5))
    mask = np.ones_like(predicted)
    grad = masked_mse_gradient(predicted, target, mask)
    stepped = predicted - 0.01 * grad
    assert masked_mse(stepped, target, mask) < masked_mse(predicted, target, mask)


def test_shape_and_empty_mask_errors():
    a = np.zeros((2, 3))
    with pytest.raises(ValueError, match="shape"):
        masked_mse(a, np.zeros((3, 2)), np.zeros((2, 3)))
    with pytest.raises(ValueError, match="no nonzero"):
        masked_mse(a, a, np.zeros((2, 3)))
    with pytest.raises(ValueError, match="no nonzero"):
        masked_mse_gradient(a, a, np.zeros((2, 3)))


def test_float32_batch_accumulates_in_float64():
    # Summing 200k float32 squares naively in float32 drifts visibly; the
    # float64 accumulator must return the exact mean of the rounded squares.
    n = 200_000
    predicted = np.full((1, n), 1.001, dtype=np.float32)
    target = np.zeros((1, n), dtype=np.float32)
    mask = np.ones((1, n), dtype=np.float32)
    got = masked_mse(predicted, target, mask)
    per_element = float(np.float32(1.001) * np.float32(1.001))
    assert got == pytest.approx(per_element, rel=1e-12)


def test_rmse_from_mmse():
    assert rmse_from_mmse(4.0) == 2.0
    assert rmse_from_mmse(0.0) == 0.0
    with pytest.raises(ValueError):
        rmse_from_mmse(-1e-9)


def test_batch_shape_validation_and_dense_helper():
    with pytest.raises(ValueError, match="shape"):
        Batch(ratings=np.zeros((2, 3)), mask=np.zeros((2, 2)))
    dense = Batch.dense(np.ones((2, 4)))
    assert dense.mask.sum() == 8
    assert dense.n_rows == 2
