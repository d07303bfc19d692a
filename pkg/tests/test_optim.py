import numpy as np
import pytest

from aecf import DivergenceError, SgdMomentum


def test_hand_iterated_momentum_updates():
    p = {"w": np.array([1.0])}
    opt = SgdMomentum(p, learning_rate=0.1, momentum=0.9)
    g = {"w": np.array([1.0])}
    opt.step(p, g)
    # v = -lr*g = -0.1, p = 0.9
    assert p["w"][0] == pytest.approx(0.9)
    opt.step(p, g)
    # v = 0.9*(-0.1) - 0.1 = -0.19, p = 0.71
    assert p["w"][0] == pytest.approx(0.71)
    assert opt.velocity["w"][0] == pytest.approx(-0.19)


def test_zero_momentum_is_plain_sgd():
    p = {"w": np.array([2.0, -1.0])}
    opt = SgdMomentum(p, learning_rate=0.5, momentum=0.0)
    opt.step(p, {"w": np.array([1.0, -2.0])})
    assert p["w"] == pytest.approx([1.5, 0.0])


def test_update_is_in_place():
    w = np.ones((3, 2), dtype=np.float32)
    view = w.T  # stands in for a tied decoder view
    p = {"w": w}
    opt = SgdMomentum(p, learning_rate=0.1, momentum=0.9)
    opt.step(p, {"w": np.full((3, 2), 2.0)})
    assert p["w"] is w
    assert view.base is w
    assert np.allclose(view, w.T)
    assert w.dtype == np.float32


def test_hyperparameter_validation():
    p = {"w": np.zeros(1)}
    with pytest.raises(ValueError):
        SgdMomentum(p, learning_rate=0.0)
    with pytest.raises(ValueError):
        SgdMomentum(p, learning_rate=-0.1)
    with pytest.raises(ValueError):
        SgdMomentum(p, momentum=1.0)
    with pytest.raises(ValueError):
        SgdMomentum(p, momentum=-0.1)


def test_name_and_shape_mismatch_rejected():
    p = {"w": np.zeros(2)}
    opt = SgdMomentum(p)
    with pytest.raises(ValueError):
        opt.step(p, {"v": np.zeros(2)})
    with pytest.raises(ValueError):
        opt.step({"w": np.zeros(3)}, {"w": np.zeros(3)})
    with pytest.raises(ValueError):
        opt.step(p, {"w": np.zeros(3)})


def test_non_finite_gradient_raises_divergence_error():
    p = {"w": np.zeros(2)}
    opt = SgdMomentum(p)
    with pytest.raises(DivergenceError):
        opt.step(p, {"w": np.array([1.0, np.nan])})
    with pytest.raises(DivergenceError):
        opt.step(p, {"w": np.array([np.inf, 0.0])})


def test_momentum_accelerates_down_a_constant_slope():
    flat = {"w": np.array([0.0])}
    heavy = {"w": np.array([0.0])}
    opt_flat = SgdMomentum(flat, learning_rate=0.1, momentum=0.0)
    opt_heavy = SgdMomentum(heavy, learning_rate=0.1, momentum=0.9)
    g = {"w": np.array([1.0])}
    for _ in range(10):
        opt_flat.step(flat, g)
        opt_heavy.step(heavy, g)
    assert heavy["w"][0] < flat["w"][0] < 0
