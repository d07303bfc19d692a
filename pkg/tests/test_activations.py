import numpy as np
import pytest

from aecf import Activation, KINDS, RANGE_LIMITED, apply, derivative
from aecf.activations import SELU_ALPHA, SELU_LAMBDA


def test_selu_constants_are_the_fixed_published_values():
    assert SELU_LAMBDA == 1.0507009873554805
    assert SELU_ALPHA == 1.6732632423543772


def test_kind_catalog():
    assert KINDS == ("sigmoid", "tanh", "relu", "relu6", "elu", "lrelu", "selu", "linear")
    assert set(RANGE_LIMITED) == {"sigmoid", "tanh"}


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="unknown activation"):
        Activation("swish")


def test_shape_parameters_validated():
    with pytest.raises(ValueError, match="lrelu_slope"):
        Activation("lrelu", lrelu_slope=0.0)
    with pytest.raises(ValueError, match="elu_alpha"):
        Activation("elu", elu_alpha=-1.0)


def test_point_values_against_frozen_oracles():
    # Literals computed once from the defining formulas and pinned here.
    assert apply(Activation("selu"), -1.0) == pytest.approx(-1.1113307378125625, abs=1e-15)
    assert apply(Activation("selu"), 2.0) == pytest.approx(2.101401974710961, abs=1e-15)
    assert derivative(Activation("selu"), -1.0) == pytest.approx(0.646768603034814, abs=1e-15)
    assert apply(Activation("elu"), -1.0) == pytest.approx(-0.6321205588285577, abs=1e-15)
    assert apply(Activation("sigmoid"), 0.3) == pytest.approx(0.574442516811659, abs=1e-15)
    assert apply(Activation("tanh"), 0.7) == pytest.approx(0.6043677771171634, abs=1e-15)


def test_relu6_clamps_both_sides():
    x = np.array([-3.0, 0.0, 3.0, 6.0, 7.5])
    assert np.array_equal(apply(Activation("relu6"), x), [0.0, 0.0, 3.0, 6.0, 6.0])


def test_lrelu_uses_configured_slope():
    act = Activation("lrelu", lrelu_slope=0.2)
    assert apply(act, -2.0) == pytest.approx(-0.4)
    assert derivative(act, -2.0) == pytest.approx(0.2)
    assert derivative(Activation("lrelu"), -5.0) == pytest.approx(0.01)


def test_right_hand_derivative_at_kinks():
    zero = np.array([0.0])
    assert derivative(Activation("relu"), zero) == 1.0
    assert derivative(Activation("lrelu"), zero) == 1.0
    assert derivative(Activation("elu"), zero) == 1.0
    assert derivative(Activation("selu"), zero) == pytest.approx(SELU_LAMBDA)
    assert derivative(Activation("relu6"), np.array([6.0])) == 0.0
    assert derivative(Activation("relu6"), zero) == 1.0


def test_sigmoid_and_softplus_family_stable_at_extremes():
    big = np.array([-1000.0, -50.0, 50.0, 1000.0])
    for kind in KINDS:
        y = apply(Activation(kind), big)
        d = derivative(Activation(kind), big)
        assert np.isfinite(y).all(), kind
        assert np.isfinite(d).all(), kind
    assert apply(Activation("sigmoid"), np.array([1000.0]))[0] == pytest.approx(1.0)
    assert apply(Activation("sigmoid"), np.array([-1000.0]))[0] == pytest.approx(0.0)


def test_derivative_matches_finite_differences_everywhere():
    rng = np.random.default_rng(7)
    x = rng.uniform(-4.0, 8.0, size=2000)
    # Keep clear of the kinks so the central difference is valid.
    x = x[(np.abs(x) > 1e-3) & (np.abs(x - 6.0) > 1e-3)]
    h = 1e-6
    for kind in KINDS:
        act = Activation(kind)
        fd = (apply(act, x + h) - apply(act, x - h)) / (2 * h)
        assert np.allclose(derivative(act, x), fd, atol=1e-6), kind


def test_float32_dtype_preserved_and_integers_promoted():
    x32 = np.linspace(-2, 2, 9, dtype=np.float32)
    for kind in KINDS:
        assert apply(Activation(kind), x32).dtype == np.float32, kind
        assert derivative(Activation(kind), x32).dtype == np.float32, kind
    xi = np.array([-2, -1, 0, 1, 2])
    assert apply(Activation("lrelu"), xi)[0] == pytest.approx(-0.02)
    assert derivative(Activation("lrelu"), xi).dtype == np.float64


def test_activation_is_callable():
    act = Activation("relu")
    assert np.array_equal(act(np.array([-1.0, 2.0])), [0.0, 2.0])
