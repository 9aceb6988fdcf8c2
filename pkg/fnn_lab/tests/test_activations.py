import math

import numpy as np
import pytest

from fnn_lab.activations import (ActivationKind, activation, activation_derivative, cosine_squasher,
                                 sigmoid)
from fnn_lab.numerics import Rng


def test_sigmoid_values_and_saturation():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(-1000.0) == 0.0
    assert sigmoid(1000.0) == 1.0
    x = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(sigmoid(x) + sigmoid(-x), 1.0, atol=1e-15)


def test_cosine_squasher_pieces():
    half = 0.5 * math.pi
    assert cosine_squasher(-half) == pytest.approx(0.0, abs=1e-15)
    assert cosine_squasher(0.0) == pytest.approx(0.5, abs=1e-15)
    assert cosine_squasher(half) == pytest.approx(1.0, abs=1e-15)
    assert cosine_squasher(-3.0) == 0.0
    assert cosine_squasher(3.0) == 1.0
    x = np.linspace(-4, 4, 101)
    values = cosine_squasher(x)
    assert np.all(np.diff(values) >= 0)
    assert np.all((values >= 0) & (values <= 1))


def test_cosine_squasher_derivative_is_zero_at_the_corners():
    half = 0.5 * math.pi
    assert activation_derivative(ActivationKind.COSINE_SQUASHER, half) == 0.0
    assert activation_derivative(ActivationKind.COSINE_SQUASHER, -half) == 0.0
    assert activation_derivative(ActivationKind.COSINE_SQUASHER, 2.0) == 0.0
    assert activation_derivative(ActivationKind.COSINE_SQUASHER, 0.0) == pytest.approx(0.5)


@pytest.mark.parametrize('kind', list(ActivationKind))
def test_derivative_matches_central_difference(kind):
    x = Rng(17).uniform(-4.0, 4.0, 1000)
    eps = 1e-6
    numeric = (activation(kind, x + eps) - activation(kind, x - eps)) / (2 * eps)
    analytic = activation_derivative(kind, x)
    # ใกล้มุม ±π/2 second derivative กระโดด central difference จึงคลาดได้ราว eps/4
    near_corner = np.abs(np.abs(x) - 0.5 * math.pi) < 10 * eps
    np.testing.assert_allclose(analytic[~near_corner], numeric[~near_corner], rtol=0, atol=1e-8)
    np.testing.assert_allclose(analytic[near_corner], numeric[near_corner], rtol=0, atol=1e-6)
    if kind is ActivationKind.COSINE_SQUASHER:
        assert np.any(np.abs(x) > 0.5 * math.pi)


def test_activation_accepts_string_kind():
    assert activation('sigmoid', 0.0) == 0.5
    with pytest.raises(ValueError):
        activation('tanh', 0.0)
