import math

import numpy as np
import pytest

from fnn_lab import training
from fnn_lab.datasets import RegressionDataset
from fnn_lab.errors import DomainError, NumericalAbort
from fnn_lab.networks import build_classifier, build_network
from fnn_lab.numerics import Rng
from fnn_lab.training import (EVAL_FLOAT_BUDGET, AdamState, LossKind, TrainConfig, adam_step, cross_entropy_loss,
                              eval_chunk_size, evaluate, squared_loss, train, tune_lr)


def _constant_task(count=200, target=0.7, seed=0):
    x = Rng(seed).uniform(-1.0, 1.0, (count, 1))
    return RegressionDataset(inputs=x, targets=np.full(count, target))


def test_squared_loss_and_gradient():
    assert squared_loss(1.0, 0.0) == (1.0, -2.0)
    loss, grad = squared_loss([1.0, 2.0], [1.0, 0.0])
    np.testing.assert_allclose(loss, [0.0, 4.0])
    np.testing.assert_allclose(grad, [0.0, -4.0])


def test_cross_entropy_examples():
    loss, grad = cross_entropy_loss(0, np.array([0.5, 0.25, 0.25]))
    assert loss == pytest.approx(math.log(2.0))
    np.testing.assert_allclose(grad, [-0.5, 0.25, 0.25])
    with pytest.raises(DomainError):
        cross_entropy_loss(3, np.array([0.5, 0.25, 0.25]))


def test_first_adam_step_moves_by_learning_rate():
    params = {'w': np.array([1.0, -2.0, 0.5])}
    grads = {'w': np.array([0.3, -4.0, 1e-3])}
    state = AdamState(lr=0.01)
    adam_step(params, grads, state)
    # m̂ = g, v̂ = g² ที่ step แรก -> Δ = lr·g/(|g| + eps)
    expected = np.array([1.0, -2.0, 0.5]) - 0.01 * grads['w'] / (np.abs(grads['w']) + 1e-8)
    np.testing.assert_allclose(params['w'], expected, rtol=1e-12)
    assert state.t == 1


def test_zero_learning_rate_leaves_parameters_unchanged():
    params = {'w': np.array([1.0, 2.0])}
    state = AdamState(lr=0.0)
    for _ in range(5):
        adam_step(params, {'w': np.array([0.5, -0.5])}, state)
    np.testing.assert_array_equal(params['w'], [1.0, 2.0])


@pytest.mark.parametrize('scale', [10.0, 0.1])
def test_adam_updates_ignore_gradient_scale(scale):
    grads = [np.array([0.3, -4.0, 1e-3]), np.array([-0.2, 1.5, 2e-3]), np.array([0.7, -0.1, -1e-3])]
    start = np.array([1.0, -2.0, 0.5])
    plain, scaled = {'w': start.copy()}, {'w': start.copy()}
    plain_state, scaled_state = AdamState(lr=0.01, eps=1e-12), AdamState(lr=0.01, eps=1e-12)
    for g in grads:
        adam_step(plain, {'w': g}, plain_state)
        adam_step(scaled, {'w': scale * g}, scaled_state)
    np.testing.assert_allclose(scaled['w'] - start, plain['w'] - start, rtol=1e-6)


def test_adam_aborts_on_non_finite_gradient():
    with pytest.raises(NumericalAbort) as excinfo:
        adam_step({'w': np.zeros(2)}, {'w': np.array([1.0, np.nan])}, AdamState(lr=0.1))
    assert excinfo.value.diagnostics['parameter'] == 'w'


def test_adam_decreases_a_quadratic_monotonically():
    params = {'v0': np.array(0.0)}
    state = AdamState(lr=0.001)
    losses = []
    for _ in range(200):
        losses.append(float((params['v0'] - 0.3) ** 2))
        adam_step(params, {'v0': 2.0 * (params['v0'] - 0.3)}, state)
    assert all(b < a for a, b in zip(losses, losses[1:]))


def test_train_fits_a_constant_target():
    data = _constant_task()
    model = build_network('vanilla', 4, 1, Rng(1))
    config = TrainConfig(batch_size=20, epochs=40, lr_grid=(0.01,), seed=3)
    result = train(model, data, data, config)
    assert len(result.curves) == 41
    assert result.curves[0].epoch == 0
    assert result.best_valid <= result.curves[0].valid_metric
    assert evaluate(result.model, data, LossKind.SQUARED_ERROR) < 5e-3


def test_zero_epochs_returns_the_untouched_model():
    data = _constant_task()
    model = build_network('gw', 3, 1, Rng(1))
    before = {name: value.copy() for name, value in model.params.items()}
    result = train(model, data, data, TrainConfig(epochs=0))
    assert result.best_epoch == 0
    for name, value in before.items():
        np.testing.assert_array_equal(result.model.params[name], value)


def test_training_is_deterministic():
    data = _constant_task(count=100)
    config = TrainConfig(batch_size=16, epochs=3, lr_grid=(0.003,), seed=11)
    a = train(build_network('liu', 3, 1, Rng(2)), data, data, config)
    b = train(build_network('liu', 3, 1, Rng(2)), data, data, config)
    for name in a.model.params:
        np.testing.assert_array_equal(a.model.params[name], b.model.params[name])
    assert a.step_losses == b.step_losses


def test_tune_lr_keeps_grid_order_and_prefers_the_best():
    # target อยู่ไกลเกินกว่าที่ model ตอน init จะไปถึง lr เล็กมากจึงแพ้แน่นอน
    data = _constant_task(count=100, target=3.0)
    config = TrainConfig(batch_size=20, epochs=20, lr_grid=(1e-6, 0.01), seed=0)
    result = tune_lr(lambda rng: build_network('vanilla', 3, 1, rng), data, data, config)
    assert [lr for lr, _ in result.results] == [1e-6, 0.01]
    assert result.best_lr == 0.01
    assert result.best_result.best_valid == min(r.best_valid for _, r in result.results)
    assert result.failures == []


def test_tune_lr_skips_a_diverging_learning_rate(monkeypatch):
    real_train = training.train

    def train_or_diverge(model, train_set, valid_set, config, lr=None, rng=None):
        if lr == 10.0:
            raise NumericalAbort("non-finite training loss at epoch 1, batch 0 (lr=10)", epoch=1, batch=0, lr=lr)
        return real_train(model, train_set, valid_set, config, lr=lr, rng=rng)

    monkeypatch.setattr(training, 'train', train_or_diverge)
    data = _constant_task(count=100)
    config = TrainConfig(batch_size=20, epochs=5, lr_grid=(10.0, 0.01), seed=0)
    result = tune_lr(lambda rng: build_network('vanilla', 3, 1, rng), data, data, config)
    assert result.best_lr == 0.01
    assert [lr for lr, _ in result.failures] == [10.0]
    assert [lr for lr, _ in result.results] == [0.01]


def test_tune_lr_every_grid_point_failing_raises(monkeypatch):
    def always_diverge(*args, **kwargs):
        raise NumericalAbort("non-finite training loss", epoch=1, batch=0)

    monkeypatch.setattr(training, 'train', always_diverge)
    config = TrainConfig(epochs=1, lr_grid=(10.0, 1.0))
    with pytest.raises(NumericalAbort):
        tune_lr(lambda rng: build_network('vanilla', 3, 1, rng), _constant_task(), _constant_task(), config)


def test_tune_lr_with_a_duplicated_grid_returns_that_rate():
    data = _constant_task(count=60)
    config = TrainConfig(batch_size=20, epochs=2, lr_grid=(0.003, 0.003), seed=4)
    result = tune_lr(lambda rng: build_network('gw', 3, 1, rng), data, data, config)
    assert result.best_lr == 0.003
    assert len(result.results) == 2
    assert result.best_result.best_valid == min(r.best_valid for _, r in result.results)

    # init เดียวกันและไม่ train: เสมอกันพอดี ตัวแรกชนะ
    tie = tune_lr(lambda rng: build_network('gw', 3, 1, Rng(9)), data, data,
                  TrainConfig(epochs=0, lr_grid=(0.003, 0.003), seed=4))
    assert tie.results[0][1].best_valid == tie.results[1][1].best_valid
    assert tie.best_result is tie.results[0][1]

    single = tune_lr(lambda rng: build_network('gw', 3, 1, rng), data, data,
                     TrainConfig(batch_size=20, epochs=1, lr_grid=(0.02,), seed=4))
    assert single.best_lr == 0.02


def test_train_config_validation():
    with pytest.raises(DomainError):
        TrainConfig(batch_size=0)
    with pytest.raises(DomainError):
        TrainConfig(lr_grid=())
    with pytest.raises(DomainError):
        TrainConfig(lr_grid=(0.01, -1.0))


def test_evaluation_chunks_shrink_for_product_units():
    silvescu = build_classifier('silvescu', 64, 784, 10, Rng(0))
    chunk = eval_chunk_size(silvescu, 1000)
    assert chunk * 64 * 784 <= EVAL_FLOAT_BUDGET
    assert chunk >= 1
    assert eval_chunk_size(build_classifier('vanilla', 64, 784, 10, Rng(0)), 1000) == 1000
    assert eval_chunk_size(build_network('silvescu', 2, 1, Rng(0)), 1000) == 1000


def test_evaluation_does_not_depend_on_chunk_size():
    data = _constant_task(count=50)
    model = build_network('silvescu', 3, 1, Rng(5))
    whole = evaluate(model, data, LossKind.SQUARED_ERROR)
    assert evaluate(model, data, LossKind.SQUARED_ERROR, chunk=7) == pytest.approx(whole, rel=1e-12)
