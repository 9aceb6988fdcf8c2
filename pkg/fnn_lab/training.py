"""
Adam optimizer, loss functions และ training loop แบบ mini-batch

protocol: batch 100, Adam (β₁ = 0.9, β₂ = 0.999, eps = 1e−8), lr จูนบน validation,
เลือก snapshot ที่ validation metric ดีที่สุด (รวม epoch 0 ก่อนเริ่ม train)
"""

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, NumericalAbort
from .numerics import Rng, mse

logger = logging.getLogger(__name__)

DEFAULT_LR_GRID = (0.0003, 0.001, 0.003, 0.01, 0.03)


class LossKind(str, enum.Enum):
    SQUARED_ERROR = 'squared_error'
    CROSS_ENTROPY = 'cross_entropy'


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 100
    epochs: int = 20
    lr_grid: tuple = DEFAULT_LR_GRID
    seed: int = 0
    loss: LossKind = LossKind.SQUARED_ERROR
    # ขนาด chunk สูงสุดตอน evaluate (ถูกลดลงอีกตาม eval_chunk_size)
    eval_batch_size: int = 1000

    def __post_init__(self):
        if self.batch_size < 1:
            raise DomainError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise DomainError(f"epochs must be >= 0, got {self.epochs}")
        if not self.lr_grid:
            raise DomainError("lr_grid must not be empty")
        if any(lr <= 0 for lr in self.lr_grid):
            raise DomainError(f"learning rates must be positive, got {self.lr_grid}")
        object.__setattr__(self, 'lr_grid', tuple(float(lr) for lr in self.lr_grid))
        object.__setattr__(self, 'loss', LossKind(self.loss))


# --- Adam ---

@dataclass
class AdamState:
    """
    Moment ของ Adam ต่อ parameter (m, v) กับ step counter t
    m, v ถูกสร้างตอนเห็น parameter ครั้งแรก (shape เดียวกับ parameter)
    """
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lr < 0:
            raise DomainError(f"learning rate must be nonnegative, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise DomainError(f"betas must lie in [0, 1), got {(self.beta1, self.beta2)}")
        if self.eps <= 0:
            raise DomainError(f"eps must be positive, got {self.eps}")


def adam_step(params, grads, state):
    """
    Function: adam_step
    หน้าที่: update params แบบ in-place หนึ่ง step
    m ← β₁m + (1−β₁)g, v ← β₂v + (1−β₂)g², θ ← θ − lr·m̂/(√v̂ + eps)
    gradient ที่ไม่ finite -> NumericalAbort พร้อมชื่อ parameter
    """
    if set(grads) != set(params):
        raise DimensionError(f"gradient names {sorted(grads)} do not match parameters {sorted(params)}")
    for name, g in grads.items():
        if np.shape(g) != np.shape(params[name]):
            raise DimensionError(f"{name}: gradient shape {np.shape(g)} != parameter shape {np.shape(params[name])}")
        if not np.all(np.isfinite(g)):
            raise NumericalAbort(f"non-finite gradient for parameter {name!r} at Adam step {state.t + 1}",
                                 parameter=name, step=state.t + 1)

    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    for name, g in grads.items():
        if name not in state.m:
            state.m[name] = np.zeros_like(params[name])
            state.v[name] = np.zeros_like(params[name])
        state.m[name] *= state.beta1
        state.m[name] += (1.0 - state.beta1) * g
        state.v[name] *= state.beta2
        state.v[name] += (1.0 - state.beta2) * (g * g)
        m_hat = state.m[name] / bc1
        v_hat = state.v[name] / bc2
        params[name] -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return params, state


# --- losses ---

def squared_loss(y, yhat):
    """(y − ŷ)² และ ∂/∂ŷ = −2(y − ŷ); รับ scalar หรือ array"""
    residual = np.asarray(y, dtype=np.float64) - np.asarray(yhat, dtype=np.float64)
    loss, grad = residual * residual, -2.0 * residual
    if residual.ndim == 0:
        return float(loss), float(grad)
    return loss, grad


def cross_entropy_loss(label, probs):
    """
    Function: cross_entropy_loss
    หน้าที่: −log probs[label] และ gradient เทียบ logits = probs − onehot(label)
    รับ label เดี่ยวกับ probs (C,) หรือ labels (T,) กับ probs (T, C)
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(label)
    single = probs.ndim == 1
    P = np.atleast_2d(probs)
    labels = np.atleast_1d(labels).astype(np.int64)
    n_classes = P.shape[1]
    if labels.shape != (P.shape[0],):
        raise DimensionError(f"{labels.shape[0]} labels for {P.shape[0]} probability rows")
    if np.any(labels < 0) or np.any(labels >= n_classes):
        raise DomainError(f"label out of range for {n_classes} classes")
    rows = np.arange(P.shape[0])
    with np.errstate(divide='ignore'):
        loss = -np.log(P[rows, labels])
    dlogits = P.copy()
    dlogits[rows, labels] -= 1.0
    if single:
        return float(loss[0]), dlogits[0]
    return loss, dlogits


# --- metrics ---

# temporary ของ forward ต่อ chunk ไม่เกินเท่านี้ (float64 4M ตัว = 32 MB)
EVAL_FLOAT_BUDGET = 4_000_000


def eval_chunk_size(model, chunk):
    """chunk ที่ไม่ทำให้ temporary เกิน EVAL_FLOAT_BUDGET (Silvescu บน MNIST มี n·d float ต่อ sample)"""
    width = max(1, getattr(model, 'floats_per_sample', 1))
    return max(1, min(chunk, EVAL_FLOAT_BUDGET // width))


def _chunks(count, size):
    for start in range(0, count, size):
        yield slice(start, min(start + size, count))


def evaluate(model, dataset, loss, chunk=1000):
    """
    metric ที่ใช้เลือก snapshot/lr:
    squared error -> MSE, cross entropy -> error rate (1 − accuracy)
    """
    X, y = dataset.inputs, dataset.targets
    if len(y) == 0:
        raise DomainError("cannot evaluate on an empty dataset")
    chunk = eval_chunk_size(model, chunk)
    if LossKind(loss) is LossKind.SQUARED_ERROR:
        preds = np.concatenate([model.forward_pass(X[s])[0] for s in _chunks(len(y), chunk)])
        return mse(y, preds)
    wrong = 0
    for s in _chunks(len(y), chunk):
        probs, _ = model.forward_pass(X[s])
        wrong += int(np.count_nonzero(np.argmax(probs, axis=1) != y[s]))
    return wrong / len(y)


def accuracy(model, dataset, chunk=1000):
    return 1.0 - evaluate(model, dataset, LossKind.CROSS_ENTROPY, chunk)


def batch_loss_and_grads(model, X, y, loss):
    """loss เฉลี่ยของ batch และ gradient ของค่าเฉลี่ยนั้น"""
    out, cache = model.forward_pass(X)
    count = X.shape[0]
    if LossKind(loss) is LossKind.SQUARED_ERROR:
        losses, dout = squared_loss(y, out)
    else:
        losses, dout = cross_entropy_loss(y, out)
    return float(np.mean(losses)), model.backward_pass(X, cache, dout / count)


# --- training ---

@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_metric: float
    valid_metric: float
    lr: float
    seed: int


@dataclass
class TrainResult:
    model: object
    curves: list
    best_epoch: int
    best_valid: float
    step_losses: list = field(default_factory=list)


def _snapshot(model):
    return {name: np.copy(value) for name, value in model.params.items()}


def _restore(model, snapshot):
    for name, value in snapshot.items():
        model.params[name][...] = value


def train(model, train_set, valid_set, config, lr=None, rng=None):
    """
    Function: train
    หน้าที่: train ตาม protocol
    - ทุก epoch สลับลำดับด้วย Fisher-Yates จาก rng ของ run, batch สุดท้ายที่เล็กกว่า batch_size ก็ใช้
    - Adam update ทุก batch
    - เก็บ snapshot ที่ validation metric ต่ำสุด (epoch 0 = ก่อน train) แล้วคืน model ที่ snapshot นั้น
    loss ไม่ finite -> NumericalAbort พร้อม epoch และ batch index
    """
    lr = config.lr_grid[0] if lr is None else float(lr)
    rng = Rng(config.seed) if rng is None else rng
    if train_set.inputs.shape[1] != model.d or valid_set.inputs.shape[1] != model.d:
        raise DimensionError(f"dataset dimension does not match model input dimension {model.d}")

    state = AdamState(lr=lr)
    chunk = config.eval_batch_size

    def measure(epoch):
        return EpochMetrics(
            epoch=epoch,
            train_metric=evaluate(model, train_set, config.loss, chunk),
            valid_metric=evaluate(model, valid_set, config.loss, chunk),
            lr=lr,
            seed=config.seed,
        )

    curves = [measure(0)]
    best_valid, best_epoch, best = curves[0].valid_metric, 0, _snapshot(model)
    step_losses = []
    count = len(train_set.targets)

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(count)
        for batch_index, s in enumerate(_chunks(count, config.batch_size)):
            idx = order[s]
            loss, grads = batch_loss_and_grads(model, train_set.inputs[idx], train_set.targets[idx], config.loss)
            if not math.isfinite(loss):
                raise NumericalAbort(
                    f"non-finite training loss at epoch {epoch}, batch {batch_index} (lr={lr})",
                    epoch=epoch, batch=batch_index, lr=lr,
                )
            step_losses.append(loss)
            adam_step(model.params, grads, state)

        metrics = measure(epoch)
        curves.append(metrics)
        logger.debug("epoch %d lr=%g train=%.6g valid=%.6g", epoch, lr, metrics.train_metric, metrics.valid_metric)
        if not math.isfinite(metrics.valid_metric):
            raise NumericalAbort(f"non-finite validation metric at epoch {epoch} (lr={lr})", epoch=epoch, lr=lr)
        if metrics.valid_metric < best_valid:
            best_valid, best_epoch, best = metrics.valid_metric, epoch, _snapshot(model)

    _restore(model, best)
    return TrainResult(model=model, curves=curves, best_epoch=best_epoch, best_valid=best_valid,
                       step_losses=step_losses)


@dataclass
class TuneResult:
    best_lr: float
    best_model: object
    best_result: TrainResult
    results: list
    failures: list


def tune_lr(model_factory, train_set, valid_set, config):
    """
    Function: tune_lr
    หน้าที่: train model ใหม่ 1 ตัวต่อ lr ใน grid แล้วเลือกตัวที่ validation metric ต่ำสุด
    - grid point i ใช้ stream ของตัวเองจาก (seed, i): init = spawn(0), shuffle = spawn(1)
    - เสมอกันให้ lr เล็กกว่าชนะ (lr เท่ากันเลือกตัวแรก)
    - grid point ที่พังจะถูกข้ามพร้อม warning ถ้ายังมีอย่างน้อยหนึ่งตัวที่สำเร็จ
    """
    root = Rng(config.seed)
    results, failures = {}, {}
    best_index = None
    for index, lr in enumerate(config.lr_grid):
        stream = root.spawn(index)
        model = model_factory(stream.spawn(0))
        try:
            result = train(model, train_set, valid_set, config, lr=lr, rng=stream.spawn(1))
        except NumericalAbort as exc:
            logger.warning("lr=%g failed and is skipped: %s", lr, exc)
            failures[index] = exc
            continue
        results[index] = result
        if best_index is None:
            best_index = index
            continue
        best = results[best_index]
        best_lr = config.lr_grid[best_index]
        if (result.best_valid, lr) < (best.best_valid, best_lr):
            best_index = index

    if best_index is None:
        raise NumericalAbort(f"every learning rate in {config.lr_grid} failed", failures=len(failures))
    best_result = results[best_index]
    return TuneResult(
        best_lr=config.lr_grid[best_index],
        best_model=best_result.model,
        best_result=best_result,
        results=[(config.lr_grid[i], r) for i, r in sorted(results.items())],
        failures=[(config.lr_grid[i], e) for i, e in sorted(failures.items())],
    )
