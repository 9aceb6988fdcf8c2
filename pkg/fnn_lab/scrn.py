"""
SCRN language model (row-vector convention, ไม่มี bias)

    s_t = (1−α) B[w_t] + α s_{t−1}                  (context state, α คงที่ไม่ train)
    z_t = A[w_t] + s_t P + h_{t−1} R
    h_t = layer(z_t)
    Pr(w_{t+1} | w_{1:t}) = softmax(s_t U + h_t V)

layer ของ hidden state:
    sigmoid   h = σ(z)
    gw        h = cosine squasher(z)
    silvescu  h_j = cos(ω_j z_j + φ_j)       (ω, φ train ได้)
    liu       h_j = a_j cos z_j + b_j sin z_j (a, b train ได้)

train ด้วย truncated BPTT: state ส่งต่อข้าม window แต่ gradient ไม่ส่งต่อ
"""

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import serialization
from .activations import ActivationKind, activation, activation_derivative
from .errors import DatasetError, DimensionError, DomainError, NumericalAbort
from .numerics import Rng
from .training import AdamState, adam_step

logger = logging.getLogger(__name__)

ARCHITECTURE_TAG = 'scrn'


class LayerKind(str, enum.Enum):
    SIGMOID = 'sigmoid'
    GW = 'gw'
    SILVESCU = 'silvescu'
    LIU = 'liu'


LAYER_PARAMS = {
    LayerKind.SIGMOID: (),
    LayerKind.GW: (),
    LayerKind.SILVESCU: ('omega', 'phi'),
    LayerKind.LIU: ('a', 'b'),
}

CORE_PARAMS = ('B', 'A', 'P', 'R', 'U', 'V')


class ScrnParams:
    """tensor ของ SCRN ใน dict `tensors` (Adam update แบบ in-place ผ่าน dict นี้)"""

    def __init__(self, tensors, alpha, layer):
        self.layer = LayerKind(layer)
        if not 0.0 <= alpha < 1.0:
            raise DomainError(f"alpha must lie in [0, 1), got {alpha}")
        self.alpha = float(alpha)
        self.tensors = {name: np.array(tensors[name], dtype=np.float64) for name in self.param_names}
        self._check()

    @property
    def param_names(self):
        return CORE_PARAMS + LAYER_PARAMS[self.layer]

    @property
    def vocab_size(self):
        return self.tensors['B'].shape[0]

    @property
    def d_s(self):
        return self.tensors['B'].shape[1]

    @property
    def d_h(self):
        return self.tensors['A'].shape[1]

    def _check(self):
        W, ds, dh = self.vocab_size, self.d_s, self.d_h
        expected = {
            'B': (W, ds), 'A': (W, dh), 'P': (ds, dh), 'R': (dh, dh), 'U': (ds, W), 'V': (dh, W),
            'omega': (dh,), 'phi': (dh,), 'a': (dh,), 'b': (dh,),
        }
        for name in self.param_names:
            if self.tensors[name].shape != expected[name]:
                raise DimensionError(f"{name}: expected shape {expected[name]}, got {self.tensors[name].shape}")
            if not np.all(np.isfinite(self.tensors[name])):
                raise DomainError(f"{name} contains non-finite entries")

    def copy(self):
        return ScrnParams(self.tensors, self.alpha, self.layer)

    def __getitem__(self, name):
        return self.tensors[name]


@dataclass(frozen=True)
class ScrnState:
    s: np.ndarray
    h: np.ndarray

    @classmethod
    def zeros(cls, params):
        return cls(np.zeros(params.d_s), np.zeros(params.d_h))


def initialize_scrn(vocab_size, d_s, d_h, layer, rng, init_scale=0.1, alpha=0.95):
    """
    Function: initialize_scrn
    หน้าที่: B, A, P, R ~ Uniform(±init_scale); U = V = 0 (เริ่มจาก distribution แบบ uniform)
    omega = 1, phi = 0 (silvescu) และ a = b = 1 (liu)
    """
    if min(vocab_size, d_s, d_h) < 1:
        raise DomainError("vocabulary and state sizes must be >= 1")
    layer = LayerKind(layer)
    tensors = {
        'B': rng.uniform(-init_scale, init_scale, (vocab_size, d_s)),
        'A': rng.uniform(-init_scale, init_scale, (vocab_size, d_h)),
        'P': rng.uniform(-init_scale, init_scale, (d_s, d_h)),
        'R': rng.uniform(-init_scale, init_scale, (d_h, d_h)),
        'U': np.zeros((d_s, vocab_size)),
        'V': np.zeros((d_h, vocab_size)),
    }
    if layer is LayerKind.SILVESCU:
        tensors['omega'] = np.ones(d_h)
        tensors['phi'] = np.zeros(d_h)
    elif layer is LayerKind.LIU:
        tensors['a'] = np.ones(d_h)
        tensors['b'] = np.ones(d_h)
    return ScrnParams(tensors, alpha, layer)


# --- hidden layer ---

def _layer_forward(params, z):
    layer = params.layer
    if layer is LayerKind.SIGMOID:
        return activation(ActivationKind.SIGMOID, z)
    if layer is LayerKind.GW:
        return activation(ActivationKind.COSINE_SQUASHER, z)
    if layer is LayerKind.SILVESCU:
        return np.cos(params['omega'] * z + params['phi'])
    return params['a'] * np.cos(z) + params['b'] * np.sin(z)


def _layer_backward(params, z, dh, grads):
    """คืน dz และสะสม gradient ของ parameter ใน layer ลง grads"""
    layer = params.layer
    if layer is LayerKind.SIGMOID:
        return dh * activation_derivative(ActivationKind.SIGMOID, z)
    if layer is LayerKind.GW:
        return dh * activation_derivative(ActivationKind.COSINE_SQUASHER, z)
    if layer is LayerKind.SILVESCU:
        sin_arg = np.sin(params['omega'] * z + params['phi'])
        grads['omega'] -= dh * z * sin_arg
        grads['phi'] -= dh * sin_arg
        return -dh * params['omega'] * sin_arg
    cos_z, sin_z = np.cos(z), np.sin(z)
    grads['a'] += dh * cos_z
    grads['b'] += dh * sin_z
    return dh * (params['b'] * cos_z - params['a'] * sin_z)


# --- forward ---

def _check_token(params, token):
    if not 0 <= token < params.vocab_size:
        raise DomainError(f"token id {token} outside vocabulary of size {params.vocab_size}")


def scrn_step(params, token, prev):
    """หนึ่ง time step: (w_t, state_{t−1}) -> state_t"""
    _check_token(params, token)
    alpha = params.alpha
    s = (1.0 - alpha) * params['B'][token] + alpha * prev.s
    z = params['A'][token] + s @ params['P'] + prev.h @ params['R']
    return ScrnState(s=s, h=_layer_forward(params, z))


def next_word_logits(params, state):
    return state.s @ params['U'] + state.h @ params['V']


def next_word_distribution(params, state):
    return special.softmax(next_word_logits(params, state))


def perplexity(params, corpus):
    """
    Function: perplexity
    หน้าที่: exp(ค่าเฉลี่ย −log p ของ token ถัดไป) แบบ sequential จาก state ศูนย์
    ทำนาย len−1 ครั้ง; token น้อยกว่า 2 ตัว -> DomainError
    """
    ids = np.asarray(getattr(corpus, 'ids', corpus), dtype=np.int64)
    if len(ids) < 2:
        raise DomainError("perplexity needs at least two tokens")
    state = ScrnState.zeros(params)
    nll = np.empty(len(ids) - 1)
    for t in range(len(ids) - 1):
        state = scrn_step(params, int(ids[t]), state)
        nll[t] = -special.log_softmax(next_word_logits(params, state))[ids[t + 1]]
    return float(math.exp(math.fsum(nll) / len(nll)))


# --- BPTT ---

@dataclass
class WindowCache:
    tokens: np.ndarray
    s: list
    h: list
    z: list
    probs: list
    start: ScrnState


def window_forward(params, tokens, targets, start):
    """forward ทั้ง window; คืน (mean NLL, cache, state สุดท้าย)"""
    s_list, h_list, z_list, p_list = [], [], [], []
    s_prev, h_prev = start.s, start.h
    alpha = params.alpha
    nll = 0.0
    for token, target in zip(tokens, targets):
        _check_token(params, int(token))
        s = (1.0 - alpha) * params['B'][token] + alpha * s_prev
        z = params['A'][token] + s @ params['P'] + h_prev @ params['R']
        h = _layer_forward(params, z)
        logits = s @ params['U'] + h @ params['V']
        log_probs = special.log_softmax(logits)
        nll -= log_probs[target]
        s_list.append(s)
        h_list.append(h)
        z_list.append(z)
        p_list.append(np.exp(log_probs))
        s_prev, h_prev = s, h
    cache = WindowCache(np.asarray(tokens), s_list, h_list, z_list, p_list, start)
    return nll / len(tokens), cache, ScrnState(s=s_prev, h=h_prev)


def window_backward(params, cache, targets):
    """gradient ของ mean NLL ของ window; state ตอนเริ่ม window ถือเป็นค่าคงที่"""
    grads = {name: np.zeros_like(params[name]) for name in params.param_names}
    length = len(cache.tokens)
    alpha = params.alpha
    ds_next = np.zeros(params.d_s)
    dh_next = np.zeros(params.d_h)
    for t in reversed(range(length)):
        token, s, h, z = cache.tokens[t], cache.s[t], cache.h[t], cache.z[t]
        h_prev = cache.h[t - 1] if t > 0 else cache.start.h
        dlogits = cache.probs[t].copy()
        dlogits[targets[t]] -= 1.0
        dlogits /= length
        grads['U'] += np.outer(s, dlogits)
        grads['V'] += np.outer(h, dlogits)
        dh = dlogits @ params['V'].T + dh_next
        ds = dlogits @ params['U'].T + ds_next
        dz = _layer_backward(params, z, dh, grads)
        grads['A'][token] += dz
        grads['P'] += np.outer(s, dz)
        grads['R'] += np.outer(h_prev, dz)
        ds += dz @ params['P'].T
        dh_next = dz @ params['R'].T
        grads['B'][token] += (1.0 - alpha) * ds
        ds_next = alpha * ds
    return grads


def window_loss_and_grads(params, tokens, targets, start=None):
    start = ScrnState.zeros(params) if start is None else start
    loss, cache, final = window_forward(params, tokens, targets, start)
    return loss, window_backward(params, cache, targets), final


# --- training ---

@dataclass(frozen=True)
class ScrnConfig:
    d_h: int = 40
    d_s: int = 10
    layer: str = 'sigmoid'
    alpha: float = 0.95
    bptt_window: int = 10
    epochs: int = 5
    lr: float = 0.01
    lr_decay: float = 1.0
    init_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        LayerKind(self.layer)
        if self.bptt_window < 1 or self.epochs < 0:
            raise DomainError("bptt_window must be >= 1 and epochs >= 0")
        if not 0.0 < self.lr_decay <= 1.0:
            raise DomainError(f"lr decay factor must lie in (0, 1], got {self.lr_decay}")


@dataclass(frozen=True)
class ScrnEpoch:
    epoch: int
    lr: float
    train_ppl: float
    valid_ppl: float
    test_ppl: float = math.nan


@dataclass
class ScrnTrainResult:
    params: ScrnParams
    history: list = field(default_factory=list)
    best_epoch: int = 0
    best_valid_ppl: float = math.inf


def train_lm(corpus, params, config, valid=None, test=None):
    """
    Function: train_lm
    หน้าที่: train SCRN ด้วย truncated BPTT + Adam หนึ่ง step ต่อ window
    - state เริ่มที่ศูนย์ทุก epoch, ส่งต่อข้าม window ภายใน epoch
    - lr ของ epoch e = lr · decay^(e−1)
    - มี valid -> คืน snapshot ที่ validation PPL ต่ำสุด (รวม epoch 0)
    - มี test -> วัด test PPL ทุก epoch ด้วย (ไม่ใช้เลือก snapshot)
    loss ไม่ finite -> NumericalAbort พร้อม epoch และตำแหน่ง token
    """
    ids = np.asarray(corpus.ids, dtype=np.int64)
    if len(ids) <= config.bptt_window:
        raise DatasetError(
            f"corpus of {len(ids)} tokens is not longer than the BPTT window {config.bptt_window}"
        )
    inputs, targets = ids[:-1], ids[1:]
    state = AdamState(lr=config.lr)

    def measure(split):
        return perplexity(params, split) if split is not None else math.nan

    result = ScrnTrainResult(params=params)
    best = {name: value.copy() for name, value in params.tensors.items()}
    if valid is not None:
        result.best_valid_ppl = measure(valid)
    result.history.append(ScrnEpoch(0, config.lr, perplexity(params, ids), result.best_valid_ppl, measure(test)))

    for epoch in range(1, config.epochs + 1):
        state.lr = config.lr * config.lr_decay ** (epoch - 1)
        carried = ScrnState.zeros(params)
        total_nll = []
        for start in range(0, len(inputs), config.bptt_window):
            window = slice(start, start + config.bptt_window)
            loss, grads, carried = window_loss_and_grads(params, inputs[window], targets[window], carried)
            if not math.isfinite(loss):
                raise NumericalAbort(
                    f"non-finite language-model loss at epoch {epoch}, token position {start}",
                    epoch=epoch, position=start,
                )
            total_nll.append(loss * len(inputs[window]))
            adam_step(params.tensors, grads, state)

        train_ppl = math.exp(math.fsum(total_nll) / len(inputs))
        epoch_valid = measure(valid)
        result.history.append(ScrnEpoch(epoch, state.lr, train_ppl, epoch_valid, measure(test)))
        logger.debug("scrn %s epoch %d lr=%g train ppl %.4f valid ppl %.4f",
                     params.layer.value, epoch, state.lr, train_ppl, epoch_valid)
        if valid is not None and epoch_valid < result.best_valid_ppl:
            result.best_epoch, result.best_valid_ppl = epoch, epoch_valid
            best = {name: value.copy() for name, value in params.tensors.items()}

    if valid is not None:
        for name, value in best.items():
            params.tensors[name][...] = value
    return result


def train_scrn(corpus, config, vocab_size=None, valid=None, test=None):
    """สร้าง params จาก config.seed แล้ว train"""
    vocab_size = vocab_size or len(corpus.vocab)
    rng = Rng(config.seed)
    params = initialize_scrn(vocab_size, config.d_s, config.d_h, config.layer, rng.spawn(0),
                             init_scale=config.init_scale, alpha=config.alpha)
    return train_lm(corpus, params, config, valid=valid, test=test)


# --- serialization ---

def dump_scrn(params):
    dims = {'W': params.vocab_size, 'd_s': params.d_s, 'd_h': params.d_h,
            'alpha': params.alpha, 'layer': params.layer.value}
    return serialization.dump_tensors(ARCHITECTURE_TAG, dims,
                                      {name: params[name] for name in params.param_names})


def load_scrn(blob):
    header, tensors = serialization.load_tensors(blob)
    if header['architecture'] != ARCHITECTURE_TAG:
        raise DatasetError(f"expected an {ARCHITECTURE_TAG} container, got {header['architecture']!r}")
    return ScrnParams(tensors, header['dims']['alpha'], header['dims']['layer'])
