"""
Network architectures แบบ hidden layer เดียว พร้อม forward และ backprop แบบ exact

- FeedForwardNet: vanilla (sigmoid) และ f_GW (cosine squasher)
      x ↦ v0 + Σ v_k σ(⟨x, w_k⟩ + b_k)
- SilvescuNet: x ↦ v0 + Σ v_k Π_j cos(ω_kj x_j + φ_kj)
- LiuNet:      x ↦ v0 + Σ v_k cos(⟨w_k, x⟩ + b_k) + u_k sin(⟨p_k, x⟩ + q_k)
- ClassifierHead: hidden features ของ network ใดก็ได้ -> linear -> softmax (C classes)

ทุก method รับได้ทั้ง vector เดี่ยว (d,) และ batch (T, d)
gradient ของ batch = ผลรวมตามลำดับ sample (deterministic)
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import serialization
from .activations import ActivationKind, activation, activation_derivative
from .errors import DimensionError, DomainError

logger = logging.getLogger(__name__)

ARCHITECTURES = ('vanilla', 'gw', 'silvescu', 'liu')

# |cos| ต่ำกว่านี้ห้ามหาร ให้คำนวณ leave-one-out product ตรงๆ แทน
LEAVE_ONE_OUT_CUTOFF = 1e-12


@dataclass(frozen=True)
class HiddenFeatures:
    features: np.ndarray
    preactivations: object


def _as_batch(x, d):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[np.newaxis, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != d:
        raise DimensionError(f"expected input with {d} columns, got shape {x.shape}")
    return batch, single


class HiddenLayerNet:
    """
    Base class ของ network ที่มี hidden layer เดียว

    subclass กำหนด hidden_names / output_names และ implement
    _hidden(X) กับ _hidden_backward(X, cache, dF)
    """
    architecture = None
    hidden_names = ()
    output_names = ('v', 'v0')

    def __init__(self, params):
        self.params = {name: np.array(params[name], dtype=np.float64) for name in self.param_names}
        self._check()

    @property
    def param_names(self):
        return self.hidden_names + self.output_names

    @property
    def n(self):
        return self.params[self.hidden_names[0]].shape[0]

    @property
    def d(self):
        return self.params[self.hidden_names[0]].shape[1]

    @property
    def feature_count(self):
        return self.n

    @property
    def floats_per_sample(self):
        """จำนวน float ต่อ sample ของ temporary ที่ใหญ่ที่สุดตอน forward"""
        return self.feature_count

    def shapes(self):
        n, d = self.n, self.d
        return {name: self._shape_of(name, n, d) for name in self.param_names}

    def _shape_of(self, name, n, d):
        raise NotImplementedError

    def _check(self):
        for name, shape in self.shapes().items():
            value = self.params[name]
            if value.shape != shape:
                raise DimensionError(f"{self.architecture}: {name} has shape {value.shape}, expected {shape}")
            if not np.all(np.isfinite(value)):
                raise DomainError(f"{self.architecture}: {name} contains non-finite values")

    def output_weights(self):
        return self.params['v']

    def copy(self):
        return type(self)({name: value.copy() for name, value in self.params.items()})

    # --- hidden part ---

    def _hidden(self, X):
        raise NotImplementedError

    def _hidden_backward(self, X, cache, dF):
        raise NotImplementedError

    def hidden_features(self, x):
        X, single = _as_batch(x, self.d)
        F, cache = self._hidden(X)
        pre = self._preactivations(cache)
        if single:
            F = F[0]
            pre = tuple(p[0] for p in pre) if isinstance(pre, tuple) else pre[0]
        return HiddenFeatures(F, pre)

    def _preactivations(self, cache):
        return cache

    # --- regression head ---

    def forward_pass(self, X):
        F, cache = self._hidden(X)
        yhat = self.params['v0'] + F @ self.output_weights()
        return yhat, (cache, F)

    def backward_pass(self, X, cache, dy):
        hidden_cache, F = cache
        dy = np.asarray(dy, dtype=np.float64)
        grads = self._hidden_backward(X, hidden_cache, np.outer(dy, self.output_weights()))
        grads.update(self._output_gradients(F, dy))
        return {name: grads[name] for name in self.param_names}

    def _output_gradients(self, F, dy):
        return {'v': F.T @ dy, 'v0': np.array(dy.sum())}

    def forward_regression(self, x):
        X, single = _as_batch(x, self.d)
        yhat, _ = self.forward_pass(X)
        return float(yhat[0]) if single else yhat

    def backward(self, x, upstream):
        """
        Function: backward
        หน้าที่: gradient ของ (upstream · output) เทียบทุก parameter
        input เดี่ยว -> upstream เป็น scalar, batch -> upstream ยาว T
        """
        X, single = _as_batch(x, self.d)
        dy = np.atleast_1d(np.asarray(upstream, dtype=np.float64))
        if dy.shape != (X.shape[0],):
            raise DimensionError(f"upstream gradient shape {dy.shape} does not match {X.shape[0]} outputs")
        _, cache = self.forward_pass(X)
        return self.backward_pass(X, cache, dy)


class FeedForwardNet(HiddenLayerNet):
    """Vanilla feedforward net (sigmoid) หรือ f_GW (cosine squasher) แล้วแต่ kind"""
    hidden_names = ('W', 'b')

    def __init__(self, params, kind=ActivationKind.SIGMOID):
        self.kind = ActivationKind(kind)
        super().__init__(params)

    @property
    def architecture(self):
        return 'vanilla' if self.kind is ActivationKind.SIGMOID else 'gw'

    def _shape_of(self, name, n, d):
        return {'W': (n, d), 'b': (n,), 'v': (n,), 'v0': ()}[name]

    def copy(self):
        return FeedForwardNet({name: value.copy() for name, value in self.params.items()}, self.kind)

    def preactivations(self, X):
        return X @ self.params['W'].T + self.params['b']

    def _hidden(self, X):
        Z = self.preactivations(X)
        return activation(self.kind, Z), Z

    def _hidden_backward(self, X, Z, dF):
        dZ = dF * activation_derivative(self.kind, Z)
        return {'W': dZ.T @ X, 'b': dZ.sum(axis=0)}


def leave_one_out_product(C, F):
    """
    Π_{l≠j} C_l ตามแกนสุดท้าย
    ใช้ F/C_j เมื่อ |C_j| > cutoff, นอกนั้นคูณ prefix × suffix ตรงๆ (ไม่หารด้วยศูนย์)
    """
    safe = np.abs(C) > LEAVE_ONE_OUT_CUTOFF
    with np.errstate(divide='ignore', invalid='ignore'):
        loo = np.where(safe, F[..., np.newaxis] / np.where(safe, C, 1.0), 0.0)
    if not safe.all():
        ones = np.ones(C.shape[:-1] + (1,))
        prefix = np.concatenate([ones, np.cumprod(C[..., :-1], axis=-1)], axis=-1)
        suffix = np.concatenate([np.cumprod(C[..., :0:-1], axis=-1)[..., ::-1], ones], axis=-1)
        loo = np.where(safe, loo, prefix * suffix)
    return loo


class SilvescuNet(HiddenLayerNet):
    """Product unit: nonlinearity ทีละ component ของ input แล้วค่อยคูณกัน"""
    architecture = 'silvescu'
    hidden_names = ('Omega', 'Phi')

    def _shape_of(self, name, n, d):
        return {'Omega': (n, d), 'Phi': (n, d), 'v': (n,), 'v0': ()}[name]

    @property
    def floats_per_sample(self):
        # Z, C มี shape (batch, n, d)
        return self.n * self.d

    def _hidden(self, X):
        # Z[t, k, j] = ω_kj x_tj + φ_kj
        Z = X[:, np.newaxis, :] * self.params['Omega'] + self.params['Phi']
        C = np.cos(Z)
        F = np.prod(C, axis=2)
        return F, (Z, C, F)

    def _preactivations(self, cache):
        return cache[0]

    def _hidden_backward(self, X, cache, dF):
        Z, C, F = cache
        # ∂σ_S/∂Z_kj = −sin(Z_kj) Π_{l≠j} cos(Z_kl)
        dZ = dF[:, :, np.newaxis] * (-np.sin(Z)) * leave_one_out_product(C, F)
        return {
            'Omega': np.einsum('tkj,tj->kj', dZ, X),
            'Phi': dZ.sum(axis=0),
        }


class LiuNet(HiddenLayerNet):
    """cos bank กับ sin bank แยกกัน ทุก weight train ได้"""
    architecture = 'liu'
    hidden_names = ('W', 'b', 'P', 'q')
    output_names = ('v', 'u', 'v0')

    @property
    def feature_count(self):
        return 2 * self.n

    def _shape_of(self, name, n, d):
        return {
            'W': (n, d), 'b': (n,), 'P': (n, d), 'q': (n,),
            'v': (n,), 'u': (n,), 'v0': (),
        }[name]

    def output_weights(self):
        return np.concatenate([self.params['v'], self.params['u']])

    def _hidden(self, X):
        Zc = X @ self.params['W'].T + self.params['b']
        Zs = X @ self.params['P'].T + self.params['q']
        F = np.concatenate([np.cos(Zc), np.sin(Zs)], axis=1)
        return F, (Zc, Zs)

    def _hidden_backward(self, X, cache, dF):
        Zc, Zs = cache
        n = self.n
        dZc = dF[:, :n] * (-np.sin(Zc))
        dZs = dF[:, n:] * np.cos(Zs)
        return {
            'W': dZc.T @ X, 'b': dZc.sum(axis=0),
            'P': dZs.T @ X, 'q': dZs.sum(axis=0),
        }

    def _output_gradients(self, F, dy):
        n = self.n
        return {'v': F[:, :n].T @ dy, 'u': F[:, n:].T @ dy, 'v0': np.array(dy.sum())}


class ClassifierHead:
    """
    Softmax classifier บน hidden features ของ network ตัวใดก็ได้

    params ของ hidden part เป็น array ตัวเดียวกับใน body (update in-place แล้วเห็นทั้งคู่)
    output weights (v, u, v0) ของ body ไม่ถูกใช้
    """
    output_names = ('V_out', 'c_out')

    def __init__(self, body, V_out, c_out):
        self.body = body
        self.params = {name: body.params[name] for name in body.hidden_names}
        self.params['V_out'] = np.array(V_out, dtype=np.float64)
        self.params['c_out'] = np.array(c_out, dtype=np.float64)
        if self.params['V_out'].shape != (body.feature_count, self.n_classes):
            raise DimensionError(
                f"V_out has shape {self.params['V_out'].shape}, "
                f"expected ({body.feature_count}, {self.n_classes})"
            )
        if self.n_classes < 2:
            raise DomainError("classifier needs at least 2 classes")
        if self.params['c_out'].shape != (self.n_classes,):
            raise DimensionError(f"c_out has shape {self.params['c_out'].shape}")

    @property
    def architecture(self):
        return self.body.architecture

    @property
    def param_names(self):
        return self.body.hidden_names + self.output_names

    @property
    def n_classes(self):
        return self.params['V_out'].shape[1]

    @property
    def n(self):
        return self.body.n

    @property
    def d(self):
        return self.body.d

    @property
    def floats_per_sample(self):
        return max(self.body.floats_per_sample, self.n_classes)

    def copy(self):
        body = self.body.copy()
        return ClassifierHead(body, self.params['V_out'].copy(), self.params['c_out'].copy())

    def hidden_features(self, x):
        return self.body.hidden_features(x)

    def forward_pass(self, X):
        F, cache = self.body._hidden(X)
        logits = F @ self.params['V_out'] + self.params['c_out']
        return special.softmax(logits, axis=1), (cache, F)

    def backward_pass(self, X, cache, dlogits):
        hidden_cache, F = cache
        grads = self.body._hidden_backward(X, hidden_cache, dlogits @ self.params['V_out'].T)
        grads['V_out'] = F.T @ dlogits
        grads['c_out'] = dlogits.sum(axis=0)
        return {name: grads[name] for name in self.param_names}

    def forward_classify(self, x):
        X, single = _as_batch(x, self.d)
        probs, _ = self.forward_pass(X)
        return probs[0] if single else probs

    def predict_labels(self, x):
        return np.argmax(self.forward_classify(x), axis=-1)

    def backward(self, x, upstream):
        """upstream = gradient ของ loss เทียบ logits, shape (C,) หรือ (T, C)"""
        X, single = _as_batch(x, self.d)
        dlogits = np.atleast_2d(np.asarray(upstream, dtype=np.float64))
        if dlogits.shape != (X.shape[0], self.n_classes):
            raise DimensionError(f"upstream gradient shape {dlogits.shape} does not match logits")
        _, cache = self.forward_pass(X)
        return self.backward_pass(X, cache, dlogits)


# --- factories ---

def _uniform(rng, scale, shape):
    return rng.uniform(-scale, scale, shape)


def _hidden_params(architecture, n, d, rng):
    s_in = 1.0 / math.sqrt(d)
    if architecture in ('vanilla', 'gw'):
        return {'W': _uniform(rng, s_in, (n, d)), 'b': _uniform(rng, s_in, (n,))}
    if architecture == 'silvescu':
        return {'Omega': _uniform(rng, s_in, (n, d)), 'Phi': np.zeros((n, d))}
    if architecture == 'liu':
        return {
            'W': _uniform(rng, s_in, (n, d)), 'b': np.zeros(n),
            'P': _uniform(rng, s_in, (n, d)), 'q': np.zeros(n),
        }
    raise DomainError(f"unknown architecture {architecture!r}; expected one of {ARCHITECTURES}")


def network_class(architecture, params):
    if architecture == 'vanilla':
        return FeedForwardNet(params, ActivationKind.SIGMOID)
    if architecture == 'gw':
        return FeedForwardNet(params, ActivationKind.COSINE_SQUASHER)
    if architecture == 'silvescu':
        return SilvescuNet(params)
    if architecture == 'liu':
        return LiuNet(params)
    raise DomainError(f"unknown architecture {architecture!r}; expected one of {ARCHITECTURES}")


def build_network(architecture, n, d, rng):
    """
    Function: build_network
    หน้าที่: สร้าง network พร้อม init
    - weight ฝั่ง input ~ Uniform(−1/√d, 1/√d)
    - weight ฝั่ง output ~ Uniform(−1/√F, 1/√F) เมื่อ F = จำนวน feature
    - Phi ของ Silvescu, b/q ของ Liu และ v0 เริ่มที่ 0 (อาร์กิวเมนต์ของ cos เล็กตอนเริ่ม)
    """
    params = _hidden_params(architecture, n, d, rng)
    feature_count = 2 * n if architecture == 'liu' else n
    s_out = 1.0 / math.sqrt(feature_count)
    params['v'] = _uniform(rng, s_out, (n,))
    if architecture == 'liu':
        params['u'] = _uniform(rng, s_out, (n,))
    params['v0'] = np.array(0.0)
    return network_class(architecture, params)


def build_classifier(architecture, n, d, n_classes, rng):
    params = _hidden_params(architecture, n, d, rng)
    feature_count = 2 * n if architecture == 'liu' else n
    # body ต้องมี output weight ครบ shape แต่ head ไม่ใช้
    params['v'] = np.zeros(n)
    if architecture == 'liu':
        params['u'] = np.zeros(n)
    params['v0'] = np.array(0.0)
    body = network_class(architecture, params)
    V_out = _uniform(rng, 1.0 / math.sqrt(feature_count), (feature_count, n_classes))
    return ClassifierHead(body, V_out, np.zeros(n_classes))


# --- pre-activation probe ---

@dataclass(frozen=True)
class PreactivationProbe:
    edges: np.ndarray
    counts: np.ndarray
    underflow: int
    overflow: int
    out_of_range_fraction: float

    @property
    def total(self):
        return int(self.counts.sum()) + self.underflow + self.overflow


def preactivation_probe(model, inputs, bins=64, limit=2.0 * math.pi):
    """
    Function: preactivation_probe
    หน้าที่: histogram ของค่า x·w + b ทั้งหมด (n × T ค่า) บน [−limit, limit]
    และสัดส่วนที่ |ค่า| > π/2 (ส่วนที่ cosine squasher แบนและแยกค่าไม่ได้)
    """
    if isinstance(model, ClassifierHead):
        model = model.body
    if not isinstance(model, FeedForwardNet):
        raise DomainError("preactivation probe needs a vanilla or gw network")
    X = np.asarray(inputs, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, np.newaxis]
    if X.shape[0] == 0:
        raise DomainError("preactivation probe: empty dataset")
    X, _ = _as_batch(X, model.d)
    Z = model.preactivations(X).ravel()
    edges = np.linspace(-limit, limit, bins + 1)
    counts, _ = np.histogram(Z, bins=edges)
    underflow = int(np.count_nonzero(Z < -limit))
    overflow = int(np.count_nonzero(Z > limit))
    fraction = float(np.count_nonzero(np.abs(Z) > 0.5 * math.pi)) / Z.size
    logger.debug("preactivation probe: %d values, %.4f outside [-pi/2, pi/2]", Z.size, fraction)
    return PreactivationProbe(edges, counts, underflow, overflow, fraction)


# --- serialization ---

def dump_network(model):
    """header (architecture, d, n, C) แล้วตามด้วย tensor ตามลำดับ param_names"""
    n_classes = model.n_classes if isinstance(model, ClassifierHead) else 0
    dims = {'d': model.d, 'n': model.n, 'C': n_classes}
    tensors = {name: model.params[name] for name in model.param_names}
    return serialization.dump_tensors(model.architecture, dims, tensors)


def load_network(blob):
    header, tensors = serialization.load_tensors(blob)
    architecture = header['architecture']
    n, n_classes = header['dims']['n'], header['dims']['C']
    if n_classes:
        params = {name: tensors[name] for name in tensors if name not in ClassifierHead.output_names}
        params['v'] = np.zeros(n)
        if architecture == 'liu':
            params['u'] = np.zeros(n)
        params['v0'] = np.array(0.0)
        body = network_class(architecture, params)
        return ClassifierHead(body, tensors['V_out'], tensors['c_out'])
    return network_class(architecture, tensors)
