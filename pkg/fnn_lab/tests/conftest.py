import numpy as np
import pytest


def numeric_gradient(loss, params, name, eps=1e-6):
    """central difference ของ loss() เทียบทุก entry ของ params[name] (แก้ค่าแล้วคืนค่าเดิม)"""
    value = params[name]
    grad = np.zeros_like(value)
    flat, gflat = value.reshape(-1), grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + eps
        plus = loss()
        flat[i] = original - eps
        minus = loss()
        flat[i] = original
        gflat[i] = (plus - minus) / (2.0 * eps)
    return grad


def relative_error(analytic, numeric):
    analytic, numeric = np.asarray(analytic), np.asarray(numeric)
    scale = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / scale)


def assert_gradients_match(loss, params, analytic, tol, eps=1e-6):
    for name in analytic:
        numeric = numeric_gradient(loss, params, name, eps)
        err = relative_error(analytic[name], numeric)
        assert err < tol, f"{name}: relative error {err:.3e}"


@pytest.fixture
def fd_check():
    return assert_gradients_match


@pytest.fixture
def lab_settings(settings, tmp_path):
    """ชี้ OUTPUT_DIR ไป tmp_path ระหว่าง test"""
    lab = dict(settings.FNN_LAB)
    lab['OUTPUT_DIR'] = tmp_path / 'results'
    settings.FNN_LAB = lab
    return lab
