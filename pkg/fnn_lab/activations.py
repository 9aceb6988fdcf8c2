"""
Scalar activations และอนุพันธ์แบบ exact: logistic sigmoid กับ cosine squasher

nonlinearity ของ Silvescu และ Liu เป็นโครงสร้างของ network (อยู่ใน networks.py)
ไม่ใช่ activation แบบ scalar
"""

import enum
import math

import numpy as np
from scipy import special

HALF_PI = 0.5 * math.pi


class ActivationKind(str, enum.Enum):
    SIGMOID = 'sigmoid'
    COSINE_SQUASHER = 'cosine_squasher'


def sigmoid(x):
    """σ(x) = 1/(1+exp(−x)); expit แยกกรณี x บวก/ลบ จึงไม่ overflow"""
    return special.expit(x)


def cosine_squasher(x):
    """
    Function: cosine_squasher
    หน้าที่: 0 เมื่อ x < −π/2, ½(cos(x + 3π/2) + 1) บน [−π/2, π/2], 1 เมื่อ x > π/2
    """
    x = np.asarray(x, dtype=np.float64)
    ramp = 0.5 * (np.cos(np.clip(x, -HALF_PI, HALF_PI) + 3.0 * HALF_PI) + 1.0)
    result = np.where(x < -HALF_PI, 0.0, np.where(x > HALF_PI, 1.0, ramp))
    return result if result.ndim else float(result)


def activation(kind, x):
    kind = ActivationKind(kind)
    if kind is ActivationKind.SIGMOID:
        return sigmoid(x)
    return cosine_squasher(x)


def activation_derivative(kind, x):
    """
    Sigmoid -> σ(x)(1−σ(x))
    CosineSquasher -> cos(x)/2 บน (−π/2, π/2), 0 ที่อื่น (ที่ ±π/2 เป็น 0 ตรงกับทั้งสองฝั่ง)
    """
    kind = ActivationKind(kind)
    x = np.asarray(x, dtype=np.float64)
    if kind is ActivationKind.SIGMOID:
        s = special.expit(x)
        result = s * (1.0 - s)
    else:
        inside = np.abs(x) < HALF_PI
        result = np.where(inside, 0.5 * np.cos(x), 0.0)
    return result if result.ndim else float(result)
