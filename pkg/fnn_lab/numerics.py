"""
Numerics: dense arrays, seeded randomness และสถิติที่ harness ใช้

- Matrix/Vector = numpy float64 array (row-major, finite เสมอ)
- Rng ใช้ Philox (counter-based) ผ่าน numpy โดยตรง ไม่ใช้ generator default ของ platform
- log ทุกตัวเป็น natural log
"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import stats

from .errors import DegenerateFitError, DegenerateTableError, DimensionError, DomainError

logger = logging.getLogger(__name__)

Matrix = npt.NDArray[np.float64]
Vector = npt.NDArray[np.float64]

# ค่าวิกฤตของ chi-square ที่ระดับ 0.1 คำนวณจาก scipy (dof 3 -> 6.2514)
CHI_SQUARE_ALPHA = 0.1


def as_matrix(data, rows=None, cols=None, name='matrix'):
    """
    Function: as_matrix
    หน้าที่: แปลงข้อมูลเป็น float64 2 มิติ พร้อมเช็ค shape และค่า finite
    """
    array = np.asarray(data, dtype=np.float64)
    if array.ndim != 2:
        raise DimensionError(f"{name}: expected 2-D data, got shape {array.shape}")
    if rows is not None and array.shape[0] != rows:
        raise DimensionError(f"{name}: expected {rows} rows, got {array.shape[0]}")
    if cols is not None and array.shape[1] != cols:
        raise DimensionError(f"{name}: expected {cols} columns, got {array.shape[1]}")
    ensure_finite(array, name)
    return array


def ensure_finite(array, name='array'):
    if not np.all(np.isfinite(array)):
        raise DomainError(f"{name} contains non-finite entries")
    return array


class Rng:
    """
    Seeded random stream (Philox counter-based generator)

    seed เดียวกัน + spawn key เดียวกัน = ลำดับตัวเลขเหมือนกันทุกบิต ทุกเครื่อง
    ห้ามแชร์ instance ข้าม thread (single owner)
    """

    def __init__(self, seed, spawn_key=()):
        if seed < 0 or seed >= 2 ** 64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        self._generator = np.random.Generator(np.random.Philox(sequence))

    def spawn(self, index):
        """สร้าง stream อิสระจาก (seed, index) ใช้กับ lr grid point / sweep cell"""
        return Rng(self.seed, self.spawn_key + (index,))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._generator.uniform(low, high, size)

    def normal(self, size=None):
        return self._generator.standard_normal(size)

    def permutation(self, count):
        # numpy ใช้ Fisher-Yates shuffle
        return self._generator.permutation(count)

    def __repr__(self):
        return f"Rng(seed={self.seed}, spawn_key={self.spawn_key})"


def mse(targets, predictions):
    """Mean squared error (1/T) Σ (y_i − ŷ_i)²"""
    targets = np.asarray(targets, dtype=np.float64).ravel()
    predictions = np.asarray(predictions, dtype=np.float64).ravel()
    if targets.shape != predictions.shape:
        raise DimensionError(
            f"mse: length mismatch ({targets.size} targets vs {predictions.size} predictions)"
        )
    if targets.size == 0:
        raise DomainError("mse: empty input")
    residual = targets - predictions
    return float(np.mean(residual * residual))


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float

    def __iter__(self):
        return iter((self.slope, self.intercept))


def loglog_fit(points):
    """
    Function: loglog_fit
    หน้าที่: OLS ของ log(e) บน log(n) คืน (slope, intercept) ใน natural-log space
    ใช้ตอน regress log(MSE) บน log(hidden size) และ log(SE) บน log(lattice count)
    """
    pairs = [(float(n), float(e)) for n, e in points]
    if any(n <= 0 or e <= 0 for n, e in pairs):
        raise DomainError("loglog_fit: all abscissae and values must be positive")
    if len({n for n, _ in pairs}) < 2:
        raise DegenerateFitError("loglog_fit: need at least 2 distinct abscissae")
    log_n = np.log([n for n, _ in pairs])
    log_e = np.log([e for _, e in pairs])
    result = stats.linregress(log_n, log_e)
    return LogLogFit(slope=float(result.slope), intercept=float(result.intercept))


@dataclass(frozen=True)
class ContingencyTable:
    """
    ตาราง contingency: แถว = โมเดล, คอลัมน์ = ผลลัพธ์ (ถูก/ผิด)
    """
    counts: npt.NDArray[np.int64]

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] < 1 or counts.shape[1] < 1:
            raise DimensionError(f"contingency table must be 2-D, got shape {counts.shape}")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(counts == np.round(counts)):
                raise DomainError("contingency table counts must be integers")
            counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise DomainError("contingency table counts must be nonnegative")
        if np.any(counts.sum(axis=1) == 0):
            raise DegenerateTableError("contingency table has a zero row sum")
        if np.any(counts.sum(axis=0) == 0):
            raise DegenerateTableError("contingency table has a zero column sum")
        object.__setattr__(self, 'counts', counts)

    @property
    def rows(self):
        return self.counts.shape[0]

    @property
    def cols(self):
        return self.counts.shape[1]


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    critical_value: float
    exceeds_critical: bool

    def __iter__(self):
        return iter((self.statistic, self.dof))


def chi_square_independence(table):
    """
    Function: chi_square_independence
    หน้าที่: Pearson chi-square test of independence (ไม่ใช้ Yates correction)
    statistic = Σ (obs − exp)²/exp, exp_ij = rowsum_i × colsum_j / total
    """
    if not isinstance(table, ContingencyTable):
        table = ContingencyTable(np.asarray(table))
    dof = (table.rows - 1) * (table.cols - 1)
    if dof == 0:
        # ตารางแถวเดียว/คอลัมน์เดียว: observed = expected เสมอ
        return ChiSquareResult(0.0, 0, float('nan'), False)
    statistic, _, scipy_dof, _ = stats.chi2_contingency(table.counts, correction=False)
    critical = float(stats.chi2.ppf(1.0 - CHI_SQUARE_ALPHA, scipy_dof))
    statistic = float(statistic)
    return ChiSquareResult(statistic, int(scipy_dof), critical, statistic > critical)
