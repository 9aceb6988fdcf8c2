"""
Fourier series oracles

|x| บน [−π, π]:
    f(x) = π/2 + Σ a_k cos((2k−1)x),  a_k = −(4/π)(2k−1)⁻²
    ‖f − S_n‖² = π Σ_{k>n} a_k² = (16/π) Σ_{k>n} (2k−1)⁻⁴         (Parseval)

indicator ของ unit ball ใน [−π, π]^d (d = 2, 3) กับ spherical partial sum รัศมี R:
    f̂_k = (2π)^−d ∫_{‖y‖≤1} e^{−i⟨k,y⟩} dy  (ขึ้นกับ ‖k‖ อย่างเดียว, เป็นจำนวนจริง)
    ‖f − S_R‖² = V_d(1) − (2π)^d Σ_{‖k‖≤R} f̂_k²
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import (DimensionError, DomainError, NumericalConsistencyError, ResourceLimitError,
                     VerificationFailure)
from .numerics import loglog_fit

logger = logging.getLogger(__name__)

# จำนวนจุด grid สูงสุดของ lattice enumeration (ค่า default ถ้า caller ไม่ส่งมา)
MAX_LATTICE_POINTS = 50_000_000

# ตัด tail sum เมื่อ term < 1e−18 ของผลรวม
TAIL_RELATIVE_CUTOFF = 1e-18
_TAIL_CHUNK = 1 << 16

SQ_ERROR_TOLERANCE = 1e-10


def unit_ball_volume(d):
    return math.pi ** (d / 2.0) / special.gamma(d / 2.0 + 1.0)


# --- |x| ---

@dataclass(frozen=True)
class AbsSeries:
    """partial sum ที่ n ของ Fourier series ของ |x|"""
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"term count must be >= 0, got {self.n}")

    @property
    def coefficients(self):
        return abs_coefficients(self.n)

    def __call__(self, x):
        return abs_partial_sum(x, self.n)

    @property
    def tail_error(self):
        return abs_tail_error(self.n)


def abs_coefficients(n):
    odd = 2.0 * np.arange(1, n + 1) - 1.0
    return -(4.0 / math.pi) / (odd * odd)


def abs_partial_sum(x, n):
    """π/2 + Σ_{k=1..n} a_k cos((2k−1)x); x เป็น scalar หรือ array"""
    if n < 0:
        raise DomainError(f"term count must be >= 0, got {n}")
    x = np.asarray(x, dtype=np.float64)
    odd = 2.0 * np.arange(1, n + 1) - 1.0
    value = 0.5 * math.pi + np.cos(np.multiply.outer(x, odd)) @ abs_coefficients(n)
    return float(value) if value.ndim == 0 else value


def _odd_inverse_fourth_tail(n):
    """
    Σ_{k>n} (2k−1)⁻⁴ แบบบวกไปข้างหน้าทีละ chunk ด้วย math.fsum (compensated, ปัดครั้งเดียว)
    หยุดเมื่อ term ต่ำกว่า 1e−18 ของผลรวม
    """
    partials = []
    total = 0.0
    start = n + 1
    while True:
        k = np.arange(start, start + _TAIL_CHUNK, dtype=np.float64)
        odd = 2.0 * k - 1.0
        terms = 1.0 / (odd * odd * odd * odd)
        partials.append(math.fsum(terms))
        total = math.fsum(partials)
        if terms[-1] < TAIL_RELATIVE_CUTOFF * total:
            return total
        start += _TAIL_CHUNK


def abs_tail_error(n, method='polygamma'):
    """
    Function: abs_tail_error
    หน้าที่: ‖f − S_n‖² = (16/π) Σ_{k>n} (2k−1)⁻⁴
    - 'polygamma': Σ_{k>n} (2k−1)⁻⁴ = ψ'''(n + ½)/96 (closed form ที่แม่นถึง machine precision)
    - 'series': บวก tail ตรงๆ แบบ compensated (ใช้ cross-check)
    """
    if n < 0:
        raise DomainError(f"term count must be >= 0, got {n}")
    if method == 'polygamma':
        tail = float(special.polygamma(3, n + 0.5)) / 96.0
    elif method == 'series':
        tail = _odd_inverse_fourth_tail(n)
    else:
        raise DomainError(f"unknown tail method {method!r}")
    return 16.0 / math.pi * tail


def abs_tail_bounds(n):
    """integral sandwich: 16/(6π(2n+1)³) ≤ tail ≤ 16/(6π(2n−1)³), n ≥ 1"""
    if n < 1:
        raise DomainError(f"sandwich bounds need n >= 1, got {n}")
    scale = 16.0 / (6.0 * math.pi)
    return scale / (2 * n + 1) ** 3, scale / (2 * n - 1) ** 3


@dataclass(frozen=True)
class Lemma1Row:
    n: int
    tail_error: float
    lower: float
    upper: float

    @property
    def within_bounds(self):
        return self.lower <= self.tail_error <= self.upper


@dataclass(frozen=True)
class Lemma1Report:
    rows: list
    rate_points: list
    slope: float
    expected_slope: float = -3.0
    slope_tolerance: float = 0.05

    @property
    def sandwich_ok(self):
        return all(row.within_bounds for row in self.rows)

    @property
    def rate_ok(self):
        return abs(self.slope - self.expected_slope) <= self.slope_tolerance

    @property
    def passed(self):
        return self.sandwich_ok and self.rate_ok


def verify_lemma1(n_values=range(1, 101), rate_n=(4, 8, 16, 32, 64, 128)):
    """sandwich check ทุก n และ slope ของ log(tail) บน log(n) (คาดว่า ≈ −3)"""
    rows = []
    for n in n_values:
        lower, upper = abs_tail_bounds(n)
        rows.append(Lemma1Row(n, abs_tail_error(n), lower, upper))
    rate_points = [(n, abs_tail_error(n)) for n in rate_n]
    slope = loglog_fit(rate_points).slope
    return Lemma1Report(rows=rows, rate_points=rate_points, slope=slope)


@dataclass(frozen=True)
class ParsevalRow:
    n: int
    grid_mse: float
    parseval_mse: float

    @property
    def relative_gap(self):
        return abs(self.grid_mse - self.parseval_mse) / self.parseval_mse

    @property
    def ok(self):
        return self.relative_gap < 0.01


def parseval_check(n_values=(4, 16, 64), grid_points=10_000):
    """
    Function: parseval_check
    หน้าที่: MSE บน grid (trapezoid, หารด้วยความยาวช่วง 2π) ของ S_n เทียบ |x|
    เทียบกับ abs_tail_error(n)/(2π)
    """
    x = np.linspace(-math.pi, math.pi, grid_points)
    rows = []
    for n in n_values:
        residual = np.abs(x) - abs_partial_sum(x, n)
        grid_mse = float(integrate.trapezoid(residual * residual, x)) / (2.0 * math.pi)
        rows.append(ParsevalRow(n, grid_mse, abs_tail_error(n) / (2.0 * math.pi)))
    return rows


# --- lattice ---

def lattice_points_in_ball(R, d, max_points=MAX_LATTICE_POINTS):
    """
    Function: lattice_points_in_ball
    หน้าที่: k ∈ Z^d ทั้งหมดที่ ‖k‖₂ ≤ R เรียงแบบ lexicographic (พิกัดแรกสำคัญสุด)
    d ∈ {1, 2, 3}; ถ้า grid (2⌊R⌋+1)^d ใหญ่เกิน max_points -> ResourceLimitError
    """
    if d not in (1, 2, 3):
        raise DomainError(f"lattice enumeration supports d in {{1, 2, 3}}, got {d}")
    if R < 0:
        raise DomainError(f"radius must be >= 0, got {R}")
    m = int(math.floor(R))
    side = 2 * m + 1
    bound = side ** d
    if bound > max_points:
        raise ResourceLimitError(
            f"lattice grid for R={R}, d={d} has {bound} candidate points (budget {max_points})",
            count_bound=bound,
        )
    grid = np.indices((side,) * d).reshape(d, -1).T - m
    norm2 = np.einsum('ij,ij->i', grid, grid)
    # ‖k‖² เป็นจำนวนเต็ม เผื่อ R² ที่ปัดลงเล็กน้อย (เช่น R = √5)
    return grid[norm2 <= R * R + 1e-9].astype(np.int64)


def lattice_shells(points):
    """จัดกลุ่มจุดตาม ‖k‖² จากน้อยไปมาก: list ของ (‖k‖², index array)"""
    points = np.asarray(points)
    norm2 = np.einsum('ij,ij->i', points, points)
    order = np.argsort(norm2, kind='stable')
    values, starts = np.unique(norm2[order], return_index=True)
    bounds = list(starts) + [len(order)]
    return [(int(values[i]), order[bounds[i]:bounds[i + 1]]) for i in range(len(values))]


# --- ball indicator ---

def ball_coefficient(r, d):
    """
    Function: ball_coefficient
    หน้าที่: f̂_k ของ indicator ของ unit ball เป็นฟังก์ชันของ r = ‖k‖₂
    - d = 2: (2π)^−2 · 2π J₁(r)/r
    - d = 3: (2π)^−3 · 4π (sin r − r cos r)/r³  (r เล็กใช้ Taylor series กัน cancellation)
    - r = 0: V_d(1)/(2π)^d
    ใช้ closed form แทน quadrature; ball_coefficient_by_quadrature เป็นตัวตรวจไขว้ใน test
    """
    if d not in (2, 3):
        raise DomainError(f"ball coefficients are implemented for d in {{2, 3}}, got {d}")
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0):
        raise DomainError("radius argument must be nonnegative")
    scale = (2.0 * math.pi) ** (-d)
    small = r < 1e-2
    safe = np.where(small, 1.0, r)
    if d == 2:
        regular = 2.0 * math.pi * special.j1(safe) / safe
        # J₁(r)/r = ½ − r²/16 + r⁴/384
        series = 2.0 * math.pi * (0.5 - r * r / 16.0 + r ** 4 / 384.0)
    else:
        regular = 4.0 * math.pi * (np.sin(safe) - safe * np.cos(safe)) / safe ** 3
        series = 4.0 * math.pi * (1.0 / 3.0 - r * r / 30.0 + r ** 4 / 840.0)
    value = scale * np.where(small, series, regular)
    return float(value) if value.ndim == 0 else value


def ball_coefficient_by_quadrature(r, d):
    """
    oracle: (2π)^−d ∫_{−1}^{1} cos(r t) V_{d−1}(1) (1 − t²)^{(d−1)/2} dt
    แทน t = sin θ ให้ integrand เรียบบน [−π/2, π/2]
    """
    if d not in (2, 3):
        raise DomainError(f"ball coefficients are implemented for d in {{2, 3}}, got {d}")
    slice_volume = unit_ball_volume(d - 1)

    def integrand(theta):
        return slice_volume * math.cos(theta) ** d * math.cos(r * math.sin(theta))

    value, _ = integrate.quad(integrand, -0.5 * math.pi, 0.5 * math.pi,
                              limit=200, epsabs=1e-14, epsrel=1e-12)
    return value / (2.0 * math.pi) ** d


@dataclass(frozen=True)
class BallSpectrum:
    """lattice ใน ball รัศมี R กับ Fourier coefficient ของแต่ละจุด"""
    d: int
    R: float
    lattice: np.ndarray
    coefficients: np.ndarray

    @classmethod
    def build(cls, d, R, max_points=MAX_LATTICE_POINTS):
        lattice = lattice_points_in_ball(R, d, max_points)
        if d not in (2, 3):
            raise DomainError(f"ball spectra are implemented for d in {{2, 3}}, got {d}")
        norms = np.sqrt(np.einsum('ij,ij->i', lattice, lattice).astype(np.float64))
        return cls(d=d, R=float(R), lattice=lattice, coefficients=ball_coefficient(norms, d))

    @property
    def n_terms(self):
        return len(self.lattice)


def ball_partial_sum(x, spectrum):
    """S_R(x) = Σ_{‖k‖≤R} f̂_k cos⟨k, x⟩ (ส่วนจินตภาพหักล้างกันด้วยสมมาตร ±k)"""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = x[np.newaxis, :] if single else x
    if X.ndim != 2 or X.shape[1] != spectrum.d:
        raise DimensionError(f"expected points with {spectrum.d} coordinates, got shape {x.shape}")
    values = np.cos(X @ spectrum.lattice.T.astype(np.float64)) @ spectrum.coefficients
    return float(values[0]) if single else values


def ball_sq_error(spectrum):
    """
    Function: ball_sq_error
    หน้าที่: ‖f − S_R‖² = V_d(1) − (2π)^d Σ f̂_k² สะสมทีละ shell จาก ‖k‖ น้อยไปมาก
    ค่าติดลบเกิน −1e−10 แปลว่า coefficient ผิด -> NumericalConsistencyError
    """
    squares = spectrum.coefficients * spectrum.coefficients
    shell_sums = [math.fsum(squares[idx]) for _, idx in lattice_shells(spectrum.lattice)]
    value = unit_ball_volume(spectrum.d) - (2.0 * math.pi) ** spectrum.d * math.fsum(shell_sums)
    if value < -SQ_ERROR_TOLERANCE:
        raise NumericalConsistencyError(
            f"negative squared error {value:.3e} for d={spectrum.d}, R={spectrum.R}",
            d=spectrum.d, R=spectrum.R, value=value,
        )
    return max(value, 0.0)


@dataclass(frozen=True)
class Lemma2Row:
    R: float
    n_lattice: int
    sq_error: float


@dataclass(frozen=True)
class Lemma2Report:
    d: int
    rows: list
    slope: float

    @property
    def slope_bound(self):
        return -1.0 / self.d + 0.25

    @property
    def passed(self):
        return self.slope <= self.slope_bound and all(row.sq_error > 0 for row in self.rows)


def verify_lemma2(d, R_list, max_points=MAX_LATTICE_POINTS, strict=False):
    """
    Function: verify_lemma2
    หน้าที่: ตาราง (R, n, SE) และ slope ของ log SE บน log n
    กฎที่ทดสอบ: SE ≲ n^{−1/d}; ผ่านเมื่อ slope ≤ −1/d + 0.25
    strict=True -> ไม่ผ่านแล้ว raise VerificationFailure
    """
    if d not in (2, 3):
        raise DomainError(f"Lemma 2 verification supports d in {{2, 3}}, got {d}")
    radii = [float(R) for R in R_list]
    if len(radii) < 2 or any(R < 1 for R in radii) or radii != sorted(radii):
        raise DomainError(f"radii must be ascending, at least two, all >= 1; got {radii}")
    rows = []
    for R in radii:
        spectrum = BallSpectrum.build(d, R, max_points)
        rows.append(Lemma2Row(R=R, n_lattice=spectrum.n_terms, sq_error=ball_sq_error(spectrum)))
        logger.info("lemma2 d=%d R=%g n=%d SE=%.6g", d, R, spectrum.n_terms, rows[-1].sq_error)
    slope = loglog_fit([(row.n_lattice, row.sq_error) for row in rows]).slope
    report = Lemma2Report(d=d, rows=rows, slope=slope)
    if strict and not report.passed:
        raise VerificationFailure(f"d={d}: fitted slope {slope:.4f} exceeds bound {report.slope_bound:.4f}")
    return report
