import itertools
import math

import numpy as np
import pytest

from fnn_lab.errors import DomainError, ResourceLimitError, VerificationFailure
from fnn_lab.fourier import (AbsSeries, BallSpectrum, abs_partial_sum, abs_tail_bounds, abs_tail_error,
                             ball_coefficient, ball_coefficient_by_quadrature, ball_partial_sum, ball_sq_error,
                             lattice_points_in_ball, lattice_shells, parseval_check, unit_ball_volume,
                             verify_lemma1, verify_lemma2)


def test_abs_partial_sum_examples():
    assert abs_partial_sum(0.3, 0) == pytest.approx(0.5 * math.pi)
    assert abs(abs_partial_sum(0.0, 1000)) < 1e-3
    x = np.linspace(-math.pi, math.pi, 7)
    np.testing.assert_allclose(abs_partial_sum(x, 20), abs_partial_sum(-x, 20))
    assert AbsSeries(5)(1.0) == abs_partial_sum(1.0, 5)
    assert abs_partial_sum(math.pi, 1) == pytest.approx(0.5 * math.pi + 4.0 / math.pi, rel=1e-12)
    assert abs_partial_sum(math.pi, 1) == pytest.approx(2.8441, abs=2e-4)
    assert abs_partial_sum(1.0, 200) == pytest.approx(1.0, abs=5e-4)


def test_tail_error_sandwich_for_first_hundred_terms():
    report = verify_lemma1(range(1, 101))
    assert report.sandwich_ok
    for n in (1, 7, 100):
        lower, upper = abs_tail_bounds(n)
        assert lower <= abs_tail_error(n) <= upper
        scaled = abs_tail_error(n) * (2 * n - 1) ** 3 * (6 * math.pi / 16)
        assert (2 * n - 1) ** 3 / (2 * n + 1) ** 3 <= scaled <= 1.0


def test_tail_error_rate_is_cubic():
    report = verify_lemma1(range(1, 3))
    assert report.slope == pytest.approx(-3.0, abs=0.05)
    assert report.rate_ok


def test_tail_error_methods_agree():
    for n in (0, 1, 10, 250):
        assert abs_tail_error(n, method='series') == pytest.approx(abs_tail_error(n), rel=1e-10)
    # n = 0: error คือ ‖|x| − π/2‖² = π³/6
    assert abs_tail_error(0) == pytest.approx(math.pi ** 3 / 6.0, rel=1e-12)
    with pytest.raises(DomainError):
        abs_tail_error(-1)
    with pytest.raises(DomainError):
        abs_tail_error(3, method='guess')


def test_tail_error_is_decreasing():
    values = [abs_tail_error(n) for n in range(0, 50)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_parseval_cross_check():
    rows = parseval_check((4, 16, 64), 10_000)
    assert all(row.ok for row in rows)
    assert rows[0].parseval_mse == pytest.approx(abs_tail_error(4) / (2 * math.pi))


def test_lattice_counts_and_order():
    assert len(lattice_points_in_ball(1, 2)) == 5
    assert len(lattice_points_in_ball(2, 2)) == 13
    assert len(lattice_points_in_ball(3, 2)) == 29
    assert len(lattice_points_in_ball(math.sqrt(2), 2)) == 9
    assert len(lattice_points_in_ball(math.sqrt(5), 2)) == 21
    assert len(lattice_points_in_ball(1, 3)) == 7
    assert len(lattice_points_in_ball(0, 3)) == 1
    points = lattice_points_in_ball(2, 2)
    assert [tuple(p) for p in points] == sorted(tuple(p) for p in points)
    assert tuple(points[0]) == (-2, 0)


@pytest.mark.parametrize('d', [1, 2, 3])
def test_lattice_matches_brute_force(d):
    for R in [0.5 * k for k in range(21)]:
        m = int(R)
        expected = [k for k in itertools.product(range(-m, m + 1), repeat=d) if sum(c * c for c in k) <= R * R]
        assert [tuple(int(c) for c in p) for p in lattice_points_in_ball(R, d)] == expected


def test_lattice_budget_and_domain():
    with pytest.raises(ResourceLimitError) as excinfo:
        lattice_points_in_ball(100, 3, max_points=1000)
    assert excinfo.value.count_bound == 201 ** 3
    with pytest.raises(DomainError):
        lattice_points_in_ball(2, 4)
    with pytest.raises(DomainError):
        lattice_points_in_ball(-1, 2)


def test_lattice_shells_group_by_norm():
    shells = lattice_shells(lattice_points_in_ball(2, 2))
    assert [norm2 for norm2, _ in shells] == [0, 1, 2, 4]
    assert [len(idx) for _, idx in shells] == [1, 4, 4, 4]


@pytest.mark.parametrize('d', [2, 3])
def test_closed_form_coefficients_match_quadrature(d):
    for r in (0.0, 0.005, 0.5, 1.0, math.sqrt(2), 3.7, 10.0, 25.0):
        assert ball_coefficient(r, d) == pytest.approx(ball_coefficient_by_quadrature(r, d), rel=1e-8, abs=1e-13)


def test_coefficient_at_origin_is_the_volume_fraction():
    assert ball_coefficient(0.0, 2) == pytest.approx(math.pi / (2 * math.pi) ** 2)
    assert ball_coefficient(0.0, 3) == pytest.approx((4 * math.pi / 3) / (2 * math.pi) ** 3)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_ball_sq_error_decreases_with_radius():
    errors = [ball_sq_error(BallSpectrum.build(2, R)) for R in (2, 4, 8)]
    assert errors[0] > errors[1] > errors[2] > 0


@pytest.mark.parametrize('d', [2, 3])
def test_every_shell_lowers_the_error(d):
    spectrum = BallSpectrum.build(d, 5)
    squares = spectrum.coefficients ** 2
    remaining = unit_ball_volume(d)
    for _, idx in lattice_shells(spectrum.lattice):
        reduced = remaining - (2 * math.pi) ** d * squares[idx].sum()
        assert reduced < remaining
        remaining = reduced
    assert remaining == pytest.approx(ball_sq_error(spectrum), abs=1e-12)


def test_ball_partial_sum_is_even_and_matches_shapes():
    spectrum = BallSpectrum.build(2, 6)
    x = np.array([[0.3, -1.2], [2.0, 0.1]])
    np.testing.assert_allclose(ball_partial_sum(x, spectrum), ball_partial_sum(-x, spectrum), atol=1e-13)
    assert isinstance(ball_partial_sum(np.zeros(2), spectrum), float)


def test_lemma2_slopes_at_desk_scale():
    report2 = verify_lemma2(2, [4, 8, 16, 32])
    assert -0.9 <= report2.slope <= -0.3
    assert report2.passed
    report3 = verify_lemma2(3, [3, 5, 8, 12])
    assert -0.63 <= report3.slope <= -0.13
    assert report3.passed
    assert [row.n_lattice for row in report3.rows] == sorted(row.n_lattice for row in report3.rows)


def test_lemma2_argument_checks():
    with pytest.raises(DomainError):
        verify_lemma2(4, [2, 3])
    with pytest.raises(DomainError):
        verify_lemma2(2, [8, 4])
    with pytest.raises(DomainError):
        verify_lemma2(2, [4])


def test_lemma2_strict_mode_raises_when_the_bound_fails(monkeypatch):
    from fnn_lab import fourier
    monkeypatch.setattr(fourier.Lemma2Report, 'slope_bound', property(lambda self: -10.0))
    with pytest.raises(VerificationFailure):
        verify_lemma2(2, [2, 4], strict=True)
