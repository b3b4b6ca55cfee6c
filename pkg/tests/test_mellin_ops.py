"""Stirling tables, Mellin derivatives, modulus, translation and transform."""

import math

import numpy as np
import pytest

from mellin_sampling_core.exceptions import ConvergenceError, InvalidArgumentError
from mellin_sampling_core.kernels import bspline_kernel, signal_from_kernel
from mellin_sampling_core.mellin_ops import (
    LogGrid,
    Signal,
    StirlingTable,
    fejer_signal,
    log_modulus,
    log_signal,
    mellin_derivative,
    mellin_taylor,
    mellin_transform_numeric,
    mellin_translation,
    stirling,
    stirling_first,
    taylor_remainder,
)
from mellin_sampling_core.quadrature import QuadSpec

# -------------------- helpers -------------------- #


def _power(a: float) -> Signal:
    """x^a, whose Mellin derivatives are a^r·x^a."""
    return Signal(func=lambda x: x**a, log_func=lambda t: np.exp(a * t))


def _log_squared() -> Signal:
    return Signal(func=lambda x: math.log(x) ** 2, log_func=lambda t: np.asarray(t, dtype=float) ** 2)


# ------------------------------------------------- #


@pytest.mark.parametrize("r, k, expected", [(3, 2, 3.0), (4, 2, 7.0), (4, 3, 6.0), (5, 1, 1.0)])
def test_stirling_c0_is_second_kind(r, k, expected):
    assert stirling(0.0, r, k) == expected


def test_stirling_boundaries():
    assert stirling(2.0, 3, 0) == 8.0
    assert stirling(1.5, 5, 5) == 1.0


def test_stirling_table_satisfies_recurrence():
    assert StirlingTable.build(0.7, 10).max_residual() <= 1e-12


@pytest.mark.parametrize("r, k", [(2, 3), (-1, 0), (2.5, 1)])
def test_stirling_rejects_bad_indices(r, k):
    with pytest.raises(InvalidArgumentError):
        stirling(0.0, r, k)


def test_stirling_first_kind():
    assert stirling_first(3, 3) == 1
    assert stirling_first(3, 2) == -3
    assert stirling_first(3, 1) == 2
    assert stirling_first(3, 0) == 0


def test_derivative_of_log():
    x = math.exp(0.5)
    assert mellin_derivative(log_signal(), x, 1) == pytest.approx(1.0, abs=1e-12)
    assert mellin_derivative(log_signal(), x, 2) == pytest.approx(0.0, abs=1e-6)
    # Θ_c log x = 1 + c·log x
    assert mellin_derivative(log_signal(), x, 1, c=2.0) == pytest.approx(2.0, abs=1e-9)


@pytest.mark.parametrize("r, rel", [(1, 1e-6), (2, 1e-6), (3, 1e-3)])
def test_derivative_of_power(r, rel):
    a, x = 1.5, 2.0
    assert mellin_derivative(_power(a), x, r) == pytest.approx(a**r * x**a, rel=rel)


def test_second_derivative_of_log_squared():
    # Θ²(log² x) = x²·f'' + x·f' = 2
    assert mellin_derivative(_log_squared(), 3.0, 2) == pytest.approx(2.0, abs=1e-6)


def test_derivative_error_is_second_order():
    a, x = 1.5, 2.0
    exact = a * x**a
    coarse = abs(mellin_derivative(_power(a), x, 1, h=0.1) - exact)
    fine = abs(mellin_derivative(_power(a), x, 1, h=0.05) - exact)
    assert coarse / fine == pytest.approx(4.0, abs=0.2)


@pytest.mark.parametrize("r", [0, 7])
def test_derivative_order_is_bounded(r):
    with pytest.raises(InvalidArgumentError):
        mellin_derivative(log_signal(), 2.0, r)


def test_derivative_needs_positive_x():
    with pytest.raises(InvalidArgumentError):
        mellin_derivative(log_signal(), 0.0, 1)


def test_taylor_polynomial_of_order_zero():
    f = fejer_signal()
    assert mellin_taylor(f, 3.0, 1.2, 0) == f(3.0)


def test_taylor_remainder_shrinks_towards_one():
    f = _power(1.5)
    near = taylor_remainder(f, 2.0, 1.01, 2)
    far = taylor_remainder(f, 2.0, 1.1, 2)
    assert abs(near) < abs(far)
    assert abs(near) < 0.05


def test_taylor_remainder_undefined_at_one():
    with pytest.raises(InvalidArgumentError):
        taylor_remainder(log_signal(), 2.0, 1.0, 1)


def test_log_modulus_of_log():
    grid = LogGrid(-1.0, 1.0, 201)
    assert log_modulus(log_signal(), 0.5, grid) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("lam, delta", [(10.0, 0.0037296), (2.5, 0.05), (4.0, 0.1), (1.5, 0.3)])
def test_log_modulus_scaling_with_grid_slack(lam, delta):
    grid = LogGrid(-6.0, 6.0, 4096)
    f = fejer_signal()
    small = log_modulus(f, delta, grid)
    delta_g = math.floor(delta / grid.step + 1e-9) * grid.step
    bound = (lam * delta / delta_g + 1.0) * small
    assert log_modulus(f, lam * delta, grid) <= bound * (1.0 + 1e-12)


def test_log_modulus_scaling_on_whole_steps():
    grid = LogGrid(-6.0, 6.0, 4096)
    f = fejer_signal()
    delta = 3 * grid.step
    for lam in (2.0, 5.0, 10.0):
        assert log_modulus(f, lam * delta, grid) <= (lam + 1.0) * log_modulus(f, delta, grid) * (1.0 + 1e-12)


def test_log_modulus_rejects_nonpositive_delta():
    with pytest.raises(InvalidArgumentError):
        log_modulus(log_signal(), 0.0, LogGrid())


def test_translation():
    f = fejer_signal()
    h, c = 1.7, 0.4
    g = mellin_translation(f, h, c)
    for x in (0.3, 1.0, 5.0):
        assert g(x) == pytest.approx(h**c * f(h * x), rel=1e-14)
    assert g.bound == pytest.approx(h**c * f.bound)


# -------------------- transform -------------------- #


@pytest.fixture(scope="module")
def wide_quad():
    return QuadSpec(step=0.5, half_width=65536.0, refine=1, tol=1e-4)


@pytest.mark.parametrize("v", [0.0, 1.0, 2.5])
def test_fejer_transform_is_a_triangle(wide_quad, v):
    tail = 4.0 / (math.pi**2 * wide_quad.half_width)
    result = mellin_transform_numeric(fejer_signal(), 0.0, v, wide_quad, tail_bound=tail)
    assert result.value.real == pytest.approx(max(1.0 - v / math.pi, 0.0), abs=1e-4)
    assert result.value.imag == pytest.approx(0.0, abs=1e-4)


def test_transform_reports_non_convergence():
    quad = QuadSpec(step=0.5, half_width=64.0, tol=1e-12)
    with pytest.raises(ConvergenceError) as err:
        mellin_transform_numeric(fejer_signal(), 0.0, 0.0, quad, tail_bound=1e-3)
    assert err.value.err_est > 1e-12


# -------------------- grids and signals -------------------- #


@pytest.mark.parametrize("lo, hi, points", [(1.0, 0.0, 5), (0.0, 1.0, 0), (0.0, math.inf, 5)])
def test_log_grid_validation(lo, hi, points):
    with pytest.raises(InvalidArgumentError):
        LogGrid(lo, hi, points)


def test_single_point_grid():
    grid = LogGrid(0.0, 0.0, 1)
    assert grid.step == math.inf
    assert grid.xs.tolist() == [1.0]


def test_fejer_signal():
    f = fejer_signal()
    assert f(1.0) == 0.5
    assert f.bound == 0.5
    assert fejer_signal(math.pi, 0.5).bound is None
    with pytest.raises(InvalidArgumentError):
        fejer_signal(-1.0)


# -------------------- B-spline transforms -------------------- #


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("v", [math.pi, 1.0, 4.5])
def test_bspline_transform_is_a_sinc_power(n, v):
    kernel = bspline_kernel(n)
    quad = QuadSpec(step=2.0**-9, half_width=2.0, refine=2, tol=1e-5)
    result = mellin_transform_numeric(signal_from_kernel(kernel), 0.0, v, quad)
    expected = (math.sin(v / 2) / (v / 2)) ** n
    assert result.value.real == pytest.approx(expected, abs=1e-5)
    assert result.value.imag == pytest.approx(0.0, abs=1e-12)
    assert float(np.real(kernel.known_mellin_transform(np.array([v]))[0])) == pytest.approx(expected, abs=1e-12)


def test_hat_transform_at_pi():
    quad = QuadSpec(step=2.0**-9, half_width=2.0, refine=2, tol=1e-5)
    result = mellin_transform_numeric(signal_from_kernel(bspline_kernel(2)), 0.0, math.pi, quad)
    assert result.value.real == pytest.approx(4.0 / math.pi**2, abs=1e-6)
