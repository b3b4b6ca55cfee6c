"""Classical and generalised exponential sampling series."""

import math

import numpy as np
import pytest
from scipy.special import zeta

from mellin_sampling_core.analysis import fit_order
from mellin_sampling_core.exceptions import (
    InvalidArgumentError,
    InvalidSampleError,
    UnsupportedKernelError,
)
from mellin_sampling_core.kernels import NormMode, bspline_kernel, jackson_kernel
from mellin_sampling_core.mellin_ops import (
    Signal,
    constant_signal,
    fejer_signal,
    log_signal,
    mellin_translation,
)
from mellin_sampling_core.sampling import (
    ErrorSeries,
    SamplingPlan,
    Window,
    aliasing_error,
    bspline2_closed_form,
    classical_fejer_sum,
    classical_partial_sum,
    classical_truncation_bound,
    classical_truncation_error,
    fejer_value,
    generalized_sample,
    jackson_sample,
    truncation_error,
)
from mellin_sampling_core.summation import SummationMode

X_POS = math.exp(2.7)
X_NEG = math.exp(-0.6)
F_POS = 0.0220680769728561
F_NEG = 0.3684198646611253

# -------------------- helpers -------------------- #


def _compact(w: float) -> SamplingPlan:
    return SamplingPlan(w, window=Window.compact_exact())


@pytest.fixture(scope="module")
def f():
    return fejer_signal()


@pytest.fixture(scope="module")
def b2():
    return bspline_kernel(2)


# -------------------- classical series -------------------- #


def test_reference_values(f):
    assert fejer_value(math.pi, 0.0, X_POS) == pytest.approx(F_POS, abs=1e-15)
    assert fejer_value(math.pi, 0.0, X_NEG) == pytest.approx(F_NEG, abs=1e-15)


@pytest.mark.parametrize("N, printed", [(20, 0.0220621711295), (40, 0.0220673420431), (2560, 0.0220680769700)])
def test_classical_rows(N, printed):
    assert classical_fejer_sum(math.pi, 0.0, N, X_POS) == pytest.approx(printed, abs=5e-13)


def test_closed_classical_sum_matches_partial_sum(f):
    for N in (20, 40, 160):
        for x in (X_POS, X_NEG, 0.8):
            direct = classical_partial_sum(f, 0.0, 1.0, N, x)
            assert direct == pytest.approx(classical_fejer_sum(math.pi, 0.0, N, x), abs=1e-14)


def test_classical_series_interpolates_at_nodes(f):
    x = math.exp(3.0)
    assert classical_partial_sum(f, 0.0, 1.0, 50, x) == pytest.approx(f(x), abs=1e-14)


def test_classical_sum_at_one_is_exact():
    assert classical_fejer_sum(math.pi, 0.0, 10, 1.0) == 0.5
    assert classical_fejer_sum(math.pi, 0.0, 0, 1.0) == 0.5


@pytest.mark.parametrize("N", [20, 40, 160])
def test_classical_truncation_bound_holds(N):
    assert classical_truncation_error(math.pi, 0.0, N, X_POS) <= classical_truncation_bound(math.pi, N)


@pytest.mark.parametrize("x", [X_POS, X_NEG])
def test_classical_error_shrinks_when_n_doubles(x):
    errs = [classical_truncation_error(math.pi, 0.0, N, x) for N in (20, 40, 80, 160, 320, 640, 1280)]
    for coarse, fine in zip(errs, errs[1:]):
        assert fine < coarse


def test_classical_errors_match_known_values():
    assert classical_truncation_error(math.pi, 0.0, 20, X_POS) == pytest.approx(5.906e-6, rel=1e-3)
    assert classical_truncation_error(math.pi, 0.0, 40, X_POS) == pytest.approx(7.349e-7, rel=1e-3)


def test_classical_rejects_bad_arguments(f):
    with pytest.raises(InvalidArgumentError):
        classical_partial_sum(f, 0.0, 0.0, 10, 2.0)
    with pytest.raises(InvalidArgumentError):
        classical_partial_sum(f, 0.0, 1.0, -1, 2.0)
    with pytest.raises(InvalidArgumentError):
        classical_fejer_sum(math.pi, 0.0, 10, -2.0)


# -------------------- B_2 closed form -------------------- #


def test_closed_form_matches_direct_sum(f, b2):
    rng = np.random.default_rng(20240601)
    ws = 2.0 ** rng.uniform(0.0, 20.0, 10_000)
    logs = rng.uniform(-5.0, 5.0, 10_000)
    worst = 0.0
    for w, logx in zip(ws, logs):
        x = math.exp(logx)
        direct = generalized_sample(b2, f, _compact(w), x)
        worst = max(worst, abs(bspline2_closed_form(f, w, x) - direct))
    assert worst <= 1e-15


@pytest.mark.parametrize("logx", [0.4 / 16, -0.4 / 16])
def test_closed_form_central_branches(f, b2, logx):
    x = math.exp(logx)
    assert bspline2_closed_form(f, 16, x) == pytest.approx(generalized_sample(b2, f, _compact(16), x), abs=1e-15)


@pytest.mark.parametrize("w, printed", [(16, 0.02203184447881), (2048, 0.02206807368853)])
def test_b2_rows(f, w, printed):
    assert bspline2_closed_form(f, w, X_POS) == pytest.approx(printed, abs=5e-14)


def test_closed_form_needs_fejer_signal():
    with pytest.raises(InvalidArgumentError):
        bspline2_closed_form(constant_signal(), 16, 2.0)


def test_b2_interpolates_at_knots(f, b2):
    w = 8.0
    for k in (-5, 0, 3, 11):
        x = math.exp(k / w)
        assert generalized_sample(b2, f, _compact(w), x) == pytest.approx(f(x), abs=1e-15)


# -------------------- generalised operator -------------------- #


def test_constant_reproduction(b2):
    g = constant_signal(3.0)
    for x in (0.01, 1.0, 7.5):
        assert generalized_sample(b2, g, _compact(10.0), x) == pytest.approx(3.0, abs=1e-14)


def test_jackson_reproduces_constants():
    kernel = jackson_kernel(norm_mode=NormMode.ANALYTIC)
    value = generalized_sample(kernel, constant_signal(1.0), SamplingPlan(4.0), 1.9)
    assert value == pytest.approx(1.0, abs=1e-12)


def test_scaling_covariance(f, b2):
    w, shift = 8.0, 3
    h = math.exp(shift / w)
    g = mellin_translation(f, h)
    x = math.exp(0.123)
    assert generalized_sample(b2, g, _compact(w), x) == pytest.approx(
        generalized_sample(b2, f, _compact(w), h * x), abs=1e-13
    )


def test_summation_modes_agree(f):
    kernel = jackson_kernel()
    fine = generalized_sample(kernel, f, SamplingPlan(40.0), X_POS)
    rough = generalized_sample(kernel, f, SamplingPlan(40.0, summation=SummationMode.PAIRWISE_OUTWARD), X_POS)
    assert rough == pytest.approx(fine, abs=1e-14)


def test_repeated_evaluation_is_bit_identical(f):
    kernel = jackson_kernel()
    first = generalized_sample(kernel, f, SamplingPlan(80.0), X_NEG)
    assert generalized_sample(kernel, f, SamplingPlan(80.0), X_NEG) == first


def test_jackson_sample_uses_printed_constant(f):
    paper = jackson_kernel(norm_mode="paper")
    direct = generalized_sample(paper, f, SamplingPlan(20.0), X_POS)
    assert jackson_sample(f, 20.0, X_POS) == direct
    assert jackson_sample(f, 20.0, X_POS) == pytest.approx(0.0206901738326, abs=1e-11)


def test_radius_window(f):
    kernel = jackson_kernel()
    wide = generalized_sample(kernel, f, SamplingPlan(20.0, window=Window.of_radius(200_000)), X_POS)
    assert wide == pytest.approx(generalized_sample(kernel, f, SamplingPlan(20.0), X_POS), abs=1e-14)


# -------------------- plans and failures -------------------- #


@pytest.mark.parametrize("w", [0.0, -1.0, math.nan, math.inf])
def test_plan_rejects_bad_rate(w):
    with pytest.raises(InvalidArgumentError):
        SamplingPlan(w)


def test_window_validation():
    with pytest.raises(InvalidArgumentError):
        Window.of_radius(0)
    with pytest.raises(InvalidArgumentError):
        Window.tail_tol(0.0)


def test_plan_must_match_kernel_exponent(f):
    with pytest.raises(InvalidArgumentError):
        generalized_sample(bspline_kernel(2, c=0.5), f, _compact(4.0), 2.0)


def test_nonpositive_x_is_rejected(f, b2):
    with pytest.raises(InvalidArgumentError):
        generalized_sample(b2, f, _compact(4.0), 0.0)


def test_non_finite_sample_is_reported(b2):
    bad = Signal(func=lambda x: math.nan, log_func=lambda t: np.full(np.shape(t), np.nan), bound=1.0)
    with pytest.raises(InvalidSampleError) as err:
        generalized_sample(b2, bad, _compact(4.0), 2.0)
    assert err.value.abscissa > 0.0


def test_tail_window_needs_signal_bound():
    with pytest.raises(UnsupportedKernelError):
        generalized_sample(jackson_kernel(), log_signal(), SamplingPlan(4.0), 2.0)


def test_compact_window_needs_compact_kernel(f):
    with pytest.raises(UnsupportedKernelError):
        generalized_sample(jackson_kernel(), f, _compact(4.0), 2.0)


# -------------------- error decomposition -------------------- #


def test_jackson_truncation_tail(f):
    kernel = jackson_kernel(norm_mode=NormMode.PAPER)
    assert truncation_error(kernel, f, 20, 400, X_POS) == pytest.approx(2.04e-11, rel=0.05)
    assert truncation_error(kernel, f, 20, 800, X_POS) == pytest.approx(5.84e-13, rel=0.05)


def test_jackson_truncation_rate(f):
    kernel = jackson_kernel(norm_mode=NormMode.PAPER)
    series = ErrorSeries()
    for N in (400, 800, 1600, 3200, 6400):
        series.add(N, truncation_error(kernel, f, 20, N, X_POS), 0.0)
    assert fit_order(series).slope == pytest.approx(-5.0, abs=0.5)


@pytest.mark.parametrize("N", [108, 200, 400, 800])
def test_jackson_truncation_inside_envelope(f, N):
    w = 20.0
    kernel = jackson_kernel(norm_mode=NormMode.PAPER)
    # f(e^{k/w}) <= 2w²/(π²k²) and |φ(e^t)| <= C·t^{-4}, with |k - w log x| >= |k|/2 for |k| > N
    R = 2.0 * (2.0 / math.pi**2) * 2.0**4 * kernel.tail_constant
    envelope = R * w**2 * float(zeta(6.0, N + 1))
    assert truncation_error(kernel, f, w, N, X_POS) <= envelope


def test_truncation_of_compact_kernel(f, b2):
    assert truncation_error(b2, f, 16, 100, X_POS) == 0.0
    whole = generalized_sample(b2, f, _compact(16), X_POS)
    assert truncation_error(b2, f, 16, 10, X_POS) == pytest.approx(whole, abs=1e-16)


def test_aliasing_error_decreases(f, b2):
    errs = [aliasing_error(b2, f, _compact(w), X_POS) for w in (16, 2048, 1048576)]
    assert errs[0] == pytest.approx(F_POS - 0.02203184447881, rel=1e-6)
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-12


def test_error_series_rows():
    series = ErrorSeries()
    series.add(10, 1.5, 1.0)
    series.add(20, 0.75, 1.0)
    assert len(series) == 2
    assert series.params.tolist() == [10.0, 20.0]
    assert series.abs_errs.tolist() == [0.5, 0.25]
