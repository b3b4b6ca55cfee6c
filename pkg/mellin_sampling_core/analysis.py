"""
Numerical harnesses for the approximation theorems.

Each check turns an asymptotic statement into something decidable: an
empirical order from a log–log fit, a bound that either holds on a grid or
does not, a limit extrapolated from a doubling sequence of rates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .exceptions import (
    DivergenceError,
    InsufficientDataError,
    InvalidArgumentError,
    UnsupportedKernelError,
)
from .kernels import Kernel, moment_M
from .mellin_ops import LogGrid, Signal, log_modulus, mellin_derivative
from .sampling import ErrorSeries, SamplingPlan, Window, WindowKind, generalized_sample
from .special_fn import _check_finite, log_positive

log = logging.getLogger(__name__)


# ───────────────────────────── RATES ───────────────────────────────────────
@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    rows_used: int


def fit_order(series: ErrorSeries, noise_floor: float = 0.0) -> RateFit:
    """Least-squares line through (log param, log abs_err).

    Rows with abs_err ≤ ``noise_floor`` (and all zero rows) are dropped;
    at least three must remain.
    """
    params = series.params
    errs = series.abs_errs
    keep = (errs > max(noise_floor, 0.0)) & (params > 0.0)
    if int(keep.sum()) < 3:
        raise InsufficientDataError(
            f"need 3 rows above the noise floor {noise_floor:.1e}, have {int(keep.sum())}"
        )
    x = np.log(params[keep])
    y = np.log(errs[keep])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    log.debug("rate fit: slope=%.4f r²=%.6f over %d rows", slope, r_squared, int(keep.sum()))
    return RateFit(float(slope), float(intercept), r_squared, int(keep.sum()))


def richardson(values: Sequence[float], ratio: float = 2.0, order: int = 1, levels: int = 2) -> float:
    """Extrapolate a(w_i) → lim a for w_i = w_0·ratio^i.

    Level ℓ (1-based) removes the w^{-(order+ℓ-1)} term; the estimate built
    from the finest values is returned.
    """
    a = [float(v) for v in values]
    if levels < 0 or len(a) < levels + 1:
        raise InsufficientDataError(f"{levels}-level Richardson needs {levels + 1} values, got {len(a)}")
    if not (math.isfinite(ratio) and ratio > 1.0):
        raise InvalidArgumentError(f"ratio must be > 1, got {ratio!r}")
    for level in range(levels):
        f = ratio ** (order + level)
        a = [(f * fine - coarse) / (f - 1.0) for coarse, fine in zip(a, a[1:])]
    return a[-1]


# ───────────────────────────── QUANTITATIVE BOUND ──────────────────────────
@dataclass(frozen=True)
class BoundRow:
    w: float
    max_error: float
    bound: float
    margin: float


@dataclass
class QuantitativeBoundReport:
    """|S_w f − f| against (M_0 + M_1)·ω(f, 1/w) for each w."""

    kernel: str
    M0: float
    M1: float
    rows: List[BoundRow] = field(default_factory=list)
    violations: int = 0

    @property
    def ok(self) -> bool:
        return self.violations == 0

    @property
    def min_margin(self) -> float:
        return min((r.margin for r in self.rows), default=math.inf)


def _sup_abs_moment(kernel: Kernel, alpha: float, points: int, tail_tol: float) -> float:
    # m_j and M_α are 1-periodic in log x
    if kernel.compact:
        K, tail = 1, 0.0
    else:
        K = kernel.window_for(tail_tol, power=alpha)
        tail = kernel.tail_bound(K - 0.5, power=alpha)
    ts = np.arange(points, dtype=float) / points
    return max(moment_M(kernel, alpha, math.exp(t), K) for t in ts) + tail


def check_quantitative_bound(
    kernel: Kernel,
    f: Signal,
    w_list: Sequence[float],
    grid: LogGrid,
    tail_tol: float = 1e-6,
    window: Window | None = None,
    moment_points: int = 64,
) -> QuantitativeBoundReport:
    """Check |S_w f(x) − f(x)| ≤ (M_0 + M_1)·ω(f, 1/w) at every grid point.

    ω is measured on a log grid with step ≤ δ/16 that covers the check grid
    plus one unit on each side. Truncating S_w to ``window`` can only
    change it by the window's tail tolerance times sup|f|, which is added
    to the bound before comparing, together with a few ulps of rounding.
    """
    try:
        if not kernel.compact:
            kernel._decay_margin(1.0)
    except DivergenceError as err:
        raise UnsupportedKernelError(f"M_1({kernel.name}) is infinite") from err

    window = window or Window.tail_tol(1e-10)
    slack = 0.0
    if window.kind is WindowKind.TAIL_TOL and not kernel.compact and f.bound is not None:
        slack = window.tol * f.bound

    M0 = _sup_abs_moment(kernel, 0.0, moment_points, tail_tol)
    M1 = _sup_abs_moment(kernel, 1.0, moment_points, tail_tol)
    report = QuantitativeBoundReport(kernel=kernel.name, M0=M0, M1=M1)
    xs = grid.xs
    targets = np.array([f(x) for x in xs])
    slack += 8.0 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(targets))))

    for w in w_list:
        delta = 1.0 / float(w)
        span = grid.hi - grid.lo + 2.0
        fine = LogGrid(grid.lo - 1.0, grid.hi + 1.0, int(math.ceil(16.0 * span / delta)) + 1)
        omega = log_modulus(f, delta, fine)
        plan = SamplingPlan(float(w), c=kernel.c, window=window)
        approx = np.array([generalized_sample(kernel, f, plan, x) for x in xs])
        worst = float(np.max(np.abs(approx - targets)))
        bound = (M0 + M1) * omega + slack
        margin = bound - worst
        if margin < 0.0:
            report.violations += 1
            log.warning("bound violated for %s at w=%g: %.3e > %.3e", kernel.name, w, worst, bound)
        report.rows.append(BoundRow(float(w), worst, bound, margin))
    return report


# ───────────────────────────── VORONOVSKAJA ────────────────────────────────
@dataclass(frozen=True)
class VoronovskajaResult:
    w_list: List[float]
    sequence: List[float]
    extrapolated: float
    target: float | None

    @property
    def rel_err(self) -> float | None:
        if self.target is None or self.target == 0.0:
            return None
        return abs(self.extrapolated - self.target) / abs(self.target)


def _ratio_of(w_list: Sequence[float]) -> float:
    ws = [float(w) for w in w_list]
    if len(ws) < 2 or any(b <= a for a, b in zip(ws, ws[1:])):
        raise InvalidArgumentError("w_list must hold at least two ascending rates")
    ratio = ws[1] / ws[0]
    if any(abs(b / a - ratio) > 1e-12 * ratio for a, b in zip(ws, ws[1:])):
        raise InvalidArgumentError("w_list must be geometric")
    return ratio


def voronovskaja_limit(
    kernel: Kernel,
    f: Signal,
    x: float,
    n: int,
    w_list: Sequence[float],
    window: Window | None = None,
) -> VoronovskajaResult:
    """w^n·(S_w f(x) − f(x)) along ``w_list`` and its extrapolated limit.

    The target m_n·Θ^n f(x)/n! is filled in when m_1 … m_{n−1} are known to
    vanish and m_n is known.
    """
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"order must be an int >= 1, got {n!r}")
    n = int(n)
    log_positive(x)
    ratio = _ratio_of(w_list)
    moments = [kernel.known_moments.get(j) for j in range(1, n + 1)]
    if any(m is None for m in moments):
        raise UnsupportedKernelError(f"{kernel.name} lacks x-independent moments up to order {n}")
    if not kernel.compact:
        try:
            kernel._decay_margin(float(n))
        except DivergenceError as err:
            raise UnsupportedKernelError(f"M_{n}({kernel.name}) is infinite") from err

    fx = f(x)
    sequence = []
    for w in w_list:
        plan = SamplingPlan(float(w), c=kernel.c, window=window or Window.tail_tol())
        sequence.append(float(w) ** n * (generalized_sample(kernel, f, plan, x) - fx))

    extrapolated = richardson(sequence, ratio, order=1, levels=min(2, len(sequence) - 1))
    target = None
    if all(m == 0.0 for m in moments[:-1]):
        derivative = mellin_derivative(f, x, n, kernel.c)
        target = moments[-1] * derivative / math.factorial(n)
    log.debug("Voronovskaja %s n=%d at x=%g: %.10g (target %s)", kernel.name, n, x, extrapolated, target)
    return VoronovskajaResult([float(w) for w in w_list], sequence, extrapolated, target)


def uniform_error(kernel: Kernel, f: Signal, w: float, grid: LogGrid, window: Window | None = None) -> float:
    """max over the grid of |S_w f(x) − f(x)|."""
    w = _check_finite("w", w)
    plan = SamplingPlan(w, c=kernel.c, window=window or Window.tail_tol())
    return max(abs(generalized_sample(kernel, f, plan, x) - f(x)) for x in grid.xs)


__all__ = [
    "RateFit",
    "fit_order",
    "richardson",
    "BoundRow",
    "QuantitativeBoundReport",
    "check_quantitative_bound",
    "VoronovskajaResult",
    "voronovskaja_limit",
    "uniform_error",
]
