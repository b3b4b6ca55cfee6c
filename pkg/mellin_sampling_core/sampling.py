"""
Exponential sampling series.

The classical series reconstructs a Mellin band-limited f from f(e^{k/T})
with the lin kernel; the generalized operator

    (S_w^φ f)(x) = Σ_k f(e^{k/w})·φ(e^{−k}x^w)

approximates any bounded continuous f as w → ∞. All sums run over an index
window ordered outward from k₀ = round(w·log x) and are accumulated by
``summation.accumulate``, so a row is bit-identical however it is scheduled.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, NamedTuple, Tuple

import numpy as np

from .constants import TAIL_TOL
from .exceptions import (
    InvalidArgumentError,
    InvalidSampleError,
    UnsupportedKernelError,
)
from .kernels import Kernel, NormMode, bspline_kernel, jackson_kernel, lin_kernel, norm_mode_of
from .mellin_ops import FEJER_PI_TAG, Signal, fejer_signal
from .special_fn import _check_finite, log_positive, sinc, sinpi
from .summation import SummationMode, accumulate, outward_order, summation_mode

log = logging.getLogger(__name__)


# ───────────────────────────── PLAN ────────────────────────────────────────
class WindowKind(str, enum.Enum):
    COMPACT_EXACT = "compact_exact"
    RADIUS = "radius"
    TAIL_TOL = "tail_tol"


@dataclass(frozen=True)
class Window:
    """Which indices k enter a sum.

    COMPACT_EXACT takes every k within the kernel's support; RADIUS takes
    |k − k₀| ≤ K; TAIL_TOL picks K so the certified tail is below
    ``tol``·sup|f|.
    """

    kind: WindowKind
    radius: int | None = None
    tol: float | None = None

    def __post_init__(self) -> None:
        if self.kind is WindowKind.RADIUS:
            if self.radius is None or int(self.radius) != self.radius or self.radius < 1:
                raise InvalidArgumentError(f"window radius must be an int >= 1, got {self.radius!r}")
        if self.kind is WindowKind.TAIL_TOL:
            if self.tol is None or not (math.isfinite(self.tol) and self.tol > 0.0):
                raise InvalidArgumentError(f"tail tolerance must be > 0, got {self.tol!r}")

    @classmethod
    def compact_exact(cls) -> "Window":
        return cls(WindowKind.COMPACT_EXACT)

    @classmethod
    def of_radius(cls, K: int) -> "Window":
        return cls(WindowKind.RADIUS, radius=K)

    @classmethod
    def tail_tol(cls, eps: float = TAIL_TOL) -> "Window":
        return cls(WindowKind.TAIL_TOL, tol=eps)


@dataclass(frozen=True)
class SamplingPlan:
    """Rate w, the kernel's Mellin exponent c, window and summation mode."""

    w: float
    c: float = 0.0
    window: Window = field(default_factory=Window.tail_tol)
    summation: SummationMode = SummationMode.COMPENSATED

    def __post_init__(self) -> None:
        w = _check_finite("w", self.w)
        if w <= 0.0:
            raise InvalidArgumentError(f"w must be > 0, got {self.w!r}")
        _check_finite("c", self.c)
        object.__setattr__(self, "summation", summation_mode(self.summation))


# ───────────────────────────── ERROR SERIES ────────────────────────────────
class ErrorRow(NamedTuple):
    param: float
    approx: float
    reference: float
    abs_err: float


@dataclass
class ErrorSeries:
    """(param, approx, reference, |approx − reference|) rows in insertion order."""

    rows: List[ErrorRow] = field(default_factory=list)

    def add(self, param: float, approx: float, reference: float) -> ErrorRow:
        row = ErrorRow(float(param), float(approx), float(reference), abs(float(approx) - float(reference)))
        self.rows.append(row)
        return row

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[ErrorRow]:
        return iter(self.rows)

    @property
    def params(self) -> np.ndarray:
        return np.array([r.param for r in self.rows], dtype=float)

    @property
    def abs_errs(self) -> np.ndarray:
        return np.array([r.abs_err for r in self.rows], dtype=float)


# ───────────────────────────── HELPERS ─────────────────────────────────────
def _check_rate(name: str, value: float) -> float:
    value = _check_finite(name, value)
    if value <= 0.0:
        raise InvalidArgumentError(f"{name} must be > 0, got {value!r}")
    return value


def _check_count(name: str, value: int) -> int:
    if int(value) != value or value < 0:
        raise InvalidArgumentError(f"{name} must be an int >= 0, got {value!r}")
    return int(value)


def _samples(f: Signal, ks: np.ndarray, w: float) -> np.ndarray:
    values = f.at_log(ks / w)
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(ks[np.argmax(bad)])
        where = math.exp(k / w)
        raise InvalidSampleError(f"non-finite sample f(e^{{{k}/{w:g}}})", abscissa=where)
    return values


def _window(kernel: Kernel, f: Signal, plan: SamplingPlan, u: float) -> Tuple[int, int]:
    window = plan.window
    if kernel.compact and window.kind is not WindowKind.RADIUS:
        R = kernel.support_log_radius
        # |u − k| ≤ R; knots contribute 0 except for B_1's right end.
        return math.ceil(u - R), math.floor(u + R)
    if window.kind is WindowKind.COMPACT_EXACT:
        raise UnsupportedKernelError(f"kernel {kernel.name} has no compact support")
    k0 = round(u)
    if window.kind is WindowKind.RADIUS:
        return k0 - window.radius, k0 + window.radius
    if f.bound is None:
        raise UnsupportedKernelError("a tail tolerance needs a signal with a known sup bound")
    scale = max(f.bound, np.finfo(float).tiny)
    K = kernel.window_for(window.tol * scale, power=0.0, scale=scale)
    log.debug("window %s: K=%d for tol %.1e·%g", kernel.name, K, window.tol, scale)
    return k0 - K, k0 + K


# ───────────────────────────── CLASSICAL SERIES ────────────────────────────
def classical_partial_sum(
    f: Signal,
    c: float,
    T: float,
    N: int,
    x: float,
    summation: SummationMode | str = SummationMode.COMPENSATED,
) -> float:
    """S_N f(x) = Σ_{|k|≤N} f(e^{k/T})·lin_{c/T}(e^{−k}x^T)."""
    T = _check_rate("T", T)
    N = _check_count("N", N)
    c = _check_finite("c", c)
    u = T * log_positive(x)
    ks = outward_order(-N, N, round(u))
    kernel = lin_kernel(c / T)
    terms = _samples(f, ks, T) * kernel.at_log(u - ks)
    return accumulate(terms, summation)


def fejer_value(rho: float, c: float, x: float) -> float:
    """F^c_ρ(x) from the closed form."""
    return fejer_signal(rho, c)(x)


def classical_fejer_sum(rho: float, c: float, N: int, x: float) -> float:
    """S_N of the classical series for F^c_ρ sampled at e^{kπ/ρ}.

    Only k = 0 and odd k carry samples. For odd k, sinc(u − k) =
    −sin(πu)/(π(u − k)), so sin(πu) is computed once and factored out of
    the odd-k sum.
    """
    rho = _check_rate("rho", rho)
    c = _check_finite("c", c)
    N = _check_count("N", N)
    t = log_positive(x)
    u = rho / math.pi * t
    scale = math.exp(-c * t)
    centre = rho / (2.0 * math.pi)
    odd_weight = 2.0 * rho / math.pi**3

    if u == math.floor(u):
        j = int(u)
        if abs(j) > N or (j != 0 and j % 2 == 0):
            return 0.0
        return scale * (centre if j == 0 else odd_weight / j**2)

    k0 = round(u)
    ks = outward_order(-N, N, k0)
    ks = ks[ks % 2 != 0].astype(float)
    s = accumulate(1.0 / (ks * ks * (u - ks)), SummationMode.COMPENSATED)
    return scale * (centre * sinc(u) - odd_weight / math.pi * sinpi(u) * s)


def classical_truncation_error(rho: float, c: float, N: int, x: float) -> float:
    """|F^c_ρ(x) − S_N F^c_ρ(x)| for the classical series."""
    return abs(fejer_value(rho, c, x) - classical_fejer_sum(rho, c, N, x))


def classical_truncation_bound(rho: float, N: int) -> float:
    """4ρ/(π⁴N); valid once N ≥ 2·max{x^{−c}, (ρ/π)|log x|}."""
    rho = _check_rate("rho", rho)
    N = _check_count("N", N)
    if N == 0:
        return math.inf
    return 4.0 * rho / (math.pi**4 * N)


# ───────────────────────────── GENERALISED SERIES ──────────────────────────
def _indices(kernel: Kernel, f: Signal, plan: SamplingPlan, x: float) -> Tuple[float, np.ndarray]:
    if plan.c != kernel.c:
        raise InvalidArgumentError(f"plan is for c={plan.c:g}, kernel {kernel.name} has c={kernel.c:g}")
    u = plan.w * log_positive(x)
    lo, hi = _window(kernel, f, plan, u)
    return u, outward_order(lo, hi, round(u))


def generalized_sample(kernel: Kernel, f: Signal, plan: SamplingPlan, x: float) -> float:
    """(S_w^φ f)(x) over the plan's index window."""
    u, ks = _indices(kernel, f, plan, x)
    terms = _samples(f, ks, plan.w) * kernel.at_log(u - ks)
    return accumulate(terms, plan.summation)


@lru_cache(maxsize=None)
def _b2() -> Kernel:
    return bspline_kernel(2)


@lru_cache(maxsize=None)
def _jackson(norm_mode: NormMode) -> Kernel:
    return jackson_kernel(1.0, 2, 0.0, norm_mode)


def _fejer_pi_sample(k: int, w: float) -> float:
    if k == 0:
        return 0.5
    return 2.0 * w * w / math.pi**2 * sinpi(k / (2.0 * w)) ** 2 / (k * k)


def bspline2_closed_form(f: Signal, w: float, x: float) -> float:
    """S_w^{B_2} F^0_π(x) by the two-term formula of the branch holding w·log x.

    Exact knots (w·log x integral) go through :func:`generalized_sample`.
    """
    if f.tag != FEJER_PI_TAG:
        raise InvalidArgumentError(f"closed form needs the F^0_π signal, got tag {f.tag!r}")
    w = _check_rate("w", w)
    u = w * log_positive(x)
    j = math.floor(u)
    if u == j:
        return generalized_sample(_b2(), f, SamplingPlan(w, window=Window.compact_exact()), x)

    frac = u - j
    if j >= 1 or j <= -2:
        return _fejer_pi_sample(j, w) * (1.0 - frac) + _fejer_pi_sample(j + 1, w) * frac
    if j == 0:
        # 1 < x^w < e
        return 0.5 * (1.0 - u) + _fejer_pi_sample(1, w) * u
    # e^{-1} < x^w < 1
    return 0.5 * (1.0 + u) + _fejer_pi_sample(-1, w) * (-u)


def jackson_sample(
    f: Signal,
    w: float,
    x: float,
    norm_mode: NormMode | str = NormMode.PAPER,
    window: Window | None = None,
) -> float:
    """(S_w^{J_{1,2}} f)(x); for F^0_π this is (C/2)·Σ sinc²(k/2w)·sinc⁴((w log x − k)/4π)."""
    kernel = _jackson(norm_mode_of(norm_mode))
    plan = SamplingPlan(w, window=window or Window.tail_tol())
    return generalized_sample(kernel, f, plan, x)


# ───────────────────────────── ERRORS ──────────────────────────────────────
def truncation_error(
    kernel: Kernel,
    f: Signal,
    w: float,
    N: int,
    x: float,
    tol: float = TAIL_TOL,
) -> float:
    """|Σ_{|k|≥N+1} f(e^{k/w})·φ(e^{−k}x^w)|.

    Non-compact kernels are summed out to the tail-tolerance window around
    w·log x, or to 8(N+1) if that is wider.
    """
    N = _check_count("N", N)
    plan = SamplingPlan(w, c=kernel.c, window=Window.tail_tol(tol))
    u, ks = _indices(kernel, f, plan, x)
    if not kernel.compact:
        reach = 8 * (N + 1)
        if ks.size == 0 or max(abs(int(ks.min())), abs(int(ks.max()))) < reach:
            lo = min(int(ks.min()), -reach) if ks.size else -reach
            hi = max(int(ks.max()), reach) if ks.size else reach
            ks = outward_order(lo, hi, round(u))
    ks = ks[np.abs(ks) > N]
    if ks.size == 0:
        return 0.0
    terms = _samples(f, ks, plan.w) * kernel.at_log(u - ks)
    return abs(accumulate(terms, SummationMode.COMPENSATED))


def aliasing_error(kernel: Kernel, f: Signal, plan: SamplingPlan, x: float) -> float:
    """|f(x) − (S_w^φ f)(x)|."""
    return abs(f(x) - generalized_sample(kernel, f, plan, x))


__all__ = [
    "WindowKind",
    "Window",
    "SamplingPlan",
    "ErrorRow",
    "ErrorSeries",
    "classical_partial_sum",
    "classical_fejer_sum",
    "classical_truncation_error",
    "classical_truncation_bound",
    "fejer_value",
    "generalized_sample",
    "bspline2_closed_form",
    "jackson_sample",
    "truncation_error",
    "aliasing_error",
]
