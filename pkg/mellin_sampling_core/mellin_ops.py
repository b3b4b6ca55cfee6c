"""
Mellin-side operators on signals defined over (0, ∞).

A :class:`Signal` wraps f together with what the sampling code may rely on:
a sup bound, a Mellin band limit and, when available, a vectorised
evaluator of t ↦ f(e^t). Working in t = log x is how every operator here
is implemented; x-space callables are only wrapped.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, NamedTuple, Tuple

import numpy as np

from .constants import (
    FD_STEP_HIGH_ORDER,
    FD_STEP_LOW_ORDER,
    GRID_HI,
    GRID_LO,
    GRID_POINTS,
    MAX_DERIVATIVE_ORDER,
)
from .exceptions import ConvergenceError, InvalidArgumentError
from .quadrature import QuadSpec, trapezoid_line
from .special_fn import _check_finite, log_positive, sinc_array

log = logging.getLogger(__name__)


# ───────────────────────────── TYPES ───────────────────────────────────────
@dataclass(frozen=True)
class Signal:
    """An evaluatable f on (0, ∞) plus the metadata the operators use."""

    func: Callable[[float], float]
    bound: float | None = None
    band_limit: float | None = None
    mellin_c: float = 0.0
    log_func: Callable[[np.ndarray], np.ndarray] | None = None
    tag: str | None = None

    def __call__(self, x: float) -> float:
        return float(self.func(x))

    def at_log(self, t) -> np.ndarray:
        """f(e^t), vectorised over ``t``."""
        t = np.asarray(t, dtype=float)
        if self.log_func is not None:
            return np.broadcast_to(np.asarray(self.log_func(t), dtype=float), t.shape)
        flat = np.fromiter(
            (self.func(math.exp(v)) for v in t.ravel()), dtype=float, count=t.size
        )
        return flat.reshape(t.shape)


@dataclass(frozen=True)
class LogGrid:
    """``points`` equispaced values of log x over [lo, hi]."""

    lo: float = GRID_LO
    hi: float = GRID_HI
    points: int = GRID_POINTS

    def __post_init__(self) -> None:
        if int(self.points) != self.points or self.points < 1:
            raise InvalidArgumentError(f"grid needs at least one point, got {self.points!r}")
        lo = _check_finite("grid.lo", self.lo)
        hi = _check_finite("grid.hi", self.hi)
        if hi < lo or (self.points > 1 and hi == lo):
            raise InvalidArgumentError(f"grid bounds must satisfy lo < hi, got [{lo}, {hi}]")

    @property
    def logs(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, int(self.points))

    @property
    def xs(self) -> np.ndarray:
        return np.exp(self.logs)

    @property
    def step(self) -> float:
        if self.points == 1:
            return math.inf
        return (self.hi - self.lo) / (self.points - 1)


class TransformResult(NamedTuple):
    value: complex
    err_est: float


# ───────────────────────────── SIGNALS ─────────────────────────────────────
def fejer_tag(rho: float, c: float) -> str:
    return f"fejer(rho={float(rho)!r}, c={float(c)!r})"


FEJER_PI_TAG = fejer_tag(math.pi, 0.0)


def fejer_signal(rho: float = math.pi, c: float = 0.0) -> Signal:
    """F^c_ρ(x) = x^{-c}·ρ/(2π)·sinc²(ρ log x/(2π)), Mellin band-limited to ρ."""
    rho = _check_finite("rho", rho)
    c = _check_finite("c", c)
    if rho <= 0.0:
        raise InvalidArgumentError(f"rho must be > 0, got {rho!r}")
    amp = rho / (2.0 * math.pi)

    def at_log(t: np.ndarray) -> np.ndarray:
        return amp * np.exp(-c * t) * sinc_array(t / (2.0 * math.pi) * rho) ** 2

    return Signal(
        func=lambda x: float(at_log(np.asarray(log_positive(x)))),
        bound=amp if c == 0.0 else None,
        band_limit=rho,
        mellin_c=c,
        log_func=at_log,
        tag=fejer_tag(rho, c),
    )


def constant_signal(value: float = 1.0) -> Signal:
    value = _check_finite("value", value)
    return Signal(
        func=lambda x: value,
        bound=abs(value),
        log_func=lambda t: np.full(np.shape(t), value),
        tag="constant",
    )


def log_signal() -> Signal:
    """f(x) = log x; unbounded, handy for exact derivative checks."""
    return Signal(func=math.log, log_func=lambda t: np.array(t, dtype=float), tag="log")


# ───────────────────────────── STIRLING NUMBERS ────────────────────────────
@dataclass(frozen=True)
class StirlingTable:
    """S_c(r, k) for 0 ≤ k ≤ r ≤ r_max, filled before it is shared."""

    c: float
    r_max: int
    entries: Dict[Tuple[int, int], float] = field(repr=False)

    @classmethod
    def build(cls, c: float, r_max: int) -> "StirlingTable":
        entries: Dict[Tuple[int, int], float] = {(0, 0): 1.0}
        for r in range(r_max):
            for k in range(r + 2):
                left = entries.get((r, k - 1), 0.0)
                here = entries.get((r, k), 0.0)
                entries[(r + 1, k)] = left + (c + k) * here
        return cls(c=c, r_max=r_max, entries=entries)

    def __getitem__(self, rk: Tuple[int, int]) -> float:
        return self.entries[rk]

    def max_residual(self) -> float:
        """Largest violation of the defining recurrence over stored rows."""
        worst = 0.0
        for r in range(self.r_max):
            for k in range(1, r + 1):
                lhs = self.entries[(r + 1, k)]
                rhs = self.entries[(r, k - 1)] + (self.c + k) * self.entries[(r, k)]
                worst = max(worst, abs(lhs - rhs))
            worst = max(worst, abs(self.entries[(r, 0)] - self.c**r))
            worst = max(worst, abs(self.entries[(r, r)] - 1.0))
        return worst


@lru_cache(maxsize=64)
def _stirling_table(c: float, r_max: int) -> StirlingTable:
    return StirlingTable.build(c, r_max)


def _check_order(name: str, value: int, lo: int = 0) -> int:
    if int(value) != value or value < lo:
        raise InvalidArgumentError(f"{name} must be an int >= {lo}, got {value!r}")
    return int(value)


def stirling(c: float, r: int, k: int) -> float:
    """Generalised Stirling number of the second kind S_c(r, k)."""
    c = _check_finite("c", c)
    r = _check_order("r", r)
    k = _check_order("k", k)
    if k > r:
        raise InvalidArgumentError(f"k must lie in 0..r, got k={k}, r={r}")
    size = 8
    while size < r:
        size *= 2
    return _stirling_table(c, size)[r, k]


@lru_cache(maxsize=None)
def stirling_first(k: int, j: int) -> int:
    """Signed Stirling numbers of the first kind: x^k D^k = Σ_j s(k,j) Θ^j."""
    if k == j:
        return 1
    if j <= 0 or j > k:
        return 0
    return stirling_first(k - 1, j - 1) - (k - 1) * stirling_first(k - 1, j)


# ───────────────────────────── DERIVATIVES ─────────────────────────────────
# central stencils on offsets -3..3; divide by h**order
_STENCILS = {
    1: (0.0, 0.0, -0.5, 0.0, 0.5, 0.0, 0.0),
    2: (0.0, 0.0, 1.0, -2.0, 1.0, 0.0, 0.0),
    3: (0.0, -0.5, 1.0, 0.0, -1.0, 0.5, 0.0),
    4: (0.0, 1.0, -4.0, 6.0, -4.0, 1.0, 0.0),
    5: (-0.5, 2.0, -2.5, 0.0, 2.5, -2.0, 0.5),
    6: (1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0),
}


def _log_derivatives(f: Signal, t0: float, r: int, h: float) -> np.ndarray:
    """d^j/dt^j f(e^{t0+t}) at t=0 for j = 0..r, second-order accurate."""
    nodes = t0 + h * np.arange(-3, 4, dtype=float)
    g = f.at_log(nodes)
    out = np.empty(r + 1)
    out[0] = g[3]
    for j in range(1, r + 1):
        out[j] = float(np.dot(_STENCILS[j], g)) / h**j
    return out


def mellin_derivative(
    f: Signal, x: float, r: int, c: float = 0.0, h: float | None = None
) -> float:
    """Θ_c^r f(x) = Σ_k S_c(r,k)·x^k f^{(k)}(x), error O(h²).

    x^k f^{(k)}(x) comes from central differences of t ↦ f(x e^t) on the
    nodes x·e^{jh} through the signed Stirling numbers of the first kind.
    """
    t0 = log_positive(x)
    r = _check_order("r", r, lo=1)
    c = _check_finite("c", c)
    if r > MAX_DERIVATIVE_ORDER:
        raise InvalidArgumentError(
            f"Mellin derivatives above order {MAX_DERIVATIVE_ORDER} are not provided"
        )
    if h is None:
        h = FD_STEP_LOW_ORDER if r <= 2 else FD_STEP_HIGH_ORDER
    h = _check_finite("h", h)
    if h <= 0.0:
        raise InvalidArgumentError(f"h must be > 0, got {h!r}")

    theta = _log_derivatives(f, t0, r, h)
    total = 0.0
    for k in range(r + 1):
        xk_fk = sum(stirling_first(k, j) * theta[j] for j in range(k + 1))
        total += stirling(c, r, k) * xk_fk
    return total


def mellin_taylor(f: Signal, v: float, t: float, n: int) -> float:
    """Σ_{j≤n} Θ^j f(v)·log^j t / j!  (c = 0 Taylor polynomial at v)."""
    n = _check_order("n", n)
    s = log_positive(t, "t")
    total = f(v)
    for j in range(1, n + 1):
        total += mellin_derivative(f, v, j) * s**j / math.factorial(j)
    return total


def taylor_remainder(f: Signal, v: float, t: float, n: int) -> float:
    """h(t) in f(tv) = P_n(t) + h(t)·log^n t; tends to 0 as t → 1."""
    s = log_positive(t, "t")
    if s == 0.0:
        raise InvalidArgumentError("remainder undefined at t = 1")
    return (f(t * v) - mellin_taylor(f, v, t, n)) / s**n


# ───────────────────────────── MODULUS / TRANSLATION ───────────────────────
def log_modulus(f: Signal, delta: float, grid: LogGrid) -> float:
    """Grid estimate (a lower bound) of sup |f(s) − f(t)| over |log s − log t| ≤ δ.

    Only whole lags are seen, so δ acts as δ_g = floor(δ/step)·step. The
    estimate therefore satisfies ω(f, λδ) ≤ (λ+1)·ω(f, δ) only up to the
    grid slack λ·(δ/δ_g − 1)·ω(f, δ), i.e. with λ replaced by λδ/δ_g. The
    slack is zero when δ is a whole number of steps.
    """
    delta = _check_finite("delta", delta)
    if delta <= 0.0:
        raise InvalidArgumentError(f"delta must be > 0, got {delta!r}")
    values = f.at_log(grid.logs)
    lags = min(int(math.floor(delta / grid.step + 1e-9)), values.size - 1)
    best = 0.0
    for lag in range(1, lags + 1):
        best = max(best, float(np.max(np.abs(values[lag:] - values[:-lag]))))
    return best


def mellin_translation(f: Signal, h: float, c: float = 0.0) -> Signal:
    """(τ_h^c f)(x) = h^c·f(hx)."""
    log_h = log_positive(h, "h")
    c = _check_finite("c", c)
    factor = math.exp(c * log_h)
    return Signal(
        func=lambda x: factor * f(h * x),
        bound=None if f.bound is None else factor * f.bound,
        band_limit=f.band_limit,
        mellin_c=f.mellin_c,
        log_func=lambda t: factor * f.at_log(np.asarray(t, dtype=float) + log_h),
    )


# ───────────────────────────── TRANSFORM ───────────────────────────────────
def mellin_transform_numeric(
    f: Signal, c: float, v: float, quad: QuadSpec, tail_bound: float = 0.0
) -> TransformResult:
    """[f]^∧_M(c + iv) = ∫ e^{(c+iv)t} f(e^t) dt by the trapezoid rule."""
    c = _check_finite("c", c)
    v = _check_finite("v", v)

    def weighted(t: np.ndarray) -> np.ndarray:
        return np.exp(c * t) * f.at_log(t)

    re = trapezoid_line(lambda t: weighted(t) * np.cos(v * t), quad, tail_bound)
    im = trapezoid_line(lambda t: weighted(t) * np.sin(v * t), quad, tail_bound)
    value = complex(re.value, im.value)
    err = math.hypot(re.err_est, im.err_est)
    log.debug("Mellin transform at %g%+gi: %r ± %.2e", c, v, value, err)
    if err > quad.tol:
        raise ConvergenceError(
            f"Mellin transform at s={c}+{v}i did not converge (err {err:.3e})",
            last_estimate=value,
            err_est=err,
        )
    return TransformResult(value, err)


__all__ = [
    "Signal",
    "LogGrid",
    "TransformResult",
    "FEJER_PI_TAG",
    "fejer_tag",
    "fejer_signal",
    "constant_signal",
    "log_signal",
    "StirlingTable",
    "stirling",
    "stirling_first",
    "mellin_derivative",
    "mellin_taylor",
    "taylor_remainder",
    "log_modulus",
    "mellin_translation",
    "mellin_transform_numeric",
]
