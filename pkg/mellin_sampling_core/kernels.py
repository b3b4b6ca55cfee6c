"""
Kernel families for the generalised exponential sampling series and the
diagnostics that certify them.

Every kernel is stored through its log-domain profile t ↦ φ(e^t). Sums of
the form Σ_k φ(e^{-k}u) are therefore sums of φ(e^{t-k}) with t = log u,
taken over a window of integers around round(t); what falls outside the
window is covered by the kernel's tail bound.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

import numpy as np
from scipy.special import comb, polygamma, zeta

from .constants import MAX_WINDOW, PAPER_JACKSON_INVERSE_NORM
from .exceptions import DivergenceError, InvalidArgumentError, UnsupportedKernelError
from .mellin_ops import LogGrid, Signal, fejer_tag
from .quadrature import NormalizationMode, jackson_normalization
from .special_fn import _check_finite, log_positive, sinc_array
from .summation import SummationMode, accumulate, outward_order

log = logging.getLogger(__name__)


class NormMode(str, enum.Enum):
    """Which Jackson constant to use: exact, or the printed C."""

    ANALYTIC = "analytic"
    PAPER = "paper"


# ───────────────────────────── TAIL MODEL ──────────────────────────────────
@dataclass(frozen=True)
class FejerTail:
    """Tail sums of the c = 0 Fejér kernel beyond a window [lo, hi].

    φ(e^m) = (1 − cos ρm)/(πρ m²). The 1/m² part sums to trigamma values;
    the cosine part is bounded by Abel summation, |Σ cos| ≤ 1/|sin(ρ/2)|.
    """

    rho: float

    def mean(self, u: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        right = polygamma(1, hi + 1.0 - u)
        left = polygamma(1, u - lo + 1.0)
        return (right + left) / (math.pi * self.rho)

    def bound(self, u: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        s = abs(math.sin(0.5 * self.rho))
        near = (hi + 1.0 - u) ** -2 + (u - lo + 1.0) ** -2
        return near / (math.pi * self.rho * s)

    def window_for(self, tol: float) -> int:
        s = abs(math.sin(0.5 * self.rho))
        return int(math.ceil(math.sqrt(2.0 / (math.pi * self.rho * s * tol))))


# ───────────────────────────── KERNEL ──────────────────────────────────────
@dataclass(frozen=True)
class Kernel:
    """φ on (0, ∞) through ``log_eval(t) = φ(e^t)``, plus analytic metadata.

    ``tail_constant`` C and ``decay_exponent`` p promise |φ(e^t)| ≤ C|t|^{-p}.
    ``known_moments`` maps j to m_j when it is x-independent, or to None when
    the moment diverges.
    """

    name: str
    log_eval: Callable[[np.ndarray], np.ndarray]
    c: float = 0.0
    support_log_radius: float | None = None
    decay_exponent: float | None = None
    tail_constant: float | None = None
    known_mellin_transform: Callable[[np.ndarray], np.ndarray] | None = None
    known_moments: Mapping[int, float | None] = field(default_factory=dict)
    band_limit: float | None = None
    tail_model: FejerTail | None = None

    def __call__(self, x: float) -> float:
        return float(self.at_log(log_positive(x)))

    def at_log(self, t) -> np.ndarray:
        return np.asarray(self.log_eval(np.asarray(t, dtype=float)), dtype=float)

    @property
    def compact(self) -> bool:
        return self.support_log_radius is not None

    def _decay_margin(self, power: float) -> float:
        if self.decay_exponent is None or self.tail_constant is None:
            raise UnsupportedKernelError(f"kernel {self.name} carries no decay metadata")
        q = self.decay_exponent - power
        if q <= 1.0:
            raise DivergenceError(
                f"kernel {self.name}: Σ|φ|·|k − log u|^{power:g} diverges "
                f"(decay {self.decay_exponent:g})",
                order=power,
            )
        return q

    def tail_bound(self, radius: float, power: float = 0.0, scale: float = 1.0) -> float:
        """Bound on scale·Σ |φ(e^{t-k})|·|k − t|^power over |k − t| > radius."""
        if self.compact and radius >= self.support_log_radius:
            return 0.0
        q = self._decay_margin(power)
        radius = max(radius, 1.0)
        return 2.0 * scale * self.tail_constant * (radius**-q + radius ** (1.0 - q) / (q - 1.0))

    def window_for(self, tol: float, power: float = 0.0, scale: float = 1.0) -> int:
        """Smallest half-width K (centred at round(t)) whose tail bound is < tol."""
        if self.compact:
            return int(math.ceil(self.support_log_radius + 0.5))
        q = self._decay_margin(power)
        guess = (2.0 * scale * self.tail_constant / ((q - 1.0) * tol)) ** (1.0 / (q - 1.0))
        if guess > MAX_WINDOW:
            raise UnsupportedKernelError(
                f"kernel {self.name}: tolerance {tol:.1e} needs a window wider than {MAX_WINDOW}"
            )
        K = max(1, int(math.ceil(guess)))
        while self.tail_bound(K - 0.5, power, scale) >= tol:
            K = int(math.ceil(K * 1.01)) + 1
        return K

    def partition_window(self, tol: float) -> int:
        if self.tail_model is not None:
            return self.tail_model.window_for(tol)
        return self.window_for(tol)


# ───────────────────────────── B-SPLINES ───────────────────────────────────
def central_bspline(n: int, t) -> np.ndarray:
    """Central B-spline of order n on [-n/2, n/2] via truncated powers.

    (·)_+ is right-continuous and vanishes at 0, so B_1 is the indicator of
    (-1/2, 1/2].
    """
    t = np.asarray(t, dtype=float)
    if n == 2:
        return np.maximum(1.0 - np.abs(t), 0.0)
    half = 0.5 * n
    total = np.zeros_like(t)
    for j in range(n + 1):
        z = half + t - j
        if n == 1:
            part = np.where(z > 0.0, 1.0, 0.0)
        else:
            part = np.where(z > 0.0, z, 0.0) ** (n - 1)
        total = total + (-1) ** j * float(comb(n, j, exact=True)) * part
    total = total / math.factorial(n - 1)
    outside = ((t <= -half) | (t > half)) if n == 1 else (np.abs(t) >= half)
    return np.where(outside, 0.0, total)


def bspline_kernel(n: int, c: float = 0.0) -> Kernel:
    """B_{c,n}(x) = x^{-c}·B_n(log x)."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"B-spline order must be an int >= 1, got {n!r}")
    n = int(n)
    c = _check_finite("c", c)
    moments: Dict[int, float | None] = {0: 1.0, 1: 0.0}
    if n >= 3:
        moments[2] = n / 12.0
    return Kernel(
        name=f"B_{n}" if c == 0.0 else f"B_{{c={c:g},{n}}}",
        log_eval=lambda t: np.exp(-c * t) * central_bspline(n, t),
        c=c,
        support_log_radius=0.5 * n,
        known_mellin_transform=lambda v: sinc_array(np.asarray(v, dtype=float) / (2.0 * math.pi)) ** n,
        known_moments=moments,
    )


# ───────────────────────────── FEJÉR ───────────────────────────────────────
def fejer_kernel(rho: float, c: float = 0.0) -> Kernel:
    """F^c_ρ(x) = x^{-c}·ρ/(2π)·sinc²((ρ/π)·log √x)."""
    rho = _check_finite("rho", rho)
    c = _check_finite("c", c)
    if rho <= 0.0:
        raise InvalidArgumentError(f"rho must be > 0, got {rho!r}")
    amp = rho / (2.0 * math.pi)
    even = c == 0.0
    model = FejerTail(rho) if even and abs(math.sin(0.5 * rho)) > 1e-8 else None
    return Kernel(
        name=f"F^{c:g}_{rho:g}",
        log_eval=lambda t: amp * np.exp(-c * t) * sinc_array(t * rho / (2.0 * math.pi)) ** 2,
        c=c,
        decay_exponent=2.0 if even else None,
        tail_constant=2.0 / (math.pi * rho) if even else None,
        known_mellin_transform=lambda v: np.maximum(1.0 - np.abs(np.asarray(v, dtype=float)) / rho, 0.0),
        known_moments={0: 1.0, 1: None},
        band_limit=rho,
        tail_model=model,
    )


def fejer_tail_envelope(r: float) -> float:
    """(2/π)·r^{-1/2}·(1 + 2ζ(3/2)), the tail estimate quoted for F^0_π."""
    return 2.0 / math.pi / math.sqrt(r) * (1.0 + 2.0 * float(zeta(1.5)))


# ───────────────────────────── JACKSON ─────────────────────────────────────
def norm_mode_of(value: NormMode | str) -> NormMode:
    try:
        return NormMode(value)
    except ValueError as err:
        raise InvalidArgumentError(f"unknown norm mode {value!r}") from err


def jackson_constant(gamma: float = 1.0, beta: int = 2, norm_mode: NormMode | str = NormMode.ANALYTIC) -> float:
    norm_mode = norm_mode_of(norm_mode)
    if norm_mode is NormMode.PAPER:
        if (gamma, beta) != (1.0, 2):
            raise InvalidArgumentError("the printed constant exists only for J_{1,2}")
        return 1.0 / PAPER_JACKSON_INVERSE_NORM
    return jackson_normalization(gamma, beta, mode=NormalizationMode.ANALYTIC_WHEN_KNOWN)


def jackson_kernel(
    gamma: float = 1.0,
    beta: int = 2,
    c: float = 0.0,
    norm_mode: NormMode | str = NormMode.ANALYTIC,
) -> Kernel:
    """J_{γ,β}(x) = d·x^{-c}·sinc^{2β}(log x/(2γβπ))."""
    c = _check_finite("c", c)
    d = jackson_constant(gamma, beta, norm_mode)
    exact = jackson_normalization(gamma, beta)
    ratio = d / exact
    a = 2.0 * gamma * beta
    scale = a * math.pi
    power = 2 * beta
    even = c == 0.0

    peak = float(central_bspline(power, 0.0))

    def transform(v) -> np.ndarray:
        return ratio * central_bspline(power, gamma * beta * np.asarray(v, dtype=float)) / peak

    moments: Dict[int, float | None] = {0: ratio, 1: 0.0}
    if beta >= 2:
        second = central_bspline(power - 2, np.array([1.0, 0.0, -1.0]))
        curvature = float(second[0] - 2.0 * second[1] + second[2])
        moments[2] = -ratio * (gamma * beta) ** 2 * curvature / peak
    else:
        moments[2] = None

    return Kernel(
        name=f"J_{{{gamma:g},{beta}}}",
        log_eval=lambda t: d * np.exp(-c * t) * sinc_array(t / scale) ** power,
        c=c,
        decay_exponent=float(power) if even else None,
        tail_constant=d * a**power if even else None,
        known_mellin_transform=transform,
        known_moments=moments,
        band_limit=1.0 / gamma,
    )


# ───────────────────────────── lin_c ───────────────────────────────────────
def lin_kernel(c: float = 0.0) -> Kernel:
    """lin_c(x) = x^{-c}·sinc(log x), the classical interpolation kernel."""
    c = _check_finite("c", c)
    even = c == 0.0
    return Kernel(
        name=f"lin_{c:g}",
        log_eval=lambda t: np.exp(-c * t) * sinc_array(t),
        c=c,
        decay_exponent=1.0 if even else None,
        tail_constant=1.0 / math.pi if even else None,
        known_mellin_transform=lambda v: np.where(np.abs(np.asarray(v, dtype=float)) < math.pi, 1.0, 0.0),
        known_moments={0: 1.0, 1: None},
        band_limit=math.pi,
    )


def signal_from_kernel(kernel: Kernel) -> Signal:
    """View a kernel as a signal, e.g. F^0_π as the test function."""
    peak = float(kernel.at_log(0.0)) if kernel.c == 0.0 else None
    tag = None
    if kernel.name.startswith("F^") and kernel.band_limit is not None:
        tag = fejer_tag(kernel.band_limit, kernel.c)
    return Signal(
        func=kernel,
        bound=None if peak is None else abs(peak),
        band_limit=kernel.band_limit,
        mellin_c=kernel.c,
        log_func=kernel.at_log,
        tag=tag,
    )


# ───────────────────────────── WINDOW SUMS ─────────────────────────────────
def _half_width(kernel: Kernel, K: int) -> int:
    if kernel.compact:
        return int(math.ceil(kernel.support_log_radius + 0.5))
    if int(K) != K or K < 1:
        raise InvalidArgumentError(f"window half-width must be an int >= 1, got {K!r}")
    return int(K)


def _grid_sums(
    kernel: Kernel,
    us: np.ndarray,
    K: int,
    weight: Callable[[np.ndarray], np.ndarray] | None = None,
    absolute: bool = False,
) -> np.ndarray:
    """Σ_{|k − k0| ≤ K} φ(e^{u−k})·weight(k − u) for every u, k0 = round(u)."""
    k0 = np.rint(us)
    total = np.zeros_like(us)
    for m in outward_order(-K, K, 0):
        dist = (k0 + m) - us
        term = kernel.at_log(-dist)
        if absolute:
            term = np.abs(term)
        if weight is not None:
            term = term * weight(dist)
        total = total + term
    return total


def partition_deviation(kernel: Kernel, grid: LogGrid, K: int) -> float:
    """max over the grid of |Σ_{|j−k0|≤K} φ(e^{−j}u) − 1|, no tail correction."""
    us = grid.logs
    total = _grid_sums(kernel, us, _half_width(kernel, K))
    return float(np.max(np.abs(total - 1.0)))


def partition_check(kernel: Kernel, grid: LogGrid, K: int) -> float:
    """Partition-of-unity deviation plus a certified bound for the rest."""
    us = grid.logs
    K = _half_width(kernel, K)
    total = _grid_sums(kernel, us, K)
    if kernel.compact:
        bound = 0.0
    elif kernel.tail_model is not None:
        k0 = np.rint(us)
        total = total + kernel.tail_model.mean(us, k0 - K, k0 + K)
        bound = float(np.max(kernel.tail_model.bound(us, k0 - K, k0 + K)))
    else:
        bound = kernel.tail_bound(K - 0.5)
    dev = float(np.max(np.abs(total - 1.0)))
    log.debug("partition %s: K=%d dev=%.3e tail=%.3e", kernel.name, K, dev, bound)
    return dev + bound


def _local_indices(kernel: Kernel, t: float, K: int) -> np.ndarray:
    if kernel.compact:
        R = kernel.support_log_radius
        lo = math.floor(t - R)
        hi = math.ceil(t + R)
    else:
        k0 = int(round(t))
        lo, hi = k0 - K, k0 + K
    return outward_order(lo, hi, int(round(t)))


def moment_m(kernel: Kernel, j: int, x: float, K: int = 4096) -> float:
    """Algebraic moment m_j(φ, x) = Σ φ(e^{−k}x)·(k − log x)^j over |k − log x| ≲ K.

    Only the windowed sum is returned. For non-compact kernels the omitted
    tail is bounded by ``kernel.tail_bound(K − ½, j)``; callers that need a
    certified value add it themselves.
    """
    if int(j) != j or j < 0:
        raise InvalidArgumentError(f"moment order must be an int >= 0, got {j!r}")
    t = log_positive(x)
    if kernel.known_moments.get(int(j), 0.0) is None and not kernel.compact:
        raise DivergenceError(f"m_{j} of {kernel.name} diverges", order=j)
    if not kernel.compact:
        kernel._decay_margin(j)
    ks = _local_indices(kernel, t, _half_width(kernel, K))
    dist = ks - t
    terms = kernel.at_log(-dist) * dist**j
    return accumulate(terms, SummationMode.COMPENSATED)


def moment_M(kernel: Kernel, alpha: float, x: float, K: int = 4096) -> float:
    """Absolute moment M_α(φ, x) = Σ |φ(e^{−k}x)|·|k − log x|^α over |k − log x| ≲ K.

    The truncation is the caller's to account for: ``kernel.tail_bound(K − ½, α)``
    bounds what the window leaves out.
    """
    alpha = _check_finite("alpha", alpha)
    if alpha < 0.0:
        raise InvalidArgumentError(f"alpha must be >= 0, got {alpha!r}")
    t = log_positive(x)
    if not kernel.compact:
        kernel._decay_margin(alpha)
    ks = _local_indices(kernel, t, _half_width(kernel, K))
    dist = np.abs(ks - t)
    terms = np.abs(kernel.at_log(t - ks)) * dist**alpha
    return accumulate(terms, SummationMode.COMPENSATED)


def decay_profile(
    kernel: Kernel,
    radii: Sequence[float],
    grid: LogGrid,
    power: int = 0,
    K: int = 4096,
) -> List[Tuple[float, float]]:
    """sup over the grid of Σ_{|k−log u|>r} |φ(e^{−k}u)|·|k − log u|^power."""
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])) or any(r < 0 for r in radii):
        raise InvalidArgumentError("radii must be nonnegative and increasing")
    K = _half_width(kernel, K)
    tail = 0.0 if kernel.compact else kernel.tail_bound(K - 0.5, power)
    us = grid.logs
    k0 = np.rint(us)
    sums = np.zeros((len(radii), us.size))
    cut = np.asarray(radii)[:, None]
    for m in outward_order(-K, K, 0):
        offset = us - (k0 + m)
        dist = np.abs(offset)
        term = np.abs(kernel.at_log(offset)) * dist**power
        sums += np.where(dist[None, :] > cut, term[None, :], 0.0)
    return [(r, float(np.max(row)) + tail) for r, row in zip(radii, sums)]


def poisson_check(kernel: Kernel, x: float, modes: int, K: int = 4096) -> Tuple[float, float]:
    """Both sides of Σ φ(e^k x)(e^k x)^c = Σ_{|m|≤modes} [φ]^∧_M(c + 2πmi)·x^{−2πmi}."""
    if kernel.known_mellin_transform is None:
        raise UnsupportedKernelError(f"kernel {kernel.name} has no known Mellin transform")
    if int(modes) != modes or modes < 0:
        raise InvalidArgumentError(f"modes must be an int >= 0, got {modes!r}")
    t = log_positive(x)
    ks = _local_indices(kernel, -t, _half_width(kernel, K))
    s = t + ks
    lhs = accumulate(kernel.at_log(s) * np.exp(kernel.c * s), SummationMode.COMPENSATED)
    freq = 2.0 * math.pi * np.arange(0, int(modes) + 1, dtype=float)
    values = np.asarray(kernel.known_mellin_transform(freq), dtype=float)
    waves = np.cos(freq * t)
    rhs = float(values[0]) + 2.0 * accumulate(values[1:] * waves[1:], SummationMode.COMPENSATED)
    return lhs, rhs


# ───────────────────────────── REPORT ──────────────────────────────────────
@dataclass(frozen=True)
class ConditionReport:
    partition_max_dev: float
    M0: float
    tail_profile: List[Tuple[float, float]]
    moment_x_variation: Dict[int, float]
    moments: Dict[int, float | None]
    divergent_orders: Tuple[int, ...] = ()


def condition_report(
    kernel: Kernel,
    grid: LogGrid,
    radii: Sequence[float] = (1.0, 2.0, 4.0, 8.0, 16.0),
    K: int = 4096,
    orders: Sequence[int] = (1, 2),
) -> ConditionReport:
    """Measured class-Φ diagnostics for ``kernel`` over ``grid``."""
    K = _half_width(kernel, K)
    us = grid.logs
    partition = partition_check(kernel, grid, K)
    tail0 = 0.0 if kernel.compact else kernel.tail_bound(K - 0.5)
    M0 = float(np.max(_grid_sums(kernel, us, K, absolute=True))) + tail0

    variation: Dict[int, float] = {}
    moments: Dict[int, float | None] = {}
    divergent: List[int] = []
    for j in orders:
        try:
            if not kernel.compact:
                kernel._decay_margin(j)
            if kernel.known_moments.get(j, 0.0) is None:
                raise DivergenceError(f"m_{j} diverges", order=j)
        except DivergenceError:
            variation[j] = math.inf
            moments[j] = None
            divergent.append(j)
            continue
        values = _grid_sums(kernel, us, K, weight=lambda dist, j=j: dist**j)
        variation[j] = float(np.max(values) - np.min(values))
        moments[j] = float(np.mean(values))

    return ConditionReport(
        partition_max_dev=partition,
        M0=M0,
        tail_profile=decay_profile(kernel, radii, grid, 0, K),
        moment_x_variation=variation,
        moments=moments,
        divergent_orders=tuple(divergent),
    )


__all__ = [
    "NormMode",
    "FejerTail",
    "Kernel",
    "central_bspline",
    "bspline_kernel",
    "fejer_kernel",
    "fejer_tail_envelope",
    "norm_mode_of",
    "jackson_constant",
    "jackson_kernel",
    "lin_kernel",
    "signal_from_kernel",
    "partition_deviation",
    "partition_check",
    "moment_m",
    "moment_M",
    "decay_profile",
    "poisson_check",
    "ConditionReport",
    "condition_report",
]
