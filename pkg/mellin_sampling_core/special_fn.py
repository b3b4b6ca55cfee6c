"""
Scalar and vectorised sinc / lin_c evaluation.

sinc(u) = sin(πu)/(πu) with sinc(0) = 1. The direct formula is used for
|u| ≥ SINC_TAYLOR_SWITCH and the even Taylor polynomial below it. sin(πu)
is computed after reducing u modulo 2, so sinc vanishes exactly at the
nonzero integers; the lin_c interpolation property relies on that.
"""
from __future__ import annotations

import math
from typing import Union

import numpy as np

from .constants import SINC_TAYLOR_SWITCH
from .exceptions import InvalidArgumentError

ArrayLike = Union[float, np.ndarray]


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
    return value


def log_positive(x: float, name: str = "x") -> float:
    """Return log(x) after checking x is a finite positive number."""
    x = _check_finite(name, x)
    if x <= 0.0:
        raise InvalidArgumentError(f"{name} must be > 0, got {x!r}")
    return math.log(x)


# ───────────────────────────── sin(πu) ─────────────────────────────────────
def _sinpi_scalar(a: float) -> float:
    n = round(2.0 * a)
    r = a - 0.5 * n  # |r| <= 1/4, exact
    q = n % 4
    if q == 0:
        return math.sin(math.pi * r)
    if q == 1:
        return math.cos(math.pi * r)
    if q == 2:
        return -math.sin(math.pi * r)
    return -math.cos(math.pi * r)


def sinpi(u: ArrayLike) -> ArrayLike:
    """sin(πu) with exact zeros at the integers."""
    if np.ndim(u) == 0:
        return _sinpi_scalar(float(u))
    u = np.asarray(u, dtype=float)
    n = np.rint(2.0 * u)
    r = u - 0.5 * n
    q = np.mod(n, 4.0)
    s = np.sin(np.pi * r)
    c = np.cos(np.pi * r)
    return np.select([q == 0.0, q == 1.0, q == 2.0], [s, c, -s], default=-c)


# ───────────────────────────── sinc ────────────────────────────────────────
def _sinc_taylor(a: ArrayLike) -> ArrayLike:
    z = (np.pi * a) ** 2
    return 1.0 - z / 6.0 + z * z / 120.0


def _sinc_direct(a: float) -> float:
    return _sinpi_scalar(a) / (math.pi * a)


def sinc(u: float) -> float:
    """Normalised sinc of a finite real; even by construction."""
    a = abs(_check_finite("u", u))
    if a < SINC_TAYLOR_SWITCH:
        return float(_sinc_taylor(a))
    return _sinc_direct(a)


def sinc_array(u: ArrayLike) -> np.ndarray:
    """Vectorised :func:`sinc`; no finiteness check (callers validate)."""
    a = np.abs(np.asarray(u, dtype=float))
    small = a < SINC_TAYLOR_SWITCH
    safe = np.where(small, 1.0, a)
    out = sinpi(safe) / (np.pi * safe)
    return np.where(small, _sinc_taylor(a), out)


# ───────────────────────────── lin_c ───────────────────────────────────────
def lin_c(x: float, c: float) -> float:
    """x^{-c}·sinc(log x), with lin_c(1) = 1 exactly."""
    t = log_positive(x)
    c = _check_finite("c", c)
    if t == 0.0:
        return 1.0
    return math.exp(-c * t) * sinc(t)


def lin_c_log(t: ArrayLike, c: float) -> np.ndarray:
    """lin_c evaluated at x = e^t, vectorised over t."""
    t = np.asarray(t, dtype=float)
    return np.exp(-c * t) * sinc_array(t)


__all__ = [
    "log_positive",
    "sinpi",
    "sinc",
    "sinc_array",
    "lin_c",
    "lin_c_log",
]
