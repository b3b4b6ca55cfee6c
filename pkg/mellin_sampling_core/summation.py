from __future__ import annotations

import enum
import math

import numpy as np

from .exceptions import InvalidArgumentError


class SummationMode(str, enum.Enum):
    PAIRWISE_OUTWARD = "pairwise_outward"
    COMPENSATED = "compensated"


def outward_order(lo: int, hi: int, center: int) -> np.ndarray:
    """Indices lo..hi as center, center+1, center-1, center+2, ...

    ``center`` is clipped into [lo, hi]; offsets that leave the range are
    skipped, so the result is a permutation of lo..hi.
    """
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    center = min(max(center, lo), hi)
    reach = max(hi - center, center - lo)
    step = np.arange(1, reach + 1, dtype=np.int64)
    offsets = np.empty(2 * reach + 1, dtype=np.int64)
    offsets[0] = 0
    offsets[1::2] = step
    offsets[2::2] = -step
    idx = center + offsets
    return idx[(idx >= lo) & (idx <= hi)]


def accumulate(terms: np.ndarray, mode: SummationMode | str) -> float:
    """Sum ``terms`` in the order given.

    PAIRWISE_OUTWARD adds left to right in double precision; COMPENSATED
    returns the correctly rounded sum (Shewchuk partials via math.fsum).
    """
    mode = summation_mode(mode)
    terms = np.asarray(terms, dtype=float)
    if terms.size == 0:
        return 0.0
    if mode is SummationMode.COMPENSATED:
        return math.fsum(terms.tolist())
    return float(np.cumsum(terms)[-1])


def summation_mode(mode: SummationMode | str) -> SummationMode:
    try:
        return SummationMode(mode)
    except ValueError as err:
        raise InvalidArgumentError(f"unknown summation mode {mode!r}") from err


__all__ = ["SummationMode", "summation_mode", "outward_order", "accumulate"]
