from __future__ import annotations

from typing import Any, Sequence


class SamplingError(Exception):
    """Root of every error raised by the sampling library.

    ``exit_code`` is what the CLI returns when the error escapes a command.
    """

    exit_code = 70

    def __init__(self, msg: str, **context: Any) -> None:
        super().__init__(msg)
        self.context = context

    def __str__(self) -> str:  # pragma: no cover - trivial
        return self.args[0]


class InvalidArgumentError(SamplingError, ValueError):
    """A parameter is outside its domain (x ≤ 0, NaN, k > r, ...)."""


class InvalidSampleError(SamplingError):
    """A signal or integrand returned a non-finite value."""

    def __init__(self, msg: str, *, abscissa: float) -> None:
        super().__init__(msg, abscissa=abscissa)
        self.abscissa = abscissa


class ConvergenceError(SamplingError):
    """Quadrature did not reach its tolerance; keeps the last estimate."""

    def __init__(self, msg: str, *, last_estimate: Any, err_est: float) -> None:
        super().__init__(msg, last_estimate=last_estimate, err_est=err_est)
        self.last_estimate = last_estimate
        self.err_est = err_est


class DivergenceError(SamplingError):
    """A kernel moment or tail sum of the requested order is infinite."""

    def __init__(self, msg: str, *, order: float) -> None:
        super().__init__(msg, order=order)
        self.order = order


class UnsupportedKernelError(SamplingError):
    """The kernel lacks the metadata an operation needs."""


class InsufficientDataError(SamplingError):
    """Too few usable rows for a fit or an extrapolation."""


class GoldenMismatchError(SamplingError):
    """Computed table rows disagree with the stored golden values."""

    exit_code = 2

    def __init__(self, msg: str, *, rows: Sequence[Any] = ()) -> None:
        super().__init__(msg, rows=list(rows))
        self.rows = list(rows)


__all__ = [
    "SamplingError",
    "InvalidArgumentError",
    "InvalidSampleError",
    "ConvergenceError",
    "DivergenceError",
    "UnsupportedKernelError",
    "InsufficientDataError",
    "GoldenMismatchError",
]
