"""
mellin_sampling_core package

Exposes the sampling operators and the CLI entry point so callers can simply:

    from mellin_sampling_core import generalized_sample, bspline_kernel, main
"""

from importlib import import_module

from .exceptions import SamplingError

sampling_mod = import_module(".sampling", package=__name__)
kernels_mod = import_module(".kernels", package=__name__)

SamplingPlan = sampling_mod.SamplingPlan
Window = sampling_mod.Window
generalized_sample = sampling_mod.generalized_sample
classical_partial_sum = sampling_mod.classical_partial_sum
bspline_kernel = kernels_mod.bspline_kernel
fejer_kernel = kernels_mod.fejer_kernel
jackson_kernel = kernels_mod.jackson_kernel


def main(argv=None) -> int:
    # Lazy-import so `python -m mellin_sampling_core.cli` runs cli only once
    return import_module(".cli", package=__name__).main(argv)


__all__ = [
    "SamplingError",
    "SamplingPlan",
    "Window",
    "generalized_sample",
    "classical_partial_sum",
    "bspline_kernel",
    "fejer_kernel",
    "jackson_kernel",
    "main",
]
