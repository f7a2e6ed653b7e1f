"""Backend selection for the stochastic integrator inner loop.

The compiled extension is optional: when the build environment lacked a C
compiler (or the wheel was installed without it) the numpy fallback takes
over transparently. Both backends implement the identical segment contract
and consume the identical noise arrays, so estimates differ only by
floating-point rounding.

``BACKEND`` reports which one is active; the fallback stays importable
under its own name for benchmarking and cross-checks.
"""
from __future__ import annotations

from ._em_fallback import run_segment as run_segment_python

try:
    from ._em_core import run_segment as run_segment_compiled
    BACKEND = "cython"
    run_segment = run_segment_compiled
except ImportError:
    run_segment_compiled = None
    BACKEND = "python"
    run_segment = run_segment_python

__all__ = ["BACKEND", "run_segment", "run_segment_compiled", "run_segment_python"]
