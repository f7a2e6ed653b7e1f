"""Euler-Maruyama inner loop, pure numpy.

Same contract as the compiled extension; the time loop stays in Python but
each step is vectorized across trajectories, so the penalty is a constant
per-step overhead rather than a per-trajectory one.
"""
from __future__ import annotations

import numpy as np


def run_segment(a: np.ndarray, b: np.ndarray, states: np.ndarray,
                xi: np.ndarray, accumulate: bool,
                sq_sums: np.ndarray) -> float:
    """Advance all trajectories through one noise segment, in place.

    See the compiled twin for the argument contract.
    """
    at = np.ascontiguousarray(a.T)
    n_steps = xi.shape[1]
    peak = 0.0
    for t in range(n_steps):
        states[:] = states @ at
        states += xi[:, t, :] * b
        if accumulate:
            sq_sums[:, 0] += states[:, 0] ** 2
            sq_sums[:, 1] += states[:, 1] ** 2
        step_peak = float(np.abs(states).max())
        if step_peak > peak:
            peak = step_peak
    return peak
