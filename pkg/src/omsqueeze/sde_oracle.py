"""Stochastic-trajectory estimate of the stationary quadrature variances.

Euler-Maruyama integration of the linear Langevin system gives a third
variance estimate that shares no code path with the spectral integral or
the Lyapunov solve. Estimates pool squared samples over an ensemble of
independent trajectories and over post-burn-in time; standard errors come
from batch means over 32 contiguous time batches, each pooled across the
whole ensemble (batches spanning several relaxation times are effectively
independent).

Determinism: every trajectory draws from its own generator spawned off the
root seed, segment boundaries depend only on the configuration, and all
reductions are fixed-order numpy sums, so a given (model, config) pair
yields bit-identical estimates on every run and backend scheduling cannot
reorder anything.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DivergingTrajectory, UnstableSystem
from .kernels import run_segment, run_segment_python
from .stability import DriftModel, eigen_stable

__all__ = ["SimConfig", "SimEstimate", "simulate", "suggest_config"]

_N_BATCHES = 32
_MAX_SEGMENT = 4096          # steps per noise block, bounds memory
_DIVERGENCE_LIMIT = 1e6
_DT_SAFETY = 0.01            # dt cap: this over the fastest rate
_BURN_FACTOR = 10.0          # burn-in floor: this over the slowest rate


@dataclass(frozen=True)
class SimConfig:
    """Integration schedule, in units of 1/kappa.

    ``duration`` is the measured stretch after ``burn_in`` is discarded.
    """
    dt: float
    duration: float
    burn_in: float
    n_traj: int = 64
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dt <= 0.0 or self.duration <= 0.0 or self.burn_in < 0.0:
            raise ConfigError("dt and duration must be positive, burn_in non-negative")
        if self.n_traj < 1:
            raise ConfigError("need at least one trajectory")
        if self.duration < self.dt * _N_BATCHES:
            raise ConfigError(
                f"duration too short for {_N_BATCHES} batch means at dt={self.dt}"
            )


class SimEstimate(NamedTuple):
    var_q: float
    var_p: float
    stderr_q: float
    stderr_p: float


def _rates(M: np.ndarray) -> tuple[float, float]:
    """(fastest, slowest) rate scales of the drift, for schedule checks."""
    lam = np.linalg.eigvals(M)
    # cavity decay sits on the trace even when eigenvalues mix
    kappa_eff = -0.5 * (M[2, 2] + M[3, 3])
    fastest = max(float(np.abs(lam).max()), kappa_eff)
    slowest = float((-lam.real).min())
    return fastest, slowest


def _check_schedule(cfg: SimConfig, M: np.ndarray) -> None:
    fastest, slowest = _rates(M)
    dt_cap = _DT_SAFETY / fastest
    if cfg.dt > dt_cap * (1.0 + 1e-12):
        raise ConfigError(f"dt={cfg.dt} exceeds stiffness cap {dt_cap:.3e}")
    burn_floor = _BURN_FACTOR / slowest
    if cfg.burn_in < burn_floor * (1.0 - 1e-12):
        raise ConfigError(f"burn_in={cfg.burn_in} below relaxation floor {burn_floor:.3e}")


def suggest_config(dm: DriftModel, seed: int = 0, n_traj: int = 32,
                   batch_time: float = 5.0, dt_margin: float = 0.25) -> SimConfig:
    """Schedule derived from the drift eigenvalues.

    ``batch_time`` sets each batch's length in units of the slowest
    relaxation time, keeping batch means near-independent. ``dt_margin``
    shrinks the step below the stiffness cap: the Euler update converges
    to a biased variance (see ``em_fixed_point``), and the margin keeps
    that bias small for well-damped models. Underdamped models need a
    much smaller step; check the fixed point before trusting a run.
    """
    if not eigen_stable(dm.M):
        raise UnstableSystem("cannot schedule an unstable model")
    fastest, slowest = _rates(dm.M)
    return SimConfig(
        dt=float(dt_margin * _DT_SAFETY / fastest),
        duration=float(_N_BATCHES * batch_time / slowest),
        burn_in=float(1.2 * _BURN_FACTOR / slowest),
        n_traj=n_traj,
        seed=seed,
    )


def em_fixed_point(dm: DriftModel, dt: float) -> tuple[float, float]:
    """(var_q, var_p) the Euler chain itself converges to at step dt.

    The discrete update has stationary covariance solving
    V = A V A^T + dt D with A = I + dt M; comparing against the continuous
    solution isolates discretization bias from sampling noise. The bias
    grows with (Im lam)^2 dt / (2 Re lam) per drift mode, so a weakly
    damped oscillatory pair can inflate one variance by tens of percent
    at a step that looks safe from the stiffness cap alone.
    """
    A = np.eye(4) + dt * dm.M
    K = np.eye(16) - np.kron(A, A)
    v = np.linalg.solve(K, dt * dm.D.reshape(-1))
    V = v.reshape(4, 4)
    return float(V[0, 0]), float(V[1, 1])


def simulate(dm: DriftModel, cfg: SimConfig, backend: str | None = None) -> SimEstimate:
    """Estimate stationary Q and P variances by trajectory integration.

    ``backend`` forces "python" or the compiled loop ("cython"); by default
    whatever kernels selected at import is used. Raises DivergingTrajectory
    when any component passes 1e6, the symptom of a dt too large for the
    drift stiffness.
    """
    M, D = dm.M, dm.D
    if not eigen_stable(M):
        raise UnstableSystem("no stationary state to sample")
    _check_schedule(cfg, M)
    off_diag = D - np.diag(np.diag(D))
    if np.abs(off_diag).max() > 1e-14 * max(np.abs(D).max(), 1.0):
        raise ValueError("diffusion matrix must be diagonal")

    if backend is None:
        step = run_segment
    elif backend == "python":
        step = run_segment_python
    else:
        from .kernels import run_segment_compiled
        if run_segment_compiled is None:
            raise ConfigError("compiled backend requested but not built")
        step = run_segment_compiled

    a = np.ascontiguousarray(np.eye(4) + cfg.dt * M)
    b = np.ascontiguousarray(np.sqrt(cfg.dt * np.diag(D)))

    n_burn = math.ceil(cfg.burn_in / cfg.dt)
    n_meas = math.ceil(cfg.duration / cfg.dt)
    n_meas += (-n_meas) % _N_BATCHES
    batch_len = n_meas // _N_BATCHES

    rng_children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_traj)
    gens = [np.random.Generator(np.random.PCG64(c)) for c in rng_children]
    states = np.zeros((cfg.n_traj, 4))
    sq_sums = np.zeros((cfg.n_traj, 2))

    def advance(n_steps: int, accumulate: bool) -> None:
        done = 0
        while done < n_steps:
            chunk = min(_MAX_SEGMENT, n_steps - done)
            xi = np.empty((cfg.n_traj, chunk, 4))
            for i, gen in enumerate(gens):
                xi[i] = gen.standard_normal((chunk, 4))
            peak = step(a, b, states, xi, accumulate, sq_sums)
            if peak > _DIVERGENCE_LIMIT:
                raise DivergingTrajectory(
                    f"|f| reached {peak:.3e}; reduce dt or check stability"
                )
            done += chunk

    advance(n_burn, accumulate=False)

    batch_means = np.empty((_N_BATCHES, 2))
    samples_per_batch = float(cfg.n_traj * batch_len)
    for k in range(_N_BATCHES):
        sq_sums[:] = 0.0
        advance(batch_len, accumulate=True)
        batch_means[k] = sq_sums.sum(axis=0) / samples_per_batch

    mean = batch_means.mean(axis=0)
    stderr = batch_means.std(axis=0, ddof=1) / math.sqrt(_N_BATCHES)
    return SimEstimate(
        var_q=float(mean[0]), var_p=float(mean[1]),
        stderr_q=float(stderr[0]), stderr_p=float(stderr[1]),
    )
