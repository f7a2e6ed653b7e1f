"""Drift/diffusion matrices of the linearized fluctuation dynamics and the
stability decision.

The fluctuation vector is f = (dQ, dP, dx, dy): mirror quadratures first,
cavity quadratures second. The drift matrix is built entrywise from the
linearized equations of motion; the diffusion matrix collects the
symmetrized white-noise strengths (the antisymmetric cross-correlations of
the quadrature noises cancel in symmetrized covariances and carry no
weight here — see the lyapunov module notes).

Stability is decided two independent ways: ``routh_hurwitz`` evaluates the
three explicit inequalities in (kappa, gamma_m, G, |g|) — which are exactly
the nontrivial first-column entries of the Routh table of the quartic
characteristic polynomial — and ``eigen_stable`` checks the eigenvalue real
parts directly. The conditions do not involve the parametric phase theta.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SteadyState, SystemParams

__all__ = ["DriftModel", "StabilityReport", "build_drift", "routh_hurwitz",
           "eigen_stable"]

# Margin below which a condition (or eigenvalue real part) counts as
# marginal; marginal points are reported unstable because the downstream
# variance integrals blow up there.
MARGINAL_EPS = 1e-12


@dataclass(frozen=True)
class DriftModel:
    """Drift matrix M and diffusion matrix D of df = M f dt + noise."""

    M: np.ndarray
    D: np.ndarray

    def __post_init__(self) -> None:
        if self.M.shape != (4, 4) or self.D.shape != (4, 4):
            raise ValueError("drift and diffusion must be 4x4")


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    conditions: tuple[float, float, float]
    marginal: bool


def build_drift(ss: SteadyState, p: SystemParams) -> DriftModel:
    """Assemble (M, D) for the working point (ss, p).

    The mirror block damps at gamma_m/2 per quadrature; the cavity block
    mixes its quadratures through the parametric drive (gain G, phase
    theta); the off-diagonal blocks carry the beamsplitter coupling with
    the real and imaginary parts of g entering separately.
    """
    k, gam, G, th = p.kappa, p.gamma_m, p.G, p.theta
    gr, gi = ss.g.real, ss.g.imag
    c, s = np.cos(th), np.sin(th)
    M = np.array([
        [-gam / 2, 0.0, gi, -gr],
        [0.0, -gam / 2, gr, gi],
        [-gi, -gr, -(k - 2 * G * c), 2 * G * s],
        [gr, -gi, 2 * G * s, -(k + 2 * G * c)],
    ])
    nm, nc = ss.n_th_m, ss.n_th_c
    D = np.diag([gam * (nm + 0.5), gam * (nm + 0.5),
                 2 * k * (nc + 0.5), 2 * k * (nc + 0.5)])
    return DriftModel(M=M, D=D)


def routh_hurwitz(p: SystemParams, ss: SteadyState) -> StabilityReport:
    """Evaluate the three explicit stability conditions.

    Returns the three left-hand sides and ``stable = all > 0``. Any
    condition within MARGINAL_EPS of zero is flagged marginal and the
    point is reported unstable.
    """
    k, gam, G = p.kappa, p.gamma_m, p.G
    g2 = abs(ss.g) ** 2
    t = k ** 2 - 4 * G ** 2

    c1 = 0.25 * gam ** 3 + 2 * k * t + (2 * k + gam) * (g2 + 2 * k * gam)
    c2 = (2 * k * gam * t ** 2
          + ((2 * k + gam) ** 2 * g2 + (4 * k + gam) * k * gam ** 2) * t
          + (gam ** 3 / 4) * (k * gam ** 2 / 2 + (2 * k + gam) * g2)
          + k * gam * (2 * k + gam) * (k * gam ** 2 + (2 * k + 1.5 * gam) * g2))
    c3 = 0.25 * gam ** 2 * t + g2 * (g2 + k * gam)

    conds = (c1, c2, c3)
    marginal = any(abs(c) <= MARGINAL_EPS for c in conds)
    stable = all(c > MARGINAL_EPS for c in conds)
    return StabilityReport(stable=stable, conditions=conds, marginal=marginal)


def eigen_stable(M: np.ndarray) -> bool:
    """True iff every eigenvalue of M has real part < -MARGINAL_EPS.

    Marginal spectra (max real part within MARGINAL_EPS of zero) count as
    unstable, matching the routh_hurwitz convention.
    """
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("drift matrix must be finite")
    return bool(np.max(np.linalg.eigvals(M).real) < -MARGINAL_EPS)
