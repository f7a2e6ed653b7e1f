"""Baseline: parametric amplifier in a cavity, no mirror coupling.

With the optomechanical coupling switched off the cavity quadratures close
on themselves and their spectra follow from a 2x2 response. This is the
reference against which the coupled system's mechanical squeezing is
compared: at theta = 0 the intracavity phase quadrature squeezes by the
same amount the mirror momentum does at the optimal phase.

Below threshold means G < kappa/2; at and above it the intracavity field
has no stationary state.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin, sqrt

import numpy as np

from .errors import AboveThreshold, ModelError
from .params import SystemParams, thermal_occupation
from .quadrature import integrate_line

__all__ = [
    "CavityCoeffs",
    "cavity_coeffs",
    "cavity_spectra",
    "cavity_variances",
]

_IMAG_TOL = 1e-6


@dataclass(frozen=True)
class CavityCoeffs:
    """Input-to-quadrature couplings of the empty driven cavity.

    A3, B3 feed the amplitude quadrature; A4, B4 the phase quadrature.
    B3 = A4 identically (the same PA cross term couples both ways).
    """
    omega: float
    A3: complex
    B3: complex
    A4: complex
    B4: complex


def _threshold_guard(p: SystemParams) -> None:
    if p.G >= 0.5 * p.kappa:
        raise AboveThreshold(
            f"G = {p.G} is at or above the parametric threshold kappa/2 = {0.5 * p.kappa}"
        )


def _coeff_arrays(omega: np.ndarray, p: SystemParams):
    k, G = p.kappa, p.G
    u = k - 1j * omega
    den = u * u - 4.0 * G * G
    s2k = sqrt(2.0 * k)
    gc = 2.0 * G * cos(p.theta)
    gs = 2.0 * G * sin(p.theta)
    A3 = s2k * (u + gc) / den
    cross = s2k * gs / den
    B4 = s2k * (u - gc) / den
    return A3, cross, cross, B4


def cavity_coeffs(omega: float, p: SystemParams) -> CavityCoeffs:
    _threshold_guard(p)
    A3, B3, A4, B4 = _coeff_arrays(np.asarray(float(omega)), p)
    return CavityCoeffs(
        omega=float(omega),
        A3=complex(A3), B3=complex(B3), A4=complex(A4), B4=complex(B4),
    )


def cavity_spectra(omega, p: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrized amplitude and phase quadrature spectra (S_x, S_y)."""
    _threshold_guard(p)
    om = np.asarray(omega, dtype=float)
    A3p, B3p, A4p, B4p = _coeff_arrays(om, p)
    A3m, B3m, A4m, B4m = _coeff_arrays(-om, p)
    nc = thermal_occupation(p.omega_c_phys, p.temperature) + 0.5
    S_x = (A3p * A3m + B3p * B3m) * nc
    S_y = (A4p * A4m + B4p * B4m) * nc
    im_res = max(float(np.abs(np.atleast_1d(S_x).imag).max()),
                 float(np.abs(np.atleast_1d(S_y).imag).max()))
    if im_res > _IMAG_TOL:
        raise ModelError(f"cavity spectrum imaginary residual {im_res:.3e}")
    return S_x.real, S_y.real


def cavity_variances(p: SystemParams, abs_tol: float = 1e-8) -> tuple[float, float]:
    """Stationary quadrature variances (var_x, var_y) of the empty cavity."""
    _threshold_guard(p)
    var_x = integrate_line(lambda w: cavity_spectra(w, p)[0], abs_tol=abs_tol)
    var_y = integrate_line(lambda w: cavity_spectra(w, p)[1], abs_tol=abs_tol)
    return var_x / (2.0 * np.pi), var_y / (2.0 * np.pi)


def _var_y_theta0(p: SystemParams) -> float:
    # contour integral of the theta = 0 phase-quadrature Lorentzian;
    # internal oracle for the quadrature engine
    nc = thermal_occupation(p.omega_c_phys, p.temperature) + 0.5
    return p.kappa * nc / (p.kappa + 2.0 * p.G)
