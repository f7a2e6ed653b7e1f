"""Physical inputs, unit normalization, thermal occupations, and the
steady-state solve that fixes the effective optomechanical coupling.

Conventions
-----------
All rates are expressed in units of the cavity linewidth ``kappa`` (which
defaults to 1 and is the internal normalization); temperature alone is in
kelvin and is converted at this boundary using the physical mode
frequencies ``omega_m_phys`` / ``omega_c_phys`` (angular, rad/s).

The drive is specified either by the dimensionless cooperativity
``C = |g|^2/(kappa*gamma_m)`` (the default mode, which pins the effective
detuning to ``omega_m`` and bypasses the nonlinear solve) or by a physical
laser drive (``epsilon_l`` directly, or laser power in watts plus
``kappa_phys``), in which case the coupled steady-state equations are
solved by damped fixed-point iteration.

The effective coupling ``g = g0 * c_s`` keeps the full complex phase of
the cavity amplitude; the optimal parametric phase depends on it through
``arg(g)``, so stripping the phase would silently change every
phase-sensitive result downstream.
"""
from __future__ import annotations

import math
import cmath
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B

from .errors import ConfigError, NonConvergence, ZeroCoupling

__all__ = [
    "SystemParams",
    "SteadyState",
    "RwaReport",
    "thermal_occupation",
    "solve_steady_state",
    "optimal_theta",
    "rwa_flags",
    "parse_angle",
    "load_config",
    "params_from_mapping",
]

# Notional single-photon coupling used to reconstruct a consistent steady
# state in cooperativity mode when the caller does not supply g0.  Only
# the product g = g0*c_s matters downstream.
_DEFAULT_G0 = 1e-4

_PICARD_DAMPING = 0.5
_PICARD_CAP = 10_000
_RESIDUAL_TOL = 1e-12


def thermal_occupation(omega: float, temperature: float) -> float:
    """Mean thermal occupation of a mode at angular frequency ``omega``.

    Parameters
    ----------
    omega : float
        Mode angular frequency in rad/s. Must be positive.
    temperature : float
        Bath temperature in kelvin. ``T = 0`` returns exactly 0.

    Returns
    -------
    float
        ``1/(exp(hbar*omega/(k_B*T)) - 1)``, computed without overflow for
        any positive argument.
    """
    if omega <= 0:
        raise ValueError("mode frequency must be positive")
    if temperature < 0:
        raise ValueError("temperature must be nonnegative")
    if temperature == 0.0:
        return 0.0
    # divide before scaling so a subnormal temperature cannot underflow
    # the denominator; omega/temperature overflowing to inf is fine here
    x = (hbar / k_B) * (omega / temperature)
    if x > 700.0:
        # expm1 would overflow; the Boltzmann tail underflows gracefully
        return math.exp(-x)
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class SystemParams:
    """Immutable bundle of model parameters (rates in units of ``kappa``).

    Exactly one drive mode must be given: ``cooperativity``, or a physical
    drive via ``epsilon_l`` (already normalized to ``kappa``) or
    ``laser_power`` in watts (requires ``kappa_phys`` in rad/s for the
    conversion). The physical-drive mode also needs ``g0``.
    """

    gamma_m: float
    omega_m: float = 10.0
    kappa: float = 1.0
    G: float = 0.0
    theta: float = 0.0
    cooperativity: float | None = None
    epsilon_l: float | None = None
    laser_power: float | None = None
    g0: float | None = None
    kappa_phys: float | None = None
    temperature: float = 0.0
    omega_m_phys: float = 2 * math.pi * 3.6e6
    omega_c_phys: float = 2 * math.pi * 6.23e9
    detuning: float | None = None

    def __post_init__(self) -> None:
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.omega_m <= 0:
            raise ValueError("omega_m must be positive")
        if self.gamma_m <= 0:
            raise ValueError("gamma_m must be positive")
        if self.G < 0:
            raise ValueError("parametric gain G must be nonnegative")
        if self.temperature < 0:
            raise ValueError("temperature must be nonnegative")
        has_coop = self.cooperativity is not None
        has_drive = self.epsilon_l is not None or self.laser_power is not None
        if has_coop == has_drive:
            raise ValueError(
                "specify exactly one drive mode: cooperativity, or "
                "epsilon_l / laser_power"
            )
        if has_coop and self.cooperativity < 0:
            raise ValueError("cooperativity must be nonnegative")
        if has_drive:
            if self.g0 is None:
                raise ValueError("physical drive mode requires g0")
            if self.laser_power is not None and self.kappa_phys is None:
                raise ValueError("laser_power conversion requires kappa_phys")

    @property
    def delta(self) -> float:
        """Detuning in units of kappa (defaults to the mechanical frequency)."""
        return self.omega_m if self.detuning is None else self.detuning

    @property
    def drive_mode(self) -> str:
        return "cooperativity" if self.cooperativity is not None else "power"


@dataclass(frozen=True)
class SteadyState:
    """Classical working point plus derived quantities used downstream.

    ``residual`` is the worst absolute mismatch of the two coupled
    steady-state equations, normalized by ``max(1, |c_s|)``; ``ambiguous``
    is set when the equivalent cubic in the intracavity photon number has
    three real positive roots (bistable drive).
    """

    c_s: complex
    b_s: complex
    delta_eff: float
    g: complex
    n_th_m: float
    n_th_c: float
    residual: float = 0.0
    ambiguous: bool = False


@dataclass(frozen=True)
class RwaReport:
    """Validity flags for the rotating-wave / resolved-sideband treatment.

    True means the corresponding separation of scales holds. These are
    warnings, never errors: the linear model itself is well defined for
    any stable parameters.
    """

    resolved_sideband: bool   # omega_m >= 10 kappa
    slow_damping: bool        # omega_m >> gamma_m
    weak_coupling: bool       # omega_m >> |g|
    weak_gain: bool           # omega_m >> 2G

    def all_ok(self) -> bool:
        return (self.resolved_sideband and self.slow_damping
                and self.weak_coupling and self.weak_gain)

    def failures(self) -> tuple[str, ...]:
        out = []
        if not self.resolved_sideband:
            out.append("resolved_sideband")
        if not self.slow_damping:
            out.append("slow_damping")
        if not self.weak_coupling:
            out.append("weak_coupling")
        if not self.weak_gain:
            out.append("weak_gain")
        return tuple(out)


def rwa_flags(p: SystemParams, g: complex) -> RwaReport:
    """Evaluate the separation-of-scales flags for a solved working point.

    The resolved-sideband flag uses the fixed factor 10; the remaining
    "much larger" comparisons use the same factor for uniformity.
    """
    return RwaReport(
        resolved_sideband=p.omega_m >= 10.0 * p.kappa,
        slow_damping=p.omega_m >= 10.0 * p.gamma_m,
        weak_coupling=p.omega_m >= 10.0 * abs(g),
        weak_gain=p.omega_m >= 10.0 * (2.0 * p.G),
    )


def _mirror_amplitude(c_s: complex, g0: float, p: SystemParams) -> complex:
    # mirror line of the coupled steady state: b_s = i g0 |c_s|^2 / (gamma_m/2 + i omega_m)
    return 1j * g0 * abs(c_s) ** 2 / (p.gamma_m / 2 + 1j * p.omega_m)


def _epsilon_from_power(p: SystemParams) -> float:
    # epsilon_l = sqrt(2 kappa P / (hbar omega_l)), then normalized by kappa_phys.
    omega_l = p.omega_c_phys - p.delta * p.kappa_phys
    if omega_l <= 0:
        raise ValueError("laser frequency implied by detuning is nonpositive")
    eps_phys = math.sqrt(2.0 * p.kappa_phys * p.laser_power / (hbar * omega_l))
    return eps_phys / p.kappa_phys


def _photon_number_cubic(p: SystemParams, eps: float) -> tuple[int, bool]:
    """Count real positive roots of the photon-number cubic.

    Returns (count, ambiguous). The cubic restates the fixed point as a
    polynomial in n = |c_s|^2, which is the standard bistability check.
    """
    g0 = p.g0
    xi = 2.0 * g0**2 * p.omega_m / (p.gamma_m**2 / 4 + p.omega_m**2)
    d0 = p.delta
    if xi == 0.0:
        return 1, False
    coeffs = [xi**2, -2.0 * d0 * xi, p.kappa**2 + d0**2, -eps**2]
    roots = np.roots(coeffs)
    scale = max(abs(r) for r in roots) or 1.0
    real_pos = [r.real for r in roots
                if abs(r.imag) < 1e-9 * scale and r.real > 0]
    return len(real_pos), len(real_pos) >= 3


def solve_steady_state(p: SystemParams) -> SteadyState:
    """Solve (or construct) the classical steady state for ``p``.

    Cooperativity mode pins the effective detuning to ``omega_m``, sets
    ``|g| = sqrt(C*kappa*gamma_m)`` with ``arg(g) = -arctan(delta/kappa)``
    inherited from the cavity response, and reconstructs a consistent
    (c_s, b_s) pair for diagnostics.

    Power mode iterates the coupled cavity/mirror equations (damped Picard,
    damping 0.5, cap 10^4) and falls back to the unique real root of the
    photon-number cubic when iteration stalls.

    Raises
    ------
    NonConvergence
        If no fixed point meets the residual target (typically a bistable
        drive; the ``ambiguous`` flag of a successful solve reports the
        three-real-root case).
    """
    n_th_m = thermal_occupation(p.omega_m_phys, p.temperature)
    n_th_c = thermal_occupation(p.omega_c_phys, p.temperature)

    if p.drive_mode == "cooperativity":
        delta = p.delta
        g_abs = math.sqrt(p.cooperativity * p.kappa * p.gamma_m)
        phase = -math.atan2(delta, p.kappa)
        g = g_abs * cmath.exp(1j * phase)
        g0 = p.g0 if p.g0 is not None else _DEFAULT_G0
        c_s = g / g0
        b_s = _mirror_amplitude(c_s, g0, p)
        # residual against the implied drive: exact by construction, but
        # evaluate it anyway so the invariant is checked, not assumed.
        eps_implied = c_s * (p.kappa + 1j * delta)
        resid_c = abs(c_s - eps_implied / (p.kappa + 1j * delta))
        resid_b = abs(b_s - _mirror_amplitude(c_s, g0, p))
        residual = max(resid_c, resid_b) / max(1.0, abs(c_s))
        return SteadyState(c_s=c_s, b_s=b_s, delta_eff=delta, g=g,
                           n_th_m=n_th_m, n_th_c=n_th_c, residual=residual)

    eps = p.epsilon_l if p.epsilon_l is not None else _epsilon_from_power(p)
    g0 = p.g0
    d0 = p.delta

    def delta_of(c: complex) -> float:
        b = _mirror_amplitude(c, g0, p)
        return d0 - g0 * (2.0 * b.real)

    c = eps / (p.kappa + 1j * d0)
    residual = math.inf
    for _ in range(_PICARD_CAP):
        target = eps / (p.kappa + 1j * delta_of(c))
        residual = abs(c - target) / max(1.0, abs(c))
        if residual < _RESIDUAL_TOL:
            break
        c = (1.0 - _PICARD_DAMPING) * c + _PICARD_DAMPING * target

    n_roots, ambiguous = _photon_number_cubic(p, eps)

    if residual >= _RESIDUAL_TOL and n_roots == 1:
        # iteration stalled but the fixed point is unique: take the cubic root
        xi = 2.0 * g0**2 * p.omega_m / (p.gamma_m**2 / 4 + p.omega_m**2)
        roots = np.roots([xi**2, -2.0 * d0 * xi, p.kappa**2 + d0**2, -eps**2])
        n = max(r.real for r in roots if abs(r.imag) < 1e-9 * max(1.0, abs(r)))
        c = eps / (p.kappa + 1j * (d0 - xi * n))
        target = eps / (p.kappa + 1j * delta_of(c))
        residual = abs(c - target) / max(1.0, abs(c))

    if residual >= _RESIDUAL_TOL:
        raise NonConvergence(
            f"steady-state residual {residual:.3e} after {_PICARD_CAP} iterations "
            f"(drive likely bistable; cubic has {n_roots} positive roots)"
        )

    b = _mirror_amplitude(c, g0, p)
    return SteadyState(c_s=c, b_s=b, delta_eff=delta_of(c), g=g0 * c,
                       n_th_m=n_th_m, n_th_c=n_th_c, residual=residual,
                       ambiguous=ambiguous)


def optimal_theta(g: complex) -> float:
    """Parametric phase that aligns the squeezed cavity quadrature with
    the beamsplitter-coupled mirror quadrature.

    Solves ``exp(i*theta) * conj(g)^2 = -|g|^2`` for ``theta`` in
    ``[0, 2*pi)``; at the default red detuning ``delta = 10*kappa`` this is
    0.1993 rad, close to pi/16.
    """
    if g == 0:
        raise ZeroCoupling("optimal phase undefined at g = 0")
    return (math.pi + 2.0 * cmath.phase(g)) % (2.0 * math.pi)


# ---------------------------------------------------------------------------
# config-file ingestion (flat key = value, '#' comments)

_FLOAT_KEYS = {
    "kappa", "omega_m", "gamma_m", "G", "theta", "cooperativity",
    "epsilon_l", "laser_power", "g0", "kappa_phys", "temperature",
    "omega_m_phys", "omega_c_phys", "detuning",
}
_ANGLE_KEYS = {"theta", "detuning"}


def parse_angle(text: str) -> float:
    """Parse an angle given in radians or as arithmetic on ``pi``.

    Accepts plain floats ("0.196"), pi fractions ("pi/16", "3*pi/4",
    "-pi/2"), and parenthesized combinations thereof.
    """
    allowed = set("0123456789.+-*/() epi")
    if not text or set(text) - allowed:
        raise ConfigError(f"malformed angle expression: {text!r}")
    try:
        return float(eval(text, {"__builtins__": {}}, {"pi": math.pi, "e": math.e}))
    except Exception as exc:
        raise ConfigError(f"malformed angle expression: {text!r}") from exc


def load_config(path: str) -> dict[str, float]:
    """Read a flat ``key = value`` config file into a mapping.

    Keys must be SystemParams field names; values are floats, except the
    angle-valued keys which also accept pi-fraction expressions. Lines
    starting with '#' (and inline '#' comments) are ignored.
    """
    out: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _FLOAT_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in _ANGLE_KEYS:
                out[key] = parse_angle(value)
            else:
                try:
                    out[key] = float(value)
                except ValueError as exc:
                    raise ConfigError(
                        f"{path}:{lineno}: bad value for {key!r}: {value!r}"
                    ) from exc
    return out


def params_from_mapping(mapping: dict[str, float], **overrides) -> SystemParams:
    """Build SystemParams from a config mapping plus keyword overrides."""
    merged = dict(mapping)
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _FLOAT_KEYS:
            raise ConfigError(f"unknown parameter {key!r}")
        merged[key] = value
    try:
        return SystemParams(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
