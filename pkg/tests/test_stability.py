"""Drift construction and the two independent stability deciders."""

import math

import numpy as np
import pytest

from omsqueeze import (
    SystemParams,
    build_drift,
    eigen_stable,
    routh_hurwitz,
    solve_steady_state,
)
from omsqueeze.stability import MARGINAL_EPS

from conftest import draw_stable_params


def quartic_roots(p: SystemParams, g: complex) -> np.ndarray:
    """Independent eigenvalue oracle from the factored characteristic
    polynomial: two quadratics (lam + gamma/2)(lam + kappa -+ 2G) + |g|^2."""
    k, gam, G = p.kappa, p.gamma_m, p.G
    g2 = abs(g) ** 2
    roots = []
    for sign in (-1.0, +1.0):
        b = gam / 2 + k + sign * 2 * G
        c = (gam / 2) * (k + sign * 2 * G) + g2
        disc = complex(b * b - 4 * c) ** 0.5
        roots += [(-b + disc) / 2, (-b - disc) / 2]
    return np.sort_complex(np.array(roots))


class TestBuildDrift:
    def test_drift_entries(self, opt_params, opt_state):
        dm = build_drift(opt_state, opt_params)
        gr, gi = opt_state.g.real, opt_state.g.imag
        c, s = math.cos(opt_params.theta), math.sin(opt_params.theta)
        G, gam = opt_params.G, opt_params.gamma_m
        expected = np.array([
            [-gam / 2, 0.0, gi, -gr],
            [0.0, -gam / 2, gr, gi],
            [-gi, -gr, -(1.0 - 2 * G * c), 2 * G * s],
            [gr, -gi, 2 * G * s, -(1.0 + 2 * G * c)],
        ])
        np.testing.assert_allclose(dm.M, expected, rtol=0, atol=0)

    def test_diffusion_is_diagonal_vacuum_at_zero_temperature(self, opt_params,
                                                              opt_state):
        dm = build_drift(opt_state, opt_params)
        gam = opt_params.gamma_m
        np.testing.assert_allclose(
            dm.D, np.diag([gam / 2, gam / 2, 1.0, 1.0]), rtol=0, atol=0)

    def test_diffusion_carries_thermal_occupation(self):
        p = SystemParams(gamma_m=1e-5, cooperativity=400.0, temperature=0.01)
        ss = solve_steady_state(p)
        dm = build_drift(ss, p)
        assert dm.D[0, 0] == pytest.approx(1e-5 * (ss.n_th_m + 0.5), rel=1e-12)
        assert dm.D[2, 2] == pytest.approx(2.0 * (ss.n_th_c + 0.5), rel=1e-12)

    def test_shape_guard(self):
        from omsqueeze import DriftModel
        with pytest.raises(ValueError):
            DriftModel(M=np.zeros((3, 3)), D=np.zeros((4, 4)))


class TestThetaIndependence:
    def test_spectrum_invariant_under_parametric_phase(self):
        # the characteristic polynomial does not involve theta; eigenvalues
        # of the drift must agree across phases to machine precision
        base = dict(gamma_m=1e-4, cooperativity=200.0, G=0.3)
        ref = None
        for theta in (0.0, math.pi / 16, 1.234, math.pi / 2, 5.9):
            p = SystemParams(theta=theta, **base)
            lam = np.sort_complex(np.linalg.eigvals(
                build_drift(solve_steady_state(p), p).M))
            if ref is None:
                ref = lam
            else:
                np.testing.assert_allclose(lam, ref, rtol=0, atol=1e-13)

    def test_conditions_do_not_read_theta(self):
        p0 = SystemParams(gamma_m=1e-4, cooperativity=200.0, G=0.3, theta=0.0)
        p1 = SystemParams(gamma_m=1e-4, cooperativity=200.0, G=0.3, theta=2.5)
        r0 = routh_hurwitz(p0, solve_steady_state(p0))
        r1 = routh_hurwitz(p1, solve_steady_state(p1))
        assert r0.conditions == r1.conditions


class TestEigenvalueOracle:
    def test_factored_quartic_matches_dense_solver(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            p = SystemParams(
                gamma_m=float(10.0 ** rng.uniform(-5, -1)),
                cooperativity=float(rng.uniform(0.0, 1000.0)),
                G=float(rng.uniform(0.0, 1.0)),
                theta=float(rng.uniform(0.0, 2 * math.pi)),
            )
            ss = solve_steady_state(p)
            dense = np.sort_complex(np.linalg.eigvals(build_drift(ss, p).M))
            closed = quartic_roots(p, ss.g)
            np.testing.assert_allclose(dense, closed, rtol=0, atol=1e-10)


class TestStabilityAgreement:
    def test_routh_matches_eigenvalues_on_random_grid(self):
        # both deciders must agree everywhere, including unstable points
        rng = np.random.default_rng(7)
        disagreements = 0
        for _ in range(2000):
            p = SystemParams(
                gamma_m=float(10.0 ** rng.uniform(-5, -2)),
                cooperativity=float(rng.uniform(0.0, 1000.0)),
                G=float(rng.uniform(0.0, 1.0)),
                theta=float(rng.uniform(0.0, 2 * math.pi)),
            )
            ss = solve_steady_state(p)
            rh = routh_hurwitz(p, ss)
            ev = eigen_stable(build_drift(ss, p).M)
            disagreements += rh.stable != ev
        assert disagreements == 0

    def test_instability_onset_location(self):
        # threshold sits just above G = kappa/2; bisect the flip
        def stable_at(G: float) -> bool:
            p = SystemParams(gamma_m=1e-5, cooperativity=400.0, G=G)
            return routh_hurwitz(p, solve_steady_state(p)).stable

        assert stable_at(0.49)
        assert not stable_at(0.51)
        lo, hi = 0.49, 0.51
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if stable_at(mid):
                lo = mid
            else:
                hi = mid
        onset = 0.5 * (lo + hi)
        # binding condition flips exactly at kappa/2 + gamma_m/4
        assert onset == pytest.approx(0.5 + 1e-5 / 4, abs=1e-9)

    def test_marginal_point_reported_unstable(self):
        # gain exactly at the analytic onset: the binding condition is ~0
        gam = 1e-5
        p = SystemParams(gamma_m=gam, cooperativity=400.0, G=0.5 + gam / 4)
        report = routh_hurwitz(p, solve_steady_state(p))
        assert min(report.conditions) == pytest.approx(0.0, abs=1e-10)
        assert report.marginal
        assert not report.stable

    def test_zero_coupling_zero_gain_is_stable(self):
        p = SystemParams(gamma_m=1e-5, cooperativity=0.0)
        ss = solve_steady_state(p)
        assert routh_hurwitz(p, ss).stable
        assert eigen_stable(build_drift(ss, p).M)

    def test_random_stable_draws_have_decaying_modes(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            p = draw_stable_params(rng)
            ss = solve_steady_state(p)
            M = build_drift(ss, p).M
            assert np.max(np.linalg.eigvals(M).real) < -MARGINAL_EPS


class TestEigenStableGuards:
    def test_rejects_non_finite(self):
        M = np.zeros((4, 4))
        M[0, 0] = np.nan
        with pytest.raises(ValueError):
            eigen_stable(M)
