"""Trajectory estimator: determinism, backends, statistics, schedule guards."""

import math

import numpy as np
import pytest

from omsqueeze import (
    ConfigError,
    DivergingTrajectory,
    DriftModel,
    SimConfig,
    SystemParams,
    UnstableSystem,
    build_drift,
    em_fixed_point,
    simulate,
    solve_steady_state,
    steady_covariance,
    suggest_config,
)
from omsqueeze.kernels import BACKEND


def drift_for(gamma_m: float, cooperativity: float, G: float,
              theta: float) -> DriftModel:
    p = SystemParams(gamma_m=gamma_m, cooperativity=cooperativity, G=G,
                     theta=theta)
    return build_drift(solve_steady_state(p), p)


@pytest.fixture(scope="module")
def quick_model() -> DriftModel:
    # fast mirror decay keeps relaxation times short enough for cheap runs
    return drift_for(0.2, 10.0, 0.2, 0.3)


@pytest.fixture(scope="module")
def quick_config(quick_model) -> SimConfig:
    return suggest_config(quick_model, seed=11, n_traj=8, batch_time=2.0)


class TestSimConfig:
    def test_rejects_bad_schedules(self):
        with pytest.raises(ConfigError):
            SimConfig(dt=0.0, duration=10.0, burn_in=1.0)
        with pytest.raises(ConfigError):
            SimConfig(dt=1e-3, duration=-1.0, burn_in=1.0)
        with pytest.raises(ConfigError):
            SimConfig(dt=1e-3, duration=10.0, burn_in=-0.1)
        with pytest.raises(ConfigError):
            SimConfig(dt=1e-3, duration=10.0, burn_in=1.0, n_traj=0)
        with pytest.raises(ConfigError):
            # fewer steps than batch means
            SimConfig(dt=1.0, duration=16.0, burn_in=1.0)

    def test_stiffness_cap(self, quick_model):
        fastest = float(np.abs(np.linalg.eigvals(quick_model.M)).max())
        cfg = SimConfig(dt=0.5 / fastest, duration=100.0, burn_in=100.0)
        with pytest.raises(ConfigError, match="stiffness"):
            simulate(quick_model, cfg)

    def test_burn_in_floor(self, quick_model):
        slowest = float((-np.linalg.eigvals(quick_model.M).real).min())
        cfg = SimConfig(dt=1e-3, duration=100.0, burn_in=0.1 / slowest)
        with pytest.raises(ConfigError, match="burn_in"):
            simulate(quick_model, cfg)


class TestSuggestConfig:
    def test_schedule_respects_rates(self, quick_model):
        cfg = suggest_config(quick_model, seed=3, n_traj=5)
        lam = np.linalg.eigvals(quick_model.M)
        fastest = float(np.abs(lam).max())
        slowest = float((-lam.real).min())
        assert cfg.dt * fastest <= 0.01 + 1e-15
        assert cfg.burn_in * slowest >= 10.0
        assert cfg.duration >= 32 * cfg.dt
        assert cfg.n_traj == 5 and cfg.seed == 3

    def test_rejects_unstable_model(self, quick_model):
        dm = DriftModel(M=-quick_model.M, D=quick_model.D)
        with pytest.raises(UnstableSystem):
            suggest_config(dm)


class TestDeterminism:
    def test_bit_identical_reruns(self, quick_model, quick_config):
        first = simulate(quick_model, quick_config)
        second = simulate(quick_model, quick_config)
        assert first == second

    def test_seed_changes_estimate(self, quick_model, quick_config):
        other = SimConfig(dt=quick_config.dt, duration=quick_config.duration,
                          burn_in=quick_config.burn_in,
                          n_traj=quick_config.n_traj, seed=99)
        assert simulate(quick_model, other) != simulate(quick_model,
                                                        quick_config)


@pytest.mark.skipif(BACKEND != "cython", reason="compiled backend not built")
class TestBackends:
    def test_backends_agree(self, quick_model):
        cfg = suggest_config(quick_model, seed=5, n_traj=4, batch_time=1.0)
        fast = simulate(quick_model, cfg, backend="cython")
        slow = simulate(quick_model, cfg, backend="python")
        # identical noise stream, so only summation order can differ
        assert fast.var_q == pytest.approx(slow.var_q, rel=1e-12)
        assert fast.var_p == pytest.approx(slow.var_p, rel=1e-12)


class TestStatistics:
    def test_thermal_point_matches_fixed_point(self):
        # diagonal drift: every quadrature is an independent OU process
        dm = drift_for(0.2, 0.0, 0.0, 0.0)
        cfg = suggest_config(dm, seed=2, n_traj=16, batch_time=4.0)
        est = simulate(dm, cfg)
        fq, fp = em_fixed_point(dm, cfg.dt)
        assert abs(est.var_q - fq) / est.stderr_q < 4.0
        assert abs(est.var_p - fp) / est.stderr_p < 4.0
        assert fq == pytest.approx(0.5, rel=2e-3)

    def test_squeezing_point_matches_lyapunov(self):
        # momentum variance is insensitive to the Euler bias here; the
        # position variance is not, so it is checked against the
        # discrete fixed point instead
        dm = drift_for(1e-2, 400.0, 0.49, math.pi / 16)
        cfg = suggest_config(dm, seed=7, n_traj=16, batch_time=2.0)
        est = simulate(dm, cfg)
        cov = steady_covariance(dm)
        assert cov.var_p == pytest.approx(0.2538023528094241, rel=1e-12)
        assert abs(est.var_p - cov.var_p) / est.stderr_p < 3.0
        fq, _ = em_fixed_point(dm, cfg.dt)
        assert abs(est.var_q - fq) / est.stderr_q < 4.0


class TestFixedPoint:
    def test_converges_to_continuous(self):
        dm = drift_for(1e-2, 400.0, 0.49, math.pi / 16)
        cov = steady_covariance(dm)
        fq, fp = em_fixed_point(dm, 1e-6)
        assert fq == pytest.approx(cov.var_q, rel=2e-4)
        assert fp == pytest.approx(cov.var_p, rel=2e-4)

    def test_bias_is_first_order_in_dt(self):
        dm = drift_for(1e-2, 400.0, 0.49, math.pi / 16)
        exact = steady_covariance(dm).var_q
        bias = em_fixed_point(dm, 1e-3)[0] - exact
        half = em_fixed_point(dm, 5e-4)[0] - exact
        assert bias > 0
        assert half / bias == pytest.approx(0.5, abs=0.05)


class TestGuards:
    def test_unstable_model_rejected(self, quick_model):
        dm = DriftModel(M=-quick_model.M, D=quick_model.D)
        with pytest.raises(UnstableSystem):
            simulate(dm, SimConfig(dt=1e-3, duration=1.0, burn_in=1.0))

    def test_off_diagonal_diffusion_rejected(self, quick_model):
        D = quick_model.D.copy()
        D[0, 1] = 0.3
        with pytest.raises(ValueError, match="diagonal"):
            simulate(DriftModel(M=quick_model.M, D=D),
                     SimConfig(dt=1e-3, duration=1.0, burn_in=60.0))

    def test_divergence_detected(self):
        # stable eigenvalues but a huge non-normal transient: the schedule
        # checks pass while the trajectories blow through the limit
        M = np.diag([-0.01, -0.01, -0.01, -0.01])
        M[0, 1] = 1e9
        D = np.diag([0.0, 2.0, 0.0, 0.0])
        dm = DriftModel(M=M, D=D)
        cfg = SimConfig(dt=0.5, duration=16.0, burn_in=1000.0, n_traj=2,
                        seed=0)
        with pytest.raises(DivergingTrajectory):
            simulate(dm, cfg)
