"""Time the compiled Euler-Maruyama kernel against the numpy fallback.

Both backends consume the identical noise arrays, so the printed estimates
must agree to rounding; the point of the comparison is the steps/s ratio.

Run:  python3 benchmarks/bench_kernels.py [--steps N] [--trajectories N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from omsqueeze.kernels import run_segment_compiled, run_segment_python
from omsqueeze.params import SystemParams, solve_steady_state
from omsqueeze.stability import build_drift


def _workload(n_traj: int, n_steps: int, seed: int):
    p = SystemParams(gamma_m=1e-2, cooperativity=400.0, G=0.49,
                     theta=np.pi / 16)
    dm = build_drift(solve_steady_state(p), p)
    dt = 1e-3
    a = np.ascontiguousarray(np.eye(4) + dt * dm.M)
    b = np.ascontiguousarray(np.sqrt(dt * np.diag(dm.D)))
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal((n_traj, n_steps, 4))
    return a, b, xi


def _run(kernel, a, b, xi) -> tuple[float, float, np.ndarray]:
    n_traj = xi.shape[0]
    states = np.zeros((n_traj, 4))
    sq_sums = np.zeros((n_traj, 2))
    t0 = time.perf_counter()
    kernel(a, b, states, xi, True, sq_sums)
    elapsed = time.perf_counter() - t0
    var_p = float(sq_sums[:, 1].sum()) / (n_traj * xi.shape[1])
    return elapsed, var_p, states


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--trajectories", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    a, b, xi = _workload(args.trajectories, args.steps, args.seed)
    total = args.trajectories * args.steps

    t_py, var_py, states_py = _run(run_segment_python, a, b, xi)
    print(f"numpy fallback : {t_py:8.3f} s   {total / t_py:12.3e} steps/s   "
          f"var_p ~ {var_py:.6f}")

    if run_segment_compiled is None:
        print("compiled kernel: not built (install with a C compiler present)")
        return 0

    t_cy, var_cy, states_cy = _run(run_segment_compiled, a, b, xi)
    print(f"compiled       : {t_cy:8.3f} s   {total / t_cy:12.3e} steps/s   "
          f"var_p ~ {var_cy:.6f}")
    print(f"speedup        : {t_py / t_cy:.1f}x")

    dev = float(np.abs(states_py - states_cy).max())
    print(f"final-state max deviation between backends: {dev:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
