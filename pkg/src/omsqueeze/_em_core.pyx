# cython: boundscheck=False, wraparound=False, cdivision=True
"""Euler-Maruyama inner loop, compiled.

One segment of the discretized Langevin update for a batch of independent
trajectories. The update map and noise arrays are prepared by the caller;
this loop only applies

    f <- a @ f + b * xi[t]

stepwise, optionally accumulating squared Q and P samples, and reports the
largest |component| seen so the caller can detect divergence.
"""


def run_segment(double[:, ::1] a, double[::1] b, double[:, ::1] states,
                double[:, :, ::1] xi, bint accumulate,
                double[:, ::1] sq_sums):
    """Advance all trajectories through one noise segment, in place.

    a: (4, 4) one-step deterministic map I + dt * M.
    b: (4,) per-component noise scale sqrt(dt) * sqrt(diag D).
    states: (n_traj, 4) current fluctuation vectors, updated in place.
    xi: (n_traj, n_steps, 4) standard normal draws.
    sq_sums: (n_traj, 2) running sums of f0^2 and f1^2, incremented when
        ``accumulate`` is set.

    Returns the maximum |f component| over the whole segment.
    """
    cdef Py_ssize_t n_traj = states.shape[0]
    cdef Py_ssize_t n_steps = xi.shape[1]
    cdef Py_ssize_t i, t
    cdef double f0, f1, f2, f3, g0, g1, g2, g3
    cdef double s0, s1, peak = 0.0
    cdef double a00 = a[0, 0], a01 = a[0, 1], a02 = a[0, 2], a03 = a[0, 3]
    cdef double a10 = a[1, 0], a11 = a[1, 1], a12 = a[1, 2], a13 = a[1, 3]
    cdef double a20 = a[2, 0], a21 = a[2, 1], a22 = a[2, 2], a23 = a[2, 3]
    cdef double a30 = a[3, 0], a31 = a[3, 1], a32 = a[3, 2], a33 = a[3, 3]
    cdef double b0 = b[0], b1 = b[1], b2 = b[2], b3 = b[3]

    for i in range(n_traj):
        f0 = states[i, 0]
        f1 = states[i, 1]
        f2 = states[i, 2]
        f3 = states[i, 3]
        s0 = 0.0
        s1 = 0.0
        for t in range(n_steps):
            g0 = a00 * f0 + a01 * f1 + a02 * f2 + a03 * f3 + b0 * xi[i, t, 0]
            g1 = a10 * f0 + a11 * f1 + a12 * f2 + a13 * f3 + b1 * xi[i, t, 1]
            g2 = a20 * f0 + a21 * f1 + a22 * f2 + a23 * f3 + b2 * xi[i, t, 2]
            g3 = a30 * f0 + a31 * f1 + a32 * f2 + a33 * f3 + b3 * xi[i, t, 3]
            f0 = g0
            f1 = g1
            f2 = g2
            f3 = g3
            if accumulate:
                s0 += f0 * f0
                s1 += f1 * f1
            if f0 > peak:
                peak = f0
            elif -f0 > peak:
                peak = -f0
            if f1 > peak:
                peak = f1
            elif -f1 > peak:
                peak = -f1
            if f2 > peak:
                peak = f2
            elif -f2 > peak:
                peak = -f2
            if f3 > peak:
                peak = f3
            elif -f3 > peak:
                peak = -f3
        states[i, 0] = f0
        states[i, 1] = f1
        states[i, 2] = f2
        states[i, 3] = f3
        sq_sums[i, 0] += s0
        sq_sums[i, 1] += s1
    return peak
