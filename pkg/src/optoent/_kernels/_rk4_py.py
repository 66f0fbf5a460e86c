"""Pure-numpy RK4 propagation of the covariance flow, same arithmetic as ``_rk4.pyx``."""
import numpy as np


def rk4_covariance(a, d, v0, dt, nsteps):
    """Advance symmetric ``v0`` by ``nsteps`` classical RK4 steps of size ``dt``."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    v = np.array(v0, dtype=np.float64, order="C", copy=True)
    h2 = 0.5 * dt
    h6 = dt / 6.0

    def flow(x):
        m = a @ x
        return m + m.T + d

    for _ in range(int(nsteps)):
        k1 = flow(v)
        k2 = flow(v + h2 * k1)
        k3 = flow(v + h2 * k2)
        k4 = flow(v + dt * k3)
        v = v + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        v = 0.5 * (v + v.T)
    return v
