# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fixed-step RK4 propagation of the covariance flow dV/dt = AV + VA^T + D."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline void _flow(const double[:, ::1] a, const double[:, ::1] d,
                       double[:, ::1] x, double[:, ::1] m, double[:, ::1] out,
                       Py_ssize_t n) noexcept nogil:
    # out = A x + (A x)^T + D, valid for symmetric x
    cdef Py_ssize_t i, j, k
    cdef double s
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += a[i, k] * x[k, j]
            m[i, j] = s
    for i in range(n):
        for j in range(n):
            out[i, j] = m[i, j] + m[j, i] + d[i, j]


def rk4_covariance(a, d, v0, double dt, long long nsteps):
    """Advance symmetric ``v0`` by ``nsteps`` classical RK4 steps of size ``dt``."""
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0]
    v_arr = np.array(v0, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] v = v_arr
    cdef double[:, ::1] x = np.empty((n, n))
    cdef double[:, ::1] m = np.empty((n, n))
    cdef double[:, ::1] k1 = np.empty((n, n))
    cdef double[:, ::1] k2 = np.empty((n, n))
    cdef double[:, ::1] k3 = np.empty((n, n))
    cdef double[:, ::1] k4 = np.empty((n, n))
    cdef double h2 = 0.5 * dt
    cdef double h6 = dt / 6.0
    cdef double s
    cdef long long step
    cdef Py_ssize_t i, j

    with nogil:
        for step in range(nsteps):
            _flow(av, dv, v, m, k1, n)
            for i in range(n):
                for j in range(n):
                    x[i, j] = v[i, j] + h2 * k1[i, j]
            _flow(av, dv, x, m, k2, n)
            for i in range(n):
                for j in range(n):
                    x[i, j] = v[i, j] + h2 * k2[i, j]
            _flow(av, dv, x, m, k3, n)
            for i in range(n):
                for j in range(n):
                    x[i, j] = v[i, j] + dt * k3[i, j]
            _flow(av, dv, x, m, k4, n)
            for i in range(n):
                for j in range(n):
                    v[i, j] = v[i, j] + h6 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
            for i in range(n):
                for j in range(i + 1, n):
                    s = 0.5 * (v[i, j] + v[j, i])
                    v[i, j] = s
                    v[j, i] = s
    return v_arr
