# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled plane-plane integrand kernel.

Scalar-loop twin of ``_plane_kernel_py``; see that module for the variable
conventions.  Both backends must produce matching values to rounding error.
"""

from libc.math cimport exp, log1p, sqrt

DEF PC_SENTINEL = -1.0
DEF MAX_MEDIA = 64


cdef inline void _stack_r_one(
    double x2, double y,
    const double[::1] eps, const double[::1] tau,
    double* r_te_out, double* r_tm_out,
) noexcept nogil:
    cdef double kap[MAX_MEDIA]
    cdef int n_media = eps.shape[0]
    cdef bint pc_sub = eps[n_media - 1] == PC_SENTINEL
    cdef int n_real = n_media - 1 if pc_sub else n_media
    cdef int j, deepest
    cdef double ki, kj, ei, ej, r_te, r_tm, rho_te, rho_tm, decay, zt, zm

    kap[0] = y
    for j in range(n_real):
        kap[j + 1] = sqrt(y * y + (eps[j] - 1.0) * x2)

    if pc_sub:
        r_te = -1.0
        r_tm = 1.0
        deepest = n_real
    else:
        ki = kap[n_real - 1]
        kj = kap[n_real]
        ei = 1.0 if n_real == 1 else eps[n_real - 2]
        ej = eps[n_real - 1]
        r_te = (ki - kj) / (ki + kj)
        r_tm = (ej * ki - ei * kj) / (ej * ki + ei * kj)
        deepest = n_real - 1

    for j in range(deepest, 0, -1):
        decay = exp(-kap[j] * tau[j - 1])
        ki = kap[j - 1]
        kj = kap[j]
        ei = 1.0 if j == 1 else eps[j - 2]
        ej = eps[j - 1]
        rho_te = (ki - kj) / (ki + kj)
        rho_tm = (ej * ki - ei * kj) / (ej * ki + ei * kj)
        zt = r_te * decay
        zm = r_tm * decay
        r_te = (rho_te + zt) / (1.0 + rho_te * zt)
        r_tm = (rho_tm + zm) / (1.0 + rho_tm * zm)

    r_te_out[0] = r_te
    r_tm_out[0] = r_tm


def plane_integrand_batch(double x, y, eps_a, tau_a, eps_b, tau_b):
    """Round-trip integrand factors for a batch of inner nodes.

    Same contract as the numpy fallback: returns ``(g_energy, g_pressure)``
    arrays over the y nodes, each summed over TE and TM.
    """
    import numpy as np

    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] ea = np.ascontiguousarray(eps_a, dtype=np.float64)
    cdef double[::1] ta = np.ascontiguousarray(tau_a, dtype=np.float64)
    cdef double[::1] eb = np.ascontiguousarray(eps_b, dtype=np.float64)
    cdef double[::1] tb = np.ascontiguousarray(tau_b, dtype=np.float64)
    if ea.shape[0] > MAX_MEDIA - 1 or eb.shape[0] > MAX_MEDIA - 1:
        raise ValueError("stack too deep for compiled kernel")

    out_e = np.empty(yv.shape[0], dtype=np.float64)
    out_p = np.empty(yv.shape[0], dtype=np.float64)
    cdef double[::1] ge = out_e
    cdef double[::1] gp = out_p

    cdef double x2 = x * x
    cdef Py_ssize_t i
    cdef double rte_a, rtm_a, rte_b, rtm_b, emy, z_te, z_tm
    with nogil:
        for i in range(yv.shape[0]):
            _stack_r_one(x2, yv[i], ea, ta, &rte_a, &rtm_a)
            _stack_r_one(x2, yv[i], eb, tb, &rte_b, &rtm_b)
            emy = exp(-yv[i])
            z_te = rte_a * rte_b * emy
            z_tm = rtm_a * rtm_b * emy
            ge[i] = log1p(-z_te) + log1p(-z_tm)
            gp[i] = z_te / (1.0 - z_te) + z_tm / (1.0 - z_tm)
    return out_e, out_p
