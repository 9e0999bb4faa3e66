# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel for the threshold-pair quadrature (see _price_np for the
reference implementation and the docstring of pair_sum_integral)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin

cnp.import_array()

cdef double TWO_PI = 6.283185307179586
# exp() underflows to zero below roughly -745; skipping saves the libm call.
cdef double EXP_UNDERFLOW = -745.0


def pair_sum_integral(u, v, wa, wb, half, xi, om):
    u_c = np.ascontiguousarray(u, dtype=np.float64)
    v_c = np.ascontiguousarray(v, dtype=np.float64)
    wa_c = np.ascontiguousarray(wa, dtype=np.float64)
    wb_c = np.ascontiguousarray(wb, dtype=np.float64)
    half_c = np.ascontiguousarray(half, dtype=np.float64)
    xi_c = np.ascontiguousarray(xi, dtype=np.float64)
    om_c = np.ascontiguousarray(om, dtype=np.float64)
    out = np.empty(u_c.shape[0], dtype=np.float64)
    _pair_sum_integral(u_c, v_c, wa_c, wb_c, half_c, xi_c, om_c, out)
    return out


cdef void _pair_sum_integral(
    double[:, ::1] u,
    double[:, ::1] v,
    double[::1] wa,
    double[::1] wb,
    double[::1] half,
    double[::1] xi,
    double[::1] om,
    double[::1] out,
) nogil:
    cdef Py_ssize_t n_pts = u.shape[0]
    cdef Py_ssize_t n_u = u.shape[1]
    cdef Py_ssize_t n_v = v.shape[1]
    cdef Py_ssize_t n_nodes = xi.shape[0]
    cdef Py_ssize_t t, k, i, j
    cdef double h, theta, s, c, c2, inv_2c, s_over_c2
    cdef double total, g, ui, wi, e

    for t in range(n_pts):
        h = half[t]
        total = 0.0
        for k in range(n_nodes):
            theta = h * (xi[k] + 1.0)
            s = sin(theta)
            c = cos(theta)
            c2 = c * c
            inv_2c = 0.5 / c2
            s_over_c2 = s / c2
            g = 0.0
            for i in range(n_u):
                ui = u[t, i]
                wi = wa[i]
                for j in range(n_v):
                    e = -(ui * ui + v[t, j] * v[t, j]) * inv_2c + ui * v[t, j] * s_over_c2
                    if e > EXP_UNDERFLOW:
                        g += wi * wb[j] * exp(e)
            total += om[k] * g
        out[t] = total * h / TWO_PI
