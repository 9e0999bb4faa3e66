"""Pure-NumPy fallback for the threshold-pair quadrature kernel."""

from __future__ import annotations

import numpy as np

_TWO_PI = 2.0 * np.pi


def pair_sum_integral(u, v, wa, wb, half, xi, om):
    """Batched Gauss-Legendre quadrature of the threshold pair-sum integrand.

    Parameters
    ----------
    u : (T, P) array, first-quantizer thresholds scaled by 1/sigma1 per point
    v : (T, R) array, second-quantizer thresholds scaled by 1/sigma2 per point
    wa : (P,) level jumps of the first quantizer
    wb : (R,) level jumps of the second quantizer
    half : (T,) half-length of the integration interval [0, asin(rho)]
    xi, om : (K,) Gauss-Legendre nodes and weights on [-1, 1]

    Returns
    -------
    (T,) array with, per point,
    half/pi * sum_k om_k/2 * sum_ij wa_i wb_j exp(-(u_i^2 - 2 u_i v_j sin t_k
    + v_j^2) / (2 cos^2 t_k)) evaluated at t_k = half * (xi_k + 1).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    wa = np.asarray(wa, dtype=float)
    wb = np.asarray(wb, dtype=float)
    half = np.asarray(half, dtype=float)
    xi = np.asarray(xi, dtype=float)
    om = np.asarray(om, dtype=float)

    theta = half[:, None] * (xi[None, :] + 1.0)  # (T, K)
    sin_t = np.sin(theta)
    cos2 = np.cos(theta) ** 2
    inv_2c = 0.5 / cos2
    s_over_c2 = sin_t / cos2

    acc = np.zeros_like(theta)
    for i in range(u.shape[1]):
        ui = u[:, i, None]
        for j in range(v.shape[1]):
            vj = v[:, j, None]
            acc += (wa[i] * wb[j]) * np.exp(-(ui * ui + vj * vj) * inv_2c + (ui * vj) * s_over_c2)
    return (acc @ om) * (half / _TWO_PI)
