"""Numerical core for the bivariate-normal threshold-pair integrals.

The hot loop of the package is the Gauss-Legendre evaluation of

    (1/2pi) * integral_0^asin(rho) sum_ij wa_i wb_j
        exp(-(u_i^2 - 2 u_i v_j sin t + v_j^2) / (2 cos^2 t)) dt

over large batches of (rho, sigma) grid points.  A compiled Cython kernel is
used when available; otherwise a vectorized NumPy implementation with the same
signature is selected at import time.
"""

from . import _price_np

try:
    from . import _price_cy as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _price_np
    BACKEND = "numpy"

pair_sum_integral = _impl.pair_sum_integral
pair_sum_integral_numpy = _price_np.pair_sum_integral

__all__ = ["pair_sum_integral", "pair_sum_integral_numpy", "BACKEND"]
