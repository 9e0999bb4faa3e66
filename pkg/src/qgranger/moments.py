"""Ergodic estimation of lagged auto- and cross-covariances.

Estimates use the 1/n normalization of the ergodic-average estimator (biased
at finite n but almost surely convergent).  The zero-mean form is
(1/n) * sum_{k=1}^{n-kappa} a_k b_{k+kappa}; the mean-corrected form subtracts
the product of the full-sample empirical means.  Lags are limited to n/4,
beyond which finite-sample covariance estimates are unreliable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

__all__ = ["LaggedMoments", "LagRangeError", "estimate_cross_cov", "estimate_moments"]


class LagRangeError(ValueError):
    """Raised when a requested lag exceeds the n/4 estimation reliability rule."""

    def __init__(self, lag: int, n: int):
        self.lag = lag
        self.n = n
        super().__init__(
            f"lag {lag} exceeds n/4 = {n // 4} for n = {n} samples "
            "(covariance estimates are unreliable beyond a quarter of the record)"
        )


@dataclass(frozen=True)
class LaggedMoments:
    """Lagged second-order moments of an (x, z) pair.

    gamma_xz[k] = Cov(x_t, z_{t+k}); gamma_zz[k] for k >= 0; var_z duplicates
    gamma_zz[0].  ``sample_count`` is None for exact (population) moments, in
    which case the n/4 lag rule does not apply.
    """

    gamma_xz: Mapping[int, float]
    gamma_zz: Mapping[int, float]
    var_z: float
    sample_count: Optional[int] = None
    mean_x: float = 0.0
    mean_z: float = 0.0

    def __post_init__(self):
        if self.var_z < 0.0:
            raise ValueError(f"var_z must be >= 0, got {self.var_z}")
        if 0 in self.gamma_zz and not np.isclose(
            self.gamma_zz[0], self.var_z, rtol=1e-12, atol=1e-12
        ):
            raise ValueError(
                f"var_z={self.var_z} inconsistent with gamma_zz(0)={self.gamma_zz[0]}"
            )
        if self.sample_count is not None:
            worst = max(
                (abs(k) for k in (*self.gamma_xz, *self.gamma_zz)), default=0
            )
            if worst > self.sample_count // 4:
                raise LagRangeError(worst, self.sample_count)


def _cross_cov_at(a: np.ndarray, b: np.ndarray, lag: int, zero_mean: bool) -> float:
    n = a.size
    if lag < 0:
        return _cross_cov_at(b, a, -lag, zero_mean)
    raw = float(a[: n - lag] @ b[lag:]) / n
    if zero_mean:
        return raw
    return raw - float(a.sum()) * float(b.sum()) / (n * n)


def estimate_cross_cov(a, b, lags, zero_mean: bool = True) -> dict[int, float]:
    """Estimate Cov(a_t, b_{t+kappa}) for each kappa in ``lags``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError("sequences must be 1-D and of equal length")
    n = a.size
    if n < 8:
        raise ValueError(f"need at least 8 samples, got {n}")
    lags = [int(k) for k in lags]
    for k in lags:
        if abs(k) > n // 4:
            raise LagRangeError(k, n)
    return {k: _cross_cov_at(a, b, k, zero_mean) for k in lags}


def estimate_moments(x, z, m: int, q: int, zero_mean: bool = True) -> LaggedMoments:
    """Estimate every lag a causality matrix of order (m, q) requires.

    Cross-covariances gamma_xz on [1-m, m], auto-covariances gamma_zz on
    [0, q]; requires q >= m >= 1 and q <= n/4.
    """
    if m < 1 or q < m:
        raise ValueError(f"need q >= m >= 1, got m={m}, q={q}")
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    gamma_xz = estimate_cross_cov(x, z, range(1 - m, m + 1), zero_mean)
    gamma_zz = estimate_cross_cov(z, z, range(0, q + 1), zero_mean)
    mean_x = 0.0 if zero_mean else float(x.mean())
    mean_z = 0.0 if zero_mean else float(z.mean())
    return LaggedMoments(
        gamma_xz=gamma_xz,
        gamma_zz=gamma_zz,
        var_z=gamma_zz[0],
        sample_count=x.size,
        mean_x=mean_x,
        mean_z=mean_z,
    )
