"""Links between Gaussian moments and the moments of quantized versions.

For zero-threshold binary quantization the link is the arcsine law
(Van Vleck): the covariance of the sign pair determines the underlying
correlation exactly via rho = sin(pi/2 * gq).  For finite multi-level
quantizers the covariance of the outputs is a weighted sum of bivariate-normal
integrals over the threshold pairs, evaluated here by adaptive quadrature
after the substitution y = sin(theta), which removes the 1/sqrt(1-y^2)
endpoint behaviour.  For infinite-level mid-tread uniform quantizers the
covariance and variance follow rapidly convergent theta-function style series
in exp(-2 pi^2 / k^2), with k the step-to-sigma ratio.

All formulas assume zero-mean inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .moments import LaggedMoments
from .quantize import BinaryQuantizer, FiniteQuantizer, QuantizerSpec
from .signals import TrueMoments
from ._kernels import pair_sum_integral

__all__ = [
    "GaussPair",
    "QuadratureError",
    "std_normal_cdf",
    "vanvleck_forward",
    "vanvleck_invert",
    "quantized_cross_cov",
    "quantized_mean",
    "quantized_variance",
    "midtread_cross_cov",
    "midtread_variance",
    "binary_true_moments",
    "quantized_true_moments",
    "midtread_true_moments",
    "finite_view",
]

# The pair integrand is smooth only for |rho| away from 1; callers must keep
# prior correlation bounds at or below this cap.
RHO_CAP = 0.999

_SQRT2 = math.sqrt(2.0)


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature fails to reach the requested tolerance."""

    def __init__(self, message: str, worst_interval: tuple[float, float]):
        self.worst_interval = worst_interval
        super().__init__(f"{message}; worst subinterval {worst_interval}")


@dataclass(frozen=True)
class GaussPair:
    """Bivariate zero-mean Gaussian described by correlation and deviations."""

    rho: float
    sigma1: float
    sigma2: float

    def __post_init__(self):
        if not abs(self.rho) < 1.0:
            raise ValueError(f"|rho| must be < 1, got {self.rho}")
        if not (self.sigma1 > 0.0 and self.sigma2 > 0.0):
            raise ValueError(
                f"standard deviations must be positive, got {self.sigma1}, {self.sigma2}"
            )


def std_normal_cdf(x):
    """Standard normal CDF via the complementary error function."""
    arr = np.asarray(x, dtype=float)
    out = 0.5 * erfc(-arr / _SQRT2)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def vanvleck_forward(rho) -> float:
    """Covariance of the +/-1 sign pair of a Gaussian pair with correlation rho."""
    r = np.asarray(rho, dtype=float)
    if np.any(np.abs(r) > 1.0):
        raise ValueError(f"|rho| must be <= 1, got {rho}")
    out = (2.0 / np.pi) * np.arcsin(r)
    return float(out) if out.ndim == 0 else out


def vanvleck_invert(gq) -> float:
    """Underlying Gaussian correlation from the covariance of the sign pair."""
    g = np.asarray(gq, dtype=float)
    if np.any(np.abs(g) > 1.0):
        raise ValueError(
            f"|gq| must be <= 1 (covariance of +/-1 variables), got {gq}"
        )
    out = np.sin(0.5 * np.pi * g)
    return float(out) if out.ndim == 0 else out


def finite_view(spec: QuantizerSpec) -> tuple[np.ndarray, np.ndarray]:
    """Interior thresholds and level jumps of a binary or finite spec."""
    if isinstance(spec, BinaryQuantizer):
        return np.array([spec.threshold]), np.array([2.0])
    if isinstance(spec, FiniteQuantizer):
        return spec.thresholds, np.diff(spec.levels)
    raise TypeError(
        f"quantizer must be binary or finite-level, got {type(spec).__name__}"
    )


# Embedded Gauss-Legendre pair for the adaptive segments; the fine rule's
# value is kept, the difference serves as the error estimate.
_XI_LO, _OM_LO = np.polynomial.legendre.leggauss(21)
_XI_HI, _OM_HI = np.polynomial.legendre.leggauss(42)


def _segment_value(u, v, wa, wb, lo, hi, xi, om) -> float:
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    theta = mid + half * xi
    sin_t = np.sin(theta)
    cos2 = np.cos(theta) ** 2
    expo = (
        -(u[:, None, None] ** 2 + v[None, :, None] ** 2) / (2.0 * cos2)
        + u[:, None, None] * v[None, :, None] * sin_t / cos2
    )
    g = np.einsum("i,j,ijk->k", wa, wb, np.exp(expo))
    return float(half * (g @ om) / (2.0 * np.pi))


def _pair_integral_adaptive(u, v, wa, wb, theta_hi: float, tol: float) -> float:
    """Adaptive quadrature of the pair-sum integrand over [0, theta_hi].

    Each segment carries an embedded coarse/fine Gauss-Legendre pair; the
    worst segment is bisected until the summed error estimate meets ``tol``.
    """
    if theta_hi == 0.0:
        return 0.0
    lo, hi = (0.0, theta_hi) if theta_hi > 0 else (theta_hi, 0.0)
    sign = 1.0 if theta_hi > 0 else -1.0

    def evaluate(a: float, b: float) -> tuple[float, float, float, float]:
        fine = _segment_value(u, v, wa, wb, a, b, _XI_HI, _OM_HI)
        coarse = _segment_value(u, v, wa, wb, a, b, _XI_LO, _OM_LO)
        return (a, b, fine, abs(fine - coarse))

    segments = [evaluate(lo, hi)]
    for _ in range(200):
        if sum(s[3] for s in segments) <= tol:
            return sign * sum(s[2] for s in segments)
        worst = max(range(len(segments)), key=lambda i: segments[i][3])
        a, b, _, _ = segments.pop(worst)
        mid = 0.5 * (a + b)
        segments.extend([evaluate(a, mid), evaluate(mid, b)])
    a, b, _, _ = max(segments, key=lambda s: s[3])
    raise QuadratureError(
        f"pair integral did not converge to tolerance {tol:g}", (a, b)
    )


def quantized_cross_cov(
    pair: GaussPair,
    spec_a: QuantizerSpec,
    spec_b: QuantizerSpec,
    tol: float = 1e-11,
) -> float:
    """Covariance of the quantizer outputs for a zero-mean Gaussian pair.

    Both specs must have finitely many interior thresholds (binary or
    finite-level).  The result is a double sum over threshold pairs of 1-D
    integrals from 0 to rho of the standardized bivariate normal density,
    each evaluated to absolute tolerance ``tol``.
    """
    if abs(pair.rho) > RHO_CAP:
        raise ValueError(f"|rho| must be <= {RHO_CAP} for the pair integral, got {pair.rho}")
    c, wa = finite_view(spec_a)
    d, wb = finite_view(spec_b)
    u = c / pair.sigma1
    v = d / pair.sigma2
    return _pair_integral_adaptive(u, v, wa, wb, math.asin(pair.rho), tol)


def quantized_cross_cov_grid(rho, sigma1, sigma2, spec_a, spec_b, n_nodes: int = 64):
    """Vectorized fixed-order evaluation of quantized_cross_cov over arrays.

    Used by the bound-maximization grids, where many (rho, sigma1, sigma2)
    points share the same quantizer pair; accuracy is checked in tests against
    the adaptive scalar path.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    sigma1 = np.broadcast_to(np.asarray(sigma1, dtype=float), rho.shape)
    sigma2 = np.broadcast_to(np.asarray(sigma2, dtype=float), rho.shape)
    if np.any(np.abs(rho) > RHO_CAP):
        raise ValueError(f"|rho| must be <= {RHO_CAP} for the pair integral")
    c, wa = finite_view(spec_a)
    d, wb = finite_view(spec_b)
    u = c[None, :] / sigma1[:, None]
    v = d[None, :] / sigma2[:, None]
    half = 0.5 * np.arcsin(rho)
    xi, om = np.polynomial.legendre.leggauss(n_nodes)
    return pair_sum_integral(u, v, wa, wb, half, xi, om)


def _cell_probabilities(sigma: float, thresholds: np.ndarray) -> np.ndarray:
    cdf = std_normal_cdf(np.asarray(thresholds, dtype=float) / sigma)
    return np.diff(np.concatenate(([0.0], cdf, [1.0])))


def quantized_mean(sigma: float, spec: QuantizerSpec) -> float:
    """E{Q(w)} for w ~ N(0, sigma^2)."""
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not isinstance(spec, (BinaryQuantizer, FiniteQuantizer)):
        raise TypeError(f"quantizer must be binary or finite-level, got {type(spec).__name__}")
    p = _cell_probabilities(sigma, spec.interior_thresholds)
    return float(spec.levels @ p)


def quantized_variance(sigma: float, spec: QuantizerSpec) -> float:
    """Var{Q(w)} for w ~ N(0, sigma^2), via exact cell probabilities."""
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not isinstance(spec, (BinaryQuantizer, FiniteQuantizer)):
        raise TypeError(f"quantizer must be binary or finite-level, got {type(spec).__name__}")
    p = _cell_probabilities(sigma, spec.interior_thresholds)
    mean = float(spec.levels @ p)
    second = float((spec.levels**2) @ p)
    return second - mean * mean


# ---------------------------------------------------------------------------
# Infinite-level mid-tread uniform quantization (theta-function series)
# ---------------------------------------------------------------------------

_SERIES_TOL = 1e-18
_SERIES_MAX_TERMS = 1000


def _alternating_gauss_series(scale: float) -> float:
    """sum_{n>=1} (-1)^n exp(-scale * n^2), accurate to _SERIES_TOL."""
    total = 0.0
    for n in range(1, _SERIES_MAX_TERMS + 1):
        term = math.exp(-scale * n * n)
        total += term if n % 2 == 0 else -term
        if term < _SERIES_TOL:
            return total
    raise RuntimeError(f"series did not converge for scale {scale:g}")


def midtread_cross_cov(
    rho: float, sigma1: float, sigma2: float, delta1: float, delta2: float
) -> float:
    """Covariance of mid-tread uniformly quantized outputs of a Gaussian pair.

    Exact series form: the unquantized covariance plus the signal/error and
    error/error covariance corrections, each a rapidly converging sum in
    exp(-2 pi^2 n^2 / k_i^2) with k_i = delta_i / sigma_i.
    """
    if not abs(rho) < 1.0:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    if sigma1 <= 0 or sigma2 <= 0 or delta1 <= 0 or delta2 <= 0:
        raise ValueError("sigmas and deltas must be positive")
    k1 = delta1 / sigma1
    k2 = delta2 / sigma2
    gamma = rho * sigma1 * sigma2

    s1 = _alternating_gauss_series(2.0 * math.pi**2 / (k1 * k1))
    s2 = _alternating_gauss_series(2.0 * math.pi**2 / (k2 * k2))
    cov_w1_e2 = 2.0 * gamma * s2
    cov_e1_w2 = 2.0 * gamma * s1

    # error/error double series; writing the bracket as a difference of two
    # Gaussians in (n1, n2) keeps both exponents negative for either sign of
    # rho, and terms decay at least like exp(-2 pi^2 (1-|rho|) sum n_i^2/k_i^2)
    four_pi2 = 4.0 * math.pi**2

    def gauss_term(n1: int, n2: int, r: float) -> float:
        expo = -four_pi2 * (
            0.5 * (n1 / k1) ** 2 + 0.5 * (n2 / k2) ** 2 - r * n1 * n2 / (k1 * k2)
        )
        return math.exp(expo) if expo > -745.0 else 0.0

    cov_e1_e2 = 0.0
    for n1 in range(1, _SERIES_MAX_TERMS + 1):
        row = 0.0
        row_max = 0.0
        for n2 in range(1, _SERIES_MAX_TERMS + 1):
            term = gauss_term(n1, n2, rho) - gauss_term(n1, n2, -rho)
            term *= ((-1.0) ** (n1 + n2)) / (n1 * n2)
            row += term
            row_max = max(row_max, abs(term))
            if abs(term) < _SERIES_TOL and n2 > 2:
                break
        cov_e1_e2 += row
        if row_max < _SERIES_TOL and n1 > 2:
            break
    cov_e1_e2 *= k1 * k2 * sigma1 * sigma2 / (2.0 * math.pi**2)

    return gamma + cov_w1_e2 + cov_e1_w2 + cov_e1_e2


def midtread_variance(sigma: float, delta: float) -> float:
    """Variance of the mid-tread quantized output of w ~ N(0, sigma^2)."""
    if sigma <= 0 or delta <= 0:
        raise ValueError("sigma and delta must be positive")
    k = delta / sigma
    scale = 2.0 * math.pi**2 / (k * k)
    s_plain = _alternating_gauss_series(scale)
    s_sq = 0.0
    for n in range(1, _SERIES_MAX_TERMS + 1):
        term = math.exp(-scale * n * n) / (n * n)
        s_sq += term if n % 2 == 0 else -term
        if term < _SERIES_TOL:
            break
    return sigma**2 + delta**2 / 12.0 + (delta**2 / math.pi**2) * s_sq + 4.0 * sigma**2 * s_plain


# ---------------------------------------------------------------------------
# True-moment bridges: exact quantized moments from exact Gaussian moments
# ---------------------------------------------------------------------------


def binary_true_moments(tm: TrueMoments, m: int) -> LaggedMoments:
    """Exact covariances of the zero-threshold sign pair, arcsine-law forward."""
    gq_xz = {k: vanvleck_forward(tm.rho_xz(k)) for k in range(1 - m, m + 1)}
    gq_zz = {0: 1.0}
    gq_zz.update({k: vanvleck_forward(tm.rho_zz(k)) for k in range(1, m + 1)})
    return LaggedMoments(gamma_xz=gq_xz, gamma_zz=gq_zz, var_z=1.0, sample_count=None)


def quantized_true_moments(
    tm: TrueMoments,
    spec_x: QuantizerSpec,
    spec_z: QuantizerSpec,
    m: int,
    q: int,
    tol: float = 1e-11,
) -> LaggedMoments:
    """Exact quantized-output covariances over the lags a causality matrix needs."""
    if q < m or m < 1:
        raise ValueError(f"need q >= m >= 1, got m={m}, q={q}")
    if q > tm.max_lag:
        raise ValueError(f"true moments cover lags up to {tm.max_lag}, need {q}")
    sx, sz = tm.sigma_x, tm.sigma_z
    gq_xz = {
        k: quantized_cross_cov(GaussPair(tm.rho_xz(k), sx, sz), spec_x, spec_z, tol)
        for k in range(1 - m, m + 1)
    }
    gq_zz = {0: quantized_variance(sz, spec_z)}
    gq_zz.update(
        {
            k: quantized_cross_cov(GaussPair(tm.rho_zz(k), sz, sz), spec_z, spec_z, tol)
            for k in range(1, q + 1)
        }
    )
    return LaggedMoments(
        gamma_xz=gq_xz, gamma_zz=gq_zz, var_z=gq_zz[0], sample_count=None
    )


def midtread_true_moments(
    tm: TrueMoments, delta_x: float, delta_z: float, m: int, q: int
) -> LaggedMoments:
    """Exact mid-tread quantized covariances over the lags a causality matrix needs."""
    if q < m or m < 1:
        raise ValueError(f"need q >= m >= 1, got m={m}, q={q}")
    if q > tm.max_lag:
        raise ValueError(f"true moments cover lags up to {tm.max_lag}, need {q}")
    sx, sz = tm.sigma_x, tm.sigma_z
    gq_xz = {
        k: midtread_cross_cov(tm.rho_xz(k), sx, sz, delta_x, delta_z)
        for k in range(1 - m, m + 1)
    }
    gq_zz = {0: midtread_variance(sz, delta_z)}
    gq_zz.update(
        {
            k: midtread_cross_cov(tm.rho_zz(k), sz, sz, delta_z, delta_z)
            for k in range(1, q + 1)
        }
    )
    return LaggedMoments(
        gamma_xz=gq_xz, gamma_zz=gq_zz, var_z=gq_zz[0], sample_count=None
    )
