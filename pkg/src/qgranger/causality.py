"""Causality matrices and the rank / smallest-singular-value tests.

The (m+1) x (ell+m) causality matrix collects the cross-covariances between x
and z and the auto-covariances of z around time k: rows index the outcomes
z_{k-m+1} .. z_{k+1}, the first m columns the conditioning block
x_{k-m+1} .. x_k, the next m columns z_{k-m+1} .. z_k, and the last ell-m
columns the deeper past z_{k-ell+1} .. z_{k-m}.  Under the partial Markov
property, x fails to influence z exactly when this matrix has rank m, so its
smallest singular value is a measure of the strength of the influence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .gausslink import vanvleck_invert
from .moments import LaggedMoments
from .report import Verdict
from .signals import TrueMoments

__all__ = [
    "CausalityMatrix",
    "GaussianBlocks",
    "BinaryDecision",
    "build_causality_matrix",
    "build_binary_R",
    "smallest_singular_value",
    "numeric_rank",
    "conditional_equality_rank",
    "conditional_mean_distance",
    "conditional_distance_lower_bound",
    "binary_causality_test",
]

DEFAULT_RANK_RTOL = 1e-10
DEFAULT_THETA = 0.1

MomentSource = Union[LaggedMoments, TrueMoments]


@dataclass(frozen=True)
class CausalityMatrix:
    """Covariance-type causality matrix with its index parameters.

    ``source`` tags the entry type: "covariance" (raw Gaussian moments),
    "correlation" (the diagonal-rescaled variant with unit lag-0 entries), or
    "quantized" (moments of quantizer outputs).
    """

    m: int
    ell: int
    entries: np.ndarray
    source: str = "covariance"

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        expected = (self.m + 1, self.ell + self.m)
        if e.shape != expected:
            raise ValueError(f"entries must have shape {expected}, got {e.shape}")
        if self.source == "correlation":
            if np.any(np.abs(e) > 1.0 + 1e-12):
                raise ValueError("correlation matrix entries must lie in [-1, 1]")
        object.__setattr__(self, "entries", e)


def _lookup(table, lag: int, name: str, symmetric: bool) -> float:
    key = abs(lag) if symmetric else lag
    try:
        return float(table[key])
    except KeyError:
        raise ValueError(f"moments are missing {name} at lag {key}") from None


def build_causality_matrix(
    moments: MomentSource, m: int, ell: int, source: Optional[str] = None
) -> CausalityMatrix:
    """Assemble the (m+1) x (ell+m) causality matrix from lagged moments.

    Entry map (gamma_xz(k) = Cov(x_t, z_{t+k})):
      block 1: (i, j) -> gamma_xz(i - j),        j = 0..m-1
      block 2: (i, j) -> gamma_zz(i - j),        j = 0..m-1
      block 3: (i, j') -> gamma_zz(ell - m + i - j'), j' = 0..ell-m-1
    """
    if m < 1 or ell < m:
        raise ValueError(f"need ell >= m >= 1, got m={m}, ell={ell}")
    gxz = moments.gamma_xz
    gzz = moments.gamma_zz
    out = np.empty((m + 1, ell + m))
    for i in range(m + 1):
        for j in range(m):
            out[i, j] = _lookup(gxz, i - j, "gamma_xz", symmetric=False)
        for j in range(m):
            out[i, m + j] = _lookup(gzz, i - j, "gamma_zz", symmetric=True)
        for j in range(ell - m):
            out[i, 2 * m + j] = _lookup(gzz, ell - m + i - j, "gamma_zz", symmetric=True)
    if source is None:
        source = "quantized" if isinstance(moments, LaggedMoments) else "covariance"
    return CausalityMatrix(m=m, ell=ell, entries=out, source=source)


def build_binary_R(moments: LaggedMoments, m: int) -> CausalityMatrix:
    """Correlation-type causality matrix recovered from sign-pair covariances.

    Applies the arcsine-law inverse entrywise to the covariances of binary
    (+/-1, zero-threshold) quantizer outputs and pins the lag-0
    autocorrelation to 1, which the sign data cannot identify directly.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    rho_xz = {}
    for k in range(1 - m, m + 1):
        gq = _lookup(moments.gamma_xz, k, "gamma_xz", symmetric=False)
        rho_xz[k] = vanvleck_invert(gq)
    rho_zz = {0: 1.0}
    for k in range(1, m + 1):
        gq = _lookup(moments.gamma_zz, k, "gamma_zz", symmetric=True)
        rho_zz[k] = vanvleck_invert(gq)

    out = np.empty((m + 1, 2 * m))
    for i in range(m + 1):
        for j in range(m):
            out[i, j] = rho_xz[i - j]
        for j in range(m):
            out[i, m + j] = rho_zz[abs(i - j)]
    return CausalityMatrix(m=m, ell=m, entries=out, source="correlation")


def _svdvals(matrix: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.svd(np.asarray(matrix, dtype=float), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"SVD did not converge: {exc}") from exc


def smallest_singular_value(matrix) -> float:
    """Smallest singular value of a matrix or CausalityMatrix."""
    if isinstance(matrix, CausalityMatrix):
        matrix = matrix.entries
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        raise ValueError("matrix must be non-empty")
    return float(_svdvals(matrix)[-1])


def numeric_rank(matrix, rel_tol: float = DEFAULT_RANK_RTOL) -> int:
    """Number of singular values above rel_tol * sigma_max * max(dims)."""
    if isinstance(matrix, CausalityMatrix):
        matrix = matrix.entries
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        raise ValueError("matrix must be non-empty")
    s = _svdvals(matrix)
    cutoff = rel_tol * s[0] * max(matrix.shape)
    return int(np.sum(s > cutoff))


# ---------------------------------------------------------------------------
# Conditional-distribution criteria for jointly Gaussian vectors (X, Y, Z, W)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianBlocks:
    """Covariance blocks of jointly Gaussian (X, Y, Z, W).

    ``yzw`` is the full covariance of the stacked vector [Y Z W] (in that
    order) and must be positive definite; the X cross blocks and the Z rows
    are stored explicitly.
    """

    xy: np.ndarray
    xz: np.ndarray
    xw: np.ndarray
    zy: np.ndarray
    zz: np.ndarray
    zw: np.ndarray
    yzw: np.ndarray
    dim_y: int
    dim_z: int
    dim_w: int

    def __post_init__(self):
        for name in ("xy", "xz", "xw", "zy", "zz", "zw", "yzw"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=float)))
        dy, dz, dw = self.dim_y, self.dim_z, self.dim_w
        dx = self.xy.shape[0]
        shapes = {
            "xy": (dx, dy),
            "xz": (dx, dz),
            "xw": (dx, dw),
            "zy": (dz, dy),
            "zz": (dz, dz),
            "zw": (dz, dw),
            "yzw": (dy + dz + dw, dy + dz + dw),
        }
        for name, want in shapes.items():
            got = getattr(self, name).shape
            if got != want:
                raise ValueError(f"block {name} must have shape {want}, got {got}")
        sym = 0.5 * (self.yzw + self.yzw.T)
        min_eig = float(np.linalg.eigvalsh(sym).min())
        if min_eig <= 1e-10:
            raise ValueError(
                f"covariance of [Y Z W] must be positive definite; min eigenvalue {min_eig:.3e}"
            )

    @property
    def dim_x(self) -> int:
        return self.xy.shape[0]

    @classmethod
    def from_joint(
        cls, gamma: np.ndarray, dim_x: int, dim_y: int, dim_z: int, dim_w: int
    ) -> "GaussianBlocks":
        """Slice a joint covariance ordered [X, Y, Z, W] into blocks."""
        gamma = np.asarray(gamma, dtype=float)
        total = dim_x + dim_y + dim_z + dim_w
        if gamma.shape != (total, total):
            raise ValueError(f"joint covariance must be {total} x {total}, got {gamma.shape}")
        ix = slice(0, dim_x)
        iy = slice(dim_x, dim_x + dim_y)
        iz = slice(dim_x + dim_y, dim_x + dim_y + dim_z)
        iw = slice(dim_x + dim_y + dim_z, total)
        iyzw = slice(dim_x, total)
        return cls(
            xy=gamma[ix, iy],
            xz=gamma[ix, iz],
            xw=gamma[ix, iw],
            zy=gamma[iz, iy],
            zz=gamma[iz, iz],
            zw=gamma[iz, iw],
            yzw=gamma[iyzw, iyzw],
            dim_y=dim_y,
            dim_z=dim_z,
            dim_w=dim_w,
        )

    def stacked(self) -> np.ndarray:
        """The 2 x 3 block matrix [[xy, xz, xw], [zy, zz, zw]]."""
        return np.block([[self.xy, self.xz, self.xw], [self.zy, self.zz, self.zw]])

    def _slices(self) -> tuple[slice, slice, slice]:
        sy = slice(0, self.dim_y)
        sz = slice(self.dim_y, self.dim_y + self.dim_z)
        sw = slice(self.dim_y + self.dim_z, self.dim_y + self.dim_z + self.dim_w)
        return sy, sz, sw

    def yy(self) -> np.ndarray:
        sy, _, _ = self._slices()
        return self.yzw[sy, sy]

    def ww(self) -> np.ndarray:
        _, _, sw = self._slices()
        return self.yzw[sw, sw]

    def yw(self) -> np.ndarray:
        sy, _, sw = self._slices()
        return self.yzw[sy, sw]


def conditional_equality_rank(blocks: GaussianBlocks) -> bool:
    """True iff the laws of X given (Z, Y) and of X given (Z, W) coincide.

    Equivalent to the stacked block matrix having rank equal to dim(Z).
    """
    return numeric_rank(blocks.stacked()) == blocks.dim_z


def _descending_eigvals(matrix: np.ndarray) -> np.ndarray:
    sym = 0.5 * (matrix + matrix.T)
    return np.linalg.eigvalsh(sym)[::-1]


def conditional_mean_distance(blocks: GaussianBlocks) -> float:
    """Var of the difference of the two conditional means, X scalar, exact."""
    if blocks.dim_x != 1:
        raise ValueError(f"X must be scalar, got dim {blocks.dim_x}")
    zz_inv = np.linalg.inv(blocks.zz)
    yz = blocks.zy.T
    wz = blocks.zw.T
    k1 = np.linalg.inv(blocks.yy() - yz @ zz_inv @ blocks.zy)
    k2 = np.linalg.inv(blocks.ww() - wz @ zz_inv @ blocks.zw)
    g = blocks.yw() - yz @ zz_inv @ blocks.zw
    k3 = -k1 @ g @ k2
    a = (blocks.xy - blocks.xz @ zz_inv @ blocks.zy).T
    b = (blocks.xw - blocks.xz @ zz_inv @ blocks.zw).T
    ab = np.vstack([a, b])
    j = np.block([[k1, k3], [k3.T, k2]])
    return float((ab.T @ j @ ab)[0, 0])


def phi_factor(blocks: GaussianBlocks) -> float:
    """Conditioning factor of the distance bound; depends only on (Y, Z, W).

    lambda_min(Gamma_[YZW]) / max(lambda_max^2(Gamma_[ZY]),
    lambda_max^2(Gamma_[ZW])).  The worst-case gain of the two regression
    operators cannot exceed the largest eigenvalue of the corresponding joint
    covariance, and the residual covariance is floored by the smallest
    eigenvalue of the full covariance; both matrices are symmetrized before
    the eigenvalue computation to suppress floating-point asymmetry.
    """
    zy_cov = np.block([[blocks.zz, blocks.zy], [blocks.zy.T, blocks.yy()]])
    zw_cov = np.block([[blocks.zz, blocks.zw], [blocks.zw.T, blocks.ww()]])
    lam_zy = _descending_eigvals(zy_cov)[0]
    lam_zw = _descending_eigvals(zw_cov)[0]
    lam_min = float(np.linalg.eigvalsh(0.5 * (blocks.yzw + blocks.yzw.T)).min())
    return lam_min / max(lam_zy**2, lam_zw**2)


def conditional_distance_lower_bound(blocks: GaussianBlocks) -> float:
    """Guaranteed lower bound on the conditional-mean distance.

    phi * sigma_min^2 of the stacked block matrix: zero exactly when the two
    conditional laws coincide, and growing with the distance of the stacked
    matrix from rank dim(Z).
    """
    if blocks.dim_x != 1:
        raise ValueError(f"X must be scalar, got dim {blocks.dim_x}")
    sigma = smallest_singular_value(blocks.stacked())
    return phi_factor(blocks) * sigma**2


# ---------------------------------------------------------------------------
# Binary decision procedure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BinaryDecision:
    """Outcome of the sign-data causality test."""

    verdict: Verdict
    sigma_min: float
    theta: float
    matrix: CausalityMatrix


def binary_causality_test(
    moments: LaggedMoments, m: int, theta: float = DEFAULT_THETA
) -> BinaryDecision:
    """Necessary-and-sufficient test from zero-threshold sign data.

    Builds the correlation causality matrix via the arcsine-law inverse and
    declares CAUSAL when its smallest singular value exceeds ``theta``.  With
    exact covariances any positive theta below the true singular value works;
    on finite samples theta absorbs estimation noise and is a caller choice.
    """
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    r = build_binary_R(moments, m)
    sigma = smallest_singular_value(r)
    verdict = Verdict.CAUSAL if sigma > theta else Verdict.NON_CAUSAL
    return BinaryDecision(verdict=verdict, sigma_min=sigma, theta=theta, matrix=r)
