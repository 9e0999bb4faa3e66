"""Jointly Gaussian stationary test processes and their exact second-order moments.

A :class:`VarModel` is a linear state-space recursion ``s[k] = A s[k-1] + w[k]``
with Gaussian noise ``w ~ N(0, Q)``; two designated state coordinates expose the
scalar signals ``x`` and ``z``.  :func:`simulate_var` draws sample paths,
:func:`stationary_covariances` returns the exact stationary auto- and
cross-covariances by solving the discrete Lyapunov equation, so simulations can
always be checked against closed-form moments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import ndtri

__all__ = [
    "VarModel",
    "TrueMoments",
    "SeriesPair",
    "NonStationaryModelError",
    "simulate_var",
    "stationary_covariances",
    "coupled_ar2_example",
]

DEFAULT_BURN_IN = 10_000

# z-equation coupling onto x[k-1] in the bundled two-channel AR(2) example;
# setting it to zero removes the directed influence x -> z.
_AR2_XZ_COUPLING = -0.8


class NonStationaryModelError(ValueError):
    """Raised for models whose transition matrix has spectral radius >= 1."""

    def __init__(self, spectral_radius: float):
        self.spectral_radius = spectral_radius
        super().__init__(
            f"model is not stationary: spectral radius {spectral_radius:.6f} >= 1"
        )


@dataclass(frozen=True)
class VarModel:
    """Joint linear state-space generator of the pair (x, z).

    transition : (d, d) matrix applied to the previous state.
    noise_cov  : (d, d) symmetric PSD covariance of the additive noise.
    x_index, z_index : state coordinates holding x[k] and z[k].
    """

    transition: np.ndarray
    noise_cov: np.ndarray
    x_index: int
    z_index: int

    def __post_init__(self):
        a = np.asarray(self.transition, dtype=float)
        q = np.asarray(self.noise_cov, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"transition must be square, got shape {a.shape}")
        if q.shape != a.shape:
            raise ValueError(
                f"noise_cov shape {q.shape} does not match transition {a.shape}"
            )
        object.__setattr__(self, "transition", a)
        object.__setattr__(self, "noise_cov", q)

        rho = spectral_radius(a)
        if rho >= 1.0:
            raise NonStationaryModelError(rho)
        if not np.allclose(q, q.T, atol=1e-12, rtol=0.0):
            raise ValueError("noise_cov must be symmetric within 1e-12")
        min_eig = float(np.linalg.eigvalsh(0.5 * (q + q.T)).min())
        if min_eig < -1e-10:
            raise ValueError(f"noise_cov is not PSD: min eigenvalue {min_eig:.3e}")

        d = a.shape[0]
        for name, idx in (("x_index", self.x_index), ("z_index", self.z_index)):
            if not 0 <= idx < d:
                raise ValueError(f"{name}={idx} out of range for state_dim={d}")
        if self.x_index == self.z_index:
            raise ValueError("x_index and z_index must differ")

    @property
    def state_dim(self) -> int:
        return self.transition.shape[0]


@dataclass(frozen=True)
class SeriesPair:
    """Aligned sample paths of the two scalar signals."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError("x and z must be 1-D arrays of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    def __len__(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class TrueMoments:
    """Exact stationary covariances, indexed by integer lag.

    gamma_xz[k] = Cov(x_t, z_{t+k}) for k in [-max_lag, max_lag];
    gamma_zz[k] = Cov(z_t, z_{t+k}) and gamma_xx likewise for k in [0, max_lag].
    """

    gamma_xz: Mapping[int, float]
    gamma_zz: Mapping[int, float]
    gamma_xx: Mapping[int, float]
    max_lag: int

    def __post_init__(self):
        if self.gamma_zz[0] <= 0.0 or self.gamma_xx[0] <= 0.0:
            raise ValueError("variances gamma_zz(0) and gamma_xx(0) must be positive")
        cs = np.sqrt(self.gamma_xx[0] * self.gamma_zz[0])
        worst = max(abs(v) for v in self.gamma_xz.values())
        if worst > cs * (1.0 + 1e-12):
            raise ValueError(
                f"Cauchy-Schwarz violated: max |gamma_xz| = {worst:.6g} > {cs:.6g}"
            )

    @property
    def sigma_x(self) -> float:
        return float(np.sqrt(self.gamma_xx[0]))

    @property
    def sigma_z(self) -> float:
        return float(np.sqrt(self.gamma_zz[0]))

    def rho_xz(self, lag: int) -> float:
        return self.gamma_xz[lag] / (self.sigma_x * self.sigma_z)

    def rho_zz(self, lag: int) -> float:
        return self.gamma_zz[abs(lag)] / self.gamma_zz[0]


def spectral_radius(a: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(a, dtype=float)))))


def _noise_factor(q: np.ndarray) -> np.ndarray:
    """Factor L with L L^T = q, dropping numerically-zero noise directions."""
    vals, vecs = np.linalg.eigh(0.5 * (q + q.T))
    vals = np.clip(vals, 0.0, None)
    keep = vals > 1e-14 * max(vals.max(), 1.0)
    return vecs[:, keep] * np.sqrt(vals[keep])


def _standard_normals(rng: np.random.Generator, shape) -> np.ndarray:
    # Inverse-CDF transform of 53-bit midpoint uniforms: reproducible for a
    # fixed seed independent of the generator's own normal algorithm.
    u = (rng.integers(0, 1 << 53, size=shape, dtype=np.uint64) + 0.5) / float(1 << 53)
    return ndtri(u)


def simulate_var(
    model: VarModel,
    n: int,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
) -> SeriesPair:
    """Draw n aligned samples of (x, z) from the stationary law of the model.

    The recursion starts from the zero state and discards ``burn_in`` steps
    before recording.  The same (model, n, burn_in, seed) always produces
    bit-identical output: noise comes from a counter-based Philox stream
    mapped through the inverse normal CDF.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")

    a = model.transition
    lfac = _noise_factor(model.noise_cov)
    rng = np.random.Generator(np.random.Philox(seed))

    total = burn_in + n
    eta = _standard_normals(rng, (total, lfac.shape[1]))
    noise = eta @ lfac.T

    state = np.zeros(model.state_dim)
    out_x = np.empty(n)
    out_z = np.empty(n)
    for k in range(total):
        state = a @ state + noise[k]
        if k >= burn_in:
            out_x[k - burn_in] = state[model.x_index]
            out_z[k - burn_in] = state[model.z_index]
    return SeriesPair(out_x, out_z)


def solve_discrete_lyapunov(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Solve P = A P A^T + Q for the stationary state covariance P.

    Exact vectorized linear solve for state dimension <= 8; fixed-point
    iteration to relative tolerance 1e-14 otherwise.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    d = a.shape[0]
    if d <= 8:
        lhs = np.eye(d * d) - np.kron(a, a)
        p = np.linalg.solve(lhs, q.reshape(-1)).reshape(d, d)
        return 0.5 * (p + p.T)

    p = q.copy()
    for _ in range(1_000_000):
        nxt = a @ p @ a.T + q
        if np.linalg.norm(nxt - p, "fro") <= 1e-14 * max(np.linalg.norm(nxt, "fro"), 1e-300):
            return 0.5 * (nxt + nxt.T)
        p = nxt
    residual = np.linalg.norm(a @ p @ a.T + q - p, "fro")
    raise RuntimeError(
        f"Lyapunov fixed-point iteration did not converge; residual {residual:.3e}"
    )


def stationary_covariances(model: VarModel, max_lag: int) -> TrueMoments:
    """Exact stationary moments: Gamma(k) = A^k P with P the Lyapunov solution."""
    if max_lag < 0:
        raise ValueError(f"max_lag must be >= 0, got {max_lag}")
    a = model.transition
    p = solve_discrete_lyapunov(a, model.noise_cov)
    ix, iz = model.x_index, model.z_index

    gamma_xz: dict[int, float] = {}
    gamma_zz: dict[int, float] = {}
    gamma_xx: dict[int, float] = {}
    ak = np.eye(model.state_dim)
    for k in range(max_lag + 1):
        g = ak @ p  # g[i, j] = Cov(s_{t+k}[i], s_t[j])
        gamma_xz[k] = float(g[iz, ix])
        gamma_xz[-k] = float(g[ix, iz])
        gamma_zz[k] = float(g[iz, iz])
        gamma_xx[k] = float(g[ix, ix])
        ak = a @ ak
    gamma_xz[0] = float(p[iz, ix])
    return TrueMoments(gamma_xz=gamma_xz, gamma_zz=gamma_zz, gamma_xx=gamma_xx, max_lag=max_lag)


def coupled_ar2_example(causal: bool = True) -> VarModel:
    """Bundled pair of coupled AR(2) channels in joint state-space form.

    x[k] = 0.95*sqrt(2) x[k-1] - 0.9025 x[k-2] - 0.9 z[k-1] + u[k]
    z[k] = -1.05 z[k-1] - 0.85 z[k-2] - 0.8 x[k-1] + v[k]

    where u and v each have variance 0.5 and share covariance 0.25 through a
    common noise source.  With ``causal=False`` the x -> z coupling (-0.8) is
    set to zero, making z evolve autonomously from x.
    """
    c = _AR2_XZ_COUPLING if causal else 0.0
    a1 = 0.95 * np.sqrt(2.0)
    # state: [x[k], x[k-1], z[k], z[k-1]]
    a = np.array(
        [
            [a1, -0.9025, -0.9, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [c, 0.0, -1.05, -0.85],
            [0.0, 0.0, 1.0, 0.0],
        ]
    )
    q = np.zeros((4, 4))
    q[0, 0] = 0.5
    q[2, 2] = 0.5
    q[0, 2] = q[2, 0] = 0.25
    return VarModel(transition=a, noise_cov=q, x_index=0, z_index=2)
