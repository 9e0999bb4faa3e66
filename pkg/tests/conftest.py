"""Shared fixtures: the bundled AR(2) pair, its exact moments, and helpers."""

import numpy as np
import pytest

from qgranger.bounds import PriorBounds
from qgranger.quantize import make_saturated_uniform
from qgranger.signals import coupled_ar2_example, stationary_covariances

MAX_LAG = 12


@pytest.fixture(scope="session")
def causal_model():
    return coupled_ar2_example(causal=True)


@pytest.fixture(scope="session")
def noncausal_model():
    return coupled_ar2_example(causal=False)


@pytest.fixture(scope="session")
def causal_tm(causal_model):
    return stationary_covariances(causal_model, MAX_LAG)


@pytest.fixture(scope="session")
def noncausal_tm(noncausal_model):
    return stationary_covariances(noncausal_model, MAX_LAG)


@pytest.fixture(scope="session")
def twobit_specs():
    """The 2-bit saturated quantizer pair with granular regions [-3,3], [-5,5]."""
    return make_saturated_uniform(-3.0, 3.0, 2), make_saturated_uniform(-5.0, 5.0, 2)


def variance_width_priors(tm, width: float = 0.2, rho_xz: float = 0.5, rho_zz: float = 0.7):
    """Priors with variance brackets of the given width centered on the oracle."""
    vx, vz = tm.gamma_xx[0], tm.gamma_zz[0]
    h = width / 2.0
    gamma_max = max(abs(v) for v in tm.gamma_xz.values())
    return PriorBounds(
        rho_xz_max=rho_xz,
        rho_zz_max=rho_zz,
        sigma_x=(float(np.sqrt(vx - h)), float(np.sqrt(vx + h))),
        sigma_z=(float(np.sqrt(vz - h)), float(np.sqrt(vz + h))),
        gamma_xz_max=float(gamma_max) * 1.05,
    )


@pytest.fixture(scope="session")
def paper_priors(causal_tm):
    return variance_width_priors(causal_tm)


@pytest.fixture(scope="session")
def paper_priors_noncausal(noncausal_tm):
    return variance_width_priors(noncausal_tm)


def random_stable_model(rng: np.random.Generator, dim: int = 4, radius: float = 0.75):
    """Random stationary state-space pair for soundness sweeps."""
    from qgranger.signals import VarModel, spectral_radius

    a = rng.normal(size=(dim, dim)) / np.sqrt(dim)
    a *= radius / spectral_radius(a)
    w = rng.normal(size=(dim, dim))
    q = w @ w.T / dim + 0.1 * np.eye(dim)
    return VarModel(transition=a, noise_cov=q, x_index=0, z_index=1)
