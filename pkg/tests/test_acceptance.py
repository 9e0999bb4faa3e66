"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete.
"""

import math
import time

import numpy as np
import pytest

from qgranger.bounds import (
    PriorBounds,
    highres_epsilon_norm_bound,
    midtread_bounds,
    nonuniform_norm_bounds,
    riemann_zeta,
    s_bounds_analytic,
    s_bounds_grid,
    _variance_gap_max,
)
from qgranger.causality import (
    GaussianBlocks,
    build_binary_R,
    build_causality_matrix,
    conditional_distance_lower_bound,
    conditional_mean_distance,
    smallest_singular_value,
)
from qgranger.gausslink import (
    binary_true_moments,
    midtread_true_moments,
    quantized_cross_cov,
    quantized_true_moments,
    vanvleck_forward,
    vanvleck_invert,
    GaussPair,
)
from qgranger.moments import estimate_moments
from qgranger.quantize import (
    BinaryQuantizer,
    FiniteQuantizer,
    make_saturated_uniform,
    quantize_series,
)
from qgranger.signals import simulate_var, stationary_covariances
from tests.conftest import random_stable_model, variance_width_priors

BINARY = BinaryQuantizer(0.0)


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}", flush=True)


# ---------------------------------------------------------------------------
# shared expensive computations
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def binary_seed_sweep(causal_model, noncausal_model):
    t0 = time.perf_counter()
    out = {}
    for tag, model in (("causal", causal_model), ("noncausal", noncausal_model)):
        sigmas = []
        for seed in range(100):
            pair = simulate_var(model, 1000, seed=seed)
            mom = estimate_moments(
                quantize_series(pair.x, BINARY),
                quantize_series(pair.z, BINARY),
                2,
                2,
                zero_mean=True,
            )
            sigmas.append(smallest_singular_value(build_binary_R(mom, 2)))
        out[tag] = np.asarray(sigmas)
    out["elapsed"] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="module")
def twobit_setup(causal_model, noncausal_model, causal_tm, noncausal_tm, twobit_specs):
    """The two-bit saturated-quantizer experiment on both model variants."""
    t0 = time.perf_counter()
    qx, qz = twobit_specs
    m, q = 2, 6
    setup = {"m": m, "q": q}
    for tag, model, tm in (
        ("causal", causal_model, causal_tm),
        ("noncausal", noncausal_model, noncausal_tm),
    ):
        priors = variance_width_priors(tm)
        s = s_bounds_grid(priors, qx, qz, grid_density=41)
        bounds = {
            qq: math.sqrt(np.prod(nonuniform_norm_bounds(*s, m, qq))) for qq in range(2, 7)
        }
        true_sigma = {
            qq: smallest_singular_value(
                build_causality_matrix(quantized_true_moments(tm, qx, qz, m, qq), m, qq)
            )
            for qq in range(2, 7)
        }
        sampled_sigma = []
        for seed in range(10):
            pair = simulate_var(model, 1000, seed=200 + seed)
            mom = estimate_moments(
                quantize_series(pair.x, qx),
                quantize_series(pair.z, qz),
                m,
                q,
                zero_mean=False,
            )
            sampled_sigma.append(
                smallest_singular_value(build_causality_matrix(mom, m, q))
            )
        setup[tag] = {
            "bounds": bounds,
            "true_sigma": true_sigma,
            "sampled_sigma": np.asarray(sampled_sigma),
        }
    setup["elapsed"] = time.perf_counter() - t0
    return setup


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def test_criterion_1_true_binary_measure(causal_tm):
    t0 = time.perf_counter()
    sigma = smallest_singular_value(build_binary_R(binary_true_moments(causal_tm, 2), 2))
    elapsed = time.perf_counter() - t0
    ok = abs(sigma - 0.4807) <= 0.01 and elapsed < 1.0
    report("1", ok, f"true binary sigma_min = {sigma:.4f} (target 0.4807 +/- 0.01) in {elapsed:.3f}s")
    assert abs(sigma - 0.4807) <= 0.01
    assert elapsed < 1.0


def test_criterion_2a_sampled_binary_causal_median(binary_seed_sweep):
    median = float(np.median(binary_seed_sweep["causal"]))
    elapsed = binary_seed_sweep["elapsed"]
    ok = 0.40 <= median <= 0.55 and elapsed < 30.0
    report("2a", ok, f"causal median sigma_min over 100 seeds = {median:.4f} (band [0.40, 0.55]) in {elapsed:.1f}s")
    assert 0.40 <= median <= 0.55
    assert elapsed < 30.0


def test_criterion_2b_sampled_binary_noncausal_band(binary_seed_sweep):
    count = int(np.sum(binary_seed_sweep["noncausal"] < 0.06))
    ok = count >= 95
    report("2b", ok, f"noncausal seeds with sigma_min < 0.06: {count}/100 (need >= 95)")
    assert count >= 95


def test_criterion_3a_nonuniform_true_margin(twobit_setup):
    q = twobit_setup["q"]
    causal = twobit_setup["causal"]
    margin = causal["bounds"][q] - causal["true_sigma"][q]
    elapsed = twobit_setup["elapsed"]
    ok = abs(margin - (-0.1480)) <= 0.03 and elapsed < 120.0
    report("3a", ok, f"true-moment margin at q={q}: {margin:+.4f} (target -0.1480 +/- 0.03) in {elapsed:.1f}s")
    assert elapsed < 120.0
    assert abs(margin - (-0.1480)) <= 0.03


def test_criterion_3b_nonuniform_sampled_margin(twobit_setup):
    q = twobit_setup["q"]
    causal = twobit_setup["causal"]
    margins = causal["bounds"][q] - causal["sampled_sigma"]
    median = float(np.median(margins))
    ok = -0.20 <= median <= -0.05
    report("3b", ok, f"sampled margin median at q={q}: {median:+.4f} (band [-0.20, -0.05])")
    assert -0.20 <= median <= -0.05


def test_criterion_3c_nonuniform_noncausal_margins(twobit_setup):
    noncausal = twobit_setup["noncausal"]
    true_margins = [noncausal["bounds"][qq] - noncausal["true_sigma"][qq] for qq in range(2, 7)]
    sampled_margins = noncausal["bounds"][twobit_setup["q"]] - noncausal["sampled_sigma"]
    worst = min(min(true_margins), float(np.min(sampled_margins)))
    ok = worst > 5.0
    report("3c", ok, f"noncausal margin minimum: {worst:+.4f} (need > +5.0)")
    assert worst > 5.0


def test_criterion_4_vanvleck_identities():
    grid = np.linspace(-0.99, 0.99, 199)
    roundtrip = float(np.max(np.abs(vanvleck_invert(vanvleck_forward(grid)) - grid)))
    collapse = 0.0
    for rho in np.linspace(-0.99, 0.99, 67):
        got = quantized_cross_cov(GaussPair(rho, 1.0, 1.0), BINARY, BINARY)
        collapse = max(collapse, abs(got - vanvleck_forward(rho)))
    ok = roundtrip <= 1e-14 and collapse <= 1e-10
    report("4", ok, f"roundtrip err {roundtrip:.2e} (<=1e-14), binary collapse err {collapse:.2e} (<=1e-10)")
    assert roundtrip <= 1e-14
    assert collapse <= 1e-10


def test_criterion_5_soundness_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(12345)
    m, q = 2, 4
    checks = 0
    violations = []
    models = 0
    while models < 20:
        model = random_stable_model(rng)
        tm = stationary_covariances(model, q)
        rho_xz = max(abs(tm.rho_xz(k)) for k in range(-q, q + 1))
        rho_zz = max(abs(tm.rho_zz(k)) for k in range(1, q + 1))
        if rho_xz > 0.93 or rho_zz > 0.93:
            continue  # keep priors inside the validity caps
        models += 1
        priors = PriorBounds(
            min(rho_xz + 0.02, 0.95),
            min(rho_zz + 0.02, 0.95),
            (tm.sigma_x * 0.97, tm.sigma_x * 1.03),
            (tm.sigma_z * 0.97, tm.sigma_z * 1.03),
            gamma_xz_max=max(abs(v) for v in tm.gamma_xz.values()) * 1.05,
        )
        c_g = build_causality_matrix(tm, m, q).entries
        sx, sz = tm.sigma_x, tm.sigma_z
        specs = [
            (
                make_saturated_uniform(-3 * sx, 3 * sx, 2),
                make_saturated_uniform(-3 * sz, 3 * sz, 2),
            ),
            (
                make_saturated_uniform(-2.5 * sx, 2.5 * sx, 3),
                make_saturated_uniform(-2.5 * sz, 2.5 * sz, 3),
            ),
            (
                FiniteQuantizer(
                    thresholds=np.array([-1.0, -0.2, 0.7]) * sx,
                    levels=np.array([-1.6, -0.5, 0.2, 1.3]) * sx,
                ),
                FiniteQuantizer(
                    thresholds=np.array([-0.8, 0.1, 1.1]) * sz,
                    levels=np.array([-1.5, -0.3, 0.5, 1.6]) * sz,
                ),
            ),
        ]
        for qx, qz in specs:
            c_q = build_causality_matrix(
                quantized_true_moments(tm, qx, qz, m, q), m, q
            ).entries
            actual = float(np.linalg.norm(c_q - c_g, 2))
            s_xz, s_zz = s_bounds_analytic(priors, qx, qz, grid_density=21)
            s_z = _variance_gap_max(priors, qz, 21)
            bound = math.sqrt(np.prod(nonuniform_norm_bounds(s_xz, s_zz, s_z, m, q)))
            checks += 1
            if actual > bound * (1 + 1e-9):
                violations.append(("nonuniform", actual, bound))
        for frac in (0.25, 0.1):
            dx = frac * priors.sigma_x[0]
            dz = frac * priors.sigma_z[0]
            c_q = build_causality_matrix(
                midtread_true_moments(tm, dx, dz, m, q), m, q
            ).entries
            actual = float(np.linalg.norm(c_q - c_g, 2))
            mb = midtread_bounds(priors, dx, dz, m, q)
            hb = highres_epsilon_norm_bound(priors, dx, dz, m, q)
            checks += 2
            if actual > math.sqrt(mb.n_inf * mb.n_one) * (1 + 1e-9):
                violations.append(("midtread", actual, math.sqrt(mb.n_inf * mb.n_one)))
            if actual > hb.bound * (1 + 1e-9):
                violations.append(("highres", actual, hb.bound))
    elapsed = time.perf_counter() - t0
    ok = not violations and elapsed < 300.0
    report("5", ok, f"{checks} bound checks over 20 models, {len(violations)} violations in {elapsed:.1f}s")
    assert elapsed < 300.0
    assert violations == []


def test_criterion_6a_lyapunov_vs_monte_carlo(causal_model, causal_tm):
    pair = simulate_var(causal_model, 1_000_000, seed=2026)
    worst = 0.0
    for lag in range(6):
        for a, b, target in (
            (pair.z, pair.z, causal_tm.gamma_zz[lag]),
            (pair.x, pair.z, causal_tm.gamma_xz[lag]),
            (pair.x, pair.x, causal_tm.gamma_xx[lag]),
        ):
            prod = a[: a.size - lag] * b[lag:]
            est = float(prod.mean())
            blocks = np.array_split(prod, 200)
            se = float(np.std([bl.mean() for bl in blocks]) / np.sqrt(200))
            worst = max(worst, abs(est - target) / se)
    ok = worst < 3.0
    report("6a", ok, f"Lyapunov vs 1e6-sample Monte Carlo: worst z-score {worst:.2f} (< 3)")
    assert worst < 3.0


def test_criterion_6b_zeta_identities():
    err2 = abs(riemann_zeta(2.0) - math.pi**2 / 6.0)
    err4 = abs(riemann_zeta(4.0) - math.pi**4 / 90.0)
    ok = err2 <= 1e-12 and err4 <= 1e-12
    report("6b", ok, f"zeta(2) err {err2:.2e}, zeta(4) err {err4:.2e} (<= 1e-12)")
    assert err2 <= 1e-12
    assert err4 <= 1e-12


def test_criterion_6c_distance_bound_no_violations():
    rng = np.random.default_rng(424242)
    dims = (1, 2, 2, 2)
    total = sum(dims)
    violations = 0
    for _ in range(1000):
        w = rng.normal(size=(total, total))
        gamma = w @ w.T + 0.5 * np.eye(total)
        blocks = GaussianBlocks.from_joint(gamma, *dims)
        lower = conditional_distance_lower_bound(blocks)
        direct = conditional_mean_distance(blocks)
        if lower > direct * (1 + 1e-9) + 1e-12:
            violations += 1
    ok = violations == 0
    report("6c", ok, f"distance lower bound vs direct variance: {violations}/1000 violations")
    assert violations == 0


def test_criterion_7_sweep_trend(causal_model, causal_tm, paper_priors):
    t0 = time.perf_counter()
    m, q = 2, 6
    pairs = [simulate_var(causal_model, 1000, seed=500 + i) for i in range(20)]
    means = []
    for bits in (1, 2, 3, 4):
        qx = make_saturated_uniform(-3.0, 3.0, bits)
        qz = make_saturated_uniform(-5.0, 5.0, bits)
        s = s_bounds_grid(paper_priors, qx, qz, grid_density=41)
        bound = math.sqrt(np.prod(nonuniform_norm_bounds(*s, m, q)))
        margins = []
        for pair in pairs:
            mom = estimate_moments(
                quantize_series(pair.x, qx),
                quantize_series(pair.z, qz),
                m,
                q,
                zero_mean=False,
            )
            margins.append(bound - smallest_singular_value(build_causality_matrix(mom, m, q)))
        means.append(float(np.mean(margins)))
    elapsed = time.perf_counter() - t0
    decreasing = all(a > b for a, b in zip(means, means[1:]))
    pretty = ", ".join(f"{v:+.3f}" for v in means)
    report("7", decreasing, f"diagonal margins for 1..4 bits: [{pretty}] in {elapsed:.1f}s")
    assert decreasing
