"""Covariance-propagation oracle: exactness, commutators, Lyapunov."""

import math

import numpy as np
import pytest

from qndsim import Couplings, DriveSpec, MembraneSpec
from qndsim.dynamics import (
    DivergenceError,
    LinearModel,
    NoiseChannel,
    build_rlc_linear_model,
    covariance_evolve,
    lyapunov_steady_state,
)
from qndsim.dynamics.covariance import commutator_drift, propagate_covariance
from qndsim.dynamics.linear_model import pair_initial_cov
from qndsim.metrics import TrajectoryScenario, phonon_trajectory_analytic

from conftest import TWO_PI


def fig_s3_drive():
    return DriveSpec(measurement_time_T=100e-6, photon_number_alpha_sq=1e12)


def test_free_decay(rlc_benchmark):
    s = rlc_benchmark
    c = Couplings(g1=0.0, g2=0.0)
    model = build_rlc_linear_model(s.circuit, c, fig_s3_drive(), s.membrane,
                                   n_b0=1.0)
    t = np.linspace(0.0, 5e-3, 60)
    sol = covariance_evolve(model, t)
    gb = s.membrane.damping_rate()
    assert np.allclose(sol.n_b, np.exp(-gb * t), rtol=1e-9, atol=1e-12)
    assert sol.n_b_steady == pytest.approx(0.0, abs=1e-12)


def test_matches_exact_analytic(rlc_benchmark):
    # same model, exact closed form: agreement to the formula's own
    # dropped fast-oscillating terms (sub-percent after the electrical
    # transient, 1e-5 relative at late times)
    s = rlc_benchmark
    model = build_rlc_linear_model(s.circuit, s.couplings, fig_s3_drive(),
                                   s.membrane, n_b0=0.0)
    t = np.linspace(1e-5, 5e-3, 120)
    sol = covariance_evolve(model, t)
    exact = phonon_trajectory_analytic(
        t, TrajectoryScenario.RLC_EXACT, fig_s3_drive(), s.circuit,
        s.couplings, s.membrane)
    rel = np.abs(sol.n_b - exact) / exact
    assert rel.max() < 1e-2
    assert rel[-1] < 1e-4


def test_commutator_preservation(rlc_benchmark):
    s = rlc_benchmark
    model = build_rlc_linear_model(s.circuit, s.couplings, fig_s3_drive(),
                                   s.membrane, n_b0=0.5)
    drift = commutator_drift(model, np.linspace(0.0, 3e-3, 40))
    assert drift < 1e-9


def test_lyapunov_steady_agreement(rlc_benchmark):
    s = rlc_benchmark
    model = build_rlc_linear_model(s.circuit, s.couplings, fig_s3_drive(),
                                   s.membrane, n_b0=0.0)
    gb = s.membrane.damping_rate()
    late = propagate_covariance(model, np.array([25.0 / gb]))[0]
    c_inf = lyapunov_steady_state(model)
    i, j = model.index("b_dag"), model.index("b")
    assert late[i, j].real == pytest.approx(c_inf[i, j].real, rel=1e-9)


def _random_stable_model(rng, dim=4):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    a -= (np.max(np.linalg.eigvals(a).real) + rng.uniform(0.2, 2.0)) * np.eye(dim)
    occ = [rng.uniform(0.0, 2.0) for _ in range(dim // 2)]
    channels = []
    e = np.eye(dim, dtype=complex)
    for k in range(dim // 2):
        channels.append(NoiseChannel(
            coupling_op=e[2 * k], coupling_dag=e[2 * k + 1],
            occupation=occ[k], rate=rng.uniform(0.1, 3.0)))
    return LinearModel(
        labels=tuple(f"m{k}{s}" for k in range(dim // 2) for s in ("", "_dag")),
        drift=a,
        channels=tuple(channels),
        initial_cov=pair_initial_cov([rng.uniform(0.0, 2.0)
                                      for _ in range(dim // 2)]),
    )


def test_lyapunov_over_random_models():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        model = _random_stable_model(rng)
        c_inf = lyapunov_steady_state(model)
        resid = model.drift @ c_inf + c_inf @ model.drift.T + model.diffusion()
        scale = max(np.abs(c_inf).max(), 1.0)
        assert np.abs(resid).max() < 1e-9 * scale
        slowest = -np.linalg.eigvals(model.drift).real.max()
        late = propagate_covariance(model, np.array([14.0 / slowest]))[0]
        assert np.abs(late - c_inf).max() < 1e-9 * scale


def test_noise_power_linearity(rlc_benchmark):
    # doubling every channel's (n + 1/2) doubles the stationary symmetric
    # moment <b†b> + 1/2 exactly
    s = rlc_benchmark
    model = build_rlc_linear_model(s.circuit, s.couplings, fig_s3_drive(),
                                   MembraneSpec(omega_m=s.membrane.omega_m,
                                                x0_override=1e-12,
                                                gamma_b=TWO_PI * 100.0,
                                                n_bar_m=0.7))
    i, j = model.index("b_dag"), model.index("b")
    base = lyapunov_steady_state(model)[i, j].real + 0.5
    doubled = lyapunov_steady_state(model.scaled_noise(2.0))[i, j].real + 0.5
    assert doubled == pytest.approx(2.0 * base, rel=1e-9)


def test_unstable_drift_reported():
    model = LinearModel(
        labels=("m0", "m0_dag"),
        drift=np.array([[0.3 + 1j, 0.0], [0.0, 0.3 - 1j]], dtype=complex),
        channels=(NoiseChannel(np.array([1.0, 0]), np.array([0, 1.0]),
                               0.0, 1.0),),
        initial_cov=pair_initial_cov([0.0]),
    )
    with pytest.raises(DivergenceError) as err:
        covariance_evolve(model, np.linspace(0, 1, 5))
    assert err.value.eigenvalue.real > 0


def test_ivp_cross_check(rlc_benchmark):
    # adaptive implicit integration agrees with the exact propagator on a
    # short window (BDF cannot track ~1e5 mechanical oscillations cheaply,
    # so compare over a few electrical lifetimes)
    s = rlc_benchmark
    model = build_rlc_linear_model(s.circuit, s.couplings, fig_s3_drive(),
                                   s.membrane, n_b0=0.0)
    t = np.linspace(0.0, 2e-6, 9)
    exact = propagate_covariance(model, t, method="exact")
    ivp = propagate_covariance(model, t, method="ivp", rtol=1e-9, atol=1e-14)
    assert np.abs(exact - ivp).max() < 1e-5


def test_gamma_b_zero_growth(rlc_benchmark):
    # no mechanical damping: steady state unbounded, linear heating ramp
    s = rlc_benchmark
    membrane = MembraneSpec(omega_m=TWO_PI * 100e6, x0_override=1e-12,
                            gamma_b=0.0, n_bar_m=0.0)
    from qndsim.metrics import induced_heating_rlc
    model = build_rlc_linear_model(s.circuit, s.couplings, fig_s3_drive(),
                                   membrane, n_b0=0.0)
    t = np.linspace(0.0, 2e-4, 30)
    sol = covariance_evolve(model, t)
    assert math.isinf(sol.n_b_steady)
    gamma_big = induced_heating_rlc(fig_s3_drive(), s.circuit, s.couplings,
                                    membrane)
    assert sol.n_b[-1] == pytest.approx(gamma_big * t[-1], rel=2e-2)
