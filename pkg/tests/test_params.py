"""Circuit/membrane parameterization, derived rates, couplings."""

import math

import numpy as np
import pytest

from qndsim import (
    CircuitSpec,
    Couplings,
    MembraneSpec,
    Topology,
    apply_stray_capacitance,
    couplings_from_geometry,
    derive_rates,
    double_arm_from_rates,
    residual_coupling,
    single_arm_from_rates,
    zero_point_motion,
)
from qndsim.params import ConfigurationError, SingularParameterError

TWO_PI = 2.0 * math.pi


def test_single_arm_unit_elements():
    c = CircuitSpec(topology=Topology.SINGLE_ARM, L0=1.0, R0=1.0, Z_out=1.0, C0=1.0)
    r = derive_rates(c)
    assert r.omega_s == pytest.approx(1.0)
    assert r.gamma_t == pytest.approx(1.0)
    assert r.gamma_r == pytest.approx(1.0)


def test_double_arm_rates_round_trip():
    c = double_arm_from_rates(
        omega_s=TWO_PI * 7e9, gamma_t=TWO_PI * 0.15e6, gamma_r=TWO_PI * 0.15e6,
        L_over_L0=1e-2, R_over_Zout=0.1,
    )
    r = derive_rates(c)
    assert r.omega_s == pytest.approx(TWO_PI * 7e9, rel=1e-12)
    assert r.gamma_t == pytest.approx(TWO_PI * 0.15e6, rel=1e-12)
    assert r.gamma_r == pytest.approx(TWO_PI * 0.15e6, rel=1e-12)
    assert c.parasitic_L / c.L0 == pytest.approx(1e-2, rel=1e-12)
    assert c.parasitic_R / c.Z_out == pytest.approx(0.1, rel=1e-12)


def test_omega_a_algebraic_inversion():
    # omega_a = omega_s sqrt((L + 2 L0) / L), checked by inverting the rate
    # formulas symbolically: omega_a^2/omega_s^2 = (L + 2 L0)/L
    c = double_arm_from_rates(
        omega_s=TWO_PI * 3e9, gamma_t=TWO_PI * 100e3, gamma_r=TWO_PI * 100e3,
        L_over_L0=1e-4, R_over_Zout=0.1,
    )
    r = derive_rates(c)
    expected = r.omega_s * math.sqrt((c.parasitic_L + 2 * c.L0) / c.parasitic_L)
    assert r.omega_a == pytest.approx(expected, rel=1e-12)


def test_rates_involution_many():
    rng = np.random.default_rng(42)
    for _ in range(50):
        ws = 10 ** rng.uniform(8, 11)
        gt = 10 ** rng.uniform(4, 7)
        gr = gt * 10 ** rng.uniform(-0.3, 0.3)
        lr = 10 ** rng.uniform(-4, -0.5)
        rr = 10 ** rng.uniform(-2, 0.5)
        if gr * (2 / gt) * 50.0 < rr * 50.0:  # R0 would go negative
            continue
        try:
            c = double_arm_from_rates(omega_s=ws, gamma_t=gt, gamma_r=gr,
                                      L_over_L0=lr, R_over_Zout=rr)
        except ConfigurationError:
            continue
        r = derive_rates(c)
        assert r.omega_s == pytest.approx(ws, rel=1e-12)
        assert r.gamma_t == pytest.approx(gt, rel=1e-12)
        assert r.gamma_r == pytest.approx(gr, rel=1e-12)
        assert r.omega_a / r.omega_s == pytest.approx(
            math.sqrt((c.parasitic_L + 2 * c.L0) / c.parasitic_L), rel=1e-12)


def test_zero_inductance_rejected():
    with pytest.raises(SingularParameterError):
        CircuitSpec(topology=Topology.SINGLE_ARM, L0=0.0, R0=1.0, Z_out=1.0, C0=1.0)


def test_single_arm_forbids_parasitics():
    with pytest.raises(ConfigurationError):
        CircuitSpec(topology=Topology.SINGLE_ARM, L0=1.0, R0=1.0, Z_out=1.0,
                    C0=1.0, parasitic_L=0.1, parasitic_R=0.1)


def test_asymmetry_bounds():
    with pytest.raises(ConfigurationError):
        CircuitSpec(topology=Topology.DOUBLE_ARM, L0=1.0, R0=1.0, Z_out=1.0,
                    C0=1.0, parasitic_L=0.1, parasitic_R=0.1, delta_C=1.5)


def test_zero_point_motion_override_and_scaling():
    m = MembraneSpec(omega_m=TWO_PI * 80e6, x0_override=1.26e-12, quality_Q=1e6)
    assert zero_point_motion(m) == 1.26e-12
    m1 = MembraneSpec(omega_m=TWO_PI * 80e6, quality_Q=1e6)
    m2 = MembraneSpec(omega_m=2 * TWO_PI * 80e6, quality_Q=1e6)
    # x0 ~ omega_m^(-1/2): doubling omega_m halves x0^2
    assert zero_point_motion(m1) ** 2 == pytest.approx(
        2 * zero_point_motion(m2) ** 2, rel=1e-12)
    heavy = MembraneSpec(omega_m=TWO_PI * 80e6, quality_Q=1e6,
                         areal_density=1e6)
    assert zero_point_motion(heavy) < 1e-3 * zero_point_motion(m1)


def test_reference_coupling_chain():
    ws = TWO_PI * 7e9
    m = MembraneSpec(omega_m=TWO_PI * 80e6, x0_override=1.2601369904962307e-12,
                     quality_Q=1e6)
    c = couplings_from_geometry(m, ws)
    assert c.g1 == pytest.approx(TWO_PI * 715e3, rel=2e-2)
    assert c.g2 == pytest.approx(TWO_PI * 111, rel=2e-2)
    diluted = apply_stray_capacitance(c, 1e-15, 100e-15)
    assert diluted.g1 == pytest.approx(TWO_PI * 7.08e3, rel=2e-2)
    assert diluted.g2 == pytest.approx(TWO_PI * 1.1, rel=2e-2)


def test_coupling_ratio_identity():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = MembraneSpec(omega_m=10 ** rng.uniform(7, 9),
                         x0_override=10 ** rng.uniform(-13, -11),
                         gap_d0=10 ** rng.uniform(-9, -7), quality_Q=1e6)
        ws = 10 ** rng.uniform(9, 11)
        c = couplings_from_geometry(m, ws)
        x0 = zero_point_motion(m)
        assert c.g2 / c.g1 == pytest.approx(
            math.pi**2 * x0 / (8 * m.gap_d0), rel=1e-12)


def test_ratio_independent_of_stray():
    m = MembraneSpec(omega_m=TWO_PI * 80e6, x0_override=1.26e-12, quality_Q=1e6)
    c = couplings_from_geometry(m, TWO_PI * 7e9)
    for cs in (0.0, 1e-15, 1e-13):
        d = apply_stray_capacitance(c, 1e-15, cs)
        assert d.g2 / d.g1 == pytest.approx(c.g2 / c.g1, rel=1e-12)


def test_stray_capacitance_limits():
    c = Couplings(g1=1.0, g2=0.1, g_r=0.01)
    same = apply_stray_capacitance(c, 1e-15, 0.0)
    assert same == c
    half = apply_stray_capacitance(c, 1e-15, 1e-15)
    assert half.g1 == pytest.approx(0.5)
    assert half.g_r == pytest.approx(0.005)


def test_zero_x0_gives_zero_couplings():
    m = MembraneSpec(omega_m=TWO_PI * 80e6, x0_override=0.0, quality_Q=1e6)
    c = couplings_from_geometry(m, TWO_PI * 7e9)
    assert c.g1 == 0.0 and c.g2 == 0.0


def test_residual_coupling_cases():
    assert residual_coupling(1.0, 0.0, 0.0, 1.0) == 0.0
    # delta_C = 0.005 C0 gives g_r = 0.01 g1
    assert residual_coupling(1.0, 0.0, 0.005, 1.0) == pytest.approx(0.01)
    assert residual_coupling(1.0, 0.01, 0.0, 1.0) == pytest.approx(0.01)
    # monotone nondecreasing in both asymmetries
    grid = np.linspace(0.0, 0.3, 7)
    vals = [residual_coupling(1.0, dg, 0.1, 1.0) for dg in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    vals = [residual_coupling(1.0, 0.01, dc, 1.0) for dc in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_gamma_b_consistency_warning():
    with pytest.warns(UserWarning):
        MembraneSpec(omega_m=TWO_PI * 80e6, x0_override=1e-12, quality_Q=1e6,
                     gamma_b=TWO_PI * 200.0)  # omega_m/Q = (2pi) 80 Hz


def test_occupation_from_temperature():
    m = MembraneSpec(omega_m=TWO_PI * 80e6, x0_override=1e-12, quality_Q=1e6,
                     bath_temperature=14e-3)
    # 14 mK at 80 MHz gives an occupation near 3
    assert m.occupation() == pytest.approx(3.2, abs=0.4)
    explicit = MembraneSpec(omega_m=TWO_PI * 80e6, x0_override=1e-12,
                            quality_Q=1e6, bath_temperature=14e-3, n_bar_m=1.0)
    assert explicit.occupation() == 1.0
