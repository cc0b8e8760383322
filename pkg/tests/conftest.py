"""Shared reference setups used across the suite.

`reference_setup` is the headline configuration: 7 GHz probed mode, 80 MHz
membrane, 150 kHz line coupling, L/L0 = 1e-2, R/Z_out = 0.1, couplings from
the plate geometry with the zero-point motion pinned so g1 = (2pi) 715 kHz
before stray capacitance, diluted by C_s = 100 C0, residual coupling
g1/100.
"""

import math
from dataclasses import dataclass

import pytest

from qndsim import (
    CircuitSpec,
    Couplings,
    MembraneSpec,
    apply_stray_capacitance,
    couplings_from_geometry,
    derive_rates,
    double_arm_from_rates,
    single_arm_from_rates,
)

TWO_PI = 2.0 * math.pi
X0_PINNED = 1.2601369904962307e-12  # m, makes g1 = (2pi) 715 kHz at 7 GHz


@dataclass(frozen=True)
class Setup:
    circuit: CircuitSpec
    membrane: MembraneSpec
    couplings: Couplings
    couplings_bare: Couplings


def make_reference_setup(R_over_Zout=0.1, n_bar_m=0.0, g_r_ratio=1e-2) -> Setup:
    circuit = double_arm_from_rates(
        omega_s=TWO_PI * 7e9, gamma_t=TWO_PI * 150e3, gamma_r=TWO_PI * 150e3,
        L_over_L0=1e-2, R_over_Zout=R_over_Zout, Z_out=50.0, n_bar_e=0.0,
    )
    membrane = MembraneSpec(
        omega_m=TWO_PI * 80e6, x0_override=X0_PINNED, quality_Q=1e6,
        n_bar_m=n_bar_m,
    )
    rates = derive_rates(circuit)
    bare = couplings_from_geometry(membrane, rates.omega_s)
    bare = Couplings(g1=bare.g1, g2=bare.g2, g_r=g_r_ratio * bare.g1,
                     delta_g1=g_r_ratio * bare.g1)
    diluted = apply_stray_capacitance(bare, circuit.C0, 100.0 * circuit.C0)
    return Setup(circuit=circuit, membrane=membrane, couplings=diluted,
                 couplings_bare=bare)


@pytest.fixture(scope="session")
def reference_setup() -> Setup:
    return make_reference_setup()


@pytest.fixture(scope="session")
def rlc_benchmark() -> Setup:
    """Single-arm oracle benchmark: 5 GHz, 100 MHz membrane, 1 MHz decays."""
    circuit = single_arm_from_rates(
        omega_s=TWO_PI * 5e9, gamma_t=TWO_PI * 1e6, gamma_r=TWO_PI * 1e6,
        Z_out=50.0, n_bar_e=0.0,
    )
    membrane = MembraneSpec(
        omega_m=TWO_PI * 100e6, x0_override=1e-12, gamma_b=TWO_PI * 100.0,
        n_bar_m=0.0,
    )
    c = Couplings(g1=TWO_PI * 10.0, g2=0.0)
    return Setup(circuit=circuit, membrane=membrane, couplings=c,
                 couplings_bare=c)


@pytest.fixture(scope="session")
def balanced_benchmark() -> Setup:
    """Balanced double-arm benchmark: 3 GHz, 314 MHz membrane."""
    circuit = double_arm_from_rates(
        omega_s=TWO_PI * 3e9, gamma_t=TWO_PI * 100e3, gamma_r=TWO_PI * 100e3,
        L_over_L0=1e-4, R_over_Zout=0.1, Z_out=50.0, n_bar_e=0.0,
    )
    membrane = MembraneSpec(
        omega_m=TWO_PI * 314e6, x0_override=1e-12, gamma_b=TWO_PI * 10.0,
        n_bar_m=0.0,
    )
    c = Couplings(g1=TWO_PI * 100e3, g2=0.0)
    return Setup(circuit=circuit, membrane=membrane, couplings=c,
                 couplings_bare=c)
