"""Circuit and membrane parameterization with derived rates and couplings.

Two circuit topologies are supported: a plain series RLC readout circuit
("single arm") and the split-capacitor circuit in which the membrane forms
two capacitor halves with opposite position dependence ("double arm").
The double arm carries parasitic elements (L, R per arm) and optional
fabrication asymmetries (delta_L, delta_R, delta_C, delta_g1), with the
sign convention: left arm takes +delta_X, right arm -delta_X.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

from .constants import HBAR, thermal_occupation

GRAPHENE_AREAL_DENSITY = 7.6e-7  # kg/m^2, monolayer default


class Topology(enum.Enum):
    SINGLE_ARM = "single_arm"
    DOUBLE_ARM = "double_arm"


class ConfigurationError(ValueError):
    """Raised when a spec object is internally inconsistent or incomplete."""


class SingularParameterError(ValueError):
    """Raised when a zero element value makes a derived rate undefined."""


@dataclass(frozen=True)
class MembraneSpec:
    """Mechanical oscillator: geometry, (2,1) antisymmetric drum mode, bath.

    The effective mass defaults to areal_density * length * width; x0_override
    bypasses the mass model entirely when the zero-point motion is known.
    """

    omega_m: float  # rad/s
    length: float = 1e-6  # m
    width: float = 0.3e-6  # m
    gap_d0: float = 10e-9  # m
    areal_density: float = GRAPHENE_AREAL_DENSITY  # kg/m^2
    x0_override: float | None = None  # m
    quality_Q: float | None = None
    gamma_b: float | None = None  # rad/s; defaults to omega_m / Q
    n_bar_m: float | None = None
    bath_temperature: float | None = None  # K

    def __post_init__(self):
        if self.omega_m <= 0.0:
            raise ConfigurationError("omega_m must be positive")
        for name in ("length", "width", "gap_d0"):
            if getattr(self, name) <= 0.0:
                raise ConfigurationError(f"{name} must be positive")
        if self.quality_Q is None and self.gamma_b is None:
            raise ConfigurationError("need quality_Q or gamma_b")
        if self.quality_Q is not None and self.quality_Q <= 0.0:
            raise ConfigurationError("quality_Q must be positive")
        if self.gamma_b is not None and self.gamma_b < 0.0:
            raise ConfigurationError("gamma_b must be nonnegative")
        if self.quality_Q is not None and self.gamma_b is not None:
            implied = self.omega_m / self.quality_Q
            if self.gamma_b > 0 and abs(implied - self.gamma_b) > 0.01 * self.gamma_b:
                warnings.warn(
                    f"gamma_b={self.gamma_b:g} disagrees with omega_m/Q={implied:g} "
                    "by more than 1%",
                    stacklevel=2,
                )
        if self.n_bar_m is not None and self.n_bar_m < 0.0:
            raise ConfigurationError("n_bar_m must be nonnegative")
        if self.damping_rate() >= self.omega_m:
            warnings.warn("gamma_b is not small compared to omega_m", stacklevel=2)

    def damping_rate(self) -> float:
        if self.gamma_b is not None:
            return self.gamma_b
        return self.omega_m / self.quality_Q

    def mass(self) -> float:
        return self.areal_density * self.length * self.width

    def occupation(self) -> float:
        """Mechanical bath occupation; explicit value overrides temperature."""
        if self.n_bar_m is not None:
            return self.n_bar_m
        if self.bath_temperature is not None:
            return thermal_occupation(self.omega_m, self.bath_temperature)
        return 0.0


@dataclass(frozen=True)
class CircuitSpec:
    """Electrical elements of the readout circuit.

    Single arm: series L0, R0, C0 driven through a line of impedance Z_out.
    Double arm: one (L0, R0) leg feeding two parallel arms, each with
    parasitic (L, R) and one capacitor half; stray capacitance C_s shunts
    the motional capacitor and dilutes the couplings by C0/(C0+C_s).
    """

    topology: Topology
    L0: float  # H
    R0: float  # Ohm
    Z_out: float  # Ohm
    C0: float  # F
    parasitic_L: float | None = None  # H, double arm
    parasitic_R: float | None = None  # Ohm, double arm
    stray_Cs: float = 0.0  # F
    delta_L: float = 0.0
    delta_R: float = 0.0
    delta_C: float = 0.0
    n_bar_e: float | None = None
    reservoir_temperature: float | None = None  # K

    def __post_init__(self):
        for name in ("L0", "C0"):
            if getattr(self, name) <= 0.0:
                raise SingularParameterError(f"{name} must be positive")
        for name in ("R0", "Z_out", "stray_Cs"):
            if getattr(self, name) < 0.0:
                raise ConfigurationError(f"{name} must be nonnegative")
        if self.topology is Topology.SINGLE_ARM:
            if self.parasitic_L is not None or self.parasitic_R is not None:
                raise ConfigurationError("single arm takes no parasitic elements")
            if self.delta_L or self.delta_R or self.delta_C:
                raise ConfigurationError("single arm takes no asymmetries")
        else:
            if self.parasitic_L is None or self.parasitic_R is None:
                raise ConfigurationError("double arm needs parasitic_L and parasitic_R")
            if self.parasitic_L <= 0.0:
                raise SingularParameterError("parasitic_L must be positive")
            if self.parasitic_R < 0.0:
                raise ConfigurationError("parasitic_R must be nonnegative")
            if abs(self.delta_L) >= self.parasitic_L:
                raise ConfigurationError("|delta_L| must stay below parasitic_L")
            if abs(self.delta_R) > self.parasitic_R:
                raise ConfigurationError("|delta_R| must stay below parasitic_R")
            if abs(self.delta_C) >= self.C0:
                raise ConfigurationError("|delta_C| must stay below C0")

    def electrical_occupation(self, omega_s: float) -> float:
        """Reservoir occupation at the probe frequency; explicit value wins."""
        if self.n_bar_e is not None:
            return self.n_bar_e
        if self.reservoir_temperature is not None:
            return thermal_occupation(omega_s, self.reservoir_temperature)
        return 0.0


@dataclass(frozen=True)
class DerivedRates:
    """Resonance frequencies and decay rates implied by the element values."""

    omega_s: float  # rad/s, probed (symmetric) mode
    gamma_t: float  # rad/s, decay into the transmission line
    gamma_r: float  # rad/s, resistive decay of the probed mode
    omega_a: float | None = None  # rad/s, antisymmetric mode (double arm)
    gamma_l: float | None = None  # rad/s, antisymmetric-mode decay (double arm)

    @property
    def kappa(self) -> float:
        return self.gamma_t + self.gamma_r


@dataclass(frozen=True)
class Couplings:
    """Electromechanical coupling constants, all angular rates.

    g1, g2 are the per-capacitor-half linear and quadratic couplings; g_r is
    the overall residual linear coupling left by fabrication asymmetries.
    """

    g1: float
    g2: float
    g_r: float = 0.0
    delta_g1: float = 0.0

    def __post_init__(self):
        if self.g2 < 0.0 or self.g_r < 0.0:
            raise ConfigurationError("g2 and g_r must be nonnegative")


def derive_rates(circuit: CircuitSpec) -> DerivedRates:
    """Resonance frequencies and decay rates from element values."""
    if circuit.topology is Topology.SINGLE_ARM:
        omega_s = 1.0 / math.sqrt(circuit.C0 * circuit.L0)
        return DerivedRates(
            omega_s=omega_s,
            gamma_t=circuit.Z_out / circuit.L0,
            gamma_r=circuit.R0 / circuit.L0,
        )
    L, R = circuit.parasitic_L, circuit.parasitic_R
    L_loop = L + 2.0 * circuit.L0
    omega_s = 1.0 / math.sqrt(circuit.C0 * L_loop)
    return DerivedRates(
        omega_s=omega_s,
        gamma_t=2.0 * circuit.Z_out / L_loop,
        gamma_r=(R + 2.0 * circuit.R0) / L_loop,
        omega_a=1.0 / math.sqrt(circuit.C0 * L),
        gamma_l=R / L if L > 0 else None,
    )


def single_arm_from_rates(
    omega_s: float, gamma_t: float, gamma_r: float, Z_out: float = 50.0, **kw
) -> CircuitSpec:
    """Invert the single-arm rate formulas back to element values."""
    L0 = Z_out / gamma_t
    return CircuitSpec(
        topology=Topology.SINGLE_ARM,
        L0=L0,
        R0=gamma_r * L0,
        Z_out=Z_out,
        C0=1.0 / (omega_s**2 * L0),
        **kw,
    )


def double_arm_from_rates(
    omega_s: float,
    gamma_t: float,
    gamma_r: float,
    L_over_L0: float,
    R_over_Zout: float,
    Z_out: float = 50.0,
    **kw,
) -> CircuitSpec:
    """Invert the double-arm rate formulas back to element values.

    The parasitic elements are fixed by the ratios L/L0 and R/Z_out quoted in
    the reference scenarios; R0 absorbs whatever gamma_r requires.
    """
    L_loop = 2.0 * Z_out / gamma_t
    L0 = L_loop / (L_over_L0 + 2.0)
    L = L_over_L0 * L0
    R = R_over_Zout * Z_out
    R0 = (gamma_r * L_loop - R) / 2.0
    if R0 < 0.0:
        raise ConfigurationError("gamma_r too small for the requested R/Z_out")
    return CircuitSpec(
        topology=Topology.DOUBLE_ARM,
        L0=L0,
        R0=R0,
        Z_out=Z_out,
        C0=1.0 / (omega_s**2 * L_loop),
        parasitic_L=L,
        parasitic_R=R,
        **kw,
    )


def zero_point_motion(membrane: MembraneSpec) -> float:
    """Zero-point motion amplitude sqrt(hbar / (2 m omega_m))."""
    if membrane.x0_override is not None:
        return membrane.x0_override
    m = membrane.mass()
    if m <= 0.0:
        raise ConfigurationError("mass model unresolved: zero areal density or area")
    return math.sqrt(HBAR / (2.0 * m * membrane.omega_m))


def couplings_from_geometry(membrane: MembraneSpec, omega_s: float) -> Couplings:
    """Parallel-plate couplings of the clamped (2,1) mode, per capacitor half.

    g1 = (8/pi^2) x0 omega_s / d0 and g2 = x0^2 omega_s / d0^2, so the ratio
    g2/g1 = pi^2 x0 / (8 d0) is fixed by geometry alone.
    """
    x0 = zero_point_motion(membrane)
    d0 = membrane.gap_d0
    return Couplings(
        g1=(8.0 / math.pi**2) * x0 * omega_s / d0,
        g2=x0**2 * omega_s / d0**2,
    )


def apply_stray_capacitance(couplings: Couplings, C0: float, Cs: float) -> Couplings:
    """Dilute every coupling by C0/(C0+Cs)."""
    if C0 <= 0.0:
        raise ConfigurationError("C0 must be positive")
    if Cs < 0.0:
        raise ConfigurationError("Cs must be nonnegative")
    f = C0 / (C0 + Cs)
    return replace(
        couplings,
        g1=f * couplings.g1,
        g2=f * couplings.g2,
        g_r=f * couplings.g_r,
        delta_g1=f * couplings.delta_g1,
    )


def residual_coupling(g1: float, delta_g1: float, delta_C: float, C0: float) -> float:
    """Overall residual linear coupling of the combined capacitor.

    g_r = delta_g1 + 2 g1 delta_C/C0 + delta_g1 delta_C^2/C0^2.
    """
    if C0 <= 0.0:
        raise ConfigurationError("C0 must be positive")
    r = delta_C / C0
    return delta_g1 + 2.0 * g1 * r + delta_g1 * r**2
