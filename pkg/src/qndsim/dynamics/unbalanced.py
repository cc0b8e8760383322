"""Double-arm sideband models: balanced heating solver and asymmetric simulator.

The circuit equations are written exactly in the quadrature variables
z = (Q_s, Phi_s, Q_a, Phi_a, b, b†), linearized around the classical
steady-state response to the coherent drive, and transformed to mode
operators x = (a_s, a_s†, a_a, a_a†, b, b†).  Asymmetries delta_L, delta_R,
delta_C, delta_g1 (left arm +delta, right arm -delta) enter the static
drift exactly; the drive-enhanced electromechanical couplings oscillate at
the carrier and feed the truncated-Fourier engine.

The balanced path reduces to the (a_a, b) sector, which is the system the
heating analysis solves analytically; the asymmetric path keeps all three
modes so the probed mode's noise can reach the membrane through the
residual linear coupling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..constants import HBAR
from ..metrics import DriveSpec, induced_heating_double
from ..params import (
    CircuitSpec,
    ConfigurationError,
    Couplings,
    MembraneSpec,
    Topology,
    derive_rates,
)
from .fourier import (
    FourierTruncation,
    HermitianChannel,
    LadderChannel,
    SidebandSystem,
    solve_sideband,
)
from .linear_model import pair_initial_cov
from .solution import DynamicsSolution

Z_LABELS = ("Q_s", "Phi_s", "Q_a", "Phi_a", "b", "b_dag")


def _electrical_block(circuit: CircuitSpec) -> np.ndarray:
    """Exact static drift of (Q_s, Phi_s, Q_a, Phi_a) with asymmetries."""
    L0, C0 = circuit.L0, circuit.C0
    L, R = circuit.parasitic_L, circuit.parasitic_R
    dL, dR, dC = circuit.delta_L, circuit.delta_R, circuit.delta_C
    Lam = (2.0 * L0 + L) * L - dL**2
    cap = C0**2 - dC**2
    A = np.zeros((4, 4), dtype=complex)
    # charge equations from inverting the inductance matrix
    A[0, 1] = 2.0 * L / Lam
    A[0, 3] = -dL / Lam
    A[2, 1] = -dL / Lam
    A[2, 3] = (L + 2.0 * L0) / (2.0 * Lam)
    # symmetric flux: capacitive force + dissipation through I_s, I_a
    r_s = circuit.Z_out + circuit.R0 + R / 2.0
    A[1, 0] = -C0 / (2.0 * cap)
    A[1, 2] = dC / cap
    A[1, 1] = (-r_s * 2.0 * L + dR * dL) / Lam
    A[1, 3] = (r_s * dL - dR * (L + 2.0 * L0) / 2.0) / Lam
    # antisymmetric flux
    A[3, 0] = dC / cap
    A[3, 2] = -2.0 * C0 / cap
    A[3, 1] = (2.0 * R * dL - 2.0 * dR * L) / Lam
    A[3, 3] = (-R * (L + 2.0 * L0) + dR * dL) / Lam
    return A


def probe_resonance(circuit: CircuitSpec) -> float:
    """Actual resonance of the probed mode with asymmetries included.

    Asymmetries (delta_C above all) shift the probed mode away from the
    balanced-design omega_s by many linewidths; the probe is assumed to
    track the fabricated device's resonance, as in any real measurement.
    """
    rates = derive_rates(circuit)
    eigs = np.linalg.eigvals(_electrical_block(circuit))
    positive = eigs[eigs.imag > 0.0]
    return float(positive.imag[np.argmin(np.abs(positive.imag - rates.omega_s))])


def mean_field_phasors(
    circuit: CircuitSpec, drive: DriveSpec, omega_drive: float | None = None
) -> np.ndarray:
    """Steady-state phasors (Q_s, Phi_s, Q_a, Phi_a) at e^{-i omega_drive t}.

    The physical mean field is X(t) = X~ e^{-i w t} + c.c.; the drive
    2 <V_in> = 2 V0 cos(w t) has phasor V0 = sqrt(2 hbar w Z_out flux).
    The drive frequency defaults to the probed mode's actual resonance.
    """
    if omega_drive is None:
        omega_drive = (drive.probe_frequency if drive.probe_frequency is not None
                       else probe_resonance(circuit))
    A = _electrical_block(circuit)
    v0 = math.sqrt(2.0 * HBAR * omega_drive * circuit.Z_out * drive.flux)
    force = np.array([0.0, v0, 0.0, 0.0], dtype=complex)
    return np.linalg.solve(A + 1j * omega_drive * np.eye(4), -force)


def _mode_transform(circuit: CircuitSpec) -> tuple[np.ndarray, np.ndarray]:
    """S with x = S z, plus its inverse (balanced mode normalization)."""
    rates = derive_rates(circuit)
    C0 = circuit.C0
    q_s = math.sqrt(HBAR * C0 * rates.omega_s)
    p_s = math.sqrt(HBAR / (4.0 * C0 * rates.omega_s))
    q_a = 0.5 * math.sqrt(HBAR * C0 * rates.omega_a)
    p_a = math.sqrt(HBAR / (C0 * rates.omega_a))
    S = np.zeros((6, 6), dtype=complex)
    Sinv = np.zeros((6, 6), dtype=complex)
    for base, (q, p) in ((0, (q_s, p_s)), (2, (q_a, p_a))):
        S[base, base] = 0.5 / q
        S[base, base + 1] = 0.5j / p
        S[base + 1, base] = 0.5 / q
        S[base + 1, base + 1] = -0.5j / p
        Sinv[base, base] = q
        Sinv[base, base + 1] = q
        Sinv[base + 1, base] = -1j * p
        Sinv[base + 1, base + 1] = 1j * p
    S[4, 4] = S[5, 5] = 1.0
    Sinv[4, 4] = Sinv[5, 5] = 1.0
    return S, Sinv


@dataclass(frozen=True)
class _BuiltSystem:
    system: SidebandSystem
    gamma_eff: float


def _build_system(
    circuit: CircuitSpec,
    couplings: Couplings,
    drive: DriveSpec,
    membrane: MembraneSpec,
    n_b0: float,
    reduced: bool,
) -> _BuiltSystem:
    if circuit.topology is not Topology.DOUBLE_ARM:
        raise ConfigurationError("sideband solvers model the double-arm circuit")
    rates = derive_rates(circuit)
    gb = membrane.damping_rate()
    wm = membrane.omega_m
    n_e = circuit.electrical_occupation(rates.omega_s)
    n_m = membrane.occupation()

    omega_drive = (drive.probe_frequency if drive.probe_frequency is not None
                   else probe_resonance(circuit))
    phasors = mean_field_phasors(circuit, drive, omega_drive)
    qs_ph, qa_ph = phasors[0], phasors[2]
    g1t = couplings.g1 / (circuit.C0 * rates.omega_s)
    dg1t = couplings.delta_g1 / (circuit.C0 * rates.omega_s)
    # drive-enhanced coupling phasors (coefficients of e^{-i omega_s t})
    w_minus = g1t * qa_ph + 0.5 * dg1t * qs_ph
    u_minus = 0.5 * g1t * qs_ph + dg1t * qa_ph

    A0_z = np.zeros((6, 6), dtype=complex)
    A0_z[:4, :4] = _electrical_block(circuit)
    A0_z[4, 4] = -1j * wm - gb / 2.0
    A0_z[5, 5] = 1j * wm - gb / 2.0

    def coupling_block(w_c: complex, u_c: complex) -> np.ndarray:
        A = np.zeros((6, 6), dtype=complex)
        A[1, 4] = A[1, 5] = -w_c
        A[3, 4] = A[3, 5] = -2.0 * u_c
        A[4, 0] = -1j * w_c / HBAR
        A[4, 2] = -2j * u_c / HBAR
        A[5, 0] = 1j * w_c / HBAR
        A[5, 2] = 2j * u_c / HBAR
        return A

    A_minus_z = coupling_block(w_minus, u_minus)
    A_plus_z = coupling_block(np.conj(w_minus), np.conj(u_minus))

    S, Sinv = _mode_transform(circuit)
    A0 = S @ A0_z @ Sinv
    A_minus = S @ A_minus_z @ Sinv
    A_plus = S @ A_plus_z @ Sinv

    def column(z_col: np.ndarray) -> np.ndarray:
        return S @ z_col.astype(complex)

    def resistor_psd(resistance: float):
        def psd(om: np.ndarray) -> np.ndarray:
            mag = HBAR * np.abs(om) * resistance / 2.0
            return mag * (n_e + (om > 0.0))

        return psd

    R1 = circuit.parasitic_R + circuit.delta_R
    R2 = circuit.parasitic_R - circuit.delta_R
    channels = [
        HermitianChannel("V_in", column(np.array([0.0, 2.0, 0, 0, 0, 0])),
                         resistor_psd(circuit.Z_out)),
        HermitianChannel("V_R0", column(np.array([0.0, 2.0, 0, 0, 0, 0])),
                         resistor_psd(circuit.R0)),
        HermitianChannel("V_R1", column(np.array([0.0, 1.0, 0, 2.0, 0, 0])),
                         resistor_psd(R1)),
        HermitianChannel("V_R2", column(np.array([0.0, 1.0, 0, -2.0, 0, 0])),
                         resistor_psd(R2)),
        LadderChannel(
            "F_b",
            column_op=np.array([0, 0, 0, 0, 1.0, 0], dtype=complex),
            column_dag=np.array([0, 0, 0, 0, 0, 1.0], dtype=complex),
            occupation=n_m,
            rate=gb,
        ),
    ]
    cov = pair_initial_cov([n_e, 0.0, n_b0])

    labels = ("a_s", "a_s_dag", "a_a", "a_a_dag", "b", "b_dag")
    if reduced:
        keep = [2, 3, 4, 5]
        if abs(w_minus) > 0.0:
            raise ConfigurationError(
                "balanced solver requires zero symmetric-mode coupling"
            )
        A0 = A0[np.ix_(keep, keep)]
        A_minus = A_minus[np.ix_(keep, keep)]
        A_plus = A_plus[np.ix_(keep, keep)]
        channels = [
            HermitianChannel("V_R1", channels[2].column[keep], channels[2].psd),
            HermitianChannel("V_R2", channels[3].column[keep], channels[3].psd),
            LadderChannel("F_b", channels[4].column_op[keep],
                          channels[4].column_dag[keep], n_m, gb),
        ]
        cov = pair_initial_cov([0.0, n_b0])
        labels = ("a_a", "a_a_dag", "b", "b_dag")

    # classical mechanical amplitude: the static force only displaces the
    # rest position (removed by redefinition); the +-2 omega_s micromotion
    # is kept as a constant |<b>|^2 offset
    f2 = (-1j / HBAR) * (
        g1t * qs_ph * qa_ph + 0.25 * dg1t * (qs_ph**2 + 4.0 * qa_ph**2)
    )
    offset = 0.0
    for om in (2.0 * omega_drive, -2.0 * omega_drive):
        f = f2 if om > 0 else np.conj(f2)
        offset += abs(f / (1j * (wm - om) + gb / 2.0)) ** 2

    heat = induced_heating_double(wm, drive, circuit, couplings, rates)
    gamma_eff = gb + max(heat.Gamma_b, 0.0)
    if wm + 2.0 * heat.omega_b <= 0.0:
        raise ConfigurationError(
            f"drive-induced spring shift omega_b={heat.omega_b:g} rad/s "
            "destabilizes the mechanical mode (omega_m^2 + 2 omega_m omega_b <= 0)"
        )
    # the drive shifts the mechanical resonance by omega_b, typically many
    # linewidths; the solver re-centers its comb self-consistently from there
    system = SidebandSystem(
        labels=labels,
        A0=A0,
        A_minus=A_minus,
        A_plus=A_plus,
        omega_carrier=omega_drive,
        omega_center=wm + heat.omega_b,
        channels=tuple(channels),
        initial_cov=cov,
        decay_estimate=gamma_eff,
        mean_nb_offset=float(offset),
        center_uncertainty=2.5 * abs(heat.omega_b) + 1e3 * gamma_eff,
    )
    return _BuiltSystem(system=system, gamma_eff=gamma_eff)


def balanced_sideband_system(
    circuit: CircuitSpec,
    couplings: Couplings,
    drive: DriveSpec,
    membrane: MembraneSpec,
    n_b0: float = 0.0,
) -> SidebandSystem:
    """Reduced (a_a, b) system of the balanced double arm."""
    if circuit.delta_L or circuit.delta_R or circuit.delta_C or couplings.delta_g1:
        raise ConfigurationError("balanced solver takes zero asymmetries")
    return _build_system(circuit, couplings, drive, membrane, n_b0, reduced=True).system


def fourier_heating_solve(
    circuit: CircuitSpec,
    couplings: Couplings,
    drive: DriveSpec,
    membrane: MembraneSpec,
    trunc: FourierTruncation | None = None,
    n_b0: float = 0.0,
    t_eval: np.ndarray | None = None,
    compute_residual: bool = False,
    check_convergence: bool = False,
) -> DynamicsSolution:
    """Balanced double-arm heating from the truncated-Fourier linear system."""
    if membrane.damping_rate() >= membrane.omega_m:
        raise ConfigurationError("solver assumes gamma_b << omega_m")
    trunc = trunc or FourierTruncation()
    system = balanced_sideband_system(circuit, couplings, drive, membrane, n_b0)
    sol = solve_sideband(system, trunc, t_eval=t_eval,
                         compute_residual=compute_residual)
    if check_convergence:
        fine = solve_sideband(
            system,
            FourierTruncation(N_j=trunc.N_j, N_f=2 * trunc.N_f, tau=trunc.tau,
                              tau_decay_multiple=trunc.tau_decay_multiple),
            t_eval=t_eval,
        )
        change = abs(fine.n_b_steady - sol.n_b_steady) / max(
            abs(fine.n_b_steady), 1e-300
        )
        if change > 0.01:
            sol = sol.with_warning(
                f"steady state moved {change:.1%} on N_f doubling"
            )
    return sol


def unbalanced_simulate(
    circuit: CircuitSpec,
    couplings: Couplings,
    drive: DriveSpec,
    membrane: MembraneSpec,
    trunc: FourierTruncation | None = None,
    t_grid: np.ndarray | None = None,
    n_b0: float = 0.0,
    compute_residual: bool = False,
) -> DynamicsSolution:
    """Heating of the fully asymmetric double arm (all three modes kept).

    Stage one solves the classical mean fields (drive steady state, leakage
    into the antisymmetric mode, off-resonant mechanical amplitude); stage
    two propagates the fluctuations around them on the sideband grid.
    """
    for frac, name in (
        (abs(circuit.delta_R) / circuit.parasitic_R if circuit.parasitic_R else 0.0,
         "delta_R"),
        (abs(circuit.delta_L) / circuit.parasitic_L, "delta_L"),
        (abs(circuit.delta_C) / circuit.C0, "delta_C"),
    ):
        if frac > 0.25:
            warnings.warn(
                f"{name} beyond the 25% validity envelope of the linearized model",
                stacklevel=2,
            )
    trunc = trunc or FourierTruncation()
    built = _build_system(circuit, couplings, drive, membrane, n_b0, reduced=False)
    return solve_sideband(built.system, trunc, t_eval=t_grid,
                          compute_residual=compute_residual)
