"""Closed-form figures of merit for the QND phonon readout.

Everything here is a pure function of the circuit, coupling, membrane and
drive parameters: reflection coefficient, homodyne signal and noise, the
signal-to-noise parameter D^2, drive-induced heating rates, the per-window
added phonons delta_n_b, the drive-independent quality factors (lambda and
its charge-redistribution / imperfection components), their renormalization
by the mechanical bath, and the analytic phonon-number trajectories against
which the numerical solvers are validated.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .params import (
    CircuitSpec,
    ConfigurationError,
    Couplings,
    DerivedRates,
    MembraneSpec,
    Topology,
    derive_rates,
)


@dataclass(frozen=True)
class DriveSpec:
    """Coherent probe: photon budget, window length, homodyne phase.

    Either the photon number |alpha|^2 per window or the flux |alpha~|^2 may
    be given; when both are present they must satisfy |alpha|^2 = flux * T.
    """

    measurement_time_T: float  # s
    photon_number_alpha_sq: float | None = None
    flux_alpha_tilde_sq: float | None = None  # photons / s
    homodyne_phase_theta: float = math.pi
    probe_frequency: float | None = None  # rad/s, defaults to omega_s

    def __post_init__(self):
        if self.measurement_time_T <= 0.0:
            raise ConfigurationError("measurement_time_T must be positive")
        if self.photon_number_alpha_sq is None and self.flux_alpha_tilde_sq is None:
            raise ConfigurationError("need photon_number_alpha_sq or flux_alpha_tilde_sq")
        if (
            self.photon_number_alpha_sq is not None
            and self.flux_alpha_tilde_sq is not None
        ):
            implied = self.flux_alpha_tilde_sq * self.measurement_time_T
            if not math.isclose(implied, self.photon_number_alpha_sq, rel_tol=1e-9):
                raise ConfigurationError(
                    "photon number and flux disagree: "
                    f"flux*T={implied:g} vs |alpha|^2={self.photon_number_alpha_sq:g}"
                )
        for name in ("photon_number_alpha_sq", "flux_alpha_tilde_sq"):
            v = getattr(self, name)
            if v is not None and v < 0.0:
                raise ConfigurationError(f"{name} must be nonnegative")

    @property
    def alpha_sq(self) -> float:
        if self.photon_number_alpha_sq is not None:
            return self.photon_number_alpha_sq
        return self.flux_alpha_tilde_sq * self.measurement_time_T

    @property
    def flux(self) -> float:
        if self.flux_alpha_tilde_sq is not None:
            return self.flux_alpha_tilde_sq
        return self.photon_number_alpha_sq / self.measurement_time_T


UNBOUNDED = math.inf


def _rates(circuit: CircuitSpec, rates: DerivedRates | None) -> DerivedRates:
    return rates if rates is not None else derive_rates(circuit)


def reflection_coefficient(
    omega,
    n_b,
    circuit: CircuitSpec,
    couplings: Couplings,
    rates: DerivedRates | None = None,
):
    """Reflection response zeta(Omega, n_b) of the probed mode.

    zeta = 2 gamma_t Omega / [-i(Omega^2 - omega_s^2 - s g2 omega_s n_b)
    + Omega (gamma_r + gamma_t)].  The phonon shift enters with s = 1 for the
    single arm; for the double arm both capacitor halves shift the resonance,
    s = 2.  The reflected coherent amplitude is (1 - zeta) V_in.
    """
    r = _rates(circuit, rates)
    shift_factor = 2.0 if circuit.topology is Topology.DOUBLE_ARM else 1.0
    omega = np.asarray(omega, dtype=float)
    shift = shift_factor * couplings.g2 * r.omega_s * np.asarray(n_b, dtype=float)
    denom = -1j * (omega**2 - r.omega_s**2 - shift) + omega * r.kappa
    with np.errstate(invalid="ignore"):
        zeta = np.where(denom == 0.0, 0.0, 2.0 * r.gamma_t * omega / denom)
    if zeta.ndim == 0:
        return complex(zeta)
    return zeta


@dataclass(frozen=True)
class HomodyneSignal:
    V_M: float  # V
    sigma: float  # V


def homodyne_signal(
    n_b: int,
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    rates: DerivedRates | None = None,
) -> HomodyneSignal:
    """Mean homodyne outcome and noise for a fixed phonon number.

    On the phase quadrature (theta = pi): V_M = -alpha sqrt(hbar omega_s
    Z_out / 2) Im zeta, sigma^2 = (hbar omega_s Z_out / 2)(1 + 2 n_e).
    The amplitude quadrature (theta = 0) returns the Re zeta projection of
    the reflected amplitude instead.
    """
    r = _rates(circuit, rates)
    omega = drive.probe_frequency if drive.probe_frequency is not None else r.omega_s
    zeta = reflection_coefficient(omega, n_b, circuit, couplings, r)
    alpha = math.sqrt(drive.alpha_sq)
    scale = math.sqrt(HBAR * r.omega_s * circuit.Z_out / 2.0)
    theta = drive.homodyne_phase_theta
    # theta = pi picks -Im zeta; theta = 0 picks Re(1 - zeta).
    reflected = 1.0 - zeta
    v_m = alpha * scale * (math.cos(theta / 2.0) * reflected.real
                           - math.sin(theta / 2.0) * reflected.imag)
    if theta == math.pi:
        v_m = -alpha * scale * zeta.imag
    n_e = circuit.electrical_occupation(r.omega_s)
    sigma = scale * math.sqrt(1.0 + 2.0 * n_e)
    return HomodyneSignal(V_M=v_m, sigma=sigma)


def signal_distance(
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    rates: DerivedRates | None = None,
) -> float:
    """Peak separation d = V_M(n_b=1) - V_M(n_b=0) on the phase quadrature."""
    r = _rates(circuit, rates)
    one = homodyne_signal(1, drive, circuit, couplings, r)
    zero = homodyne_signal(0, drive, circuit, couplings, r)
    return one.V_M - zero.V_M


def snr_squared(
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    rates: DerivedRates | None = None,
) -> float:
    """Signal-to-noise parameter D^2 = d^2 / sigma^2.

    D^2 = p g2^2 |alpha|^2 gamma_t^2 / [(1+2 n_e)(g2^2 + kappa^2)^2] with
    p = 4 for the single arm and p = 16 for the double arm (both halves).
    """
    r = _rates(circuit, rates)
    n_e = circuit.electrical_occupation(r.omega_s)
    p = 16.0 if circuit.topology is Topology.DOUBLE_ARM else 4.0
    g2 = couplings.g2
    return (
        p * g2**2 * drive.alpha_sq * r.gamma_t**2
        / ((1.0 + 2.0 * n_e) * (g2**2 + r.kappa**2) ** 2)
    )


def _heating_rate_rlc_form(
    g: float, alpha_sq: float, T: float, gamma_t: float, gamma_r: float, omega_m: float
) -> float:
    """Gamma_b = 4 g^2 |alpha|^2 gamma_t / {T kappa [kappa^2 + 4 omega_m^2]}."""
    kappa = gamma_t + gamma_r
    return 4.0 * g**2 * alpha_sq * gamma_t / (T * kappa * (kappa**2 + 4.0 * omega_m**2))


def induced_heating_rlc(
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    rates: DerivedRates | None = None,
) -> float:
    """Drive-induced heating rate of the single-arm circuit (uses g1)."""
    r = _rates(circuit, rates)
    if membrane.damping_rate() >= r.kappa:
        warnings.warn("gamma_b is not small compared to the electrical decay",
                      stacklevel=2)
    return _heating_rate_rlc_form(
        couplings.g1, drive.alpha_sq, drive.measurement_time_T,
        r.gamma_t, r.gamma_r, membrane.omega_m,
    )


def residual_heating(
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    rates: DerivedRates | None = None,
) -> float:
    """Gamma_b-tilde: the RLC heating form evaluated at the residual g_r."""
    r = _rates(circuit, rates)
    return _heating_rate_rlc_form(
        couplings.g_r, drive.alpha_sq, drive.measurement_time_T,
        r.gamma_t, r.gamma_r, membrane.omega_m,
    )


@dataclass(frozen=True)
class DoubleArmHeating:
    Gamma_b: float  # rad/s, induced decay
    omega_b: float  # rad/s, induced mechanical frequency shift


def induced_heating_double(
    omega,
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    rates: DerivedRates | None = None,
) -> DoubleArmHeating:
    """Frequency-resolved decay Gamma_b(Omega) and shift omega_b(Omega).

    Full charge-redistribution expressions for the double arm; the overall
    sign is fixed so that Gamma_b > 0 and omega_b < 0 in the physical limit
    omega_a >> omega_s >> omega_m (see the limit forms below).
    """
    r = _rates(circuit, rates)
    if circuit.topology is not Topology.DOUBLE_ARM:
        raise ConfigurationError("double-arm heating needs a double-arm circuit")
    omega = np.asarray(omega, dtype=float)
    wa2 = r.omega_a**2
    gl = r.gamma_l
    ws = r.omega_s
    pref = (
        drive.alpha_sq / drive.measurement_time_T
        * (couplings.g1 * r.omega_a / r.kappa) ** 2
        * r.gamma_t / ws
    )
    bracket = 1.0 / (-wa2 + (omega - ws) * (1j * gl + omega - ws)) + 1.0 / (
        -wa2 + (omega + ws) * (1j * gl + omega + ws)
    )
    gamma = np.real(4j * pref * bracket)
    shift = np.imag(2j * pref * bracket)
    if gamma.ndim == 0:
        return DoubleArmHeating(Gamma_b=float(gamma), omega_b=float(shift))
    return DoubleArmHeating(Gamma_b=gamma, omega_b=shift)


def induced_heating_double_limit(
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    rates: DerivedRates | None = None,
) -> DoubleArmHeating:
    """Heating and shift in the limit omega_a >> omega_s >> omega_m.

    Gamma_b = 8 g1^2 |alpha|^2 gamma_l gamma_t omega_m / [T kappa^2 omega_s
    omega_a^2] and omega_b = -4 g1^2 |alpha|^2 gamma_t / [T kappa^2 omega_s].
    """
    r = _rates(circuit, rates)
    if circuit.topology is not Topology.DOUBLE_ARM:
        raise ConfigurationError("double-arm heating needs a double-arm circuit")
    base = couplings.g1**2 * drive.alpha_sq * r.gamma_t / (
        drive.measurement_time_T * r.kappa**2 * r.omega_s
    )
    return DoubleArmHeating(
        Gamma_b=8.0 * base * r.gamma_l * membrane.omega_m / r.omega_a**2,
        omega_b=-4.0 * base,
    )


class TrajectoryScenario(enum.Enum):
    RLC_EXACT = "rlc_exact"
    RLC_APPROX = "rlc_approx"
    DOUBLE_ARM = "double_arm"
    COMBINED = "combined"


def _growth(gamma_eff: float, t: np.ndarray) -> np.ndarray:
    """(1 - exp(-gamma_eff t)) / gamma_eff, stable as gamma_eff -> 0."""
    if gamma_eff == 0.0:
        return t.copy()
    return -np.expm1(-gamma_eff * t) / gamma_eff


def phonon_trajectory_analytic(
    t_grid,
    scenario: TrajectoryScenario,
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    n_b0: float = 0.0,
    rates: DerivedRates | None = None,
) -> np.ndarray:
    """Closed-form phonon-number trajectories n_b(t).

    RLC_EXACT keeps all electrical-transient terms of the single-arm
    solution; RLC_APPROX is its coarse-grained form valid for
    t >> 1/(gamma_t+gamma_r); DOUBLE_ARM is the balanced charge-
    redistribution result; COMBINED adds the residual-coupling heating
    from fabrication asymmetries.
    """
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("negative time in trajectory grid")
    r = _rates(circuit, rates)
    gb = membrane.damping_rate()
    n_m = membrane.occupation()
    n_e = circuit.electrical_occupation(r.omega_s)
    wm = membrane.omega_m
    kappa = r.kappa

    if scenario is TrajectoryScenario.RLC_EXACT:
        a1 = (
            4.0 * couplings.g1**2 * drive.alpha_sq * r.gamma_t * (1.0 + 2.0 * n_e)
            / (drive.measurement_time_T * ((kappa - gb) ** 2 + 4.0 * wm**2))
        )
        osc = 2.0 * np.real(
            np.exp(-1j * wm * t) / (gb + kappa + 2j * wm)
        )
        electrical = a1 * (
            -np.exp(-kappa * t) / kappa**2
            + (2.0 / kappa) * np.exp(-(gb + kappa) * t / 2.0) * osc
            + _growth(gb, t) / kappa
            + 1.0 / kappa**2
        )
        return n_b0 * np.exp(-gb * t) - n_m * np.expm1(-gb * t) + electrical

    if scenario is TrajectoryScenario.RLC_APPROX:
        gamma_big = _heating_rate_rlc_form(
            couplings.g1, drive.alpha_sq, drive.measurement_time_T,
            r.gamma_t, r.gamma_r, wm,
        )
        source = gb * n_m + gamma_big * (1.0 + 2.0 * n_e)
        return n_b0 * np.exp(-gb * t) + source * _growth(gb, t)

    heat = induced_heating_double_limit(drive, circuit, couplings, membrane, r)
    gamma_eff = gb + heat.Gamma_b
    if scenario is TrajectoryScenario.DOUBLE_ARM:
        source = gb * n_m + heat.Gamma_b * (r.omega_s / wm) * (n_e + 0.5)
        return n_b0 * np.exp(-gamma_eff * t) + source * _growth(gamma_eff, t)

    if scenario is TrajectoryScenario.COMBINED:
        gamma_res = _heating_rate_rlc_form(
            couplings.g_r, drive.alpha_sq, drive.measurement_time_T,
            r.gamma_t, r.gamma_r, wm,
        )
        source = gb * n_m + (
            heat.Gamma_b * r.omega_s / (2.0 * wm) + gamma_res
        ) * (1.0 + 2.0 * n_e)
        return n_b0 * np.exp(-gamma_eff * t) + source * _growth(gamma_eff, t)

    raise ValueError(f"unknown scenario {scenario!r}")


@dataclass(frozen=True)
class DeltaNb:
    electrical: float
    mechanical: float

    @property
    def total(self) -> float:
        return self.electrical + self.mechanical


def delta_nb(
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    rates: DerivedRates | None = None,
) -> DeltaNb:
    """Phonons added to the ground state during one measurement window.

    Double arm: (omega_s/omega_m) Gamma_b (n_e + 1/2) T from charge
    redistribution plus Gamma_b-tilde (1 + 2 n_e) T from the residual
    coupling.  Single arm: the resolved-sideband headline form
    (1 + 2 n_e) g1^2 |alpha|^2 / (2 omega_m^2).  Mechanical bath adds
    gamma_b n_m T either way.
    """
    r = _rates(circuit, rates)
    n_e = circuit.electrical_occupation(r.omega_s)
    T = drive.measurement_time_T
    mechanical = membrane.damping_rate() * membrane.occupation() * T
    if circuit.topology is Topology.SINGLE_ARM:
        electrical = (
            (1.0 + 2.0 * n_e) * couplings.g1**2 * drive.alpha_sq
            / (2.0 * membrane.omega_m**2)
        )
    else:
        heat = induced_heating_double_limit(drive, circuit, couplings, membrane, r)
        electrical = (r.omega_s / membrane.omega_m) * heat.Gamma_b * (n_e + 0.5) * T
        electrical += residual_heating(drive, circuit, couplings, membrane, r) * (
            1.0 + 2.0 * n_e
        ) * T
    return DeltaNb(electrical=electrical, mechanical=mechanical)


@dataclass(frozen=True)
class LambdaFamily:
    lambda_total: float
    lambda_b: float | None = None  # charge-redistribution bound (double arm)
    lambda_p: float | None = None  # fabrication-imperfection bound (double arm)


def lambda_family(
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    rates: DerivedRates | None = None,
) -> LambdaFamily:
    """Drive-independent quality factor lambda = D^2 / delta_n_b.

    Single arm: lambda = (g2/g1)^2 (omega_m/gamma_t)^2 / [2 (1+2 n_e)^2].
    Double arm: 1/lambda = 1/lambda_b + 1/lambda_p with
    lambda_b = 2 (g2/g1)^2 (omega_s/gamma_t)^2 (Z_out/R) / (1+2 n_e)^2 and
    lambda_p = 2 (g2/g1)^2 (g1/g_r)^2 (omega_m/gamma_t)^2 / (1+2 n_e)^2.
    Unbounded components (g_r = 0 or R = 0) are reported as inf.
    """
    r = _rates(circuit, rates)
    n_e = circuit.electrical_occupation(r.omega_s)
    therm = (1.0 + 2.0 * n_e) ** 2
    if couplings.g1 <= 0.0:
        if couplings.g2 == 0.0:
            return LambdaFamily(lambda_total=0.0)
        return LambdaFamily(lambda_total=UNBOUNDED)
    ratio_sq = (couplings.g2 / couplings.g1) ** 2
    if circuit.topology is Topology.SINGLE_ARM:
        lam = ratio_sq * (membrane.omega_m / r.gamma_t) ** 2 / (2.0 * therm)
        return LambdaFamily(lambda_total=lam)
    if couplings.g2 == 0.0:
        return LambdaFamily(lambda_total=0.0, lambda_b=0.0, lambda_p=0.0)
    if circuit.parasitic_R > 0.0:
        lam_b = (
            2.0 * ratio_sq * (r.omega_s / r.gamma_t) ** 2
            * (circuit.Z_out / circuit.parasitic_R) / therm
        )
    else:
        lam_b = UNBOUNDED
    if couplings.g_r > 0.0:
        lam_p = (
            2.0 * ratio_sq * (couplings.g1 / couplings.g_r) ** 2
            * (membrane.omega_m / r.gamma_t) ** 2 / therm
        )
    else:
        lam_p = UNBOUNDED
    if math.isinf(lam_b) and math.isinf(lam_p):
        lam = UNBOUNDED
    else:
        lam = 1.0 / (1.0 / lam_b + 1.0 / lam_p)
    return LambdaFamily(lambda_total=lam, lambda_b=lam_b, lambda_p=lam_p)


@dataclass(frozen=True)
class RenormalizedLambda:
    lambda_prime: float
    N_eff: float  # equilibrium mechanical occupation under probing
    N_e: float  # effective occupation of the electrically induced reservoir


def lambda_prime_and_occupation(
    lambda_total: float,
    parts: DeltaNb,
    membrane: MembraneSpec,
    drive: DriveSpec,
    Gamma_b: float = 0.0,
) -> RenormalizedLambda:
    """Renormalize lambda by the total heating and report occupations.

    lambda' = lambda * delta_el / (delta_el + gamma_b n_m T);
    N_eff = n_m lambda / (lambda - lambda')  (inf when they coincide with
    n_m > 0, and the electrically induced N_e when n_m = 0);
    N_e = delta_el / [T (gamma_b + Gamma_b)].
    """
    if parts.electrical < 0.0 or parts.mechanical < 0.0:
        raise ConfigurationError("delta_n_b parts must be nonnegative")
    if parts.total == 0.0:
        raise ConfigurationError("delta_n_b parts must not both vanish")
    gb = membrane.damping_rate()
    T = drive.measurement_time_T
    n_m = membrane.occupation()
    lam_p = lambda_total * parts.electrical / parts.total
    n_e_eff = parts.electrical / (T * (gb + Gamma_b)) if gb + Gamma_b > 0 else UNBOUNDED
    if n_m == 0.0:
        n_eff = n_e_eff
    elif lambda_total == lam_p:
        n_eff = UNBOUNDED
    else:
        n_eff = n_m * lambda_total / (lambda_total - lam_p)
    return RenormalizedLambda(lambda_prime=lam_p, N_eff=n_eff, N_e=n_e_eff)


def two_phonon_rate(
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    rates: DerivedRates | None = None,
) -> float:
    """Fermi-golden-rule rate of the two-phonon sideband processes.

    rate = g2^2 |alpha|^2 gamma_t / [(kappa/2)^2 + (2 omega_m)^2], used only
    to confirm that single-phonon heating dominates: rate * T << delta_n_b.
    """
    r = _rates(circuit, rates)
    return (
        couplings.g2**2 * drive.alpha_sq * r.gamma_t
        / ((r.kappa / 2.0) ** 2 + (2.0 * membrane.omega_m) ** 2)
    )


def two_phonon_dominance(
    drive: DriveSpec,
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    rates: DerivedRates | None = None,
    margin: float = 0.1,
) -> bool:
    """True when two-phonon events are negligible against delta_n_b."""
    rate = two_phonon_rate(drive, circuit, couplings, membrane, rates)
    dn = delta_nb(drive, circuit, couplings, membrane, rates).total
    return rate * drive.measurement_time_T <= margin * dn


def hybridized_lambda(
    circuit: CircuitSpec,
    couplings: Couplings,
    rates: DerivedRates | None = None,
) -> float:
    """Quality factor of the hybridized-mode route (omega_a ~ omega_s).

    lambda_hyb = 2 g1^2 gamma_t / [(1+n_e)(1+2 n_e) kappa^2 gamma_l]: the
    strong-coupling condition the symmetric scheme avoids.
    """
    r = _rates(circuit, rates)
    if circuit.topology is not Topology.DOUBLE_ARM:
        raise ConfigurationError("hybridized lambda needs a double-arm circuit")
    n_e = circuit.electrical_occupation(r.omega_s)
    if r.gamma_l == 0.0:
        return UNBOUNDED if couplings.g1 > 0.0 else 0.0
    return (
        2.0 * couplings.g1**2 * r.gamma_t
        / ((1.0 + n_e) * (1.0 + 2.0 * n_e) * r.kappa**2 * r.gamma_l)
    )


@dataclass(frozen=True)
class MeritReport:
    """Everything the closed forms say about one configuration."""

    lambda_total: float
    lambda_b: float | None
    lambda_p: float | None
    d: float | None = None  # V
    sigma: float | None = None  # V
    D_sq: float | None = None
    Gamma_b: float | None = None
    Gamma_b_tilde: float | None = None
    omega_b_shift: float | None = None
    delta_nb_electrical: float | None = None
    delta_nb_mechanical: float | None = None
    lambda_prime: float | None = None
    N_eff: float | None = None
    N_e_effective: float | None = None
    two_phonon_dominated: bool | None = None


def merit_report(
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    drive: DriveSpec | None = None,
) -> MeritReport:
    """Assemble the full report; drive-dependent entries absent without drive."""
    r = derive_rates(circuit)
    fam = lambda_family(circuit, couplings, membrane, r)
    if drive is None:
        return MeritReport(
            lambda_total=fam.lambda_total, lambda_b=fam.lambda_b, lambda_p=fam.lambda_p
        )
    sig = homodyne_signal(0, drive, circuit, couplings, r)
    parts = delta_nb(drive, circuit, couplings, membrane, r)
    if circuit.topology is Topology.DOUBLE_ARM:
        heat = induced_heating_double_limit(drive, circuit, couplings, membrane, r)
        gamma_big, shift = heat.Gamma_b, heat.omega_b
    else:
        gamma_big = induced_heating_rlc(drive, circuit, couplings, membrane, r)
        shift = None
    renorm = lambda_prime_and_occupation(
        fam.lambda_total, parts, membrane, drive, Gamma_b=gamma_big
    )
    return MeritReport(
        lambda_total=fam.lambda_total,
        lambda_b=fam.lambda_b,
        lambda_p=fam.lambda_p,
        d=signal_distance(drive, circuit, couplings, r),
        sigma=sig.sigma,
        D_sq=snr_squared(drive, circuit, couplings, r),
        Gamma_b=gamma_big,
        Gamma_b_tilde=residual_heating(drive, circuit, couplings, membrane, r),
        omega_b_shift=shift,
        delta_nb_electrical=parts.electrical,
        delta_nb_mechanical=parts.mechanical,
        lambda_prime=renorm.lambda_prime,
        N_eff=renorm.N_eff,
        N_e_effective=renorm.N_e,
        two_phonon_dominated=two_phonon_dominance(
            drive, circuit, couplings, membrane, r
        ),
    )
