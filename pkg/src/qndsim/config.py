"""JSON run-configuration: schema validation and unit conversion.

One JSON document drives every subcommand.  Plain frequencies are quoted in
Hz and converted to angular rates at load time; times in seconds, element
values in SI.  Unknown keys anywhere are hard errors, reported with their
full path, so typos never silently change a run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .constants import TWO_PI
from .dynamics import FourierTruncation
from .metrics import DriveSpec
from .params import CircuitSpec, ConfigurationError, Couplings, MembraneSpec, Topology


class ConfigError(ValueError):
    """Configuration rejected; carries the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _expect_mapping(obj, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    return obj


class _Section:
    def __init__(self, data: dict, path: str):
        self.data = dict(data)
        self.path = path

    def take(self, key, kind=float, required=False, default=None):
        if key not in self.data:
            if required:
                raise ConfigError(f"{self.path}.{key}", "required field missing")
            return default
        value = self.data.pop(key)
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{self.path}.{key}", "expected a number")
            return float(value)
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{self.path}.{key}", "expected an integer")
            return int(value)
        if kind is str:
            if not isinstance(value, str):
                raise ConfigError(f"{self.path}.{key}", "expected a string")
            return value
        if kind is list:
            if not isinstance(value, list):
                raise ConfigError(f"{self.path}.{key}", "expected a list")
            return value
        if kind is dict:
            if not isinstance(value, dict):
                raise ConfigError(f"{self.path}.{key}", "expected an object")
            return value
        raise AssertionError(kind)

    def finish(self):
        if self.data:
            stray = sorted(self.data)[0]
            raise ConfigError(f"{self.path}.{stray}", "unknown key")


def _parse_circuit(data: dict) -> CircuitSpec:
    s = _Section(_expect_mapping(data, "circuit"), "circuit")
    topo_raw = s.take("topology", str, required=True)
    try:
        topology = Topology(topo_raw)
    except ValueError:
        raise ConfigError("circuit.topology",
                          f"must be one of {[t.value for t in Topology]}")
    kw = dict(
        topology=topology,
        L0=s.take("L0", required=True),
        R0=s.take("R0", required=True),
        Z_out=s.take("Z_out", required=True),
        C0=s.take("C0", required=True),
        stray_Cs=s.take("stray_Cs", default=0.0),
        n_bar_e=s.take("n_bar_e"),
        reservoir_temperature=s.take("reservoir_temperature"),
    )
    if topology is Topology.DOUBLE_ARM:
        kw.update(
            parasitic_L=s.take("parasitic_L", required=True),
            parasitic_R=s.take("parasitic_R", required=True),
            delta_L=s.take("delta_L", default=0.0),
            delta_R=s.take("delta_R", default=0.0),
            delta_C=s.take("delta_C", default=0.0),
        )
    s.finish()
    try:
        return CircuitSpec(**kw)
    except (ConfigurationError, ValueError) as exc:
        raise ConfigError("circuit", str(exc))


def _parse_membrane(data: dict) -> MembraneSpec:
    s = _Section(_expect_mapping(data, "membrane"), "membrane")
    kw = dict(
        omega_m=TWO_PI * s.take("frequency_hz", required=True),
        length=s.take("length", default=1e-6),
        width=s.take("width", default=0.3e-6),
        gap_d0=s.take("gap", default=10e-9),
        x0_override=s.take("x0"),
        quality_Q=s.take("quality_Q"),
        n_bar_m=s.take("n_bar_m"),
        bath_temperature=s.take("bath_temperature"),
    )
    density = s.take("areal_density")
    if density is not None:
        kw["areal_density"] = density
    damping = s.take("damping_hz")
    if damping is not None:
        kw["gamma_b"] = TWO_PI * damping
    s.finish()
    try:
        return MembraneSpec(**kw)
    except (ConfigurationError, ValueError) as exc:
        raise ConfigError("membrane", str(exc))


def _parse_couplings(data: dict) -> dict:
    """Coupling section; values in plain Hz, or geometry-derived when empty."""
    s = _Section(_expect_mapping(data, "couplings"), "couplings")
    out = dict(
        g1_hz=s.take("g1_hz"),
        g2_hz=s.take("g2_hz"),
        g_r_hz=s.take("g_r_hz"),
        delta_g1_hz=s.take("delta_g1_hz", default=0.0),
        from_geometry=bool(s.take("from_geometry", int, default=0)),
    )
    s.finish()
    return out


def _parse_drive(data: dict) -> DriveSpec | None:
    if data is None:
        return None
    s = _Section(_expect_mapping(data, "drive"), "drive")
    kw = dict(
        measurement_time_T=s.take("time", required=True),
        photon_number_alpha_sq=s.take("photons"),
        flux_alpha_tilde_sq=s.take("flux"),
    )
    theta = s.take("phase")
    if theta is not None:
        kw["homodyne_phase_theta"] = theta
    probe = s.take("probe_frequency_hz")
    if probe is not None:
        kw["probe_frequency"] = TWO_PI * probe
    s.finish()
    try:
        return DriveSpec(**kw)
    except (ConfigurationError, ValueError) as exc:
        raise ConfigError("drive", str(exc))


def _parse_truncation(data: dict) -> FourierTruncation:
    if data is None:
        return FourierTruncation()
    s = _Section(_expect_mapping(data, "truncation"), "truncation")
    kw = dict(
        N_j=s.take("sidebands", int, default=2),
        N_f=s.take("comb", int, default=96),
    )
    tau = s.take("period")
    if tau is not None:
        kw["tau"] = tau
    mult = s.take("period_decay_multiple")
    if mult is not None:
        kw["tau_decay_multiple"] = mult
    s.finish()
    try:
        return FourierTruncation(**kw)
    except ValueError as exc:
        raise ConfigError("truncation", str(exc))


@dataclass(frozen=True)
class MeasurementSection:
    lambda_prime: float | None
    n_eff: float | None
    delta_nb: float | None
    n_windows: int
    segments: int
    hilbert_cutoff: int


def _parse_measurement(data: dict) -> MeasurementSection | None:
    if data is None:
        return None
    s = _Section(_expect_mapping(data, "measurement"), "measurement")
    out = MeasurementSection(
        lambda_prime=s.take("lambda_prime"),
        n_eff=s.take("n_eff"),
        delta_nb=s.take("delta_nb"),
        n_windows=s.take("windows", int, default=100_000),
        segments=s.take("segments", int, default=64),
        hilbert_cutoff=s.take("hilbert_cutoff", int, default=12),
    )
    s.finish()
    return out


@dataclass(frozen=True)
class OptimizationSection:
    lambda_primes: tuple[float, ...]
    n_eff: float
    method: str
    n_windows: int


def _parse_optimization(data: dict) -> OptimizationSection | None:
    if data is None:
        return None
    s = _Section(_expect_mapping(data, "optimization"), "optimization")
    lams = s.take("lambda_primes", list, required=True)
    method = s.take("method", str, default="analytic_pdf")
    if method not in ("analytic_pdf", "mc_poly_fit"):
        raise ConfigError("optimization.method",
                          "must be analytic_pdf or mc_poly_fit")
    out = OptimizationSection(
        lambda_primes=tuple(float(x) for x in lams),
        n_eff=s.take("n_eff", default=1.0),
        method=method,
        n_windows=s.take("windows", int, default=40_000),
    )
    s.finish()
    return out


@dataclass(frozen=True)
class PlanSection:
    delta_nb: float | None
    N_e: float | None
    T: float | None


def _parse_plan(data: dict) -> PlanSection | None:
    if data is None:
        return None
    s = _Section(_expect_mapping(data, "plan"), "plan")
    out = PlanSection(delta_nb=s.take("delta_nb"), N_e=s.take("N_e"),
                      T=s.take("time"))
    s.finish()
    return out


@dataclass(frozen=True)
class SweepSection:
    axis: str
    grid: tuple[float, ...]
    quality_Q: tuple[float, ...] = ()


SWEEP_AXES = ("Cs_over_C0", "Q", "g_r_over_g1", "lambda_prime")


def _parse_sweep(data: dict) -> SweepSection | None:
    if data is None:
        return None
    s = _Section(_expect_mapping(data, "sweep"), "sweep")
    axis = s.take("axis", str, required=True)
    if axis not in SWEEP_AXES:
        raise ConfigError("sweep.axis", f"must be one of {SWEEP_AXES}")
    grid = s.take("grid", list, required=True)
    qs = s.take("quality_grid", list, default=[])
    out = SweepSection(
        axis=axis,
        grid=tuple(float(x) for x in grid),
        quality_Q=tuple(float(x) for x in qs),
    )
    s.finish()
    return out


@dataclass(frozen=True)
class HeatSection:
    g1_grid_hz: tuple[float, ...]
    t_end: float | None = None


def _parse_heat(data: dict, key: str) -> HeatSection | None:
    if data is None:
        return None
    s = _Section(_expect_mapping(data, key), key)
    out = HeatSection(
        g1_grid_hz=tuple(float(x) for x in s.take("g1_grid_hz", list, required=True)),
        t_end=s.take("t_end"),
    )
    s.finish()
    return out


@dataclass(frozen=True)
class AsymSection:
    delta_g1_fracs: tuple[float, ...]
    triples: tuple[tuple[float, float, float], ...]  # (dR/R, dL/L, dC/C0)


def _parse_asym(data: dict) -> AsymSection | None:
    if data is None:
        return None
    s = _Section(_expect_mapping(data, "asym"), "asym")
    fracs = s.take("delta_g1_fracs", list, required=True)
    triples = s.take("triples", list, required=True)
    parsed = []
    for k, t in enumerate(triples):
        if not (isinstance(t, list) and len(t) == 3):
            raise ConfigError(f"asym.triples[{k}]", "expected [dR/R, dL/L, dC/C0]")
        parsed.append(tuple(float(x) for x in t))
    out = AsymSection(
        delta_g1_fracs=tuple(float(x) for x in fracs),
        triples=tuple(parsed),
    )
    s.finish()
    return out


@dataclass(frozen=True)
class RunConfig:
    circuit: CircuitSpec
    membrane: MembraneSpec
    couplings: Couplings
    drive: DriveSpec | None
    truncation: FourierTruncation
    measurement: MeasurementSection | None
    optimization: OptimizationSection | None
    plan: PlanSection | None
    sweep: SweepSection | None
    heat: HeatSection | None
    fourier: HeatSection | None
    asym: AsymSection | None
    seed: int
    threads: int | None
    raw: dict = field(repr=False, default_factory=dict)


def resolve_couplings(spec: dict, circuit: CircuitSpec,
                      membrane: MembraneSpec) -> Couplings:
    """Couplings from explicit Hz values or from the plate geometry.

    Geometry-derived couplings include the stray-capacitance dilution and
    the residual coupling implied by delta_C and delta_g1.
    """
    from .params import (apply_stray_capacitance, couplings_from_geometry,
                         derive_rates, residual_coupling)

    rates = derive_rates(circuit)
    if spec["from_geometry"] or spec["g1_hz"] is None:
        base = couplings_from_geometry(membrane, rates.omega_s)
        g1, g2 = base.g1, base.g2
    else:
        g1 = TWO_PI * spec["g1_hz"]
        g2 = TWO_PI * (spec["g2_hz"] or 0.0)
    delta_g1 = TWO_PI * spec["delta_g1_hz"]
    if spec["g_r_hz"] is not None:
        g_r = TWO_PI * spec["g_r_hz"]
    else:
        g_r = residual_coupling(g1, delta_g1, circuit.delta_C, circuit.C0)
    c = Couplings(g1=g1, g2=g2, g_r=g_r, delta_g1=delta_g1)
    return apply_stray_capacitance(c, circuit.C0, circuit.stray_Cs)


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError("<file>", f"configuration file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}")
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    top = _Section(_expect_mapping(raw, "<root>"), "<root>")
    circuit = _parse_circuit(top.take("circuit", dict, required=True))
    membrane = _parse_membrane(top.take("membrane", dict, required=True))
    coupling_spec = _parse_couplings(top.take("couplings", dict, default={}))
    couplings = resolve_couplings(coupling_spec, circuit, membrane)
    drive = _parse_drive(top.take("drive", dict))
    truncation = _parse_truncation(top.take("truncation", dict))
    measurement = _parse_measurement(top.take("measurement", dict))
    optimization = _parse_optimization(top.take("optimization", dict))
    plan = _parse_plan(top.take("plan", dict))
    sweep = _parse_sweep(top.take("sweep", dict))
    heat = _parse_heat(top.take("heat", dict), "heat")
    fourier = _parse_heat(top.take("fourier", dict), "fourier")
    asym = _parse_asym(top.take("asym", dict))
    seed = top.take("seed", int, default=0)
    threads = top.take("threads", int)
    top.finish()
    return RunConfig(
        circuit=circuit,
        membrane=membrane,
        couplings=couplings,
        drive=drive,
        truncation=truncation,
        measurement=measurement,
        optimization=optimization,
        plan=plan,
        sweep=sweep,
        heat=heat,
        fourier=fourier,
        asym=asym,
        seed=seed,
        threads=threads,
        raw=raw,
    )
