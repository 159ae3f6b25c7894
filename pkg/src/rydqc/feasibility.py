"""Experimental-limitations budget for a Rydberg phase gate in an optical lattice.

``feasibility_report`` evaluates a configuration against the practical limits on
atom spacing, collisions, interaction strength, laser pulses, fields, blackbody
radiation and field-ionization detection. Every entry is computed, never looked up.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

from .constants import C_LIGHT, EA0, EPS0, HBAR
from .errors import AccuracyWarning, ConfigurationError, DomainError
from .lifetimes import lifetime
from .pair import au_to_dipole, dipole_dipole_shift, exchange_time
from .radial import angular_factor, radial_matrix_element
from .states import (
    AtomSpecies,
    RydbergState,
    get_species,
    max_principal_quantum_number,
    parse_state,
    sfi_critical_field,
    zeeman_splitting_rate,
)

PASS, FAIL, WARNING = "pass", "fail", "warning"

MIN_SPACING = 5e-6  # m, free optical access to single sites
MIN_PULSE_RATIO = 10.0
MAX_POWER_PER_ATOM = 10e-3  # W
MAX_SPECTRAL_WIDTH = 20e6  # Hz
BBR_FRACTION = 0.05
MAX_SFI_FIELD = 1000.0  # V/cm
DEEXCITATION_AREA = 1.5 * math.pi


# --- laser pulses --------------------------------------------------------------

@dataclass(frozen=True)
class PulseRequirement:
    field: float  # V/m
    intensity: float  # W/cm^2
    power: float  # W at the spot
    dipole_au: float


def pulse_intensity(lower: RydbergState, upper: RydbergState, pulse_area: float,
                    duration: float, spot_diameter: float = 1e-6, q: int = 1) -> PulseRequirement:
    """Intensity and spot power for a pulse of area ``Omega tau`` on ``lower -> upper``.

    ``Omega = d E / hbar`` with ``d = <upper| r_q |lower>``; ``I = eps0 c E^2 / 2``.
    The default polarization is sigma+ between stretched sublevels.
    """
    if duration <= 0 or pulse_area <= 0 or spot_diameter <= 0:
        raise DomainError("pulse area, duration and spot diameter must be positive")
    lo = lower if lower.mJ is not None else lower.with_mj(lower.J)
    up = upper if upper.mJ is not None else upper.with_mj(upper.J)
    ang = angular_factor(up, lo, q)
    if ang == 0.0:
        raise DomainError(f"{lo.label} -> {up.label} is forbidden for q={q}")
    d_au = abs(ang * radial_matrix_element(lo, up))
    if d_au == 0.0:
        raise DomainError("vanishing dipole moment")
    E = pulse_area * HBAR / (d_au * EA0 * duration)
    intensity = 0.5 * EPS0 * C_LIGHT * E**2 * 1e-4
    power = intensity * math.pi * (0.5 * spot_diameter * 100.0) ** 2
    return PulseRequirement(E, intensity, power, d_au)


def zeeman_requirement(target_mhz: float, state: RydbergState) -> float:
    """Field (G) splitting adjacent ``mJ`` sublevels of ``state`` by ``target_mhz``."""
    if target_mhz < 0:
        raise DomainError("target splitting must be non-negative")
    return target_mhz / zeeman_splitting_rate(state)


@dataclass(frozen=True)
class BBRVerdict:
    passed: bool
    margin: float  # threshold * tau_eff / gate_time; > 1 passes
    min_effective_lifetime: float  # s
    limiting_state: str


def bbr_verdict(states, gate_time: float, temperature: float,
                threshold: float = BBR_FRACTION) -> BBRVerdict:
    """Pass when the gate lasts at most ``threshold`` of the shortest effective lifetime."""
    if gate_time <= 0:
        raise DomainError("gate time must be positive")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        taus = [(lifetime(s, temperature).effective_lifetime, s.label) for s in states]
    tau, label = min(taus)
    margin = threshold * tau / gate_time
    return BBRVerdict(margin >= 1.0, margin, tau, label)


# --- configuration -------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Lattice gate experiment. SI units except ``magnetic_field`` (G)."""

    species: str = "Na"
    n: int = 30
    spacing: float = 5e-6  # m
    pulse_duration: float = 50e-9  # s
    gate_time: float = 500e-9  # s
    magnetic_field: float = 10.0  # G
    temperature: float = 300.0  # K
    spot_diameter: float = 1e-6  # m
    s_state: str | None = None  # defaults to nS1/2
    p_state: str | None = None  # defaults to nP1/2

    def __post_init__(self):
        for name in ("spacing", "pulse_duration", "gate_time", "spot_diameter"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.magnetic_field < 0 or self.temperature < 0:
            raise ConfigurationError("field and temperature must be non-negative")
        get_species(self.species)

    @property
    def atom(self) -> AtomSpecies:
        return get_species(self.species)

    @property
    def qubit_states(self) -> tuple[RydbergState, RydbergState]:
        s = parse_state(self.s_state or f"{self.n}S1/2", self.atom, 0.5)
        p = parse_state(self.p_state or f"{self.n}P1/2", self.atom, 0.5)
        return s, p

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigurationError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        return cls.from_mapping(data)


PRESETS: dict[str, ExperimentConfig] = {
    "paper-optimal": ExperimentConfig(),
    "fast-high-n": ExperimentConfig(n=50, pulse_duration=5e-9, gate_time=50e-9),
    "dense-lattice": ExperimentConfig(n=70, spacing=0.5e-6),
}


# --- report --------------------------------------------------------------------

@dataclass(frozen=True)
class ReportEntry:
    name: str
    value: float | None
    unit: str
    threshold: str
    status: str
    basis: str  # the relation used
    item: int  # which limitation of the budget this entry evaluates
    note: str = ""


@dataclass(frozen=True)
class FeasibilityReport:
    config: ExperimentConfig
    entries: tuple[ReportEntry, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(e.status != FAIL for e in self.entries)

    def entry(self, name: str) -> ReportEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"config": asdict(self.config), "passed": self.passed,
                "entries": [asdict(e) for e in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        rows = [(e.name, "-" if e.value is None else f"{e.value:.4g}", e.unit, e.threshold,
                 e.status.upper()) for e in self.entries]
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _guarded(name: str, unit: str, threshold: str, basis: str, item: int,
             fn: Callable[[], tuple[float, str] | tuple[float, str, str]]) -> ReportEntry:
    try:
        value, status, *note = fn()
    except (DomainError, ConfigurationError, ArithmeticError, ValueError) as exc:
        return ReportEntry(name, None, unit, threshold, FAIL, basis, item, str(exc))
    return ReportEntry(name, float(value), unit, threshold, status, basis, item,
                       note[0] if note else "")


def _within(value: float, limit: float) -> bool:
    return value <= limit * (1.0 + 1e-9)


def feasibility_report(config: ExperimentConfig) -> FeasibilityReport:
    """Evaluate every limitation in a fixed order; failures are entries, not exceptions."""
    s, p = config.qubit_states
    sp = config.atom
    vdd: dict[str, float] = {}

    def spacing():
        return config.spacing * 1e6, _status(config.spacing >= MIN_SPACING * (1 - 1e-12))

    def collisions():
        n_max = max_principal_quantum_number(config.spacing, 0)
        n = max(s.n, p.n)
        return n_max, _status(n <= n_max), f"n = {n}"

    def interaction():
        d = angular_factor(s, p, 0) * radial_matrix_element(s, p)
        vdd["hz"] = dipole_dipole_shift(au_to_dipole(d), config.spacing)
        T = exchange_time(vdd["hz"])
        return T * 1e9, _status(_within(T, config.gate_time)), f"V_dd/h = {vdd['hz'] / 1e6:.3g} MHz"

    def pulse_ratio():
        r = config.gate_time / config.pulse_duration
        return r, _status(r >= MIN_PULSE_RATIO * (1 - 1e-9))

    def power():
        upper = RydbergState(sp, p.n, 1, 1.5, 1.5)
        req = pulse_intensity(sp.ground_state, upper, DEEXCITATION_AREA, config.pulse_duration,
                              config.spot_diameter)
        return req.power * 1e3, _status(_within(req.power, MAX_POWER_PER_ATOM)), (
            f"{req.intensity / 1e6:.3g} MW/cm^2")

    def spectral():
        width = 1.0 / config.pulse_duration
        fs = (sp.fine_structure_50p_mhz or math.inf) * 1e6
        ok = _within(width, MAX_SPECTRAL_WIDTH) and width < fs
        return width / 1e6, _status(ok), f"50P fine structure {fs / 1e6:g} MHz"

    def zeeman():
        split = zeeman_splitting_rate(p) * config.magnetic_field
        if "hz" not in vdd:
            raise DomainError("interaction strength unavailable")
        return split, _status(split * 1e6 >= vdd["hz"]), f"V_dd/h = {vdd['hz'] / 1e6:.3g} MHz"

    def stark():
        low = max(s.L, p.L) <= 2
        return float(max(s.L, p.L)), PASS if low else WARNING, (
            "quadratic Stark states" if low else "linear Stark states, sensitive to stray fields")

    def bbr():
        v = bbr_verdict((s, p), config.gate_time, config.temperature)
        return v.margin, _status(v.passed), (
            f"min tau_eff {v.min_effective_lifetime * 1e6:.3g} us ({v.limiting_state})")

    def sfi():
        f = max(sfi_critical_field(s), sfi_critical_field(p))
        return f, _status(_within(f, MAX_SFI_FIELD))

    checks = [
        ("atom spacing", "um", ">= 5 um", "optical access to single sites", 1, spacing),
        ("collision bound", "n_max", "n <= n_max", "n_max = sqrt(R / (15 a0))", 2, collisions),
        ("gate time", "ns", f"<= {config.gate_time * 1e9:g} ns", "T = pi hbar / V_dd", 3,
         interaction),
        ("pulse to gate ratio", "", ">= 10", "gate_time / pulse_duration", 4, pulse_ratio),
        ("laser power per atom", "mW", "<= 10 mW",
         "Omega tau = 3 pi / 2, I = eps0 c E^2 / 2, spot area", 4, power),
        ("spectral width", "MHz", "<= 20 MHz and < fine structure", "width ~ 1 / pulse_duration",
         4, spectral),
        ("Zeeman splitting", "MHz", ">= V_dd/h", "g_J mu_B B for nP1/2", 5, zeeman),
        ("Stark sensitivity", "L", "L <= 2", "low-L states shift quadratically", 6, stark),
        ("blackbody radiation", "margin", ">= 1", "0.05 tau_eff / gate_time", 7, bbr),
        ("field ionization", "V/cm", "<= 1000 V/cm", "F = 3.2e8 / n_eff^4", 8, sfi),
    ]
    entries = tuple(_guarded(name, unit, thr, basis, item, fn)
                    for name, unit, thr, basis, item, fn in checks)
    return FeasibilityReport(config, entries)
