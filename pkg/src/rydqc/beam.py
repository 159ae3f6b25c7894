"""Thermal-beam Monte Carlo of microwave spectra and the field-ionization counting model.

Per sampled atom the analytic Rabi lineshape is evaluated with an effective
drive: the Rabi frequency is averaged along the flight path through the
standing wave, the detuning picks up a Doppler shift, and the field amplitude
carries multiplicative and additive noise. Spectra are averages over atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .constants import C_LIGHT, EA0, K_B
from .errors import ConfigurationError, DomainError
from .spectroscopy import (
    ONE_PHOTON,
    TWO_PHOTON,
    DriveParameters,
    Spectrum,
    drive_from_field,
    field_for_pulse_area,
    one_photon_population,
    pattern_label,
    two_photon_intermediate_detuning,
    two_photon_population,
)
from .radial import dipole_matrix_element
from .states import SODIUM, RydbergState, transition_frequency

# flux-weighted Maxwell beam: f(v) ~ v^3 exp(-v^2/alpha^2), <v> = (3 sqrt(pi)/4) alpha
_BEAM_MEAN_OVER_ALPHA = 0.75 * math.sqrt(math.pi)


def beam_mean_speed(temperature: float, mass: float) -> float:
    """Mean speed (m/s) of an effusive beam at ``temperature``."""
    return _BEAM_MEAN_OVER_ALPHA * math.sqrt(2.0 * K_B * temperature / mass)


def doppler_width(mean_speed: float, frequency: float) -> float:
    """First-order Doppler spread ``(v/c) f`` in Hz."""
    if mean_speed < 0 or frequency < 0:
        raise DomainError("speed and frequency must be non-negative")
    return mean_speed / C_LIGHT * frequency


@dataclass(frozen=True)
class BeamConfig:
    """Beam and microwave-field geometry.

    ``doppler_projection`` is the cosine between the beam and the microwave
    wave vector. ``stray_field_rms`` (V/m) is an additive field of fixed size
    from leakage, so it matters only for weak drives. Both noise terms are
    drawn once per event.
    """

    mean_speed: float = 600.0  # m/s
    temperature: float | None = None  # K; None means the speed is set directly
    mass: float = SODIUM.mass
    transition_frequency: float = 70.1e9  # Hz
    interaction_time: float = 2.8e-6  # s
    standing_wave: bool = True
    field_fluctuation_rms: float = 0.05  # fraction of E
    stray_field_rms: float = 0.008  # V/m
    excitation_length: float = 0.2e-3  # m
    doppler_projection: float = 0.25
    path_points: int = 32

    def __post_init__(self):
        if self.temperature is not None:
            expect = beam_mean_speed(self.temperature, self.mass)
            if abs(self.mean_speed - expect) > 0.05 * expect:
                raise ConfigurationError(
                    f"mean speed {self.mean_speed} m/s inconsistent with T={self.temperature} K "
                    f"({expect:.0f} m/s); drop the temperature to override")
        if self.interaction_time <= 0 or self.mean_speed < 0:
            raise ConfigurationError("interaction time must be positive and speed non-negative")

    @classmethod
    def from_temperature(cls, temperature: float, mass: float = SODIUM.mass, **kw) -> "BeamConfig":
        return cls(mean_speed=beam_mean_speed(temperature, mass), temperature=temperature,
                   mass=mass, **kw)

    def quiet(self) -> "BeamConfig":
        """All perturbations off: atoms at rest at an antinode, noiseless field."""
        return replace(self, standing_wave=False, field_fluctuation_rms=0.0,
                       stray_field_rms=0.0, doppler_projection=0.0, mean_speed=0.0,
                       temperature=None)


@dataclass(frozen=True, eq=False)
class AtomSamples:
    speed: np.ndarray
    amplitude: np.ndarray  # effective field factor (path average times noise)
    doppler: np.ndarray  # rad/s, added to the per-photon detuning
    redrawn: int = 0


def _sample_speeds(rng: np.random.Generator, mean_speed: float, n: int) -> np.ndarray:
    if mean_speed == 0:
        return np.zeros(n)
    alpha = mean_speed / _BEAM_MEAN_OVER_ALPHA
    return alpha * np.sqrt(rng.gamma(2.0, 1.0, n))


def _path_average(k: float, x0: np.ndarray, v: np.ndarray, tau: float, points: int) -> np.ndarray:
    t = (np.arange(points) + 0.5) / points * tau
    return np.abs(np.cos(k * (x0[:, None] + v[:, None] * t[None, :]))).mean(axis=1)


def sample_atoms(config: BeamConfig, drive: DriveParameters, n: int,
                 rng: np.random.Generator, field_noise: np.ndarray | None = None) -> AtomSamples:
    """Draw ``n`` atoms; ``field_noise`` (n, 2) lets several atoms share one event's noise."""
    f_photon = config.transition_frequency if drive.kind == ONE_PHOTON else (
        0.5 * config.transition_frequency)
    k = 2.0 * math.pi * f_photon / C_LIGHT
    v = _sample_speeds(rng, config.mean_speed, n)
    x0 = rng.uniform(-0.5, 0.5, n) * config.excitation_length  # about an antinode
    sign = rng.choice([-1.0, 1.0], n)
    compensated = rng.random(n) < 0.5
    noise = rng.standard_normal((n, 2)) if field_noise is None else field_noise
    v_par = v * config.doppler_projection
    if drive.kind == ONE_PHOTON:
        path = _path_average(k, x0, v_par, config.interaction_time, config.path_points) if (
            config.standing_wave) else np.ones(n)
        doppler = sign * k * v_par
    else:
        # absorbing one photon from each running wave cancels the Doppler shift
        path = np.ones(n)
        if config.standing_wave:
            doppler = np.where(compensated, 0.0, sign * k * v_par)
        else:
            doppler = k * v_par
    stray = config.stray_field_rms / drive.E if drive.E > 0 else 0.0
    amp = path * np.abs(1.0 + config.field_fluctuation_rms * noise[:, 0] + stray * noise[:, 1])
    bad = ~np.isfinite(amp) | ~np.isfinite(doppler)
    redrawn = int(bad.sum())
    if redrawn:
        again = sample_atoms(config, drive, redrawn, rng)
        amp[bad], doppler[bad] = again.amplitude, again.doppler
        redrawn += again.redrawn
    return AtomSamples(v, amp, doppler, redrawn)


def _populations(drive: DriveParameters, samples: AtomSamples, delta: float) -> np.ndarray:
    a = samples.amplitude
    if drive.kind == ONE_PHOTON:
        return one_photon_population(drive.omega1 * a, delta + samples.doppler, drive.tau)
    return two_photon_population(drive.omega2 * a**2, delta + samples.doppler,
                                 drive.delta0 * a**2, drive.tau)


def beam_monte_carlo(config: BeamConfig, drive: DriveParameters, detunings: Sequence[float],
                     samples: int = 10_000, seed: int = 0) -> Spectrum:
    """Beam-averaged single-atom spectrum.

    ``detunings`` are angular per-photon detunings (rad/s); the returned spectrum
    stores them in Hz. The same atoms are used at every detuning.
    """
    if samples < 1000:
        raise DomainError("at least 1000 samples are required")
    drive = replace(drive, tau=config.interaction_time)
    rng = np.random.default_rng(seed)
    atoms = sample_atoms(config, drive, samples, rng)
    det = np.asarray(detunings, dtype=float)
    mean = np.empty(len(det))
    err = np.empty(len(det))
    for i, d in enumerate(det):
        p = _populations(drive, atoms, d)
        mean[i] = p.mean()
        err[i] = p.std(ddof=1) / math.sqrt(samples)
    spec = Spectrum(det / (2.0 * math.pi), {"2": mean, "1": 1.0 - mean}, 1, drive.kind,
                    errors={"2": err, "1": err})
    return spec


def sodium_setup(kind: str = ONE_PHOTON, n: int = 37, interaction_time: float = 2.8e-6,
                 **config) -> tuple[BeamConfig, DriveParameters]:
    """Na nS1/2 -> nP1/2 (one photon) or nS1/2 -> (n+1)S1/2 via nP1/2 (two photons).

    The drive is the nominal one for line-centre inversion of an atom at rest:
    ``Omega1 tau = pi`` or ``Omega2 tau = pi/2``. Dipoles are pi-polarized
    ``mJ = 1/2`` matrix elements from the radial engine.
    """
    s = RydbergState(SODIUM, n, 0, 0.5, 0.5)
    p = RydbergState(SODIUM, n, 1, 0.5, 0.5)
    d1 = abs(dipole_matrix_element(s, p)) * EA0
    if kind == ONE_PHOTON:
        E = field_for_pulse_area(math.pi, interaction_time, d1)
        drive = drive_from_field(E, d1, tau=interaction_time)
        freq = transition_frequency(s, p)
    elif kind == TWO_PHOTON:
        s2 = RydbergState(SODIUM, n + 1, 0, 0.5, 0.5)
        d2 = abs(dipole_matrix_element(p, s2)) * EA0
        Delta = two_photon_intermediate_detuning(s, p, s2)
        E = field_for_pulse_area(0.5 * math.pi, interaction_time, d1, d2, Delta)
        drive = drive_from_field(E, d1, d2, Delta, interaction_time)
        freq = transition_frequency(s, s2)
    else:
        raise DomainError(f"unknown excitation kind {kind!r}")
    cfg = BeamConfig(transition_frequency=freq, interaction_time=interaction_time, **config)
    return cfg, drive


def line_center(drive: DriveParameters) -> float:
    return drive.delta0 if drive.kind == TWO_PHOTON else 0.0


def calibrate_drive(config: BeamConfig, drive: DriveParameters, samples: int = 10_000,
                    seed: int = 0, bounds: tuple[float, float] = (0.5, 1.5)) -> DriveParameters:
    """Rescale the field so the beam-averaged transfer at line centre is largest.

    The search runs over the pulse area in units of the nominal area within
    ``bounds``, which keeps the drive on the first Rabi lobe.
    """
    drive = replace(drive, tau=config.interaction_time)
    power = 1.0 if drive.kind == ONE_PHOTON else 0.5
    noise = np.random.default_rng(seed).standard_normal((samples, 2))

    def transfer(area: float) -> float:
        d = drive.scaled(area**power)
        atoms = sample_atoms(config, d, samples, np.random.default_rng(seed), noise)
        return float(_populations(d, atoms, line_center(d)).mean())

    grid = np.linspace(bounds[0], bounds[1], 41)
    vals = [transfer(a) for a in grid]
    j = int(np.argmax(vals))
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
    res = minimize_scalar(lambda a: -transfer(a), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-4})
    best = res.x if -res.fun >= vals[j] else grid[j]
    return drive.scaled(float(best) ** power)


# --- detection ---------------------------------------------------------------

@dataclass(frozen=True)
class DetectionModel:
    """Channeltron pulse heights for k simultaneous electrons.

    Each electron adds a gaussian amplitude (mean ``single_electron_mean``, width
    ``electron_sigma``) and the whole pulse is scaled by a common gain factor
    with relative spread ``gain_jitter``.
    """

    single_electron_mean: float = 400.0  # mV
    electron_sigma: float = 15.0  # mV
    gain_jitter: float = 0.04
    detection_probability: float = 1.0
    max_resolvable: int = 5

    @property
    def per_electron_increment(self) -> float:
        return self.single_electron_mean

    @property
    def single_electron_range(self) -> tuple[float, float]:
        return self.single_electron_mean - 50.0, self.single_electron_mean + 50.0

    def mean_amplitude(self, k: int) -> float:
        return k * self.single_electron_mean

    def amplitudes(self, counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        counts = np.asarray(counts, dtype=np.int64)
        if np.any(counts < 0):
            raise DomainError("atom counts must be non-negative")
        detected = rng.binomial(counts, self.detection_probability) if (
            self.detection_probability < 1.0) else counts
        # a sum of k gaussians is gaussian with k-scaled mean and sqrt(k)-scaled width
        electrons = detected * self.single_electron_mean + np.sqrt(detected) * (
            self.electron_sigma * rng.standard_normal(counts.shape))
        gain = 1.0 + self.gain_jitter * rng.standard_normal(counts.shape)
        return np.where(detected > 0, electrons * gain, 0.0)

    def classify(self, amplitude: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Nearest multiple of the single-electron mean, and a reliability flag."""
        k = np.rint(np.asarray(amplitude) / self.single_electron_mean).astype(np.int64)
        k = np.maximum(k, 0)
        return k, k <= self.max_resolvable


@dataclass(frozen=True)
class SFIEvent:
    event_id: int
    true_count: int
    amplitude_mV: float
    inferred_count: int
    reliable: bool


def sfi_counting_sim(true_atom_counts: Sequence[int], model: DetectionModel | None = None,
                     seed: int = 0) -> list[SFIEvent]:
    model = DetectionModel() if model is None else model
    counts = np.asarray(true_atom_counts, dtype=np.int64)
    rng = np.random.default_rng(seed)
    amp = model.amplitudes(counts, rng)
    inferred, ok = model.classify(amp)
    return [SFIEvent(i, int(c), float(a), int(k), bool(r))
            for i, (c, a, k, r) in enumerate(zip(counts, amp, inferred, ok))]


def classification_accuracy(count: int, model: DetectionModel | None = None,
                            events: int = 100_000, seed: int = 0) -> float:
    model = DetectionModel() if model is None else model
    ev = sfi_counting_sim([count] * events, model, seed)
    return float(np.mean([e.inferred_count == count for e in ev]))


# --- multi-atom events ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EventSet:
    """Per-detuning event records: true and inferred counts in both SFI gates."""

    detunings: np.ndarray  # Hz
    true_lower: np.ndarray  # (n_detunings, n_events)
    true_upper: np.ndarray
    inferred_lower: np.ndarray
    inferred_upper: np.ndarray
    kind: str


def simulate_events(config: BeamConfig, drive: DriveParameters, detunings: Sequence[float],
                    events_per_detuning: int, atoms_per_event: int | float,
                    detection: DetectionModel | None = None, poisson: bool = False,
                    seed: int = 0) -> EventSet:
    """Excite independent atoms event by event and record the two SFI gate signals.

    With ``poisson`` the atom number per event is Poisson with mean
    ``atoms_per_event``; otherwise it is fixed. Atoms of one event share the
    field noise of that event.
    """
    detection = DetectionModel() if detection is None else detection
    drive = replace(drive, tau=config.interaction_time)
    rng = np.random.default_rng(seed)
    det = np.asarray(detunings, dtype=float)
    n_ev = int(events_per_detuning)
    shape = (len(det), n_ev)
    tl = np.zeros(shape, dtype=np.int64)
    tu = np.zeros(shape, dtype=np.int64)
    for i, d in enumerate(det):
        n_atoms = rng.poisson(atoms_per_event, n_ev) if poisson else np.full(
            n_ev, int(atoms_per_event))
        total = int(n_atoms.sum())
        owner = np.repeat(np.arange(n_ev), n_atoms)
        ev_noise = rng.standard_normal((n_ev, 2))
        atoms = sample_atoms(config, drive, total, rng, ev_noise[owner])
        up = rng.random(total) < _populations(drive, atoms, d)
        tu[i] = np.bincount(owner, weights=up, minlength=n_ev).astype(np.int64)
        tl[i] = n_atoms - tu[i]
    il, _ = detection.classify(detection.amplitudes(tl, rng))
    iu, _ = detection.classify(detection.amplitudes(tu, rng))
    return EventSet(det / (2.0 * math.pi), tl, tu, il, iu, drive.kind)


def sorted_multi_atom_spectra(events: EventSet, N_filter: int,
                              pattern_filter: Sequence[int] | None = None) -> Spectrum:
    """Post-select events whose detected total is ``N_filter`` and histogram ``k`` upper atoms.

    Detunings with no surviving event give NaN (missing data), never zero.
    """
    total = events.inferred_lower + events.inferred_upper
    keep = total == N_filter
    n_kept = keep.sum(axis=1)
    ks = range(N_filter + 1) if pattern_filter is None else pattern_filter
    curves, errors = {}, {}
    for k in ks:
        hits = (keep & (events.inferred_upper == k)).sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            p = np.where(n_kept > 0, hits / np.maximum(n_kept, 1), np.nan)
            e = np.where(n_kept > 0, np.sqrt(p * (1 - p) / np.maximum(n_kept, 1)), np.nan)
        curves[pattern_label(k, N_filter)] = p
        errors[pattern_label(k, N_filter)] = e
    return Spectrum(events.detunings, curves, N_filter, events.kind, errors, n_kept)
