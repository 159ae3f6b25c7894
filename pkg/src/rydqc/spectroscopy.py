"""One- and two-photon Rabi lineshapes, field and photon-density estimates, and
multi-atom spectra built from independent atoms."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, replace
from math import comb
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .constants import CONSTANTS, EPS0, HBAR
from .errors import AccuracyWarning, DomainError
from .states import RydbergState, transition_frequency

ONE_PHOTON = "one-photon"
TWO_PHOTON = "two-photon"


def one_photon_population(omega1, delta, tau):
    """Upper-state population after time ``tau`` of resonant-ish one-photon driving.

    ``rho = Omega1^2 / (delta^2 + Omega1^2) * sin^2(tau/2 * sqrt(delta^2 + Omega1^2))``
    """
    omega1, delta, tau = np.broadcast_arrays(*(np.asarray(a, dtype=float)
                                               for a in (omega1, delta, tau)))
    if np.any(tau < 0):
        raise DomainError("interaction time must be non-negative")
    w2 = delta**2 + omega1**2
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(w2 > 0, omega1**2 / np.where(w2 > 0, w2, 1.0), 0.0) * np.sin(
            0.5 * tau * np.sqrt(w2)) ** 2
    return rho if rho.ndim else float(rho)


def two_photon_population(omega2, delta, delta0, tau):
    """Upper-state population for the effective two-photon drive.

    ``rho = Omega2^2 / ((delta-delta0)^2 + Omega2^2) * sin^2(tau * sqrt((delta-delta0)^2 + Omega2^2))``
    with ``delta`` the per-photon detuning and ``delta0`` the power shift.
    """
    omega2, delta, delta0, tau = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (omega2, delta, delta0, tau)))
    if np.any(tau < 0):
        raise DomainError("interaction time must be non-negative")
    dd = delta - delta0
    w2 = dd**2 + omega2**2
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(w2 > 0, omega2**2 / np.where(w2 > 0, w2, 1.0), 0.0) * np.sin(
            tau * np.sqrt(w2)) ** 2
    return rho if rho.ndim else float(rho)


@dataclass(frozen=True)
class DriveParameters:
    """Microwave drive. Angular quantities in rad/s, field in V/m, dipoles in C m."""

    omega1: float = 0.0
    omega2: float = 0.0
    delta: float = 0.0
    delta0: float = 0.0
    Delta: float | None = None
    tau: float = 0.0
    E: float = 0.0
    d1: float = 0.0
    d2: float = 0.0
    kind: str = ONE_PHOTON

    def scaled(self, factor: float) -> "DriveParameters":
        """Same drive with the field amplitude multiplied by ``factor``."""
        return replace(self, E=self.E * factor, omega1=self.omega1 * factor,
                       omega2=self.omega2 * factor**2, delta0=self.delta0 * factor**2)

    def population(self, delta) -> np.ndarray:
        if self.kind == ONE_PHOTON:
            return one_photon_population(self.omega1, delta, self.tau)
        return two_photon_population(self.omega2, delta, self.delta0, self.tau)


def drive_from_field(E: float, d1: float, d2: float | None = None,
                     Delta: float | None = None, tau: float = 0.0,
                     kind: str | None = None) -> DriveParameters:
    """Rabi frequencies and power shift for field amplitude ``E``.

    ``Omega1 = d1 E / hbar``, ``Omega2 = d1 d2 E^2 / (4 hbar^2 Delta)`` and
    ``delta0 = (d1^2 - d2^2) E^2 / (8 hbar^2 Delta)``.
    """
    two = d2 is not None or kind == TWO_PHOTON
    if two:
        if Delta is None or Delta == 0:
            raise DomainError("two-photon quantities need a non-zero intermediate detuning")
        d2 = d1 if d2 is None else d2
        omega2 = d1 * d2 * E**2 / (4.0 * HBAR**2 * Delta)
        delta0 = (d1**2 - d2**2) * E**2 / (8.0 * HBAR**2 * Delta)
    else:
        omega2 = delta0 = 0.0
    return DriveParameters(
        omega1=d1 * E / HBAR, omega2=omega2, delta0=delta0, Delta=Delta, tau=tau, E=E,
        d1=d1, d2=d2 or 0.0, kind=TWO_PHOTON if two else ONE_PHOTON)


def field_for_pulse_area(area: float, tau: float, d1: float, d2: float | None = None,
                         Delta: float | None = None) -> float:
    """Field amplitude (V/m) giving ``Omega1 tau = area`` or, with ``d2``, ``Omega2 tau = area``."""
    if tau <= 0 or area < 0:
        raise DomainError("need tau > 0 and area >= 0")
    if d2 is None:
        return area * HBAR / (d1 * tau)
    if Delta is None or Delta == 0:
        raise DomainError("two-photon field needs a non-zero intermediate detuning")
    return math.sqrt(area * 4.0 * HBAR**2 * abs(Delta) / (abs(d1 * d2) * tau))


def two_photon_intermediate_detuning(lower: RydbergState, middle: RydbergState,
                                     upper: RydbergState) -> float:
    """Detuning (rad/s) of the half-frequency photon from the ``lower -> middle`` line."""
    photon = 0.5 * transition_frequency(lower, upper)
    return 2.0 * math.pi * (transition_frequency(lower, middle) - photon)


def photon_density(E: float, omega: float) -> float:
    """Photon number density (cm^-3) ``eps0 E^2 / (2 hbar omega)``."""
    if E <= 0 or omega <= 0:
        raise DomainError("E and omega must be positive")
    return EPS0 * E**2 / (2.0 * HBAR * omega) * 1e-6


def check_decay_negligible(tau: float, lifetime_s: float, fraction: float = 0.1) -> bool:
    """Warn when ``tau`` is not small against the state lifetime."""
    ok = tau <= fraction * lifetime_s
    if not ok:
        warnings.warn(f"interaction time {tau:.3g} s is not << lifetime {lifetime_s:.3g} s; "
                      "spontaneous decay is not negligible", AccuracyWarning, stacklevel=2)
    return ok


# --- multi-atom spectra -------------------------------------------------------

def pattern_label(k: int, N: int) -> str:
    """Multiset label: ``k`` atoms in state 2 out of ``N``."""
    return f"{k}of{N}"


def pattern_probability(rho2, N: int, pattern: int | str):
    """Probability of an outcome of N independent atoms.

    ``pattern`` is an integer ``k`` (any k atoms in state 2, binomial count
    included) or a labeled string such as ``"12"`` (atom-by-atom states).
    """
    rho2 = np.asarray(rho2, dtype=float)
    if isinstance(pattern, str):
        if len(pattern) != N or set(pattern) - {"1", "2"}:
            raise DomainError(f"labeled pattern {pattern!r} does not describe {N} atoms")
        k = pattern.count("2")
        return rho2**k * (1.0 - rho2) ** (N - k)
    k = int(pattern)
    if k < 0 or k > N:
        raise DomainError(f"k={k} outside 0..{N}")
    return comb(N, k) * rho2**k * (1.0 - rho2) ** (N - k)


def full_excitation_probability(rho2, N: int):
    return np.asarray(rho2, dtype=float) ** N


@dataclass(frozen=True, eq=False)
class Spectrum:
    detunings: np.ndarray  # Hz
    curves: Mapping[str, np.ndarray]
    N: int
    kind: str
    errors: Mapping[str, np.ndarray] = field(default_factory=dict)
    counts: np.ndarray | None = None  # events behind each detuning (Monte Carlo only)

    def to_csv(self, path: str | Path, metadata: Mapping[str, object] | None = None) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            for key, val in (metadata or {}).items():
                fh.write(f"# {key}: {val}\n")
            w = csv.writer(fh)
            w.writerow(["detuning_MHz", "pattern_label", "probability"])
            for i, d in enumerate(self.detunings):
                for label, curve in self.curves.items():
                    val = curve[i]
                    w.writerow([f"{d / 1e6:.6f}", label,
                                "nan" if not np.isfinite(val) else f"{val:.9f}"])
        return path


def multi_atom_spectrum(N: int, single_atom_curve: np.ndarray, detunings: np.ndarray,
                        kind: str = ONE_PHOTON, patterns: Sequence[int | str] | None = None
                        ) -> Spectrum:
    """Outcome probabilities of N non-interacting atoms from the single-atom curve.

    By default every multiset pattern ``k = 0..N`` is returned, so curves sum to 1.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    rho = np.clip(np.asarray(single_atom_curve, dtype=float), 0.0, 1.0)
    patterns = range(N + 1) if patterns is None else patterns
    curves = {}
    for p in patterns:
        label = p if isinstance(p, str) else pattern_label(int(p), N)
        curves[label] = pattern_probability(rho, N, p)
    return Spectrum(np.asarray(detunings, dtype=float), curves, N, kind)


def narrowed_width(omega2: float, N: int) -> float:
    """Full width (rad/s) of ``rho^N`` with the Lorentzian prefactor: ``2 Omega2 sqrt(2^(1/N) - 1)``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    return 2.0 * omega2 * math.sqrt(2.0 ** (1.0 / N) - 1.0)


def narrowing_ratio(N: int) -> float:
    return 1.0 / math.sqrt(2.0 ** (1.0 / N) - 1.0)


def asymptotic_narrowing_ratio(N: int) -> float:
    return math.sqrt(N / math.log(2.0))


def fwhm(x: np.ndarray, y: np.ndarray) -> float:
    """Full width at half maximum of a single-peaked curve, with linear interpolation."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    finite = np.isfinite(y)
    x, y = x[finite], y[finite]
    i = int(np.argmax(y))
    half = 0.5 * y[i]
    lo = i
    while lo > 0 and y[lo] > half:
        lo -= 1
    hi = i
    while hi < len(y) - 1 and y[hi] > half:
        hi += 1
    if y[lo] > half or y[hi] > half:
        raise DomainError("curve does not fall to half maximum inside the grid")
    xl = np.interp(half, [y[lo], y[lo + 1]], [x[lo], x[lo + 1]])
    xh = np.interp(half, [y[hi], y[hi - 1]], [x[hi], x[hi - 1]])
    return float(xh - xl)


@dataclass(frozen=True)
class DipCheck:
    center: float
    maximum: float
    dip_present: bool


def dip_feature_check(curve: np.ndarray, detunings: np.ndarray | None = None,
                      tol: float = 1e-9) -> DipCheck:
    """Compare the single-excitation curve at line centre with its maximum."""
    curve = np.asarray(curve, dtype=float)
    if detunings is None:
        ic = len(curve) // 2
    else:
        ic = int(np.argmin(np.abs(np.asarray(detunings))))
    center = float(curve[ic])
    peak = float(np.nanmax(curve))
    return DipCheck(center, peak, center < peak - tol)


def single_excitation_from_center(rho_center: float) -> DipCheck:
    """Two-atom ``k = 1`` probability at centre against its largest possible value 1/2."""
    center = 2.0 * rho_center * (1.0 - rho_center)
    peak = max(center, 0.5) if rho_center >= 0.5 else center
    return DipCheck(center, peak, center < peak - 1e-12)


def d_au(d_atomic: float) -> float:
    """Atomic-unit dipole to C m."""
    return d_atomic * CONSTANTS.atomic_dipole_unit
