"""Spontaneous and blackbody-stimulated decay rates of Rydberg states."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT, EA0, EPS0, HBAR, K_B
from .errors import AccuracyWarning, DomainError
from .radial import radial_matrix_element, sublevel_summed_strength
from .states import RydbergState, transition_frequency

DEFAULT_WINDOW = 5
WINDOW_TOLERANCE = 0.01


def photon_occupation(frequency_hz: float, temperature: float) -> float:
    """Bose-Einstein mean photon number at ``frequency_hz`` (0 at T = 0)."""
    if temperature <= 0:
        return 0.0
    x = 2.0 * math.pi * HBAR * abs(frequency_hz) / (K_B * temperature)
    return 0.0 if x > 700.0 else 1.0 / math.expm1(x)


def rate_prefactor(frequency_hz: float) -> float:
    """``omega^3 (e a0)^2 / (3 pi eps0 hbar c^3)``: rate per unit squared dipole (a.u.)."""
    omega = 2.0 * math.pi * abs(frequency_hz)
    return omega**3 * EA0**2 / (3.0 * math.pi * EPS0 * HBAR * C_LIGHT**3)


def line_strength(initial: RydbergState, final: RydbergState) -> float:
    """Squared dipole (a.u.) from one sublevel of ``initial`` summed over ``final``."""
    r = radial_matrix_element(initial, final)
    return r * r * sublevel_summed_strength(initial.L, initial.J, final.L, final.J)


def einstein_a(upper: RydbergState, lower: RydbergState) -> float:
    """Spontaneous emission rate ``upper -> lower`` in 1/s."""
    nu = transition_frequency(lower, upper)
    if nu <= 0:
        raise DomainError(f"{upper.label} lies below {lower.label}")
    return rate_prefactor(nu) * line_strength(upper, lower)


def coupled_states(state: RydbergState, n_upper: int) -> list[RydbergState]:
    """Dipole partners with ``n`` from the species' lowest level up to ``n_upper``."""
    out = []
    sp = state.species
    for L2 in (state.L - 1, state.L + 1):
        if L2 < 0:
            continue
        for J2 in (L2 - 0.5, L2 + 0.5):
            if J2 < 0 or abs(J2 - state.J) > 1:
                continue
            for n2 in range(max(sp.min_n(L2), L2 + 1), n_upper + 1):
                s2 = RydbergState(sp, n2, L2, J2)
                if s2.n_eff > 0 and transition_frequency(state, s2) != 0:
                    out.append(s2)
    return out


@dataclass(frozen=True)
class DecayChannel:
    final: RydbergState
    spontaneous: float  # 1/s
    stimulated: float  # 1/s

    @property
    def total(self) -> float:
        return self.spontaneous + self.stimulated


@dataclass(frozen=True)
class LifetimeResult:
    state: RydbergState
    radiative_lifetime: float  # s
    effective_lifetime: float  # s
    temperature: float  # K
    dominant_decay_channels: list[tuple[RydbergState, float]] = field(default_factory=list)
    bbr_rate: float = 0.0  # 1/s
    window: int = DEFAULT_WINDOW


def _channels(state: RydbergState, temperature: float, window: int) -> list[DecayChannel]:
    chans = []
    for s2 in coupled_states(state, state.n + window):
        nu = transition_frequency(state, s2)  # > 0 for absorption
        below = nu < 0
        if not below and s2.n < state.n - window:
            continue
        base = rate_prefactor(nu) * line_strength(state, s2)
        nbar = photon_occupation(nu, temperature)
        chans.append(DecayChannel(s2, base if below else 0.0, base * nbar))
    return chans


def lifetime(state: RydbergState, temperature: float = 0.0, window: int = DEFAULT_WINDOW,
             check_window: bool = True, n_channels: int = 5) -> LifetimeResult:
    """Radiative and blackbody-limited lifetime of ``state``.

    Spontaneous decay runs over every lower dipole partner. Stimulated transfer
    (up and down) uses ``A * nbar`` over partners within ``|dn| <= window`` plus
    all lower states.

    Parameters
    ----------
    temperature : float
        Blackbody temperature in kelvin. At 0 the effective lifetime equals the
        radiative one exactly.
    check_window : bool
        Recompute with a doubled window and emit ``AccuracyWarning`` when the total
        rate moves by more than 1 %.
    """
    if temperature < 0:
        raise DomainError("temperature must be non-negative")
    chans = _channels(state, temperature, window)
    gamma_rad = sum(c.spontaneous for c in chans)
    gamma_bbr = sum(c.stimulated for c in chans)
    if gamma_rad <= 0:
        raise DomainError(f"{state} has no lower dipole partner")
    tau_rad = 1.0 / gamma_rad
    tau_eff = tau_rad if temperature == 0 else 1.0 / (gamma_rad + gamma_bbr)
    if check_window and temperature > 0:
        wide = _channels(state, temperature, 2 * window)
        total_wide = sum(c.total for c in wide)
        change = abs(total_wide - (gamma_rad + gamma_bbr)) / (gamma_rad + gamma_bbr)
        if change > WINDOW_TOLERANCE:
            warnings.warn(
                f"{state}: doubling the summation window changes the decay rate by "
                f"{100 * change:.1f} %", AccuracyWarning, stacklevel=2)
    ranked = sorted(chans, key=lambda c: c.total, reverse=True)[:n_channels]
    return LifetimeResult(
        state=state,
        radiative_lifetime=tau_rad,
        effective_lifetime=tau_eff,
        temperature=float(temperature),
        dominant_decay_channels=[(c.final, c.total) for c in ranked],
        bbr_rate=gamma_bbr,
        window=window,
    )


def scaling_exponent(states: list[RydbergState], temperature: float = 0.0) -> float:
    """Log-log slope of radiative lifetime against ``n_eff``."""
    n = np.array([s.n_eff for s in states])
    tau = np.array([lifetime(s, temperature, check_window=False).radiative_lifetime
                    for s in states])
    return float(np.polyfit(np.log(n), np.log(tau), 1)[0])
