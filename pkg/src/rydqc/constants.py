"""Physical constants (SI) and atomic-unit conversion factors."""

from __future__ import annotations

from dataclasses import dataclass

import scipy.constants as sc


@dataclass(frozen=True)
class PhysicalConstants:
    bohr_radius: float = sc.physical_constants["Bohr radius"][0]  # m
    elementary_charge: float = sc.e  # C
    reduced_planck: float = sc.hbar  # J s
    planck: float = sc.h  # J s
    vacuum_permittivity: float = sc.epsilon_0  # F/m
    speed_of_light: float = sc.c  # m/s
    boltzmann: float = sc.k  # J/K
    electron_mass: float = sc.m_e  # kg
    atomic_mass_unit: float = sc.physical_constants["atomic mass constant"][0]  # kg
    rydberg_frequency: float = sc.physical_constants["Rydberg constant times c in Hz"][0]  # Hz
    bohr_magneton_mhz_per_gauss: float = 1.3996  # MHz/G
    hartree_hz: float = sc.physical_constants["hartree-hertz relationship"][0]  # Hz
    atomic_field_v_per_m: float = sc.physical_constants["atomic unit of electric field"][0]  # V/m

    @property
    def atomic_dipole_unit(self) -> float:
        """e*a0 in C m."""
        return self.elementary_charge * self.bohr_radius

    @property
    def atomic_field_v_per_cm(self) -> float:
        return self.atomic_field_v_per_m / 100.0


CONSTANTS = PhysicalConstants()

A0 = CONSTANTS.bohr_radius
EA0 = CONSTANTS.atomic_dipole_unit
HBAR = CONSTANTS.reduced_planck
H = CONSTANTS.planck
EPS0 = CONSTANTS.vacuum_permittivity
C_LIGHT = CONSTANTS.speed_of_light
K_B = CONSTANTS.boltzmann
