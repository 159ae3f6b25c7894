"""Stark maps by exact diagonalization in a finite single-mJ basis."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .constants import CONSTANTS
from .errors import DomainError, NumericalError
from .radial import angular_factor, radial_matrix_element
from .states import AtomSpecies, RydbergState, get_species, state_energy

HARTREE_GHZ = CONSTANTS.hartree_hz / 1e9
FIT_TOLERANCE = 0.02


def field_to_au(field_v_per_cm: float) -> float:
    return field_v_per_cm / CONSTANTS.atomic_field_v_per_cm


@dataclass(frozen=True, eq=False)
class StarkBasis:
    """States sharing one ``mJ``; the field couples L-adjacent members."""

    species: AtomSpecies
    mJ: float
    states: tuple[RydbergState, ...]

    def __post_init__(self):
        if any(s.mJ != self.mJ for s in self.states):
            raise DomainError("all basis states must share the same mJ")

    @classmethod
    def build(cls, species: str | AtomSpecies, n_min: int, n_max: int, mJ: float = 0.5,
              l_max: int | None = None) -> "StarkBasis":
        sp = get_species(species)
        states = []
        for n in range(n_min, n_max + 1):
            for L in range(0, n if l_max is None else min(n, l_max + 1)):
                if n < sp.min_n(L):
                    continue
                for J in (L - 0.5, L + 0.5):
                    if J >= abs(mJ) and J > 0:
                        states.append(RydbergState(sp, n, L, J, mJ))
        return cls(sp, mJ, tuple(states))

    def __len__(self) -> int:
        return len(self.states)

    def index(self, state: RydbergState) -> int:
        key = (state.n, state.L, state.J)
        for i, s in enumerate(self.states):
            if (s.n, s.L, s.J) == key:
                return i
        raise DomainError(f"{state.label} is not in the basis")

    @cached_property
    def energies(self) -> np.ndarray:
        """Unperturbed energies in GHz."""
        return np.array([state_energy(s) / 1e9 for s in self.states])

    @cached_property
    def dipole(self) -> np.ndarray:
        """``<i|z|j>`` in atomic units (symmetric)."""
        m = len(self.states)
        z = np.zeros((m, m))
        for i, a in enumerate(self.states):
            for j in range(i + 1, m):
                b = self.states[j]
                if abs(a.L - b.L) != 1:
                    continue
                ang = angular_factor(a, b, 0)
                if ang == 0.0:
                    continue
                z[i, j] = z[j, i] = ang * radial_matrix_element(a, b)
        return z


def build_stark_hamiltonian(basis: StarkBasis, field: float) -> np.ndarray:
    """Hamiltonian in GHz at ``field`` V/cm: diagonal energies plus ``F z`` couplings."""
    return np.diag(basis.energies) + field_to_au(field) * HARTREE_GHZ * basis.dipole


def _eigh(h: np.ndarray, field: float):
    try:
        return scipy.linalg.eigh(h)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed at {field} V/cm", value=field) from exc


@dataclass(frozen=True, eq=False)
class StarkMap:
    basis: StarkBasis
    field_values: np.ndarray  # V/cm
    energies: np.ndarray  # GHz, (n_fields, n_states); column k follows basis state k
    labels: tuple[str, ...] = field(default=())

    def curve(self, state: RydbergState) -> np.ndarray:
        return self.energies[:, self.basis.index(state)]

    def rows(self):
        for i, f in enumerate(self.field_values):
            for k, lab in enumerate(self.labels):
                yield f, k, lab, self.energies[i, k]

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["field_V_per_cm", "curve_index", "zero_field_label", "energy_GHz"])
            for f, k, lab, e in self.rows():
                w.writerow([f"{f:.6g}", k, lab, f"{e:.9f}"])
        return path


def stark_map(basis: StarkBasis, fields: Sequence[float]) -> StarkMap:
    """Diagonalize at each field and connect eigenvalues by eigenvector overlap.

    Column ``k`` of the result is the curve that starts on basis state ``k`` at
    zero field. Between neighbouring fields the assignment maximizing the summed
    squared overlaps is chosen, which makes the ordering deterministic.
    """
    fields = np.asarray(fields, dtype=float)
    if fields.ndim != 1 or len(fields) == 0 or fields[0] != 0 or np.any(np.diff(fields) <= 0):
        raise DomainError("fields must be ascending and start at 0")
    m = len(basis)
    out = np.empty((len(fields), m))
    prev = np.eye(m)
    for i, f in enumerate(fields):
        vals, vecs = _eigh(build_stark_hamiltonian(basis, f), f)
        overlap = (prev.T @ vecs) ** 2
        rows, cols = linear_sum_assignment(-overlap)
        order = cols[np.argsort(rows)]
        out[i] = vals[order]
        prev = vecs[:, order]
    labels = tuple(s.label for s in basis.states)
    return StarkMap(basis, fields, out, labels)


def default_basis(state: RydbergState, half_width: int = 3) -> StarkBasis:
    mJ = 0.5 if state.mJ is None else state.mJ
    return StarkBasis.build(state.species, max(state.n - half_width, state.L + 1),
                            state.n + half_width, mJ)


def quadratic_fit(fields: np.ndarray, energies: np.ndarray) -> tuple[float, float]:
    """Fit ``E = E0 + c F^2``; return ``c`` and the RMS residual relative to the shift."""
    A = np.column_stack([np.ones_like(fields), fields**2])
    coef, *_ = np.linalg.lstsq(A, energies, rcond=None)
    resid = energies - A @ coef
    shift = np.ptp(energies)
    rel = np.sqrt(np.mean(resid**2)) / shift if shift > 0 else 0.0
    return float(coef[1]), float(rel)


def linear_fit_r2(fields: np.ndarray, energies: np.ndarray) -> float:
    slope, icpt = np.polyfit(fields, energies, 1)
    resid = energies - (slope * fields + icpt)
    ss_tot = np.sum((energies - energies.mean()) ** 2)
    return 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0


def polarizability(species: str | AtomSpecies, state: RydbergState, fit_window: float,
                   basis: StarkBasis | None = None, n_fields: int = 21) -> float:
    """Scalar polarizability alpha in MHz/(V/cm)^2 with ``dE = -alpha F^2 / 2``.

    Raises
    ------
    NumericalError
        When the RMS quadratic-fit residual exceeds 2 % of the shift, which signals an
        avoided crossing inside the window.
    """
    sp = get_species(species)
    if state.species != sp:
        raise DomainError("state species does not match")
    if state.L > 2:
        raise DomainError("polarizability is defined here for low-L (non-hydrogenic) states")
    state = state if state.mJ is not None else state.with_mj(0.5)
    basis = default_basis(state) if basis is None else basis
    fields = np.linspace(0.0, fit_window, n_fields)
    curve = stark_map(basis, fields).curve(state)
    c, rel = quadratic_fit(fields, curve * 1e3)
    if rel > FIT_TOLERANCE:
        raise NumericalError(
            f"quadratic fit residual {100 * rel:.1f} % for {state.label}: avoided crossing "
            f"inside the {fit_window} V/cm window", value=fit_window)
    return -2.0 * c


def sfi_crossing_check(state_a: RydbergState, state_b: RydbergState, field: float,
                       basis: StarkBasis | None = None, n_fields: int = 101) -> float:
    """Adiabatic energy gap ``E_a - E_b`` in GHz at ``field`` V/cm."""
    if (state_a.n, state_a.L, state_a.J) == (state_b.n, state_b.L, state_b.J):
        return 0.0
    mJ = state_a.mJ if state_a.mJ is not None else 0.5
    a, b = state_a.with_mj(mJ), state_b.with_mj(mJ)
    if basis is None:
        lo = min(a.n, b.n) - 3
        basis = StarkBasis.build(a.species, max(lo, 1), max(a.n, b.n) + 3, mJ)
    fields = np.linspace(0.0, field, max(n_fields, 2)) if field > 0 else np.array([0.0])
    smap = stark_map(basis, fields)
    return float(smap.curve(a)[-1] - smap.curve(b)[-1])

