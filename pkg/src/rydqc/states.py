"""Species data, Rydberg quantum-number bookkeeping and closed-form scaling laws.

Energies follow the quantum-defect Rydberg formula ``E/h = -Ry / n_eff**2`` with
``n_eff = n - delta(L, J)``. Defects are taken as n-independent.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .constants import A0, CONSTANTS
from .errors import ConfigurationError, DomainError

L_LETTERS = "SPDFGHIKLMNOQRTUVWXYZ"

# dipole core polarizabilities (a.u.) drive the defect of non-penetrating L >= 3 states
_NA_ALPHA_CORE = 0.9448
_RB_ALPHA_CORE = 9.0760


def core_polarization_defect(alpha_core: float, L: int) -> float:
    """Quantum defect of a non-penetrating orbit from the dipole core polarization.

    delta_L ~ 3 alpha / (4 (L-1/2) L (L+1/2) (L+1) (L+3/2)), the large-n limit of
    ``-(alpha/2) <r^-4>`` expressed as a defect.
    """
    if L < 1:
        raise DomainError("core-polarization defect is only defined for L >= 1")
    return 3.0 * alpha_core / (4.0 * (L - 0.5) * L * (L + 0.5) * (L + 1) * (L + 1.5))


@dataclass(frozen=True, eq=False)
class AtomSpecies:
    """Element identity and the data needed to place its Rydberg levels.

    ``quantum_defects`` maps ``(L, J)`` to the dimensionless defect. Entries missing
    for ``L >= 3`` fall back to the core-polarization estimate when
    ``core_polarizability`` is set.
    """

    name: str
    quantum_defects: Mapping[tuple[int, float], float]
    mass: float
    core_polarizability: float = 0.0
    lowest_n: Mapping[int, int] = field(default_factory=dict)
    fine_structure_50p_mhz: float | None = None

    def __hash__(self) -> int:
        return hash((self.name, tuple(sorted(self.quantum_defects.items()))))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AtomSpecies):
            return NotImplemented
        return (
            self.name == other.name
            and dict(self.quantum_defects) == dict(other.quantum_defects)
            and self.mass == other.mass
        )

    def __repr__(self) -> str:
        return f"AtomSpecies({self.name!r})"

    def defect(self, L: int, J: float) -> float:
        key = (int(L), float(J))
        if key in self.quantum_defects:
            return self.quantum_defects[key]
        if self.name == "H":
            return 0.0
        if L >= 3 and self.core_polarizability > 0.0:
            return core_polarization_defect(self.core_polarizability, L)
        raise ConfigurationError(f"no quantum defect for {self.name} L={L} J={J}")

    def min_n(self, L: int) -> int:
        """Lowest principal quantum number that exists for orbital momentum L."""
        return max(self.lowest_n.get(L, L + 1), L + 1)

    @property
    def ground_state(self) -> "RydbergState":
        return RydbergState(self, self.min_n(0), 0, 0.5, 0.5)


def _defects(pairs: dict[tuple[int, float], float]) -> dict[tuple[int, float], float]:
    return {(int(L), float(J)): float(d) for (L, J), d in pairs.items()}


SODIUM = AtomSpecies(
    name="Na",
    quantum_defects=_defects(
        {(0, 0.5): 1.348, (1, 0.5): 0.855, (1, 1.5): 0.855, (2, 1.5): 0.015, (2, 2.5): 0.015}
    ),
    mass=22.98976928 * CONSTANTS.atomic_mass_unit,
    core_polarizability=_NA_ALPHA_CORE,
    lowest_n={0: 3, 1: 3, 2: 3},
    fine_structure_50p_mhz=45.0,
)

# not paper-anchored: standard literature values
RUBIDIUM = AtomSpecies(
    name="Rb",
    quantum_defects=_defects(
        {(0, 0.5): 3.131, (1, 0.5): 2.654, (1, 1.5): 2.641, (2, 1.5): 1.347, (2, 2.5): 1.347}
    ),
    mass=86.909180527 * CONSTANTS.atomic_mass_unit,
    core_polarizability=_RB_ALPHA_CORE,
    lowest_n={0: 5, 1: 5, 2: 4},
    fine_structure_50p_mhz=819.0,
)

HYDROGEN = AtomSpecies(
    name="H",
    quantum_defects={},
    mass=1.00782503207 * CONSTANTS.atomic_mass_unit,
)

SPECIES: dict[str, AtomSpecies] = {"Na": SODIUM, "Rb": RUBIDIUM, "H": HYDROGEN}


def get_species(name: str | AtomSpecies) -> AtomSpecies:
    if isinstance(name, AtomSpecies):
        return name
    for key, sp in SPECIES.items():
        if key.lower() == str(name).lower():
            return sp
    raise ConfigurationError(f"unknown species {name!r}; known: {sorted(SPECIES)}")


def load_species_file(path: str | Path) -> dict[str, AtomSpecies]:
    """Read species overrides from a whitespace-separated key-value file.

    Defect lines are ``<element> <L> <J> <defect>`` (J may be written ``1/2``);
    property lines are ``<element> mass <kg>``, ``<element> core_polarizability
    <a.u.>`` or ``<element> lowest_n <L> <n>``. ``#`` starts a comment. Elements
    already known start from their built-in data.
    """
    records: dict[str, dict] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        name = parts[0]
        rec = records.setdefault(name, {"defects": {}, "lowest_n": {}})
        try:
            if parts[1] == "mass":
                rec["mass"] = float(parts[2])
            elif parts[1] == "core_polarizability":
                rec["core_polarizability"] = float(parts[2])
            elif parts[1] == "lowest_n":
                rec["lowest_n"][int(parts[2])] = int(parts[3])
            elif parts[1] == "fine_structure_50p_mhz":
                rec["fine_structure_50p_mhz"] = float(parts[2])
            else:
                L, J, d = int(parts[1]), float(Fraction(parts[2])), float(parts[3])
                if abs(abs(J - L) - 0.5) > 1e-9:
                    raise ValueError("|J - L| must be 1/2")
                rec["defects"][(L, J)] = d
        except (IndexError, ValueError) as exc:
            raise ConfigurationError(f"{path}:{lineno}: cannot parse {raw!r} ({exc})") from exc

    out = {}
    for name, rec in records.items():
        base = SPECIES.get(name)
        defects = dict(base.quantum_defects) if base else {}
        defects.update(rec["defects"])
        lowest = dict(base.lowest_n) if base else {}
        lowest.update(rec["lowest_n"])
        mass = rec.get("mass", base.mass if base else None)
        if mass is None:
            raise ConfigurationError(f"{path}: species {name} has no mass")
        out[name] = AtomSpecies(
            name=name,
            quantum_defects=defects,
            mass=mass,
            core_polarizability=rec.get(
                "core_polarizability", base.core_polarizability if base else 0.0
            ),
            lowest_n=lowest,
            fine_structure_50p_mhz=rec.get(
                "fine_structure_50p_mhz", base.fine_structure_50p_mhz if base else None
            ),
        )
    return out


def _is_half_integer(x: float) -> bool:
    return abs(2 * x - round(2 * x)) < 1e-12 and round(2 * x) % 2 == 1


@dataclass(frozen=True)
class RydbergState:
    species: AtomSpecies
    n: int
    L: int
    J: float
    mJ: float | None = None

    def __post_init__(self):
        if self.n < 1 or self.L < 0 or self.L >= self.n:
            raise DomainError(f"invalid quantum numbers n={self.n}, L={self.L}")
        if not _is_half_integer(self.J) or abs(abs(self.J - self.L) - 0.5) > 1e-12:
            raise DomainError(f"J={self.J} incompatible with L={self.L}")
        if self.mJ is not None and (not _is_half_integer(self.mJ) or abs(self.mJ) > self.J):
            raise DomainError(f"mJ={self.mJ} incompatible with J={self.J}")
        if self.n_eff <= 0:
            raise DomainError(f"n_eff <= 0 for {self.label}")

    @property
    def defect(self) -> float:
        return self.species.defect(self.L, self.J)

    @property
    def n_eff(self) -> float:
        return self.n - self.defect

    @property
    def label(self) -> str:
        return f"{self.n}{l_letter(self.L)}{Fraction(self.J)}"

    def with_mj(self, mJ: float) -> "RydbergState":
        return RydbergState(self.species, self.n, self.L, self.J, mJ)

    def __str__(self) -> str:
        tag = f"{self.species.name} {self.label}"
        return tag if self.mJ is None else f"{tag} mJ={Fraction(self.mJ)}"


def l_letter(L: int) -> str:
    return L_LETTERS[L] if L < len(L_LETTERS) else f"({L})"


_STATE_RE = re.compile(r"^\s*(\d+)\s*([A-Za-z]|\(\d+\))\s*(\d+/2)?\s*$")


def parse_state(text: str, species: str | AtomSpecies = "Na", mJ: float | None = None) -> RydbergState:
    """Parse ``37S1/2``-style labels (case-insensitive letter, ``(L)`` for large L).

    A missing J defaults to ``L + 1/2`` (``L - 1/2`` is never implied).
    """
    m = _STATE_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse state label {text!r}")
    n = int(m.group(1))
    tok = m.group(2)
    L = int(tok[1:-1]) if tok.startswith("(") else L_LETTERS.index(tok.upper())
    J = float(Fraction(m.group(3))) if m.group(3) else L + 0.5
    return RydbergState(get_species(species), n, L, J, mJ)


def effective_quantum_number(state: RydbergState) -> float:
    return state.n_eff


def state_energy(state: RydbergState) -> float:
    """Energy E/h in Hz relative to the ionization limit (negative for bound states)."""
    return -CONSTANTS.rydberg_frequency / state.n_eff**2


def transition_frequency(lower: RydbergState, upper: RydbergState) -> float:
    """Signed frequency (Hz) of ``lower -> upper``; positive for absorption."""
    return state_energy(upper) - state_energy(lower)


def orbit_radius(n: int, L: int) -> float:
    """Mean hydrogenic orbit radius in units of a0."""
    if L < 0 or L >= n:
        raise DomainError(f"orbit_radius needs 0 <= L < n (got n={n}, L={L})")
    return 0.5 * (3 * n * n - L * (L + 1))


def max_principal_quantum_number(
    R: float, L: int = 0, circular: bool = False, tol: float = 1e-6, max_iter: int = 10_000
) -> float:
    """Largest n whose orbit stays below R/10 (R in metres).

    With ``circular=True`` the orbital momentum follows ``L = n - 1`` and the bound
    is found by fixed-point iteration.
    """
    if R <= 0:
        raise DomainError("R must be positive")
    base = R / (15.0 * A0)
    if not circular:
        return math.sqrt(base + L * (L + 1) / 3.0)
    n = math.sqrt(base)
    for _ in range(max_iter):
        n_new = math.sqrt(base + n * (n - 1.0) / 3.0)
        if abs(n_new - n) < tol:
            return n_new
        n = n_new
    raise DomainError("circular n_max iteration did not converge")


def estimate_dipole(n: float) -> float:
    """Order-of-magnitude transition dipole between neighbouring levels, in e*a0."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return float(n) ** 2


def sfi_critical_field(state: RydbergState | float) -> float:
    """Selective-field-ionization threshold in V/cm (accepts a state or an n_eff)."""
    n_eff = state.n_eff if isinstance(state, RydbergState) else float(state)
    if n_eff <= 0:
        raise DomainError("n_eff must be positive")
    return 3.2e8 * n_eff**-4


def lande_g(L: int, J: float, S: float = 0.5) -> float:
    return 1.0 + (J * (J + 1) + S * (S + 1) - L * (L + 1)) / (2.0 * J * (J + 1))


def zeeman_splitting_rate(state: RydbergState, delta_mj: float = 1.0) -> float:
    """Splitting between sublevels ``delta_mj`` apart, in MHz per gauss."""
    return lande_g(state.L, state.J) * CONSTANTS.bohr_magneton_mhz_per_gauss * delta_mj


def zeeman_total_splitting(state: RydbergState, field_gauss: float) -> float:
    """Spread between the extreme mJ sublevels (MHz) in a field of ``field_gauss``."""
    return zeeman_splitting_rate(state, 2 * state.J) * field_gauss
