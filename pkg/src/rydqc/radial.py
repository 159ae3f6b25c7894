"""Coulomb-approximation radial wavefunctions and dipole matrix elements.

The radial equation ``u'' = [L(L+1)/r^2 - 2/r - 2E] u`` with ``E = -1/(2 n_eff^2)``
is integrated inward by Numerov's method on a grid uniform in ``x = sqrt(r)``.
With ``u = x^(1/2) chi`` the transformed equation has no first-derivative term::

    chi'' = [(2L + 1/2)(2L + 3/2) / x^2 - 8 + 4 x^2 / n_eff^2] chi

Grids share the lattice ``x_k = k h`` so any two wavefunctions with the same step
overlap point-for-point and matrix elements need no interpolation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable

import numba
import numpy as np
from sympy import Rational
from sympy.physics.wigner import wigner_3j, wigner_6j

from .errors import DomainError, IntegrationError
from .states import RydbergState, orbit_radius, transition_frequency

DEFAULT_STEP = 0.005  # in sqrt(a0)
INNER_TOLERANCE = 1e-3
MIN_POINTS_PER_WAVELENGTH = 10.0


def default_r_max(state: RydbergState) -> float:
    """Outer radius ``2.5 n_eff (n_eff + 15)``, never below twice the orbit radius."""
    ns = state.n_eff
    return max(2.5 * ns * (ns + 15.0), 2.0 * orbit_radius(state.n, state.L))


@dataclass(frozen=True)
class RadialGrid:
    """Grid ``x_k = k * step`` for ``k = 1..n_points`` with ``r = x^2`` in a0."""

    step: float
    n_points: int

    @classmethod
    def for_state(cls, state: RydbergState, step: float = DEFAULT_STEP,
                  r_max: float | None = None) -> "RadialGrid":
        r_max = default_r_max(state) if r_max is None else float(r_max)
        if step <= 0 or r_max <= 0:
            raise DomainError("grid step and r_max must be positive")
        return cls(float(step), int(math.ceil(math.sqrt(r_max) / step)) + 1)

    @property
    def x_values(self) -> np.ndarray:
        return np.arange(self.n_points + 1) * self.step

    @property
    def r_values(self) -> np.ndarray:
        return self.x_values[1:] ** 2

    @property
    def r_min(self) -> float:
        return self.step**2

    @property
    def r_max(self) -> float:
        return (self.n_points * self.step) ** 2

    def points_per_wavelength(self, state: RydbergState) -> float:
        """Minimum number of samples per local de Broglie wavelength.

        In x the local wavenumber is ``2 x k(r)``; its maximum sits at the smallest
        classically allowed radius.
        """
        x = self.x_values[1:]
        r = x * x
        k2 = 2.0 / r - 1.0 / state.n_eff**2 - state.L * (state.L + 1) / r**2
        kx = 2.0 * x * np.sqrt(np.clip(k2, 0.0, None))
        kmax = kx.max()
        return math.inf if kmax == 0 else 2.0 * math.pi / (kmax * self.step)

    def validate(self, state: RydbergState) -> None:
        if self.r_max < 2.0 * orbit_radius(state.n, state.L):
            raise DomainError(
                f"r_max={self.r_max:.1f} a0 is below twice the orbit radius of {state.label}")
        if self.points_per_wavelength(state) < MIN_POINTS_PER_WAVELENGTH:
            raise DomainError(f"grid step {self.step} under-samples {state.label}")


@numba.njit(cache=True, nogil=True)
def _numerov_inward(g, h, x_turn):
    """Integrate chi inward from the last grid point.

    Below the inner turning point the step loop stops as soon as |u| grows,
    which is where the irregular solution takes over. Returns the solution and
    the innermost retained index.
    """
    m = g.shape[0]
    chi = np.zeros(m)
    chi[m - 1] = 1e-30
    chi[m - 2] = 1e-30 * (1.0 + h * math.sqrt(max(g[m - 1], 0.0)))
    h12 = h * h / 12.0
    kend = 1
    for i in range(m - 2, 1, -1):
        chi[i - 1] = ((2.0 + 10.0 * h12 * g[i]) * chi[i]
                      - (1.0 - h12 * g[i + 1]) * chi[i + 1]) / (1.0 - h12 * g[i - 1])
        xi = (i - 1) * h
        if xi < x_turn:
            if abs(chi[i - 1]) * math.sqrt(xi) > abs(chi[i]) * math.sqrt(i * h):
                chi[i - 1] = 0.0
                kend = i
                break
    return chi, kend


@lru_cache(maxsize=4096)
def _solve(n_eff: float, L: int, step: float, n_points: int):
    h = step
    x = np.arange(n_points + 1) * h
    xs = x.copy()
    xs[0] = 1.0  # placeholder, g[0] is never used
    g = (2 * L + 0.5) * (2 * L + 1.5) / xs**2 - 8.0 + 4.0 * xs**2 / n_eff**2
    g[0] = 0.0
    if L > 0:
        disc = max(1.0 - L * (L + 1) / n_eff**2, 0.0)
        x_turn = math.sqrt(n_eff**2 * (1.0 - math.sqrt(disc)))
    else:
        x_turn = 0.0
    chi, kend = _numerov_inward(g, h, x_turn)
    chi[:kend] = 0.0
    u = np.sqrt(x) * chi
    umax = np.abs(u).max()
    if not np.isfinite(umax) or umax == 0.0:
        raise IntegrationError(f"Numerov solution vanished or overflowed (n_eff={n_eff}, L={L})")
    if abs(u[kend]) > 0.5 * INNER_TOLERANCE * umax:
        # the quantum-defect model is unphysical inside the core: drop everything
        # inside the innermost node so u really goes to zero there
        s = np.sign(chi[kend:])
        flips = np.nonzero(s[1:] * s[:-1] < 0)[0]
        if len(flips):
            j = kend + flips[0] + 1
            cut = j - 1 if abs(u[j - 1]) < abs(u[j]) else j
            chi[:cut] = 0.0
            kend = cut
    norm = 2.0 * np.sum(x**2 * chi**2) * h
    if not np.isfinite(norm) or norm <= 0.0:
        raise IntegrationError(f"normalization failed (n_eff={n_eff}, L={L})")
    chi /= math.sqrt(norm)
    u = np.sqrt(x) * chi
    # sign: outermost lobe positive
    outer = np.nonzero(np.abs(u) > 1e-3 * np.abs(u).max())[0][-1]
    if u[outer] < 0:
        chi = -chi
    chi.setflags(write=False)
    return chi, kend


def count_nodes(values: np.ndarray) -> int:
    v = values[values != 0.0]
    return int(np.count_nonzero(np.sign(v[1:]) != np.sign(v[:-1])))


def expected_node_range(state: RydbergState) -> tuple[int, int]:
    """Accepted node counts: ``n_eff - L - 1`` widened by one on each side."""
    target = state.n_eff - state.L - 1
    return max(math.floor(target) - 1, 0), math.ceil(target) + 1


@dataclass(frozen=True, eq=False)
class RadialWavefunction:
    state: RydbergState
    grid: RadialGrid
    chi: np.ndarray  # on x_values, zero inside the truncation point
    inner_index: int

    @property
    def r_values(self) -> np.ndarray:
        return self.grid.r_values

    @property
    def u_values(self) -> np.ndarray:
        """Reduced radial amplitude u(r) = r R(r) on ``r_values``."""
        x = self.grid.x_values
        return (np.sqrt(x) * self.chi)[1:]

    def norm(self) -> float:
        """``int u^2 dr`` evaluated as ``2 int x^2 chi^2 dx``."""
        x = self.grid.x_values
        return float(2.0 * np.sum(x**2 * self.chi**2) * self.grid.step)

    def node_count(self) -> int:
        return count_nodes(self.chi[self.inner_index:])

    def boundary_ratios(self) -> tuple[float, float]:
        """|u| at the innermost retained point and at r_max, relative to max|u|."""
        u = np.sqrt(self.grid.x_values) * self.chi
        umax = np.abs(u).max()
        return abs(u[self.inner_index]) / umax, abs(u[-1]) / umax


def integrate_radial(state: RydbergState, grid: RadialGrid | None = None,
                     check_nodes: bool = True) -> RadialWavefunction:
    """Normalized Coulomb-approximation wavefunction of ``state``.

    Raises
    ------
    IntegrationError
        If normalization fails or the node count is outside ``expected_node_range``.
    """
    grid = RadialGrid.for_state(state) if grid is None else grid
    grid.validate(state)
    chi, kend = _solve(round(state.n_eff, 12), state.L, grid.step, grid.n_points)
    wf = RadialWavefunction(state, grid, chi, kend)
    if check_nodes:
        lo, hi = expected_node_range(state)
        nodes = wf.node_count()
        if not lo <= nodes <= hi:
            raise IntegrationError(
                f"{state.label}: {nodes} nodes, expected {lo}..{hi}")
    return wf


def _overlap_r(wf1: RadialWavefunction, wf2: RadialWavefunction) -> float:
    if wf1.grid.step == wf2.grid.step:
        m = min(wf1.grid.n_points, wf2.grid.n_points) + 1
        x = wf1.grid.x_values[:m]
        return float(2.0 * np.sum(x**4 * wf1.chi[:m] * wf2.chi[:m]) * wf1.grid.step)
    # different steps: resample the second function onto the first grid
    u2 = np.interp(wf1.r_values, wf2.r_values, wf2.u_values, left=0.0, right=0.0)
    r = wf1.r_values
    dr = 2.0 * np.sqrt(r) * wf1.grid.step
    return float(np.sum(wf1.u_values * r * u2 * dr))


def radial_matrix_element(s1: RydbergState, s2: RydbergState,
                          step: float = DEFAULT_STEP) -> float:
    """Radial dipole integral ``int u1 r u2 dr`` in atomic units (e a0).

    Both states are integrated on the shared lattice of spacing ``step``; each
    keeps its own outer radius and the integral runs over the common range.
    """
    if abs(s1.L - s2.L) != 1:
        raise DomainError(f"dipole selection rule |dL|=1 violated: {s1.label}, {s2.label}")
    return _radial_cached(s1.species, s1.n, s1.L, s1.J, s2.species, s2.n, s2.L, s2.J, step)


@lru_cache(maxsize=65536)
def _radial_cached(sp1, n1, L1, J1, sp2, n2, L2, J2, step):
    wf1 = integrate_radial(RydbergState(sp1, n1, L1, J1), RadialGrid.for_state(
        RydbergState(sp1, n1, L1, J1), step))
    wf2 = integrate_radial(RydbergState(sp2, n2, L2, J2), RadialGrid.for_state(
        RydbergState(sp2, n2, L2, J2), step))
    return _overlap_r(wf1, wf2)


def _half(v: float) -> Rational:
    f = Fraction(v).limit_denominator(2)
    return Rational(f.numerator, f.denominator)


@lru_cache(maxsize=65536)
def _angular(L1: int, J1: float, m1: float, L2: int, J2: float, m2: float, q: int) -> float:
    """<L1 J1 m1| r_q / r |L2 J2 m2> for spin 1/2 via Wigner-Eckart."""
    if abs(L1 - L2) != 1 or m1 != m2 + q:
        return 0.0
    j1, j2, mm1, mm2 = _half(J1), _half(J2), _half(m1), _half(m2)
    s = Rational(1, 2)
    three_j = wigner_3j(j1, 1, j2, -mm1, q, mm2)
    if three_j == 0:
        return 0.0
    phase_m = (-1) ** int(j1 - mm1)
    six_j = wigner_6j(L1, j1, s, j2, L2, 1)
    phase_j = (-1) ** int(L1 + s + j2 + 1)
    reduced_l = (-1) ** L1 * math.sqrt((2 * L1 + 1) * (2 * L2 + 1)) * float(
        wigner_3j(L1, 1, L2, 0, 0, 0))
    value = (phase_m * float(three_j) * phase_j * math.sqrt(float((2 * j1 + 1) * (2 * j2 + 1)))
             * float(six_j) * reduced_l)
    return value


def angular_factor(s1: RydbergState, s2: RydbergState, q: int = 0) -> float:
    """Angular part of ``<s1| r_q |s2>`` for spherical component ``q``.

    ``q = 0`` is pi (z) light, ``q = +1/-1`` are sigma+/sigma-. Forbidden transitions
    return 0. Both states need ``mJ`` set.
    """
    if q not in (-1, 0, 1):
        raise DomainError("q must be -1, 0 or +1")
    if s1.mJ is None or s2.mJ is None:
        raise DomainError("angular_factor needs states with mJ")
    return _angular(s1.L, float(s1.J), float(s1.mJ), s2.L, float(s2.J), float(s2.mJ), q)


def dipole_matrix_element(s1: RydbergState, s2: RydbergState, q: int = 0) -> float:
    """Full ``<s1| r_q |s2>`` in atomic units."""
    ang = angular_factor(s1, s2, q)
    if ang == 0.0:
        return 0.0
    return ang * radial_matrix_element(s1, s2)


def sublevel_summed_strength(L1: int, J1: float, L2: int, J2: float) -> float:
    """``sum_{m2, q} |<L2 J2 m2| r_q/r |L1 J1 m1>|^2``, independent of m1."""
    m1 = float(J1)
    total = 0.0
    for q in (-1, 0, 1):
        m2 = m1 + q
        if abs(m2) <= J2:
            total += _angular(L2, float(J2), m2, L1, float(J1), m1, q) ** 2
    return total


CSV_COLUMNS = ("species", "n1", "L1", "J1", "n2", "L2", "J2", "radial_au", "frequency_GHz")


def matrix_element_rows(pairs: Iterable[tuple[RydbergState, RydbergState]]) -> list[dict]:
    rows = []
    for a, b in pairs:
        rows.append({
            "species": a.species.name, "n1": a.n, "L1": a.L, "J1": a.J,
            "n2": b.n, "L2": b.L, "J2": b.J,
            "radial_au": radial_matrix_element(a, b),
            "frequency_GHz": abs(transition_frequency(a, b)) / 1e9,
        })
    return rows


def write_matrix_element_csv(path: str | Path,
                             pairs: Iterable[tuple[RydbergState, RydbergState]]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(matrix_element_rows(pairs))
    return path
