"""Dipole-dipole coupled Rydberg pairs: exchange dynamics, phase gate, blockade."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np
import scipy.linalg

from .constants import A0, EA0, EPS0, H, HBAR
from .errors import DomainError
from .radial import angular_factor, radial_matrix_element
from .states import RydbergState, orbit_radius, state_energy

BLOCKADE_THRESHOLD = 10.0


def au_to_dipole(d_au: float) -> float:
    """Dipole in atomic units (e a0) to C m."""
    return d_au * EA0


def dipole_dipole_shift(d_z: float, R: float) -> float:
    """``V_dd / h = 2 d_z^2 / (4 pi eps0 R^3 h)`` in Hz; ``d_z`` in C m, ``R`` in m."""
    if R <= 0:
        raise DomainError("separation must be positive")
    if d_z == 0:
        raise DomainError("d_z must be non-zero")
    return 2.0 * d_z**2 / (4.0 * math.pi * EPS0 * R**3 * H)


def exchange_time(v_dd_hz: float) -> float:
    """Time ``T = pi hbar / V_dd`` (s) for one full exchange cycle."""
    if v_dd_hz <= 0:
        raise DomainError("V_dd must be positive")
    return math.pi * HBAR / (v_dd_hz * H)


def exchange_evolution(v_dd_hz: float, t: float | np.ndarray):
    """Amplitudes ``(c_12, c_21)`` of a pair started in ``|12>``."""
    phase = 2.0 * math.pi * v_dd_hz * np.asarray(t, dtype=float)
    return np.cos(phase) + 0j, -1j * np.sin(phase)


@dataclass(frozen=True)
class PairState:
    energy_hz: float  # relative to the unperturbed pair
    label: str  # "+" (symmetric) or "-" (antisymmetric)
    vector: tuple[float, float]  # components on (|12>, |21>)


def pair_eigenstates(state1: RydbergState, state2: RydbergState, R: float) -> list[PairState]:
    """Symmetric and antisymmetric pair states with energies ``+/- V_dd``.

    A pair without a z dipole between the two states gives zero splitting.
    """
    if state1.mJ is None or state2.mJ is None:
        raise DomainError("pair states need mJ")
    d_au = 0.0
    if abs(state1.L - state2.L) == 1 and state1.mJ == state2.mJ:
        d_au = angular_factor(state1, state2, 0) * radial_matrix_element(state1, state2)
    v = 0.0 if d_au == 0.0 else dipole_dipole_shift(au_to_dipole(d_au), R)
    s = 1.0 / math.sqrt(2.0)
    return [PairState(+v, "+", (s, s)), PairState(-v, "-", (s, -s))]


@dataclass(frozen=True, eq=False)
class PairBasis:
    """Tensor-product basis of two atoms separated by ``R`` along z."""

    single_atom_states: tuple[RydbergState, ...]
    R: float  # m

    def __post_init__(self):
        if any(s.mJ is None for s in self.single_atom_states):
            raise DomainError("pair basis states need mJ")
        biggest = max(orbit_radius(s.n, s.L) for s in self.single_atom_states) * A0
        if self.R <= 10.0 * biggest:
            raise DomainError(
                f"R = {self.R:.3g} m is inside the overlap regime (10 x orbit = {10 * biggest:.3g} m)")

    @property
    def dimension(self) -> int:
        return len(self.single_atom_states) ** 2

    @property
    def pair_states(self) -> list[tuple[RydbergState, RydbergState]]:
        return list(product(self.single_atom_states, repeat=2))

    @property
    def labels(self) -> list[str]:
        return [f"|{a.label}({a.mJ:+g}) {b.label}({b.mJ:+g})>" for a, b in self.pair_states]


def spherical_dipoles(states: Sequence[RydbergState]) -> dict[int, np.ndarray]:
    """Single-atom ``<i| d_q |j>`` (a.u.) for q = -1, 0, +1."""
    m = len(states)
    out = {q: np.zeros((m, m)) for q in (-1, 0, 1)}
    for i, a in enumerate(states):
        for j, b in enumerate(states):
            if abs(a.L - b.L) != 1:
                continue
            for q in (-1, 0, 1):
                ang = angular_factor(a, b, q)
                if ang:
                    out[q][i, j] = ang * radial_matrix_element(a, b)
    return out


def dipole_dipole_operator(states: Sequence[RydbergState], z_only: bool = False) -> np.ndarray:
    """``(d_a . d_b - 3 d_az d_bz)`` in a.u. with z along the interatomic axis.

    In spherical components this is ``-2 d0 d0 - d+1 d-1 - d-1 d+1``. With
    ``z_only`` only the first term is kept.
    """
    d = spherical_dipoles(states)
    v = -2.0 * np.kron(d[0], d[0])
    if not z_only:
        v -= np.kron(d[1], d[-1]) + np.kron(d[-1], d[1])
    return v


@dataclass(frozen=True, eq=False)
class PairHamiltonian:
    basis: PairBasis
    matrix: np.ndarray  # Hz
    includes_dd: bool


def build_pair_hamiltonian(basis: PairBasis, include_dd: bool = True,
                           z_only: bool = False) -> PairHamiltonian:
    """Pair energies (relative to their mean) plus the dipole-dipole coupling, in Hz."""
    e = np.array([state_energy(a) + state_energy(b) for a, b in basis.pair_states])
    mat = np.diag(e - e.mean())
    if include_dd:
        scale = EA0**2 / (4.0 * math.pi * EPS0 * basis.R**3 * H)
        mat = mat + scale * dipole_dipole_operator(basis.single_atom_states, z_only)
    return PairHamiltonian(basis, 0.5 * (mat + mat.T), include_dd)


# --- gate simulation -----------------------------------------------------------

def rk4_propagate(hamiltonian, psi0: np.ndarray, t0: float, t1: float, max_step: float):
    """Fixed-step RK4 for ``i dpsi/dt = H(t) psi`` (H in rad/s); psi may be a matrix."""
    n = max(int(math.ceil((t1 - t0) / max_step)), 1)
    dt = (t1 - t0) / n
    psi = np.array(psi0, dtype=complex)
    t = t0
    for _ in range(n):
        k1 = -1j * (hamiltonian(t) @ psi)
        k2 = -1j * (hamiltonian(t + dt / 2) @ (psi + dt / 2 * k1))
        k3 = -1j * (hamiltonian(t + dt / 2) @ (psi + dt / 2 * k2))
        k4 = -1j * (hamiltonian(t + dt) @ (psi + dt * k3))
        psi = psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    return psi


# single-atom levels for the gate: hyperfine qubit |0>, |1> and the Rydberg pair
G0, G1, RS, RP = 0, 1, 2, 3
COMPUTATIONAL = {"00": (G0, G0), "01": (G0, G1), "10": (G1, G0), "11": (G1, G1)}


def _gate_operators():
    eye = np.eye(4)
    drive_s = np.zeros((4, 4))
    drive_s[G1, RS] = drive_s[RS, G1] = 1.0
    drive_p = np.zeros((4, 4))
    drive_p[G1, RP] = drive_p[RP, G1] = 1.0
    exch = np.zeros((16, 16))
    sp, ps = RS * 4 + RP, RP * 4 + RS
    exch[sp, ps] = exch[ps, sp] = 1.0
    return np.kron(drive_s, eye), np.kron(eye, drive_p), exch


@dataclass(frozen=True)
class GateResult:
    input_label: str
    final_amplitude: complex
    acquired_phase: float  # rad, relative to |00>
    leakage: float


@dataclass(frozen=True)
class GateSchedule:
    """Square pulses with coupling ``hbar Omega (|1><r| + h.c.)``.

    With that convention the excited population is ``sin^2(Omega t)``, the
    excitation pulse has ``Omega t = pi/2`` and the return pulse ``3 pi/2``.
    """

    excite: float  # s
    free: float  # s
    deexcite: float  # s
    rabi: float  # rad/s, excitation pulse
    rabi_return: float  # rad/s

    @property
    def total(self) -> float:
        return self.excite + self.free + self.deexcite


def gate_schedule(v_dd_hz: float, ratio: float, compensate: bool = True) -> GateSchedule:
    """Pulse timings for pulse duration ``T / ratio``.

    The return pulse has the same duration as the excitation pulse and three
    times its Rabi frequency. With ``compensate`` the free interval is shortened
    so that the pulse centres are ``T`` apart, which accounts for the exchange
    accumulated while the pulses are on.
    """
    if ratio <= 0:
        raise DomainError("pulse ratio must be positive")
    T = exchange_time(v_dd_hz) if v_dd_hz > 0 else 1.0
    tau = T / ratio
    rabi = (math.pi / 2) / tau
    free = T - tau if compensate else T
    if free < 0:
        raise DomainError("pulses longer than the exchange time; raise the ratio")
    return GateSchedule(tau, free, tau, rabi, 3.0 * rabi)


def qpg_sequence(v_dd_hz: float, ratio: float = 10.0, compensate: bool = True,
                 steps_per_t: int = 10_000, schedule: GateSchedule | None = None
                 ) -> list[GateResult]:
    """Simulate the conditional phase gate for the four computational inputs.

    Atom a is driven ``|1> <-> nS`` and atom b ``|1> <-> nP``; the dipole-dipole
    term swaps ``|nS nP> <-> |nP nS>`` at rate ``V_dd / hbar`` throughout.
    Phases are relative to the untouched ``|00>`` input.
    """
    sched = gate_schedule(v_dd_hz, ratio, compensate) if schedule is None else schedule
    drive_a, drive_b, exch = _gate_operators()
    v = 2.0 * math.pi * v_dd_hz
    T = exchange_time(v_dd_hz) if v_dd_hz > 0 else sched.total
    step = T / steps_per_t
    h_dd = v * exch
    h_exc = sched.rabi * (drive_a + drive_b) + h_dd
    h_ret = sched.rabi_return * (drive_a + drive_b) + h_dd
    cols = [a * 4 + b for a, b in COMPUTATIONAL.values()]
    psi = np.eye(16, dtype=complex)[:, cols]
    t1 = sched.excite
    t2 = t1 + sched.free
    psi = rk4_propagate(lambda t: h_exc, psi, 0.0, t1, step)
    if sched.free > 0:
        psi = rk4_propagate(lambda t: h_dd, psi, t1, t2, step)
    psi = rk4_propagate(lambda t: h_ret, psi, t2, t2 + sched.deexcite, step)
    ref = psi[cols[0], 0]
    out = []
    for k, (label, _) in enumerate(COMPUTATIONAL.items()):
        amp = complex(psi[cols[k], k])
        phase = cmath.phase(amp / ref) if abs(ref) > 0 else cmath.phase(amp)
        norm = float(np.vdot(psi[:, k], psi[:, k]).real)
        out.append(GateResult(label, amp, phase, norm - abs(amp) ** 2))
    return out


def phase_error(results: Sequence[GateResult]) -> float:
    """Largest deviation from the ideal phases (0, 0, 0, pi)."""
    ideal = {"00": 0.0, "01": 0.0, "10": 0.0, "11": math.pi}
    return max(abs(wrap_phase(r.acquired_phase - ideal[r.input_label])) for r in results)


def gate_error(results: Sequence[GateResult]) -> float:
    """Phase error plus the worst leakage; zero for the ideal gate."""
    return phase_error(results) + max(r.leakage for r in results)


def wrap_phase(phi: float | np.ndarray):
    return (np.asarray(phi) + np.pi) % (2 * np.pi) - np.pi


# --- degenerate sublevels -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class DegenerateResult:
    times: np.ndarray  # s
    amplitudes: np.ndarray  # (n_configs, n_times) return amplitudes
    configurations: list[tuple[float, float]]  # (mJ of atom a in nS, mJ of atom b in nP)
    exchange_eigenvalues_hz: np.ndarray  # distinct eigenvalues of the M = 0 block
    mean_return: np.ndarray  # |<c>|^2 with <c> the configuration-averaged amplitude
    mean_phase: np.ndarray  # phase of the averaged amplitude
    pi_phase_reached: bool

    @property
    def n_exchange_levels(self) -> int:
        return len(self.exchange_eigenvalues_hz)


def _distinct(values: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    vals = np.sort(values)
    scale = max(np.abs(vals).max(), 1e-300)
    keep = [vals[0]]
    for v in vals[1:]:
        if abs(v - keep[-1]) > rtol * scale:
            keep.append(v)
    return np.array(keep)


def degenerate_pair_evolution(s_state: RydbergState, p_state: RydbergState, R: float,
                              times: np.ndarray, return_threshold: float = 0.99,
                              phase_tolerance: float = 0.1,
                              sublevels: Sequence[float] = (0.5, -0.5)) -> DegenerateResult:
    """Exchange dynamics of nS1/2 + nP1/2 with all mJ sublevels kept.

    Each atom carries both sublevels of both levels, the full tensor
    dipole-dipole operator couples them, and an unpolarized start averages over
    the four ``(mJ_a, mJ_b)`` configurations of ``|nS nP>``. A pi phase is
    "reached" only when the return probability exceeds ``return_threshold``
    while the return phase is within ``phase_tolerance`` of pi for every
    configuration at once. A single ``sublevels`` entry gives the
    non-degenerate reduction.
    """
    single = [s_state.with_mj(m) for m in sublevels] + [p_state.with_mj(m) for m in sublevels]
    basis = PairBasis(tuple(single), R)
    ham = build_pair_hamiltonian(basis, include_dd=True)
    k = len(sublevels)
    s_idx, p_idx = range(k), range(k, 2 * k)
    m_of = [st.mJ for st in single]
    # exchange manifold: one atom in nS, the other in nP
    manifold = [i * 2 * k + j for i in s_idx for j in p_idx] + [
        i * 2 * k + j for i in p_idx for j in s_idx]
    block = ham.matrix[np.ix_(manifold, manifold)]
    block = block - np.mean(np.diag(block)) * np.eye(len(manifold))
    evals, evecs = scipy.linalg.eigh(block)
    m_tot = np.array([m_of[idx // (2 * k)] + m_of[idx % (2 * k)] for idx in manifold])
    zero_m = np.isclose(m_tot, 0.0)
    sub = block[np.ix_(zero_m, zero_m)] if zero_m.any() else block
    distinct = _distinct(scipy.linalg.eigvalsh(sub)) if len(sub) else np.array([])
    configs = [(m_of[i], m_of[j]) for i in s_idx for j in p_idx]
    times = np.asarray(times, dtype=float)
    omega = 2.0 * math.pi * evals
    phases = np.exp(-1j * np.outer(omega, times))
    amps = []
    for c in range(len(configs)):
        coeff = evecs[c, :]  # configuration c is manifold[c]
        amps.append((np.abs(coeff) ** 2) @ phases)
    amps = np.array(amps)
    mean_amp = amps.mean(axis=0)
    mean_ret = np.abs(mean_amp) ** 2
    mean_phase = np.angle(mean_amp)
    ok = (np.abs(amps) ** 2 > return_threshold) & (
        np.abs(wrap_phase(np.angle(amps) - np.pi)) < phase_tolerance)
    hit = ok.all(axis=0)
    return DegenerateResult(times, amps, configs, distinct, mean_ret, mean_phase, bool(hit.any()))


# --- blockade ---------------------------------------------------------------

@dataclass(frozen=True)
class BlockadeResult:
    ratio: float
    satisfied: bool
    at_boundary: bool
    threshold: float = BLOCKADE_THRESHOLD


def blockade_condition(v_dd_hz: float, tau: float,
                       threshold: float = BLOCKADE_THRESHOLD) -> BlockadeResult:
    """Compare the interaction shift with the pulse spectral width, ``(V_dd/h) tau``."""
    if tau <= 0:
        raise DomainError("pulse duration must be positive")
    ratio = abs(v_dd_hz) * tau
    boundary = math.isclose(ratio, threshold, rel_tol=1e-9)
    return BlockadeResult(ratio, ratio >= threshold, boundary, threshold)
