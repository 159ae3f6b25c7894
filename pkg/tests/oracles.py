"""Reference implementations that share no code with the package.

Each oracle takes the slow, obvious route: analytic hydrogen functions,
Clebsch-Gordan decoupling into |L mL>|ms>, cyclic Jacobi rotations, and direct
ODE integration of small Schrodinger equations.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.special import factorial, genlaguerre
from sympy import Rational, S, sqrt as ssqrt
from sympy.physics.quantum.cg import CG


# --- hydrogen -------------------------------------------------------------------

def hydrogen_u(n: int, L: int, r: np.ndarray) -> np.ndarray:
    """Reduced radial function r R_nL(r) of hydrogen (atomic units)."""
    rho = 2.0 * r / n
    norm = math.sqrt((2.0 / n) ** 3 * factorial(n - L - 1) / (2.0 * n * factorial(n + L)))
    return r * norm * np.exp(-rho / 2) * rho**L * genlaguerre(n - L - 1, 2 * L + 1)(rho)


def hydrogen_radial_integral(n1: int, L1: int, n2: int, L2: int) -> float:
    """<n1 L1| r |n2 L2> by adaptive quadrature of the analytic functions."""
    upper = 4.0 * max(n1, n2) ** 2 + 60.0
    val, _ = quad(lambda r: hydrogen_u(n1, L1, r) * r * hydrogen_u(n2, L2, r), 0.0, upper,
                  limit=400, epsabs=1e-12)
    return val


# --- angular algebra ----------------------------------------------------------------

def _h(x: float):
    return Rational(int(round(2 * x)), 2)


def _orbital(L1: int, m1: int, L2: int, m2: int, q: int) -> float:
    """<L1 m1| C^1_q |L2 m2> for the unit-normalized spherical tensor."""
    c = CG(L2, m2, 1, q, L1, m1).doit() * CG(L2, 0, 1, 0, L1, 0).doit()
    return float(ssqrt(S(2 * L2 + 1) / S(2 * L1 + 1)) * c)


def cg_angular(L1: int, J1: float, m1: float, L2: int, J2: float, m2: float, q: int) -> float:
    """<L1 J1 m1| r_q / r |L2 J2 m2> by explicit decoupling of the spin."""
    total = 0.0
    for ms in (-0.5, 0.5):
        mL1, mL2 = m1 - ms, m2 - ms
        if abs(mL1) > L1 or abs(mL2) > L2:
            continue
        a = float(CG(L1, _h(mL1), S.Half, _h(ms), _h(J1), _h(m1)).doit())
        b = float(CG(L2, _h(mL2), S.Half, _h(ms), _h(J2), _h(m2)).doit())
        if a and b:
            total += a * b * _orbital(L1, int(round(mL1)), L2, int(round(mL2)), q)
    return total


# --- eigenvalues -------------------------------------------------------------------

def jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-15, sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi rotations on a real symmetric matrix; sorted eigenvalues."""
    a = np.array(A, dtype=float)
    n = len(a)
    scale = np.abs(a).max() or 1.0
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * ap - s * aq, s * ap + c * aq
    return np.sort(np.diag(a))


def two_by_two_eigenvalues(a: float, b: float, c: float) -> tuple[float, float]:
    """Eigenvalues of [[a, c], [c, b]] in closed form."""
    mean, half = 0.5 * (a + b), math.hypot(0.5 * (a - b), c)
    return mean - half, mean + half


# --- Schrodinger equation integrators ---------------------------------------------------

def _evolve(H: np.ndarray, psi0: np.ndarray, t: float, **kw) -> np.ndarray:
    def rhs(_, y):
        return -1j * (H @ y)
    sol = solve_ivp(rhs, (0.0, t), psi0.astype(complex), method="DOP853",
                    rtol=kw.get("rtol", 1e-11), atol=kw.get("atol", 1e-13))
    return sol.y[:, -1]


def two_level_ode(omega: float, delta: float, tau: float) -> float:
    """Upper population of a resonantly driven two-level atom (rotating frame)."""
    H = np.array([[0.0, omega / 2], [omega / 2, -delta]])
    return float(abs(_evolve(H, np.array([1.0, 0.0]), tau)[1]) ** 2)


def three_level_ode(omega_a: float, omega_b: float, Delta: float, delta: float,
                    tau: float) -> float:
    """Upper population of a ladder driven by one field at the half frequency.

    ``Delta`` is the intermediate-level detuning of the photon and ``delta`` the
    per-photon detuning from the two-photon resonance.
    """
    H = np.array([[0.0, omega_a / 2, 0.0],
                  [omega_a / 2, Delta, omega_b / 2],
                  [0.0, omega_b / 2, -2.0 * delta]])
    return float(abs(_evolve(H, np.array([1.0, 0.0, 0.0]), tau, rtol=1e-10)[2]) ** 2)


def exchange_ode(v: float, times: np.ndarray) -> np.ndarray:
    """Amplitudes of |12>, |21> under the exchange coupling ``v`` (rad/s)."""
    H = np.array([[0.0, v], [v, 0.0]])
    sol = solve_ivp(lambda _, y: -1j * (H @ y), (0.0, float(times[-1])),
                    np.array([1.0, 0.0], dtype=complex), t_eval=times, method="DOP853",
                    rtol=1e-12, atol=1e-14)
    return sol.y


# --- degenerate dipole-dipole manifold ---------------------------------------------

def degenerate_exchange_matrix() -> tuple[np.ndarray, list]:
    """S1/2 + P1/2 exchange block with both sublevels, in units of (radial^2 / R^3).

    Built from Cartesian dipole components: ``V = dx dx + dy dy - 2 dz dz``.
    Basis: |S ma, P mb> then |P ma, S mb>.
    """
    ms = (0.5, -0.5)
    # single-atom matrices on (S+1/2, S-1/2, P+1/2, P-1/2)
    levels = [(0, 0.5, m) for m in ms] + [(1, 0.5, m) for m in ms]
    sph = {}
    for q in (-1, 0, 1):
        M = np.zeros((4, 4))
        for i, (L1, J1, m1) in enumerate(levels):
            for j, (L2, J2, m2) in enumerate(levels):
                if abs(L1 - L2) == 1:
                    M[i, j] = cg_angular(L1, J1, m1, L2, J2, m2, q)
        sph[q] = M
    dx = (sph[-1] - sph[1]) / math.sqrt(2)
    dy = 1j * (sph[-1] + sph[1]) / math.sqrt(2)
    dz = sph[0]
    V = np.kron(dx, dx) + np.kron(dy, dy) - 2 * np.kron(dz, dz)
    idx, labels = [], []
    for a in range(2):
        for b in range(2):
            idx.append(a * 4 + (2 + b))
            labels.append(("SP", ms[a], ms[b]))
    for a in range(2):
        for b in range(2):
            idx.append((2 + a) * 4 + b)
            labels.append(("PS", ms[a], ms[b]))
    block = V[np.ix_(idx, idx)]
    return block, labels
