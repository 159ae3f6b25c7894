import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from rydqc.radial import angular_factor
from rydqc.spectroscopy import (
    asymptotic_narrowing_ratio,
    narrowing_ratio,
    one_photon_population,
    pattern_probability,
    two_photon_population,
)
from rydqc.states import (
    SODIUM,
    RydbergState,
    max_principal_quantum_number,
    orbit_radius,
    sfi_critical_field,
)

finite = dict(allow_nan=False, allow_infinity=False)
rates = st.floats(0, 1e7, **finite)
detunings = st.floats(-1e7, 1e7, **finite)
times = st.floats(0, 1e-5, **finite)


@given(rates, detunings, times)
def test_one_photon_bounded(w, d, t):
    assert 0.0 <= one_photon_population(w, d, t) <= 1.0


@given(rates, detunings, detunings, times)
def test_two_photon_bounded(w, d, d0, t):
    assert 0.0 <= two_photon_population(w, d, d0, t) <= 1.0


@given(st.floats(0, 1, **finite), st.integers(1, 40))
def test_binomial_completeness(rho, N):
    total = sum(pattern_probability(rho, N, k) for k in range(N + 1))
    assert abs(total - 1.0) < 1e-9


@given(st.integers(5, 10_000))
def test_narrowing_asymptotics(N):
    rel = abs(asymptotic_narrowing_ratio(N) / narrowing_ratio(N) - 1.0)
    assert rel < 0.05
    if N >= 20:
        assert rel < 0.01


@given(st.integers(2, 150), st.integers(0, 148))
def test_orbit_radius_monotone_in_n(n, L):
    if L < n:
        assert orbit_radius(n + 1, L) > orbit_radius(n, L)


@given(st.floats(1e-7, 1e-3, **finite), st.floats(1.001, 10, **finite))
def test_n_max_monotone_in_spacing(R, factor):
    assert max_principal_quantum_number(R * factor) > max_principal_quantum_number(R)


@given(st.floats(5, 300, **finite))
def test_sfi_quartic_invariant(n_eff):
    assert math.isclose(sfi_critical_field(n_eff) * n_eff**4,
                        sfi_critical_field(30.0) * 30.0**4, rel_tol=1e-12)


def _fine_level(draw, L):
    return L + draw(st.sampled_from([-0.5, 0.5])) if L else 0.5


@st.composite
def dipole_pairs(draw):
    n = draw(st.integers(20, 60))
    L1 = draw(st.integers(0, 3))
    L2 = L1 + draw(st.sampled_from([-1, 1])) if L1 else 1
    J1, J2 = _fine_level(draw, L1), _fine_level(draw, L2)
    m1 = draw(st.sampled_from(list(np.arange(-J1, J1 + 1))))
    m2 = draw(st.sampled_from(list(np.arange(-J2, J2 + 1))))
    return (RydbergState(SODIUM, n, L1, J1, float(m1)),
            RydbergState(SODIUM, n, L2, J2, float(m2)))


@settings(max_examples=60, deadline=None)
@given(dipole_pairs(), st.integers(-1, 1))
def test_angular_factor_hermiticity(pair, q):
    a, b = pair
    assert math.isclose(angular_factor(a, b, q), (-1) ** q * angular_factor(b, a, -q),
                        rel_tol=1e-12, abs_tol=1e-14)


@settings(max_examples=60, deadline=None)
@given(dipole_pairs(), st.integers(-1, 1))
def test_angular_factor_selection_rule(pair, q):
    a, b = pair
    if a.mJ != b.mJ + q:
        assert angular_factor(a, b, q) == 0.0
