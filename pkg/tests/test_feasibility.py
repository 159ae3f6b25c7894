import json
import math

import pytest

from rydqc.constants import A0
from rydqc.errors import ConfigurationError, DomainError
from rydqc.feasibility import (
    FAIL,
    PASS,
    PRESETS,
    ExperimentConfig,
    bbr_verdict,
    feasibility_report,
    pulse_intensity,
    zeeman_requirement,
)
from rydqc.states import RUBIDIUM, SODIUM, RydbergState

from conftest import na

THREE_HALF_PI = 1.5 * math.pi
NAMES = ["atom spacing", "collision bound", "gate time", "pulse to gate ratio",
         "laser power per atom", "spectral width", "Zeeman splitting", "Stark sensitivity",
         "blackbody radiation", "field ionization"]


def _upper(species, n):
    return RydbergState(species, n, 1, 1.5, 1.5)


def test_uv_intensities_within_factor_three():
    na_i = pulse_intensity(SODIUM.ground_state, _upper(SODIUM, 50), THREE_HALF_PI, 5e-9).intensity
    rb_i = pulse_intensity(RUBIDIUM.ground_state, _upper(RUBIDIUM, 50), THREE_HALF_PI,
                           5e-9).intensity
    assert 120e6 / 3 <= na_i <= 120e6 * 3
    assert 30e6 / 3 <= rb_i <= 30e6 * 3


@pytest.mark.parametrize("species", [SODIUM, RUBIDIUM])
def test_fifty_ns_power_near_milliwatt(species):
    req = pulse_intensity(species.ground_state, _upper(species, 30), THREE_HALF_PI, 50e-9)
    assert 0.5e-3 <= req.power <= 5e-3


def test_intensity_power_law():
    lo, up = SODIUM.ground_state, _upper(SODIUM, 40)
    a = pulse_intensity(lo, up, math.pi, 10e-9)
    b = pulse_intensity(lo, up, 2 * math.pi, 5e-9)
    assert b.intensity == pytest.approx(16 * a.intensity, rel=1e-12)
    assert b.power / b.intensity == pytest.approx(math.pi * (0.5e-4) ** 2, rel=1e-12)


def test_forbidden_pulse_raises():
    with pytest.raises(DomainError):
        pulse_intensity(SODIUM.ground_state, RydbergState(SODIUM, 30, 0, 0.5, 0.5), math.pi, 5e-9)
    with pytest.raises(DomainError):
        pulse_intensity(SODIUM.ground_state, _upper(SODIUM, 30), math.pi, 0.0)


def test_zeeman_requirement():
    assert zeeman_requirement(10, na(30, 1, 0.5)) == pytest.approx(10.7, abs=0.1)
    assert zeeman_requirement(10, na(30, 0, 0.5)) == pytest.approx(3.6, abs=0.05)
    assert zeeman_requirement(0, na(30, 1, 0.5)) == 0.0


def test_bbr_verdicts():
    states = (na(30, 0, 0.5), na(30, 1, 0.5))
    v = bbr_verdict(states, 500e-9, 300.0)
    assert v.passed and v.margin > 1
    assert 15e-6 <= v.min_effective_lifetime <= 25e-6
    assert not bbr_verdict(states, 10e-6, 300.0).passed
    assert bbr_verdict(states, 500e-9, 0.0).margin > v.margin
    with pytest.raises(DomainError):
        bbr_verdict(states, 0.0, 300.0)


def test_optimal_preset_passes_everything():
    rep = feasibility_report(PRESETS["paper-optimal"])
    assert [e.name for e in rep.entries] == NAMES
    assert all(e.status == PASS for e in rep.entries), rep.to_text()
    assert rep.passed
    assert sorted({e.item for e in rep.entries}) == list(range(1, 9))


def test_fast_high_n_fails_on_power():
    e = feasibility_report(PRESETS["fast-high-n"]).entry("laser power per atom")
    assert e.status == FAIL
    assert 300 <= e.value <= 3000  # mW, the ~1 W level


def test_dense_lattice_fails_collision_bound():
    e = feasibility_report(PRESETS["dense-lattice"]).entry("collision bound")
    assert e.status == FAIL
    assert e.value == pytest.approx(25, abs=1)


def test_collision_entry_flips_at_n_max():
    R = 15.0 * A0 * 40**2 * (1 + 1e-12)
    at = feasibility_report(ExperimentConfig(n=40, spacing=R)).entry("collision bound")
    above = feasibility_report(ExperimentConfig(n=41, spacing=R)).entry("collision bound")
    assert at.status == PASS and above.status == FAIL


def test_report_deterministic_and_serializable():
    cfg = ExperimentConfig(n=35, spacing=6e-6)
    a, b = feasibility_report(cfg), feasibility_report(cfg)
    assert a.to_json() == b.to_json()
    data = json.loads(a.to_json())
    assert data["config"]["n"] == 35 and len(data["entries"]) == len(NAMES)
    text = a.to_text()
    assert text.splitlines()[-1].startswith("overall:")
    assert len(text.splitlines()) == len(NAMES) + 1


def test_bad_states_become_failed_entries():
    rep = feasibility_report(ExperimentConfig(s_state="30D5/2"))
    assert not rep.passed
    assert any(e.status == FAIL and e.value is None for e in rep.entries)


def test_config_validation(tmp_path):
    with pytest.raises(ConfigurationError):
        ExperimentConfig(spacing=-1.0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_mapping({"bogus": 1})
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 32, "species": "Rb"}))
    cfg = ExperimentConfig.from_json(path)
    assert cfg.n == 32 and cfg.atom is RUBIDIUM
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_json(tmp_path / "missing.json")
