"""Command-line dispatch, manifests and golden-file regressions.

Regenerate the golden files with ``python tests/test_cli.py`` after an
intentional change of numerical output.
"""

import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import pytest

from rydqc import cli
from rydqc.errors import IntegrationError

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "spectrum": (["spectrum", "--points", "21"], "spectrum.csv"),
    "spectrum_two_photon": (["spectrum", "--kind", "two-photon", "--points", "21"],
                            "spectrum.csv"),
    "multi_atom": (["multi-atom", "--N", "2", "--kind", "two-photon", "--points", "21"],
                   "multi_atom.csv"),
    "beam_one_photon": (["beam", "--samples", "1000", "--points", "21", "--seed", "5"],
                        "beam.csv"),
    "beam_two_photon_events": (["beam", "--kind", "two-photon", "--samples", "1000", "--points",
                                "21", "--atoms", "3", "--seed", "5"], "beam.csv"),
    "stark_map": (["stark-map", "--n-min", "36", "--n-max", "37", "--points", "11",
                   "--field-max", "2"], "stark_map.csv"),
}


def _run(argv, out):
    return cli.main([*argv, "--out", str(out)])


def _read(path):
    lines = Path(path).read_text().splitlines()
    meta = [line for line in lines if line.startswith("#")]
    rows = list(csv.reader(line for line in lines if not line.startswith("#")))
    return meta, rows


def _same_cell(a, b):
    if a == b:
        return True
    try:
        x, y = float(a), float(b)
    except ValueError:
        return False
    if math.isnan(x) and math.isnan(y):
        return True
    return math.isclose(x, y, rel_tol=1e-8, abs_tol=1e-12)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_files(name, tmp_path):
    argv, fname = CASES[name]
    assert _run(argv, tmp_path) == 0
    meta, rows = _read(tmp_path / fname)
    gmeta, grows = _read(GOLDEN / f"{name}.csv")
    assert meta == gmeta
    assert rows[0] == grows[0]
    assert len(rows) == len(grows)
    for r, g in zip(rows[1:], grows[1:]):
        assert all(_same_cell(a, b) for a, b in zip(r, g)), (r, g)


def test_headers_carry_units(tmp_path):
    for argv, fname in CASES.values():
        _run(argv, tmp_path)
        header = _read(tmp_path / fname)[1][0]
        numeric = [h for h in header if h not in ("pattern_label", "curve_index",
                                                  "zero_field_label", "probability")]
        assert all("_" in h for h in numeric), header


def test_manifest_and_reproducibility(tmp_path):
    argv = ["beam", "--samples", "1000", "--points", "11", "--seed", "2"]
    assert _run(argv, tmp_path / "a") == 0
    assert _run(argv, tmp_path / "b") == 0
    a = (tmp_path / "a" / "beam.csv").read_bytes()
    assert a == (tmp_path / "b" / "beam.csv").read_bytes()
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert man["subcommand"] == "beam" and man["seed"] == 2
    assert man["outputs"]["beam.csv"] == hashlib.sha256(a).hexdigest()
    assert man["parameters"]["samples"] == 1000 and "version" in man and "timestamp" in man
    man_b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert man_b["outputs"] == man["outputs"]


def test_different_seed_changes_output(tmp_path):
    _run(["beam", "--samples", "1000", "--points", "11", "--seed", "1"], tmp_path / "a")
    _run(["beam", "--samples", "1000", "--points", "11", "--seed", "2"], tmp_path / "b")
    assert (tmp_path / "a" / "beam.csv").read_bytes() != (tmp_path / "b" / "beam.csv").read_bytes()


def test_dipole_example(tmp_path, capsys):
    assert _run(["dipole", "--species", "Na", "--from", "50S1/2", "--to", "50P1/2"],
                tmp_path) == 0
    _, rows = _read(tmp_path / "dipole.csv")
    row = dict(zip(rows[0], rows[1]))
    assert float(row["radial_au"]) == pytest.approx(2690, rel=0.03)
    assert "a.u." in capsys.readouterr().out


def test_lowercase_state_syntax(tmp_path):
    assert _run(["dipole", "--from", "50s1/2", "--to", "50p1/2"], tmp_path) == 0


def test_narrowing_example(tmp_path):
    assert _run(["narrowing", "--N", "5"], tmp_path) == 0
    _, rows = _read(tmp_path / "narrowing.csv")
    row = dict(zip(rows[0], rows[1]))
    assert float(row["exact_ratio"]) == pytest.approx(2.59, abs=0.005)
    assert float(row["asymptotic_ratio"]) == pytest.approx(2.69, abs=0.005)


def test_qpg_preset(tmp_path):
    assert _run(["qpg", "--preset", "paper-optimal", "--steps", "2000"], tmp_path) == 0
    data = json.loads((tmp_path / "qpg.json").read_text())
    table = data["truth_table"]
    assert abs(table["11"]["phase_rad"] - math.pi) < 0.05
    assert all(abs(table[k]["phase_rad"]) < 0.05 for k in ("00", "01", "10"))


def test_feasibility_outputs(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 50, "pulse_duration": 5e-9, "gate_time": 50e-9}))
    assert _run(["feasibility", "--config", str(cfg)], tmp_path) == 0
    data = json.loads((tmp_path / "feasibility.json").read_text())
    power = next(e for e in data["entries"] if e["name"] == "laser power per atom")
    assert power["status"] == "fail"
    assert (tmp_path / "feasibility.txt").read_text().rstrip().endswith("FAIL")


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"points": 7, "n": 37}))
    assert _run(["spectrum", "--config", str(cfg), "--points", "9"], tmp_path) == 0
    _, rows = _read(tmp_path / "spectrum.csv")
    assert len({r[0] for r in rows[1:]}) == 9
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert _run(["spectrum", "--config", str(cfg)], tmp_path) == 2


@pytest.mark.parametrize("argv", [
    ["nosuch"],
    ["dipole", "--from", "50S1/2"],
    ["dipole", "--from", "50X1/2", "--to", "50P1/2"],
    ["spectrum", "--bogus-flag"],
    ["beam", "--samples", "10"],
    ["sfi-sim", "--counts", "1,-2"],
    ["feasibility", "--config", "/nonexistent/cfg.json"],
])
def test_input_errors_exit_2(argv, tmp_path):
    assert _run(argv, tmp_path) == 2


def test_numerical_failure_exit_3(tmp_path, monkeypatch):
    def boom(*_, **__):
        raise IntegrationError("diverged")
    monkeypatch.setattr(cli, "matrix_element_rows", boom)
    assert _run(["dipole", "--from", "50S1/2", "--to", "50P1/2"], tmp_path) == 3


@pytest.mark.parametrize("argv,fname", [
    (["state", "--state", "37S1/2", "--spacing-um", "5"], "state.json"),
    (["lifetime", "--state", "30S1/2"], "lifetime.json"),
    (["pair", "--points", "21"], "pair.csv"),
    (["sfi-sim", "--counts", "0,1,2,3"], "sfi_events.jsonl"),
])
def test_remaining_subcommands(argv, fname, tmp_path):
    assert _run(argv, tmp_path) == 0
    assert (tmp_path / fname).stat().st_size > 0
    assert fname in json.loads((tmp_path / "manifest.json").read_text())["outputs"]


def _regenerate():
    import tempfile
    GOLDEN.mkdir(exist_ok=True)
    for name, (argv, fname) in CASES.items():
        with tempfile.TemporaryDirectory() as tmp:
            assert _run(argv, tmp) == 0
            (GOLDEN / f"{name}.csv").write_bytes((Path(tmp) / fname).read_bytes())


if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).parent))
    _regenerate()
