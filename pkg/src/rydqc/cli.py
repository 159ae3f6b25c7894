"""Command-line entry point: ``rydqc <subcommand> [options]``.

Every subcommand writes its payload (CSV or JSON) into ``--out`` together with
``manifest.json`` recording parameters, seed, version and SHA-256 digests of
the payload files, and prints a short summary. Exit codes: 0 success, 2 input
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .beam import (
    BeamConfig,
    DetectionModel,
    beam_monte_carlo,
    calibrate_drive,
    line_center,
    simulate_events,
    sodium_setup,
    sorted_multi_atom_spectra,
    sfi_counting_sim,
)
from .errors import ConfigurationError, DomainError, IntegrationError, NumericalError
from .feasibility import PRESETS, ExperimentConfig, feasibility_report
from .lifetimes import lifetime
from .pair import (
    au_to_dipole,
    dipole_dipole_shift,
    exchange_evolution,
    exchange_time,
    qpg_sequence,
)
from .radial import angular_factor, matrix_element_rows, radial_matrix_element
from .spectroscopy import (
    ONE_PHOTON,
    TWO_PHOTON,
    asymptotic_narrowing_ratio,
    multi_atom_spectrum,
    narrowing_ratio,
)
from .stark import StarkBasis, stark_map
from .states import (
    max_principal_quantum_number,
    orbit_radius,
    parse_state,
    sfi_critical_field,
    state_energy,
    zeeman_splitting_rate,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class Table:
    """Rows under named columns, with optional ``# key: value`` metadata lines."""

    def __init__(self, columns: Sequence[str], rows: list[Sequence[Any]],
                 metadata: dict[str, Any] | None = None):
        self.columns = list(columns)
        self.rows = rows
        self.metadata = metadata or {}

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}: {v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        records = [dict(zip(self.columns, (_jsonable(v) for v in row))) for row in self.rows]
        return _dumps({"metadata": self.metadata, "columns": self.columns, "rows": records})


def _fmt(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return "nan" if not math.isfinite(v) else f"{float(v):.10g}"
    return str(v)


def _jsonable(v: Any) -> Any:
    if isinstance(v, (np.floating, float)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


class Output:
    """Collects payload files and writes them with the run manifest."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.files: dict[str, str] = {}

    def table(self, name: str, table: Table) -> None:
        if self.args.format == "json":
            self.files[f"{name}.json"] = table.to_json()
        else:
            self.files[f"{name}.csv"] = table.to_csv()

    def record(self, name: str, data: dict) -> None:
        if self.args.format == "csv":
            flat = Table(["key", "value"], [[k, json.dumps(_jsonable(v), sort_keys=True)
                                             if isinstance(v, (dict, list)) else v]
                                            for k, v in sorted(data.items())])
            self.files[f"{name}.csv"] = flat.to_csv()
        else:
            self.files[f"{name}.json"] = _dumps(data)

    def text(self, filename: str, content: str) -> None:
        self.files[filename] = content

    def write(self) -> Path:
        out = Path(self.args.out)
        out.mkdir(parents=True, exist_ok=True)
        digests = {}
        for fname, content in sorted(self.files.items()):
            data = content.encode()
            (out / fname).write_bytes(data)
            digests[fname] = hashlib.sha256(data).hexdigest()
        params = {k: v for k, v in sorted(vars(self.args).items())
                  if k not in ("func", "out") and not callable(v)}
        manifest = {
            "subcommand": self.args.command,
            "parameters": _jsonable(params),
            "seed": self.args.seed,
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "outputs": digests,
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return out


# --- subcommands -----------------------------------------------------------------

def cmd_state(args, out: Output) -> str:
    st = parse_state(args.state, args.species)
    data = {
        "label": st.label,
        "species": st.species.name,
        "n_eff": st.n_eff,
        "energy_GHz": state_energy(st) / 1e9,
        "orbit_radius_a0": orbit_radius(st.n, st.L),
        "sfi_field_V_per_cm": sfi_critical_field(st),
        "zeeman_MHz_per_G": zeeman_splitting_rate(st),
    }
    if args.spacing_um:
        data["n_max_at_spacing"] = max_principal_quantum_number(args.spacing_um * 1e-6, st.L)
    out.record("state", data)
    return f"{st.label}: n_eff = {st.n_eff:.4f}, E = {data['energy_GHz']:.4f} GHz"


def cmd_dipole(args, out: Output) -> str:
    a = parse_state(getattr(args, "from"), args.species)
    b = parse_state(args.to, args.species)
    row = matrix_element_rows([(a, b)])[0]
    out.table("dipole", Table(list(row), [list(row.values())]))
    return f"{a.label} -> {b.label}: {row['radial_au']:.2f} a.u. at {row['frequency_GHz']:.4f} GHz"


def cmd_stark_map(args, out: Output) -> str:
    basis = StarkBasis.build(args.species, args.n_min, args.n_max, args.mj, args.l_max)
    fields = np.linspace(0.0, args.field_max, args.points)
    smap = stark_map(basis, fields)
    rows = [list(r) for r in smap.rows()]
    out.table("stark_map", Table(["field_V_per_cm", "curve_index", "zero_field_label",
                                  "energy_GHz"], rows))
    return f"{len(basis)} states, {len(fields)} fields up to {args.field_max} V/cm"


def cmd_lifetime(args, out: Output) -> str:
    st = parse_state(args.state, args.species)
    res = lifetime(st, args.temperature, args.window)
    data = {
        "state": st.label,
        "temperature_K": res.temperature,
        "radiative_lifetime_us": res.radiative_lifetime * 1e6,
        "effective_lifetime_us": res.effective_lifetime * 1e6,
        "bbr_rate_per_s": res.bbr_rate,
        "window": res.window,
        "dominant_channels": [[f.label, rate] for f, rate in res.dominant_decay_channels],
    }
    out.record("lifetime", data)
    return (f"{st.label}: tau_rad = {data['radiative_lifetime_us']:.3g} us, "
            f"tau_eff({args.temperature:g} K) = {data['effective_lifetime_us']:.3g} us")


def _vdd(species: str, s_label: str, p_label: str, spacing_um: float) -> float:
    s = parse_state(s_label, species, 0.5)
    p = parse_state(p_label, species, 0.5)
    d = angular_factor(s, p, 0) * radial_matrix_element(s, p)
    return dipole_dipole_shift(au_to_dipole(d), spacing_um * 1e-6)


def cmd_pair(args, out: Output) -> str:
    v = _vdd(args.species, args.s_state, args.p_state, args.spacing_um)
    T = exchange_time(v)
    t = np.linspace(0.0, args.t_max_ns * 1e-9 if args.t_max_ns else 2 * T, args.points)
    c12, c21 = exchange_evolution(v, t)
    rows = [[ti * 1e9, abs(a) ** 2, abs(b) ** 2] for ti, a, b in zip(t, c12, c21)]
    out.table("pair", Table(["t_ns", "p12", "p21"], rows,
                            {"V_dd_MHz": f"{v / 1e6:.6g}", "T_ns": f"{T * 1e9:.6g}"}))
    return f"V_dd/h = {v / 1e6:.4g} MHz, T = {T * 1e9:.4g} ns"


def cmd_qpg(args, out: Output) -> str:
    if args.preset:
        cfg = PRESETS[args.preset]
        s, p = cfg.qubit_states
        v = _vdd(cfg.species, s.label, p.label, cfg.spacing * 1e6)
        ratio = cfg.gate_time / cfg.pulse_duration
    else:
        if args.vdd_mhz is not None:
            v = args.vdd_mhz * 1e6
        else:
            v = _vdd(args.species, args.s_state, args.p_state, args.spacing_um)
        ratio = args.ratio
    results = qpg_sequence(v, ratio, steps_per_t=args.steps)
    table = {r.input_label: {"phase_rad": r.acquired_phase, "leakage": r.leakage}
             for r in results}
    data = {"V_dd_MHz": v / 1e6, "T_ns": exchange_time(v) * 1e9, "pulse_ratio": ratio,
            "steps_per_T": args.steps, "truth_table": table}
    out.record("qpg", data)
    ph = table["11"]["phase_rad"]
    return f"|11> phase = {ph:.4f} rad, max leakage = {max(r.leakage for r in results):.2e}"


def _detunings(args, drive) -> np.ndarray:
    rate = drive.omega1 if drive.kind == ONE_PHOTON else drive.omega2
    return line_center(drive) + np.linspace(-args.span, args.span, args.points) * rate


def cmd_spectrum(args, out: Output) -> str:
    cfg, drive = sodium_setup(args.kind, args.n, args.tau_us * 1e-6)
    det = _detunings(args, drive)
    spec = multi_atom_spectrum(1, drive.population(det), det / (2 * math.pi), args.kind)
    out.table("spectrum", _spectrum_table(spec, {"kind": args.kind, "n": args.n}))
    return f"{args.kind} spectrum, {args.points} points"


def _spectrum_table(spec, metadata: dict) -> Table:
    rows = []
    for i, d in enumerate(spec.detunings):
        for label, curve in spec.curves.items():
            rows.append([d / 1e6, label, float(curve[i])])
    return Table(["detuning_MHz", "pattern_label", "probability"], rows, metadata)


def _pattern(token: str, N: int) -> int | str:
    """``"12"``-style atom-by-atom labels for N > 1, otherwise a count k."""
    if N > 1 and len(token) == N and set(token) <= {"1", "2"}:
        return token
    try:
        return int(token)
    except ValueError:
        raise DomainError(f"bad pattern {token!r}") from None


def cmd_multi_atom(args, out: Output) -> str:
    cfg, drive = sodium_setup(args.kind, args.n, args.tau_us * 1e-6)
    det = _detunings(args, drive)
    patterns = None
    if args.patterns:
        patterns = [_pattern(tok.strip(), args.N) for tok in args.patterns.split(",")]
    spec = multi_atom_spectrum(args.N, drive.population(det), det / (2 * math.pi), args.kind,
                               patterns)
    out.table("multi_atom", _spectrum_table(spec, {"kind": args.kind, "N": args.N}))
    return f"N = {args.N}, patterns {', '.join(spec.curves)}"


def cmd_narrowing(args, out: Output) -> str:
    Ns = [int(x) for x in str(args.N).split(",")]
    if any(N < 1 for N in Ns):
        raise DomainError("N must be >= 1")
    rows = [[N, narrowing_ratio(N), asymptotic_narrowing_ratio(N)] for N in Ns]
    out.table("narrowing", Table(["N", "exact_ratio", "asymptotic_ratio"], rows))
    return "; ".join(f"N = {N}: exact {e:.4f}, asymptotic {a:.4f}" for N, e, a in rows)


def _beam_config(args) -> dict:
    return {"field_fluctuation_rms": args.fluctuation, "stray_field_rms": args.stray,
            "doppler_projection": args.projection, "standing_wave": not args.no_standing_wave,
            "mean_speed": args.speed}


def cmd_beam(args, out: Output) -> str:
    knobs = _beam_config(args)
    cfg, drive = sodium_setup(args.kind, args.n, args.tau_us * 1e-6, **knobs)
    drive = calibrate_drive(cfg, drive, samples=args.samples, seed=args.seed)
    det = _detunings(args, drive)
    meta = {"kind": args.kind, "seed": args.seed, "samples": args.samples, **knobs,
            "field_V_per_m": f"{drive.E:.6g}"}
    if args.atoms:
        events = simulate_events(cfg, drive, det, args.samples, args.atoms,
                                 poisson=args.poisson, seed=args.seed)
        spec = sorted_multi_atom_spectra(events, args.atoms)
        meta["atoms_per_event"] = args.atoms
    else:
        spec = beam_monte_carlo(cfg, drive, det, samples=args.samples, seed=args.seed)
    out.table("beam", _spectrum_table(spec, meta))
    peak = np.nanmax(next(iter(spec.curves.values())) if args.atoms else spec.curves["2"])
    return f"{args.kind} beam spectrum, peak {peak:.3f}"


def cmd_sfi_sim(args, out: Output) -> str:
    if args.counts:
        counts = [int(c) for c in args.counts.split(",")]
    else:
        rng = np.random.default_rng(args.seed)
        counts = rng.poisson(args.mean_atoms, args.samples).tolist()
    model = DetectionModel(detection_probability=args.detection_probability)
    events = sfi_counting_sim(counts, model, args.seed)
    if args.format == "csv":
        rows = [[e.event_id, e.true_count, e.amplitude_mV, e.inferred_count] for e in events]
        out.table("sfi_events", Table(["event_id", "true_count", "amplitude_mV",
                                       "inferred_count"], rows))
    else:
        lines = [json.dumps({"event_id": e.event_id, "true_count": e.true_count,
                             "amplitude_mV": e.amplitude_mV, "inferred_count": e.inferred_count})
                 for e in events]
        out.text("sfi_events.jsonl", "\n".join(lines) + "\n")
    correct = np.mean([e.inferred_count == e.true_count for e in events])
    return f"{len(events)} events, {100 * correct:.2f} % classified correctly"


def cmd_feasibility(args, out: Output) -> str:
    if args.config:
        cfg = ExperimentConfig.from_json(args.config)
    else:
        cfg = PRESETS[args.preset]
    report = feasibility_report(cfg)
    out.text("feasibility.json", report.to_json() + "\n")
    out.text("feasibility.txt", report.to_text() + "\n")
    return report.to_text()


# --- parser ----------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, fmt: str) -> None:
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--config", help="JSON file of option values")
    p.add_argument("--format", choices=("csv", "json"), default=fmt)


def _species(p: argparse.ArgumentParser) -> None:
    p.add_argument("--species", default="Na", choices=("Na", "Rb", "H"))


def _drive_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=(ONE_PHOTON, TWO_PHOTON), default=ONE_PHOTON)
    p.add_argument("--n", type=int, default=37, help="lower nS1/2 level")
    p.add_argument("--tau-us", type=float, default=2.8, help="interaction time (us)")
    p.add_argument("--span", type=float, default=3.0, help="half range in Rabi frequencies")
    p.add_argument("--points", type=int, default=121)


def _pair_opts(p: argparse.ArgumentParser) -> None:
    _species(p)
    p.add_argument("--s-state", default="50S1/2")
    p.add_argument("--p-state", default="50P1/2")
    p.add_argument("--spacing-um", type=float, default=5.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rydqc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help_: str, fmt: str = "csv") -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        _common(p, fmt)
        return p

    p = add("state", cmd_state, "energy and scaling laws of one level", "json")
    _species(p)
    p.add_argument("--state", required=True)
    p.add_argument("--spacing-um", type=float, default=None)

    p = add("dipole", cmd_dipole, "radial dipole matrix element")
    _species(p)
    p.add_argument("--from", required=True)
    p.add_argument("--to", required=True)

    p = add("stark-map", cmd_stark_map, "Stark map by diagonalization")
    _species(p)
    p.add_argument("--n-min", type=int, default=35)
    p.add_argument("--n-max", type=int, default=38)
    p.add_argument("--mj", type=float, default=0.5)
    p.add_argument("--l-max", type=int, default=None)
    p.add_argument("--field-max", type=float, default=10.0, help="V/cm")
    p.add_argument("--points", type=int, default=201)

    p = add("lifetime", cmd_lifetime, "radiative and blackbody lifetimes", "json")
    _species(p)
    p.add_argument("--state", required=True)
    p.add_argument("--temperature", type=float, default=300.0)
    p.add_argument("--window", type=int, default=5)

    p = add("pair", cmd_pair, "exchange oscillation of a dipole-coupled pair")
    _pair_opts(p)
    p.add_argument("--t-max-ns", type=float, default=None)
    p.add_argument("--points", type=int, default=201)

    p = add("qpg", cmd_qpg, "phase gate truth table", "json")
    _pair_opts(p)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--vdd-mhz", type=float, default=None)
    p.add_argument("--ratio", type=float, default=10.0, help="T / pulse duration")
    p.add_argument("--steps", type=int, default=10_000, help="RK4 steps per exchange time")

    p = add("spectrum", cmd_spectrum, "single-atom microwave lineshape")
    _drive_opts(p)

    p = add("multi-atom", cmd_multi_atom, "outcome spectra of N independent atoms")
    _drive_opts(p)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--patterns", default=None, help="comma list of k values or labels like 12")

    p = add("narrowing", cmd_narrowing, "full-excitation line narrowing ratios")
    p.add_argument("--N", default="5", help="N or comma list")

    p = add("beam", cmd_beam, "thermal-beam Monte Carlo spectrum")
    _drive_opts(p)
    defaults = BeamConfig()
    p.add_argument("--fluctuation", type=float, default=defaults.field_fluctuation_rms)
    p.add_argument("--stray", type=float, default=defaults.stray_field_rms, help="V/m")
    p.add_argument("--projection", type=float, default=defaults.doppler_projection)
    p.add_argument("--speed", type=float, default=defaults.mean_speed, help="m/s")
    p.add_argument("--no-standing-wave", action="store_true")
    p.add_argument("--atoms", type=int, default=0,
                   help="atoms per event; > 0 gives the post-selected N-atom spectrum")
    p.add_argument("--poisson", action="store_true")

    p = add("sfi-sim", cmd_sfi_sim, "field-ionization pulse-height counting", "json")
    p.add_argument("--counts", default=None, help="comma list of true atom counts")
    p.add_argument("--mean-atoms", type=float, default=1.0)
    p.add_argument("--detection-probability", type=float, default=1.0)

    p = add("feasibility", cmd_feasibility, "experimental-limitations report", "json")
    p.add_argument("--preset", choices=sorted(PRESETS), default="paper-optimal")
    return parser


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace,
                  argv: Sequence[str]) -> None:
    """Fill options from ``--config`` JSON; explicit command-line flags win."""
    if not args.config or args.command == "feasibility":
        return
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest in ("func", "command") or not hasattr(args, dest):
            raise ConfigurationError(f"unknown config key {key!r} for {args.command}")
        if dest not in given:
            setattr(args, dest, value)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(parser, args, argv)
        if args.samples < 1:
            raise DomainError("--samples must be positive")
        out = Output(args)
        summary = args.func(args, out)
        out.write()
    except (ConfigurationError, DomainError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, IntegrationError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
