"""Experiment orchestration: pattern, sweep, frequency, and oracle runs.

Every run writes plot-ready CSV files plus a JSON sidecar. CSV bodies are
deterministic for a fixed spec and seed; the only non-reproducible field
(the timestamp) lives in the sidecar, never in the CSVs.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._version import __version__
from .channel import Scenario, normalize_powers, wideband_power
from .codebook import (
    Codebook,
    beam_sweep_estimate,
    build_codebook_model,
    build_codebook_scan,
    case2_row_extension,
    codebook_to_dict,
    default_row_extension,
    frequency_selectivity_report,
    load_codebook,
    second_best_margin,
    true_tx_azimuth,
)
from .config import ReflectionModel, config_to_phase_vector
from .geometry import Direction, SPEED_OF_LIGHT
from .optimize import column_row_scan, exhaustive_oracle
from .patterns import ElementPattern, pattern_cut
from .scenario_io import (
    PRESET_NAMES,
    pattern_from_dict,
    preset_path,
    read_scenario,
    scenario_fingerprint,
    sweep_azimuths,
    with_rx_azimuth,
)

DEFAULT_PROBE_FREQUENCIES_HZ = (3.5e9, 3.55e9, 3.6e9)
DEFAULT_RIS_ELEMENT = ElementPattern.cosine(q=1.0, peak_gain_dbi=5.0)


@dataclass
class ExperimentSpec:
    """Everything needed to rerun one experiment."""

    name: str
    scenario: str
    codebook_source: str = "scan"  # scan | model | file
    codebook_path: str | None = None
    objective: str = "maximize"
    iterations: int = 1
    out_dir: str = "results"
    seed: int = 0
    frequencies_hz: tuple = DEFAULT_PROBE_FREQUENCIES_HZ
    rx_angles: tuple | None = None
    row_extension: int | None = None
    max_bits: int = 20
    ris_element: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        known = {f: d[f] for f in cls.__dataclass_fields__ if f in d}
        for key in ("frequencies_hz", "rx_angles"):
            if known.get(key) is not None:
                known[key] = tuple(known[key])
        return cls(**known)


def resolve_scenario_path(value: str) -> Path:
    """Accept either a packaged preset name or a filesystem path."""
    if value in PRESET_NAMES:
        return preset_path(value)
    path = Path(value)
    if not path.exists():
        raise ValueError(f"scenario file {value!r} not found (presets: {PRESET_NAMES})")
    return path


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _angle_tag(angle: float) -> str:
    text = f"{angle:g}".replace("-", "m").replace(".", "p")
    return f"az{text}"


class _Run:
    """Collects output files for one experiment directory."""

    def __init__(self, spec: ExperimentSpec, scenario: Scenario):
        self.spec = spec
        self.out_dir = Path(spec.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.header = [
            f"# ris-beamsweep v{__version__}",
            f"# scenario={scenario_fingerprint(scenario)}",
            f"# seed={spec.seed}",
        ]
        self.written: list[Path] = []

    def write_csv(self, name: str, columns: list[str], rows) -> Path:
        path = self.out_dir / name
        lines = list(self.header)
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        path.write_text("\n".join(lines) + "\n")
        self.written.append(path)
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text)
        self.written.append(path)
        return path

    def write_json(self, name: str, payload: dict) -> Path:
        path = self.out_dir / name
        path.write_text(json.dumps(payload, indent=2) + "\n")
        self.written.append(path)
        return path

    def finish(self, experiment: str) -> list[Path]:
        self.write_json("experiment_spec.json", self.spec.to_dict())
        sidecar = {
            "experiment": experiment,
            "version": __version__,
            "outputs": sorted(p.name for p in self.written),
            "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        }
        self.write_json("run.json", sidecar)
        return self.written


def _load(spec: ExperimentSpec) -> tuple[Scenario, np.ndarray]:
    scenario, extras = read_scenario(resolve_scenario_path(spec.scenario))
    angles = (
        np.asarray(spec.rx_angles, dtype=float)
        if spec.rx_angles is not None
        else sweep_azimuths(extras)
    )
    if angles is None:
        raise ValueError("no sweep angles: pass --angles or add a sweep block to the scenario")
    return scenario, angles


def _ris_element(spec: ExperimentSpec) -> ElementPattern:
    return DEFAULT_RIS_ELEMENT if spec.ris_element is None else pattern_from_dict(spec.ris_element)


def build_codebook(spec: ExperimentSpec, scenario: Scenario, angles: np.ndarray) -> Codebook:
    refl = ReflectionModel()
    if spec.codebook_source == "scan":
        return build_codebook_scan(scenario, angles, spec.objective, spec.iterations, refl)
    if spec.codebook_source == "model":
        tx_dir = Direction(true_tx_azimuth(scenario), 0.0)
        return build_codebook_model(tx_dir, angles, scenario.ris_geometry, scenario.wavelength_center, refl)
    if spec.codebook_source == "file":
        if not spec.codebook_path:
            raise ValueError("codebook_source='file' requires codebook_path")
        return load_codebook(spec.codebook_path)
    raise ValueError(f"codebook_source must be scan, model, or file, got {spec.codebook_source!r}")


def run_pattern_experiment(spec: ExperimentSpec) -> list[Path]:
    """Per entry: theory cut, row-extended theory cut, and a simulated sweep cut."""
    scenario, angles = _load(spec)
    refl = ReflectionModel()
    cb = build_codebook(spec, scenario, angles)
    run = _Run(spec, scenario)
    run.write_json("codebook.json", codebook_to_dict(cb))
    element = _ris_element(spec)
    k_rows = (
        spec.row_extension
        if spec.row_extension is not None
        else default_row_extension(scenario.ris_geometry)
    )
    tx_dir = Direction(true_tx_azimuth(scenario), 0.0)
    theory_grid = np.arange(angles.min(), angles.max() + 1e-9, 1.0)
    wavelength = scenario.wavelength_center
    for entry in cb.entries:
        tag = _angle_tag(entry.target_azimuth_deg)
        for label, phi in (
            ("case1", entry.phi),
            ("case2", case2_row_extension(entry.phi, k_rows)),
        ):
            omega = config_to_phase_vector(phi, "h", refl).values
            cut = pattern_cut(
                omega, tx_dir, scenario.ris_geometry, wavelength, element, theory_grid
            )
            run.write_csv(
                f"{label}_{tag}.csv",
                ["azimuth_deg", "gain_dB"],
                zip(cut.azimuths_deg, cut.gains_db),
            )
        powers = [
            wideband_power(with_rx_azimuth(scenario, a), entry.phi, refl) for a in angles
        ]
        measured = normalize_powers(powers, "max_to_0")
        run.write_csv(
            f"measured_{tag}.csv",
            ["azimuth_deg", "power_dB"],
            zip(angles, measured),
        )
    return run.finish("pattern")


def run_sweep_experiment(spec: ExperimentSpec) -> list[Path]:
    """Beam-sweeping decision at every true receiver position on the grid."""
    scenario, angles = _load(spec)
    refl = ReflectionModel()
    cb = build_codebook(spec, scenario, angles)
    run = _Run(spec, scenario)
    run.write_json("codebook.json", codebook_to_dict(cb))
    summary = []
    for true_angle in angles:
        placed = with_rx_azimuth(scenario, true_angle)
        report = beam_sweep_estimate(placed, cb, spec.objective, refl)
        chosen_flags = np.zeros(report.entry_angles_deg.size, dtype=int)
        chosen_flags[report.chosen_index] = 1
        run.write_csv(
            f"sweep_{_angle_tag(true_angle)}.csv",
            ["entry_angle_deg", "metric_dB_normalized", "chosen", "true_angle_deg", "error_deg"],
            [
                (a, m, c, report.true_azimuth_deg, report.error_deg)
                for a, m, c in zip(report.entry_angles_deg, report.metrics_db, chosen_flags)
            ],
        )
        margin = second_best_margin(report) if report.entry_angles_deg.size > 1 else 0.0
        summary.append(
            (true_angle, report.estimated_azimuth_deg, report.error_deg, margin)
        )
    run.write_csv(
        "sweep_summary.csv",
        ["true_angle_deg", "estimated_deg", "error_deg", "second_best_margin_dB"],
        summary,
    )
    return run.finish("sweep")


def run_frequency_experiment(spec: ExperimentSpec) -> list[Path]:
    """Main-lobe direction of each entry at the probe frequencies, plus drift flags."""
    scenario, angles = _load(spec)
    refl = ReflectionModel()
    cb = build_codebook(spec, scenario, angles)
    run = _Run(spec, scenario)
    run.write_json("codebook.json", codebook_to_dict(cb))
    report = frequency_selectivity_report(
        scenario, cb, spec.frequencies_hz, refl, _ris_element(spec)
    )
    run.write_csv(
        "frequency_peaks.csv",
        ["entry_angle_deg", "frequency_hz", "peak_azimuth_deg"],
        [(p.entry_angle_deg, p.frequency_hz, p.peak_azimuth_deg) for p in report.peaks],
    )
    run.write_csv(
        "drift_summary.csv",
        ["entry_angle_deg", "drift_deg", "flagged"],
        [
            (angle, drift, angle in report.flagged)
            for angle, drift in sorted(report.drift_deg.items())
        ],
    )
    return run.finish("freq")


def run_oracle_experiment(spec: ExperimentSpec) -> list[Path]:
    """Exhaustive optimum versus the greedy scan on a tiny surface."""
    scenario, _ = read_scenario(resolve_scenario_path(spec.scenario))
    refl = ReflectionModel()
    best_phi, best_db = exhaustive_oracle(scenario, spec.objective, refl, spec.max_bits)
    scan_phi, trace = column_row_scan(scenario, spec.objective, spec.iterations, refl)
    run = _Run(spec, scenario)
    gap = abs(best_db - trace.final_db)
    run.write_csv(
        "oracle_summary.csv",
        ["objective", "oracle_dB", "scan_dB", "gap_dB", "baseline_dB"],
        [(spec.objective, best_db, trace.final_db, gap, trace.baseline_db)],
    )
    run.write_csv(
        "scan_trace.csv",
        ["step_kind", "index", "candidate_dB", "accepted", "best_dB"],
        [(st.step_kind, st.index, st.candidate_db, st.accepted, st.best_db) for st in trace.steps],
    )
    run.write_text("oracle_config.txt", "\n".join(best_phi.to_lines()) + "\n")
    run.write_text("scan_config.txt", "\n".join(scan_phi.to_lines()) + "\n")
    return run.finish("oracle")


def build_codebook_files(spec: ExperimentSpec) -> list[Path]:
    """`codebook build`: construct and save a codebook JSON."""
    scenario, angles = _load(spec)
    cb = build_codebook(spec, scenario, angles)
    run = _Run(spec, scenario)
    run.write_json("codebook.json", codebook_to_dict(cb))
    return run.finish("codebook-build")


def describe_codebook(path) -> str:
    cb = load_codebook(path)
    lines = [
        f"codebook: {len(cb.entries)} entries, geometry {cb.geometry_fingerprint}",
        f"built_with: {json.dumps(cb.built_with, sort_keys=True)}",
    ]
    for entry in cb.entries:
        lines.append(f"-- target {entry.target_azimuth_deg:g} deg ({entry.provenance})")
        lines.extend(entry.phi.to_lines())
    return "\n".join(lines)
