"""Codebook construction, beam-sweeping AoA estimation, and squint reporting."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import Scenario, normalize_powers, true_rx_azimuth, wideband_power
from .config import ConfigMatrix, ReflectionModel, config_to_phase_vector
from .geometry import ArrayGeometry, Direction, SPEED_OF_LIGHT
from .optimize import column_row_scan, continuous_optimal_config
from .patterns import ElementPattern, PatternCut, main_lobe_direction, pattern_cut
from .scenario_io import geometry_fingerprint, scenario_fingerprint, with_rx_azimuth

PROVENANCE_SCAN = "scan"
PROVENANCE_MODEL = "model"

#: Fraction of bottom rows replaced by the row-extension transform by default.
DEFAULT_ROW_EXTENSION_FRACTION = 0.25


@dataclass
class CodebookEntry:
    target_azimuth_deg: float
    phi: ConfigMatrix
    provenance: str


@dataclass
class Codebook:
    """Ordered steering configurations, one per target azimuth."""

    entries: list[CodebookEntry]
    geometry_fingerprint: str
    built_with: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.entries:
            raise ValueError("codebook must contain at least one entry")
        angles = [e.target_azimuth_deg for e in self.entries]
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise ValueError("codebook target angles must be strictly increasing")

    @property
    def target_angles(self) -> np.ndarray:
        return np.array([e.target_azimuth_deg for e in self.entries])


def _validated_angles(rx_angles) -> list[float]:
    angles = [float(a) for a in rx_angles]
    if not angles:
        raise ValueError("need at least one target angle")
    if any(b <= a for a, b in zip(angles, angles[1:])):
        raise ValueError("target angles must be strictly increasing")
    if any(abs(a) > 90.0 for a in angles):
        raise ValueError("target angles must lie in [-90, 90] degrees")
    return angles


def build_codebook_scan(
    base: Scenario,
    rx_angles,
    objective: str = "maximize",
    iterations: int = 1,
    refl: ReflectionModel = ReflectionModel(),
    polarization: str = "h",
) -> Codebook:
    """Run the greedy scan with the receiver placed at each target azimuth."""
    angles = _validated_angles(rx_angles)
    entries = []
    for angle in angles:
        placed = with_rx_azimuth(base, angle)
        phi, _ = column_row_scan(placed, objective, iterations, refl, polarization)
        entries.append(CodebookEntry(angle, phi, PROVENANCE_SCAN))
    return Codebook(
        entries=entries,
        geometry_fingerprint=geometry_fingerprint(base.ris_geometry, refl),
        built_with={
            "source": PROVENANCE_SCAN,
            "objective": objective,
            "iterations": iterations,
            "scenario_fingerprint": scenario_fingerprint(base),
            "tx_azimuth_deg": true_tx_azimuth(base),
        },
    )


def true_tx_azimuth(s: Scenario) -> float:
    from .geometry import direction_between

    direction, _ = direction_between(s.ris_geometry.center, s.tx.position)
    return direction.azimuth_deg


def build_codebook_model(
    tx_dir: Direction,
    rx_angles,
    geom: ArrayGeometry,
    wavelength: float,
    refl: ReflectionModel = ReflectionModel(),
) -> Codebook:
    """Quantize the closed-form optimum per angle; both polarizations get the same states."""
    angles = _validated_angles(rx_angles)
    entries = []
    for angle in angles:
        omega = continuous_optimal_config(tx_dir, Direction(angle, 0.0), geom, wavelength)
        states = refl.nearest_states(omega).reshape(geom.n_rows, geom.n_cols)
        phi = ConfigMatrix(np.repeat(states, 2, axis=1))
        entries.append(CodebookEntry(angle, phi, PROVENANCE_MODEL))
    return Codebook(
        entries=entries,
        geometry_fingerprint=geometry_fingerprint(geom, refl),
        built_with={
            "source": PROVENANCE_MODEL,
            "tx_azimuth_deg": tx_dir.azimuth_deg,
            "tx_elevation_deg": tx_dir.elevation_deg,
            "design_wavelength_m": wavelength,
        },
    )


def case2_row_extension(phi: ConfigMatrix, k_rows: int) -> ConfigMatrix:
    """Replace the bottom k_rows rows with a copy of the row just above them."""
    if not 0 <= k_rows < phi.n_rows:
        raise ValueError(f"k_rows must lie in [0, {phi.n_rows - 1}], got {k_rows}")
    out = phi.copy()
    if k_rows:
        out.states[phi.n_rows - k_rows :, :] = out.states[phi.n_rows - k_rows - 1, :]
    return out


def default_row_extension(geom: ArrayGeometry) -> int:
    return int(geom.n_rows * DEFAULT_ROW_EXTENSION_FRACTION)


@dataclass
class SweepReport:
    """Per-entry sweep metrics and the resulting angle decision."""

    entry_angles_deg: np.ndarray
    metrics_db: np.ndarray  # normalized: exactly one entry at 0 dB
    chosen_index: int
    estimated_azimuth_deg: float
    true_azimuth_deg: float
    error_deg: float
    objective: str


def beam_sweep_estimate(
    s: Scenario,
    cb: Codebook,
    objective: str = "maximize",
    refl: ReflectionModel = ReflectionModel(),
    polarization: str = "h",
) -> SweepReport:
    """Apply every codebook entry, pick the extremum, report the angle error.

    Maximization normalizes the max to 0 dB, minimization the min; ties
    break toward the smaller target angle.
    """
    if objective not in ("maximize", "minimize"):
        raise ValueError(f"objective must be 'maximize' or 'minimize', got {objective!r}")
    expected = geometry_fingerprint(s.ris_geometry, refl)
    if cb.geometry_fingerprint != expected:
        raise ValueError(
            "codebook was built for a different surface geometry or reflection model"
        )
    powers = np.array([wideband_power(s, e.phi, refl, polarization) for e in cb.entries])
    if objective == "maximize":
        metrics = normalize_powers(powers, "max_to_0")
        chosen = int(np.argmax(metrics))  # first index wins ties: smallest angle
    else:
        metrics = normalize_powers(powers, "min_to_0")
        chosen = int(np.argmin(metrics))
    estimated = cb.entries[chosen].target_azimuth_deg
    true_az = true_rx_azimuth(s)
    return SweepReport(
        entry_angles_deg=cb.target_angles,
        metrics_db=metrics,
        chosen_index=chosen,
        estimated_azimuth_deg=estimated,
        true_azimuth_deg=true_az,
        error_deg=abs(estimated - true_az),
        objective=objective,
    )


def second_best_margin(report: SweepReport) -> float:
    """Gap in dB between the winning entry and the runner-up."""
    if report.metrics_db.size < 2:
        raise ValueError("margin needs at least two codebook entries")
    rest = np.delete(report.metrics_db, report.chosen_index)
    best = report.metrics_db[report.chosen_index]
    runner_up = rest.max() if report.objective == "maximize" else rest.min()
    return float(abs(best - runner_up))


@dataclass
class FrequencyPeak:
    entry_angle_deg: float
    frequency_hz: float
    peak_azimuth_deg: float
    cut: PatternCut


@dataclass
class FrequencySelectivityReport:
    """Main-lobe direction of every entry at every probe frequency."""

    peaks: list[FrequencyPeak]
    drift_deg: dict  # entry angle -> spread of peak directions across frequencies
    flagged: list[float]  # entry angles whose drift exceeds the threshold
    threshold_deg: float


def frequency_selectivity_report(
    s: Scenario,
    cb: Codebook,
    freqs_hz,
    refl: ReflectionModel = ReflectionModel(),
    ris_element: ElementPattern = ElementPattern.cosine(q=1.0, peak_gain_dbi=5.0),
    azimuth_grid_deg=None,
    drift_threshold_deg: float = 5.0,
    polarization: str = "h",
) -> FrequencySelectivityReport:
    """Pattern cuts per entry and frequency, flagging entries whose lobe drifts."""
    freqs = [float(f) for f in freqs_hz]
    if not freqs:
        raise ValueError("need at least one probe frequency")
    tx_dir = Direction(true_tx_azimuth(s), 0.0)
    angles = cb.target_angles
    if azimuth_grid_deg is None:
        # Default grid hugs the sweep range; it stays clear of the mirrored
        # image lobe that 1-bit quantization radiates far outside it.
        lo = max(-90.0, angles.min() - 15.0)
        hi = min(90.0, angles.max() + 15.0)
        azimuth_grid_deg = np.arange(lo, hi + 1e-9, 0.25)
    peaks = []
    drift = {}
    flagged = []
    for entry in cb.entries:
        omega = config_to_phase_vector(entry.phi, polarization, refl).values
        lobe_angles = []
        for f in freqs:
            cut = pattern_cut(
                omega,
                tx_dir,
                s.ris_geometry,
                SPEED_OF_LIGHT / f,
                ris_element,
                azimuth_grid_deg,
                normalize=True,
            )
            peak = main_lobe_direction(cut).azimuth_deg
            lobe_angles.append(peak)
            peaks.append(FrequencyPeak(entry.target_azimuth_deg, f, peak, cut))
        spread = float(max(lobe_angles) - min(lobe_angles))
        drift[entry.target_azimuth_deg] = spread
        if spread > drift_threshold_deg:
            flagged.append(entry.target_azimuth_deg)
    return FrequencySelectivityReport(
        peaks=peaks, drift_deg=drift, flagged=flagged, threshold_deg=float(drift_threshold_deg)
    )


def codebook_to_dict(cb: Codebook) -> dict:
    return {
        "geometry_fingerprint": cb.geometry_fingerprint,
        "built_with": cb.built_with,
        "entries": [
            {
                "target_azimuth_deg": e.target_azimuth_deg,
                "provenance": e.provenance,
                "states": e.phi.to_lines(),
            }
            for e in cb.entries
        ],
    }


def codebook_from_dict(d: dict) -> Codebook:
    return Codebook(
        entries=[
            CodebookEntry(
                float(e["target_azimuth_deg"]),
                ConfigMatrix.from_lines(e["states"]),
                e.get("provenance", "file"),
            )
            for e in d["entries"]
        ],
        geometry_fingerprint=d["geometry_fingerprint"],
        built_with=d.get("built_with", {}),
    )


def save_codebook(path, cb: Codebook) -> None:
    Path(path).write_text(json.dumps(codebook_to_dict(cb), indent=2) + "\n")


def load_codebook(path) -> Codebook:
    return codebook_from_dict(json.loads(Path(path).read_text()))
