"""Scenario JSON serialization, fingerprints, and shipped presets.

File units: meters, Hz, degrees. Complex coefficients serialize as
[real, imag]. A scenario file may carry an optional "sweep" block with the
azimuth grid used by the experiment harness; it is not part of the
Scenario type.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .channel import FrequencyGrid, GroundSpec, NodeSpec, NoiseSpec, Scenario, WallReflector
from .config import ReflectionModel
from .geometry import ArrayGeometry, Position
from .patterns import ElementPattern

PRESET_NAMES = ("outdoor_open_field", "indoor_multipath")


def _complex_to_json(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


def _complex_from_json(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    return complex(value[0], value[1])


def pattern_to_dict(p: ElementPattern) -> dict:
    out = {"kind": p.kind}
    if p.kind == "cosine_q":
        out.update(q=p.q, peak_gain_dbi=p.peak_gain_dbi)
    elif p.kind == "tr38901":
        out.update(peak_gain_dbi=p.peak_gain_dbi, slav_db=p.slav_db, beamwidth_deg=p.beamwidth_deg)
        if p.beamwidth_el_deg is not None:
            out["beamwidth_el_deg"] = p.beamwidth_el_deg
    return out


def pattern_from_dict(d: dict) -> ElementPattern:
    kind = d.get("kind", "isotropic")
    if kind == "isotropic":
        return ElementPattern.isotropic()
    if kind == "cosine_q":
        if "beamwidth_deg" in d:
            return ElementPattern.cosine_for_beamwidth(
                d["beamwidth_deg"], d.get("peak_gain_dbi", 5.0)
            )
        return ElementPattern.cosine(d.get("q", 1.0), d.get("peak_gain_dbi", 5.0))
    if kind == "tr38901":
        return ElementPattern.tr38901_panel(
            d.get("peak_gain_dbi", 8.0),
            d.get("slav_db", 30.0),
            d.get("beamwidth_deg", 65.0),
            d.get("beamwidth_el_deg"),
        )
    raise ValueError(f"unknown antenna kind {kind!r}")


def _node_to_dict(node: NodeSpec) -> dict:
    out = {
        "position": [node.position.x, node.position.y, node.position.z],
        "antenna": pattern_to_dict(node.antenna),
    }
    if node.boresight_azimuth_deg is not None:
        out["boresight"] = {
            "azimuth_deg": node.boresight_azimuth_deg,
            "elevation_deg": node.boresight_elevation_deg,
        }
    return out


def _node_from_dict(d: dict) -> NodeSpec:
    bore = d.get("boresight")
    return NodeSpec(
        position=Position(*d["position"]),
        antenna=pattern_from_dict(d.get("antenna", {"kind": "isotropic"})),
        boresight_azimuth_deg=None if bore is None else bore["azimuth_deg"],
        boresight_elevation_deg=None if bore is None else bore["elevation_deg"],
    )


def scenario_to_dict(s: Scenario) -> dict:
    geom = s.ris_geometry
    out = {
        "ris": {
            "n_rows": geom.n_rows,
            "n_cols": geom.n_cols,
            "pitch_y_m": geom.pitch_y,
            "pitch_z_m": geom.pitch_z,
            "center": [geom.center.x, geom.center.y, geom.center.z],
        },
        "tx": _node_to_dict(s.tx),
        "rx": _node_to_dict(s.rx),
        "ground": None if s.ground is None else {"reflection": _complex_to_json(s.ground.reflection)},
        "reflectors": [
            {
                "p1": [w.x1, w.y1],
                "p2": [w.x2, w.y2],
                "reflection": _complex_to_json(w.reflection),
            }
            for w in s.reflectors
        ],
        "direct_link_enabled": s.direct_link_enabled,
        "frequency_grid": {
            "start_hz": s.frequency_grid.start_hz,
            "stop_hz": s.frequency_grid.stop_hz,
            "n_points": s.frequency_grid.n_points,
        },
        "noise": None
        if s.noise is None
        else {"variance": s.noise.variance, "seed": s.noise.seed},
    }
    return out


def scenario_from_dict(d: dict) -> Scenario:
    ris = d["ris"]
    geom = ArrayGeometry(
        n_rows=ris["n_rows"],
        n_cols=ris["n_cols"],
        pitch_y=ris["pitch_y_m"],
        pitch_z=ris["pitch_z_m"],
        center=Position(*ris["center"]),
    )
    ground = d.get("ground")
    noise = d.get("noise")
    fg = d["frequency_grid"]
    return Scenario(
        ris_geometry=geom,
        tx=_node_from_dict(d["tx"]),
        rx=_node_from_dict(d["rx"]),
        ground=None if ground is None else GroundSpec(_complex_from_json(ground["reflection"])),
        reflectors=tuple(
            WallReflector(
                w["p1"][0], w["p1"][1], w["p2"][0], w["p2"][1], _complex_from_json(w["reflection"])
            )
            for w in d.get("reflectors", [])
        ),
        direct_link_enabled=bool(d.get("direct_link_enabled", True)),
        frequency_grid=FrequencyGrid(fg["start_hz"], fg["stop_hz"], fg["n_points"]),
        noise=None if noise is None else NoiseSpec(noise["variance"], noise.get("seed", 0)),
    )


def read_scenario(path) -> tuple[Scenario, dict]:
    """Load a scenario file; returns (scenario, extras) with e.g. the sweep block."""
    raw = json.loads(Path(path).read_text())
    scenario = scenario_from_dict(raw)
    extras = {k: v for k, v in raw.items() if k == "sweep"}
    return scenario, extras


def write_scenario(path, s: Scenario, extras: dict | None = None) -> None:
    payload = scenario_to_dict(s)
    if extras:
        payload.update(extras)
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def sweep_azimuths(extras: dict) -> np.ndarray | None:
    """Azimuth grid declared by a scenario file's sweep block, if any."""
    sweep = extras.get("sweep")
    if not sweep:
        return None
    grid = sweep["azimuths_deg"]
    if isinstance(grid, dict):
        return np.arange(grid["start"], grid["stop"] + 1e-9, grid["step"])
    return np.asarray(grid, dtype=float)


def _canonical_digest(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def scenario_fingerprint(s: Scenario) -> str:
    return _canonical_digest(scenario_to_dict(s))


def geometry_fingerprint(geom: ArrayGeometry, refl: ReflectionModel) -> str:
    """Digest of what makes a codebook portable: the grid and the state coefficients."""
    return _canonical_digest(
        {
            "n_rows": geom.n_rows,
            "n_cols": geom.n_cols,
            "pitch_y_m": geom.pitch_y,
            "pitch_z_m": geom.pitch_z,
            "state0": _complex_to_json(refl.state0),
            "state1": _complex_to_json(refl.state1),
        }
    )


def with_rx_azimuth(s: Scenario, azimuth_deg: float) -> Scenario:
    """Move the receiver to a new azimuth, keeping its horizontal range and height.

    A None boresight keeps aiming at the surface center automatically.
    """
    center = s.ris_geometry.center
    dx = s.rx.position.x - center.x
    dy = s.rx.position.y - center.y
    horizontal = float(np.hypot(dx, dy))
    az = np.deg2rad(azimuth_deg)
    new_position = Position(
        center.x + horizontal * np.cos(az),
        center.y + horizontal * np.sin(az),
        s.rx.position.z,
    )
    new_rx = NodeSpec(
        position=new_position,
        antenna=s.rx.antenna,
        boresight_azimuth_deg=s.rx.boresight_azimuth_deg,
        boresight_elevation_deg=s.rx.boresight_elevation_deg,
    )
    return Scenario(
        ris_geometry=s.ris_geometry,
        tx=s.tx,
        rx=new_rx,
        ground=s.ground,
        reflectors=s.reflectors,
        direct_link_enabled=s.direct_link_enabled,
        frequency_grid=s.frequency_grid,
        noise=s.noise,
    )


def preset_path(name: str) -> Path:
    """Filesystem path of a packaged scenario preset."""
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; available: {PRESET_NAMES}")
    return Path(resources.files("ris_beamsweep").joinpath(f"presets/{name}.json"))


def load_preset(name: str) -> tuple[Scenario, dict]:
    return read_scenario(preset_path(name))
