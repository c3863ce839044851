"""Coordinate conventions, element grids, wave vectors, and array responses.

The reflecting surface lies in the plane x = 0 with broadside along +x.
Element columns run along +y and rows are stacked along z, row 1 on top.
Azimuth is measured in the horizontal plane from broadside toward +y,
elevation from the horizontal plane upward (positive toward +z). Both
angles are restricted to [-90, +90] degrees, which covers the half-space
x >= 0 that the surface can see.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

#: Half-wavelength element pitch at the 3.5 GHz design frequency (meters).
DEFAULT_PITCH = SPEED_OF_LIGHT / 3.5e9 / 2.0


@dataclass(frozen=True)
class Direction:
    """Look direction as an (azimuth, elevation) pair in degrees."""

    azimuth_deg: float
    elevation_deg: float

    def __post_init__(self):
        for name in ("azimuth_deg", "elevation_deg"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            if abs(value) > 90.0:
                raise ValueError(f"{name}={value} lies outside [-90, 90] degrees")

    @property
    def azimuth_rad(self) -> float:
        return float(np.deg2rad(self.azimuth_deg))

    @property
    def elevation_rad(self) -> float:
        return float(np.deg2rad(self.elevation_deg))

    def unit_vector(self) -> np.ndarray:
        """Unit vector pointing toward this direction."""
        return unit_from_azel(self.azimuth_rad, self.elevation_rad)


@dataclass(frozen=True)
class Position:
    """Point in the right-handed global frame, meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError("position coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class ArrayGeometry:
    """Regular element grid centered on `center`, row-major indexing.

    Row 1 is the top row (largest z); column index increases along +y.
    """

    n_rows: int
    n_cols: int
    pitch_y: float = DEFAULT_PITCH
    pitch_z: float = DEFAULT_PITCH
    center: Position = Position(0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("array needs at least one row and one column")
        if self.pitch_y <= 0.0 or self.pitch_z <= 0.0:
            raise ValueError("element pitch must be positive")

    @property
    def n_elements(self) -> int:
        return self.n_rows * self.n_cols


def unit_from_azel(az_rad, el_rad) -> np.ndarray:
    """Unit vector(s) for azimuth/elevation in radians; broadcasts."""
    az = np.asarray(az_rad, dtype=float)
    el = np.asarray(el_rad, dtype=float)
    return np.stack(
        np.broadcast_arrays(
            np.cos(el) * np.cos(az),
            np.cos(el) * np.sin(az),
            np.sin(el) * np.ones_like(az),
        ),
        axis=-1,
    )


def azel_of_vector(v: np.ndarray) -> tuple[float, float]:
    """(azimuth, elevation) in radians of a 3-vector; azimuth full range."""
    v = np.asarray(v, dtype=float)
    horiz = float(np.hypot(v[0], v[1]))
    return float(np.arctan2(v[1], v[0])), float(np.arctan2(v[2], horiz))


@lru_cache(maxsize=64)
def _element_positions(geom: ArrayGeometry) -> np.ndarray:
    rows = np.arange(geom.n_rows, dtype=float)
    cols = np.arange(geom.n_cols, dtype=float)
    z = geom.center.z + ((geom.n_rows - 1) / 2.0 - rows) * geom.pitch_z
    y = geom.center.y + (cols - (geom.n_cols - 1) / 2.0) * geom.pitch_y
    out = np.empty((geom.n_elements, 3), dtype=float)
    out[:, 0] = geom.center.x
    out[:, 1] = np.tile(y, geom.n_rows)
    out[:, 2] = np.repeat(z, geom.n_cols)
    out.setflags(write=False)
    return out


def element_positions(geom: ArrayGeometry) -> np.ndarray:
    """All element positions, shape (N, 3), row-major with row 1 on top.

    The returned array is cached and read-only; copy before mutating.
    """
    return _element_positions(geom)


def wave_vector(direction: Direction, wavelength: float) -> np.ndarray:
    """Wave vector (2*pi/lambda) * [cos(el)cos(az), cos(el)sin(az), sin(el)]."""
    if wavelength <= 0.0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    return (2.0 * np.pi / wavelength) * direction.unit_vector()


def array_response(geom: ArrayGeometry, direction: Direction, wavelength: float) -> np.ndarray:
    """Per-element response exp(-j k^T u_i); unit-modulus, length N."""
    k = wave_vector(direction, wavelength)
    return np.exp(-1j * element_positions(geom) @ k)


def direction_between(origin: Position, target: Position) -> tuple[Direction, float]:
    """Direction and distance of `target` seen from `origin`.

    Only defined for targets in the front half-space of the array frame
    (x-component of the offset >= 0); behind-plane targets raise.
    """
    delta = target.as_array() - origin.as_array()
    distance = float(np.linalg.norm(delta))
    if distance < 1e-12:
        raise ValueError("origin and target coincide; direction undefined")
    az_rad, el_rad = azel_of_vector(delta)
    az_deg = float(np.rad2deg(az_rad))
    if abs(az_deg) > 90.0 + 1e-9:
        raise ValueError(
            f"target lies behind the array plane (azimuth {az_deg:.1f} degrees)"
        )
    az_deg = float(np.clip(az_deg, -90.0, 90.0))
    return Direction(az_deg, float(np.rad2deg(el_rad))), distance
