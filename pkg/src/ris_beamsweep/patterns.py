"""Element gain models, the power-domain array factor, and pattern cuts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry, Direction, array_response, element_positions, unit_from_azel

#: Gain floor used when converting zero power to dB, keeps cuts plottable.
DB_FLOOR = -200.0

ISOTROPIC = "isotropic"
COSINE_Q = "cosine_q"
TR38901 = "tr38901"


@dataclass(frozen=True)
class ElementPattern:
    """Single-element power gain model evaluated in the element's own frame.

    `cosine_q` is peak * max(cos(psi), 0)^(2q) with psi the angle off
    boresight. `tr38901` applies separable azimuth/elevation parabolic
    attenuations capped at `slav_db`.
    """

    kind: str = ISOTROPIC
    q: float = 1.0
    peak_gain_dbi: float = 0.0
    slav_db: float = 30.0
    beamwidth_deg: float = 65.0
    beamwidth_el_deg: float | None = None  # tr38901 only; None reuses beamwidth_deg

    def __post_init__(self):
        if self.kind not in (ISOTROPIC, COSINE_Q, TR38901):
            raise ValueError(f"unknown element pattern kind {self.kind!r}")
        if self.q <= 0.0:
            raise ValueError("cosine exponent q must be positive")
        if self.beamwidth_deg <= 0.0:
            raise ValueError("beamwidth must be positive")
        if self.beamwidth_el_deg is not None and self.beamwidth_el_deg <= 0.0:
            raise ValueError("elevation beamwidth must be positive")
        if self.slav_db <= 0.0:
            raise ValueError("side attenuation must be positive")

    @classmethod
    def isotropic(cls) -> "ElementPattern":
        return cls(kind=ISOTROPIC)

    @classmethod
    def cosine(cls, q: float = 1.0, peak_gain_dbi: float = 5.0) -> "ElementPattern":
        return cls(kind=COSINE_Q, q=q, peak_gain_dbi=peak_gain_dbi)

    @classmethod
    def cosine_for_beamwidth(cls, beamwidth_deg: float, peak_gain_dbi: float) -> "ElementPattern":
        """cosine_q pattern whose half-power beamwidth equals `beamwidth_deg`."""
        if beamwidth_deg <= 0.0 or beamwidth_deg >= 180.0:
            raise ValueError("beamwidth must lie in (0, 180) degrees")
        half = np.deg2rad(beamwidth_deg / 2.0)
        q = float(np.log(0.5) / (2.0 * np.log(np.cos(half))))
        return cls(kind=COSINE_Q, q=q, peak_gain_dbi=peak_gain_dbi)

    @classmethod
    def tr38901_panel(
        cls,
        peak_gain_dbi: float = 8.0,
        slav_db: float = 30.0,
        beamwidth_deg: float = 65.0,
        beamwidth_el_deg: float | None = None,
    ) -> "ElementPattern":
        return cls(
            kind=TR38901,
            peak_gain_dbi=peak_gain_dbi,
            slav_db=slav_db,
            beamwidth_deg=beamwidth_deg,
            beamwidth_el_deg=beamwidth_el_deg,
        )


def gain_azel(pattern: ElementPattern, az_rad, el_rad):
    """Linear power gain at azimuth/elevation (radians, any range); broadcasts."""
    az = np.asarray(az_rad, dtype=float)
    el = np.asarray(el_rad, dtype=float)
    if pattern.kind == ISOTROPIC:
        out = np.ones(np.broadcast_shapes(az.shape, el.shape))
        return out if out.ndim else float(out)
    peak = 10.0 ** (pattern.peak_gain_dbi / 10.0)
    if pattern.kind == COSINE_Q:
        cos_psi = np.maximum(np.cos(el) * np.cos(az), 0.0)
        out = peak * cos_psi ** (2.0 * pattern.q)
        return out if out.ndim else float(out)
    # tr38901: parabolic attenuations in dB, each capped at slav_db.
    az_deg = np.rad2deg(az)
    el_deg = np.rad2deg(el)
    bw_el = pattern.beamwidth_el_deg if pattern.beamwidth_el_deg is not None else pattern.beamwidth_deg
    att_h = np.minimum(12.0 * (az_deg / pattern.beamwidth_deg) ** 2, pattern.slav_db)
    att_v = np.minimum(12.0 * (el_deg / bw_el) ** 2, pattern.slav_db)
    att = np.minimum(att_h + att_v, pattern.slav_db)
    out = peak * 10.0 ** (-att / 10.0)
    return out if out.ndim else float(out)


def element_gain(pattern: ElementPattern, direction: Direction) -> float:
    """Linear power gain toward `direction` (element frame = array frame)."""
    return float(gain_azel(pattern, direction.azimuth_rad, direction.elevation_rad))


def to_db(linear) -> np.ndarray:
    """10*log10 with zero/negative values clamped to the dB floor."""
    linear = np.asarray(linear, dtype=float)
    out = np.full(linear.shape, DB_FLOOR)
    mask = linear > 0.0
    out[mask] = np.maximum(10.0 * np.log10(linear[mask]), DB_FLOOR)
    return out


def array_factor(
    omega: np.ndarray,
    aoa: Direction,
    aod: Direction,
    geom: ArrayGeometry,
    wavelength: float,
) -> float:
    """Power-domain array factor |omega^T (a(aoa) * conj(a(aod)))|^2.

    Bounded by N^2 for unit-modulus phase vectors.
    """
    omega = np.asarray(omega, dtype=complex)
    if omega.shape != (geom.n_elements,):
        raise ValueError(
            f"phase vector has length {omega.size}, geometry has {geom.n_elements} elements"
        )
    pair = array_response(geom, aoa, wavelength) * np.conj(array_response(geom, aod, wavelength))
    return float(np.abs(np.dot(omega, pair)) ** 2)


def overall_gain(
    omega: np.ndarray,
    aoa: Direction,
    aod: Direction,
    geom: ArrayGeometry,
    wavelength: float,
    pattern: ElementPattern,
) -> float:
    """Array factor weighted by the element gain on both sides."""
    a = array_factor(omega, aoa, aod, geom, wavelength)
    return a * element_gain(pattern, aoa) * element_gain(pattern, aod)


@dataclass
class PatternCut:
    """Azimuth cut of the overall gain at a fixed elevation, in dB."""

    azimuths_deg: np.ndarray
    elevation_deg: float
    gains_db: np.ndarray
    normalized: bool

    def __post_init__(self):
        self.azimuths_deg = np.asarray(self.azimuths_deg, dtype=float)
        self.gains_db = np.asarray(self.gains_db, dtype=float)
        if self.azimuths_deg.shape != self.gains_db.shape:
            raise ValueError("azimuth grid and gains differ in length")
        if self.azimuths_deg.size == 0:
            raise ValueError("pattern cut is empty")


def pattern_cut(
    omega: np.ndarray,
    aoa: Direction,
    geom: ArrayGeometry,
    wavelength: float,
    pattern: ElementPattern,
    azimuth_grid_deg,
    normalize: bool = True,
    elevation_deg: float = 0.0,
) -> PatternCut:
    """Overall gain swept over departure azimuths at a fixed elevation."""
    az_deg = np.atleast_1d(np.asarray(azimuth_grid_deg, dtype=float))
    if az_deg.size == 0:
        raise ValueError("azimuth grid must be nonempty")
    omega = np.asarray(omega, dtype=complex)
    if omega.shape != (geom.n_elements,):
        raise ValueError(
            f"phase vector has length {omega.size}, geometry has {geom.n_elements} elements"
        )
    az_rad = np.deg2rad(az_deg)
    el_rad = np.full_like(az_rad, np.deg2rad(elevation_deg))
    k_out = (2.0 * np.pi / wavelength) * unit_from_azel(az_rad, el_rad)  # (G, 3)
    steer = np.exp(-1j * element_positions(geom) @ k_out.T)  # (N, G)
    resp = (omega * array_response(geom, aoa, wavelength)) @ np.conj(steer)
    gains = np.abs(resp) ** 2 * element_gain(pattern, aoa) * gain_azel(pattern, az_rad, el_rad)
    gains_db = to_db(gains)
    if normalize:
        gains_db = gains_db - gains_db.max()
    return PatternCut(az_deg.copy(), float(elevation_deg), gains_db, bool(normalize))


def main_lobe_direction(cut: PatternCut) -> Direction:
    """Grid angle of the cut's maximum; ties break toward smaller azimuth."""
    best = cut.gains_db.max()
    candidates = cut.azimuths_deg[cut.gains_db >= best]
    return Direction(float(candidates.min()), cut.elevation_deg)
