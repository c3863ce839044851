"""Ray-based cascaded channel construction and wideband power evaluation.

Rays are specular only: the straight path, one ground bounce per segment
via the image method, and one single-bounce path per wall reflector whose
specular point falls inside the wall footprint. Walls reflect but never
occlude. Per-ray amplitudes use the free-space factor at the surface-center
distance; per-element phases come from the plane-wave array response at the
ray's direction seen from the surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import ConfigMatrix, ReflectionModel, config_to_phase_vector
from .geometry import (
    ArrayGeometry,
    Position,
    SPEED_OF_LIGHT,
    azel_of_vector,
    direction_between,
    element_positions,
    unit_from_azel,
)
from .patterns import ElementPattern, gain_azel, to_db

SEGMENTS = ("tx_ris", "ris_rx", "tx_rx")

RAY_LOS = "los"
RAY_DIRECT = "direct"
RAY_GROUND = "ground_bounce"
RAY_WALL = "wall_reflection"


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency sweep, endpoints inclusive."""

    start_hz: float = 3.4e9
    stop_hz: float = 3.6e9
    n_points: int = 801

    def __post_init__(self):
        if not (0.0 < self.start_hz < self.stop_hz):
            raise ValueError("need 0 < start_hz < stop_hz")
        if self.n_points < 1:
            raise ValueError("need at least one frequency point")

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.start_hz, self.stop_hz, self.n_points)

    @property
    def center_hz(self) -> float:
        return 0.5 * (self.start_hz + self.stop_hz)


@dataclass(frozen=True)
class NodeSpec:
    """Terminal node: position, antenna model, and boresight.

    A boresight of None aims the antenna at the surface center; explicit
    angles use the global-frame azimuth/elevation convention and may point
    anywhere (azimuth is not restricted to the front half-space).
    """

    position: Position
    antenna: ElementPattern = ElementPattern.isotropic()
    boresight_azimuth_deg: float | None = None
    boresight_elevation_deg: float | None = None

    def __post_init__(self):
        explicit = (self.boresight_azimuth_deg is None, self.boresight_elevation_deg is None)
        if explicit[0] != explicit[1]:
            raise ValueError("boresight azimuth and elevation must be set together")


@dataclass(frozen=True)
class GroundSpec:
    """Flat ground plane at z = 0 with a complex reflection coefficient."""

    reflection: complex = -1.0

    def __post_init__(self):
        if abs(self.reflection) > 1.0 + 1e-12:
            raise ValueError("ground reflection amplitude exceeds 1")


@dataclass(frozen=True)
class WallReflector:
    """Vertical planar reflector with a plan-view segment footprint.

    The plane contains the segment (x1, y1)-(x2, y2) and extends over all z;
    the specular point must project inside the footprint.
    """

    x1: float
    y1: float
    x2: float
    y2: float
    reflection: complex = -0.7

    def __post_init__(self):
        if np.hypot(self.x2 - self.x1, self.y2 - self.y1) < 1e-9:
            raise ValueError("wall footprint endpoints coincide")
        if abs(self.reflection) > 1.0 + 1e-12:
            raise ValueError("wall reflection amplitude exceeds 1")


@dataclass(frozen=True)
class NoiseSpec:
    """Circularly-symmetric complex Gaussian receiver noise with a fixed seed."""

    variance: float
    seed: int = 0

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("noise variance must be nonnegative")

    def draws(self, n: int) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        scale = np.sqrt(self.variance / 2.0)
        return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


@dataclass(frozen=True)
class Scenario:
    """Immutable description of one measurement layout."""

    ris_geometry: ArrayGeometry
    tx: NodeSpec
    rx: NodeSpec
    ground: GroundSpec | None = None
    reflectors: tuple[WallReflector, ...] = ()
    direct_link_enabled: bool = True
    frequency_grid: FrequencyGrid = FrequencyGrid()
    noise: NoiseSpec | None = None

    def __post_init__(self):
        center = self.ris_geometry.center
        for name, node in (("tx", self.tx), ("rx", self.rx)):
            if node.position.x - center.x <= 0.0:
                raise ValueError(f"{name} must sit in front of the surface plane")
        if self.ground is not None:
            bottom = center.z - (self.ris_geometry.n_rows - 1) / 2.0 * self.ris_geometry.pitch_z
            if self.tx.position.z <= 0.0 or self.rx.position.z <= 0.0 or bottom <= 0.0:
                raise ValueError("all nodes and the surface must sit above the ground plane")

    @property
    def wavelength_center(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_grid.center_hz


@dataclass
class Ray:
    """One specular propagation path of a segment.

    `departure` points from the source toward the first leg, `arrival`
    from the target back along the last leg (both unit vectors).
    """

    kind: str
    source: np.ndarray
    target: np.ndarray
    bounce: np.ndarray | None
    path_length: float
    reflection: complex
    departure: np.ndarray
    arrival: np.ndarray


@dataclass
class ChannelRealization:
    """Single-frequency channels: per-element vectors and the direct scalar.

    `h_r` is stored with advanced phase (conjugate of the physical
    element-to-receiver response) so that the receive equation
    h_r^H diag(conj(omega)) h_g accumulates the full two-hop delay.
    """

    frequency_hz: float
    h_g: np.ndarray
    h_r: np.ndarray
    h_d: complex


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _segment_endpoints(s: Scenario, segment: str) -> tuple[np.ndarray, np.ndarray]:
    if segment not in SEGMENTS:
        raise ValueError(f"segment must be one of {SEGMENTS}, got {segment!r}")
    center = s.ris_geometry.center.as_array()
    if segment == "tx_ris":
        return s.tx.position.as_array(), center
    if segment == "ris_rx":
        return center, s.rx.position.as_array()
    return s.tx.position.as_array(), s.rx.position.as_array()


def _ground_ray(source, target, reflection, kind=RAY_GROUND) -> Ray | None:
    if source[2] <= 0.0 or target[2] <= 0.0:
        return None
    image = source.copy()
    image[2] = -image[2]
    span = target - image
    length = float(np.linalg.norm(span))
    t = source[2] / (source[2] + target[2])
    bounce = image + t * span
    return Ray(
        kind=kind,
        source=source,
        target=target,
        bounce=bounce,
        path_length=length,
        reflection=complex(reflection),
        departure=_unit(bounce - source),
        arrival=_unit(bounce - target),
    )


def _wall_ray(source, target, wall: WallReflector) -> Ray | None:
    p1 = np.array([wall.x1, wall.y1, 0.0])
    tangent = np.array([wall.x2 - wall.x1, wall.y2 - wall.y1, 0.0])
    length_fp = float(np.linalg.norm(tangent))
    tangent = tangent / length_fp
    normal = np.array([-tangent[1], tangent[0], 0.0])
    sd_src = float(normal @ (source - p1))
    sd_tgt = float(normal @ (target - p1))
    if sd_src * sd_tgt <= 1e-12:
        return None  # opposite sides or grazing: no specular bounce
    image = source - 2.0 * sd_src * normal
    span = target - image
    u = sd_src / (sd_src + sd_tgt)
    if not 0.0 < u < 1.0:
        return None
    bounce = image + u * span
    along = float(tangent @ (bounce - p1))
    if not 0.0 <= along <= length_fp:
        return None
    return Ray(
        kind=RAY_WALL,
        source=source,
        target=target,
        bounce=bounce,
        path_length=float(np.linalg.norm(span)),
        reflection=complex(wall.reflection),
        departure=_unit(bounce - source),
        arrival=_unit(bounce - target),
    )


def _ris_side_ok(s: Scenario, segment: str, ray: Ray) -> bool:
    # Bounce paths approaching the surface from behind carry no energy here.
    if segment == "tx_ris":
        look = ray.arrival
    elif segment == "ris_rx":
        look = ray.departure
    else:
        return True
    return look[0] > 1e-9


def trace_rays(s: Scenario, segment: str) -> list[Ray]:
    """All specular rays of a segment; the straight ray always comes first."""
    source, target = _segment_endpoints(s, segment)
    direct_kind = RAY_DIRECT if segment == "tx_rx" else RAY_LOS
    line = target - source
    rays = [
        Ray(
            kind=direct_kind,
            source=source,
            target=target,
            bounce=None,
            path_length=float(np.linalg.norm(line)),
            reflection=1.0 + 0.0j,
            departure=_unit(line),
            arrival=_unit(-line),
        )
    ]
    if s.ground is not None:
        ray = _ground_ray(source, target, s.ground.reflection)
        if ray is not None and _ris_side_ok(s, segment, ray):
            rays.append(ray)
    for wall in s.reflectors:
        ray = _wall_ray(source, target, wall)
        if ray is not None and _ris_side_ok(s, segment, ray):
            rays.append(ray)
    return rays


def _boresight_vector(s: Scenario, node: NodeSpec) -> np.ndarray:
    if node.boresight_azimuth_deg is None:
        return _unit(s.ris_geometry.center.as_array() - node.position.as_array())
    return unit_from_azel(
        np.deg2rad(node.boresight_azimuth_deg), np.deg2rad(node.boresight_elevation_deg)
    )


def _antenna_frame(boresight: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x_axis = _unit(boresight)
    y_axis = np.cross([0.0, 0.0, 1.0], x_axis)
    if np.linalg.norm(y_axis) < 1e-9:  # vertical boresight
        y_axis = np.cross(x_axis, [1.0, 0.0, 0.0])
    y_axis = _unit(y_axis)
    return x_axis, y_axis, np.cross(x_axis, y_axis)


def _node_gain(s: Scenario, node: NodeSpec, ray_dir: np.ndarray) -> float:
    """Power gain of a node's antenna along a unit ray direction."""
    x_axis, y_axis, z_axis = _antenna_frame(_boresight_vector(s, node))
    az = np.arctan2(ray_dir @ y_axis, ray_dir @ x_axis)
    el = np.arcsin(np.clip(ray_dir @ z_axis, -1.0, 1.0))
    return float(gain_azel(node.antenna, az, el))


def _amplitude_gain(s: Scenario, segment: str, ray: Ray) -> float:
    """sqrt of the terminal antenna power gains along the ray."""
    g = 1.0
    if segment in ("tx_ris", "tx_rx"):
        g *= _node_gain(s, s.tx, ray.departure)
    if segment in ("ris_rx", "tx_rx"):
        g *= _node_gain(s, s.rx, ray.arrival)
    return float(np.sqrt(g))


def _ris_look_direction(segment: str, ray: Ray) -> np.ndarray:
    return ray.arrival if segment == "tx_ris" else ray.departure


def _ray_terms(s: Scenario, segment: str):
    """Per-ray (coefficient, delay, per-element delay offsets) for a segment.

    The channel entry is coefficient / f * exp(-j 2 pi f (delay -/+ offset)).
    """
    center = s.ris_geometry.center.as_array()
    offsets = element_positions(s.ris_geometry) - center
    terms = []
    for ray in trace_rays(s, segment):
        coef = (
            SPEED_OF_LIGHT
            / (4.0 * np.pi * ray.path_length)
            * _amplitude_gain(s, segment, ray)
            * ray.reflection
        )
        tau = ray.path_length / SPEED_OF_LIGHT
        if segment == "tx_rx":
            sigma = None
        else:
            look = _ris_look_direction(segment, ray)
            sigma = offsets @ look / SPEED_OF_LIGHT
        terms.append((coef, tau, sigma))
    return terms


def assemble_channels(s: Scenario, frequency_hz: float) -> ChannelRealization:
    """Channels at one frequency, built ray by ray."""
    if frequency_hz <= 0.0:
        raise ValueError("frequency must be positive")
    n = s.ris_geometry.n_elements
    h_g = np.zeros(n, dtype=complex)
    h_r = np.zeros(n, dtype=complex)
    f = frequency_hz
    for coef, tau, sigma in _ray_terms(s, "tx_ris"):
        h_g += coef / f * np.exp(-2j * np.pi * f * (tau - sigma))
    for coef, tau, sigma in _ray_terms(s, "ris_rx"):
        h_r += coef / f * np.exp(2j * np.pi * f * (tau + sigma))
    h_d = 0.0 + 0.0j
    if s.direct_link_enabled:
        for coef, tau, _ in _ray_terms(s, "tx_rx"):
            h_d += coef / f * np.exp(-2j * np.pi * f * tau)
    return ChannelRealization(frequency_hz=f, h_g=h_g, h_r=h_r, h_d=h_d)


@dataclass
class WidebandChannel:
    """Precomputed cascade over the scenario frequency grid.

    `cascade[f, i]` is conj(h_r)[i] * h_g[i] at grid frequency f, so the
    received amplitude for a phase vector omega is cascade @ conj(omega)
    plus the direct term.
    """

    frequencies: np.ndarray
    cascade: np.ndarray
    direct: np.ndarray


@lru_cache(maxsize=4)
def wideband_channel(s: Scenario) -> WidebandChannel:
    freqs = s.frequency_grid.frequencies()
    n = s.ris_geometry.n_elements
    col = freqs[:, None]
    h_g = np.zeros((freqs.size, n), dtype=complex)
    h_r = np.zeros((freqs.size, n), dtype=complex)
    for coef, tau, sigma in _ray_terms(s, "tx_ris"):
        h_g += coef / col * np.exp(-2j * np.pi * col * (tau - sigma)[None, :])
    for coef, tau, sigma in _ray_terms(s, "ris_rx"):
        h_r += coef / col * np.exp(2j * np.pi * col * (tau + sigma)[None, :])
    direct = np.zeros(freqs.size, dtype=complex)
    if s.direct_link_enabled:
        for coef, tau, _ in _ray_terms(s, "tx_rx"):
            direct += coef / freqs * np.exp(-2j * np.pi * freqs * tau)
    return WidebandChannel(frequencies=freqs, cascade=np.conj(h_r) * h_g, direct=direct)


def received_signal(
    ch: ChannelRealization,
    phi: ConfigMatrix,
    refl: ReflectionModel = ReflectionModel(),
    s_sym: complex = 1.0 + 0.0j,
    noise_draw: complex = 0.0 + 0.0j,
    polarization: str = "h",
) -> complex:
    """y = (h_r^H diag(conj(omega)) h_g + h_d) * s + z."""
    omega = config_to_phase_vector(phi, polarization, refl).values
    if omega.size != ch.h_g.size or ch.h_g.size != ch.h_r.size:
        raise ValueError(
            f"configuration maps to {omega.size} elements, channels have {ch.h_g.size}"
        )
    cascade = np.sum(np.conj(ch.h_r) * np.conj(omega) * ch.h_g)
    return complex((cascade + ch.h_d) * s_sym + noise_draw)


def received_amplitudes(
    s: Scenario, omega: np.ndarray, wb: WidebandChannel | None = None
) -> np.ndarray:
    """Noiseless received amplitude per grid frequency for a phase vector."""
    wb = wb if wb is not None else wideband_channel(s)
    omega = np.asarray(omega, dtype=complex)
    if omega.size != wb.cascade.shape[1]:
        raise ValueError(
            f"phase vector has length {omega.size}, channel has {wb.cascade.shape[1]} elements"
        )
    return wb.cascade @ np.conj(omega) + wb.direct


def wideband_power(
    s: Scenario,
    phi: ConfigMatrix,
    refl: ReflectionModel = ReflectionModel(),
    polarization: str = "h",
) -> float:
    """Mean received power over the frequency grid, in dB.

    Deterministic: receiver noise never enters this metric.
    """
    omega = config_to_phase_vector(phi, polarization, refl).values
    y = received_amplitudes(s, omega)
    return float(to_db(np.mean(np.abs(y) ** 2)))


def normalize_powers(values, mode: str = "max_to_0") -> np.ndarray:
    """Shift dB values so the max (or min) sits exactly at 0 dB."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot normalize an empty power list")
    if mode == "max_to_0":
        return values - values.max()
    if mode == "min_to_0":
        return values - values.min()
    raise ValueError(f"mode must be 'max_to_0' or 'min_to_0', got {mode!r}")


def true_rx_azimuth(s: Scenario) -> float:
    """Receiver azimuth at the surface center, degrees."""
    direction, _ = direction_between(s.ris_geometry.center, s.rx.position)
    return direction.azimuth_deg
