"""Binary surface configurations and their mapping to reflection phases.

The dual-polarized surface exposes a binary state matrix of shape
(n_rows, 2 * n_element_cols): state columns (2k, 2k+1) are the horizontal
and vertical polarization controls of physical element column k. Only the
selected polarization contributes to the simulated phase vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

POLARIZATIONS = ("h", "v")


@dataclass(frozen=True)
class ReflectionModel:
    """Complex reflection coefficient per binary state.

    Defaults are the ideal 1-bit states exp(-j*pi/2) and exp(+j*pi/2);
    amplitudes below one model lossy elements.
    """

    state0: complex = -1j
    state1: complex = 1j

    def __post_init__(self):
        for name, value in (("state0", self.state0), ("state1", self.state1)):
            mag = abs(value)
            if not np.isfinite(mag) or mag == 0.0:
                raise ValueError(f"{name} must be finite and nonzero")
            if mag > 1.0 + 1e-12:
                raise ValueError(f"{name} has amplitude {mag} > 1")

    def values(self, states: np.ndarray) -> np.ndarray:
        """Map a 0/1 array to reflection coefficients."""
        return np.where(np.asarray(states, dtype=bool), self.state1, self.state0)

    def nearest_states(self, omega: np.ndarray) -> np.ndarray:
        """Snap each complex entry to the state of nearer phase; ties pick state 1."""
        omega = np.asarray(omega, dtype=complex)
        if np.any(omega == 0):
            raise ValueError("cannot quantize zero entries")
        phase = np.angle(omega)

        def dist(ref: complex) -> np.ndarray:
            d = np.abs(phase - np.angle(ref))
            return np.minimum(d, 2.0 * np.pi - d)

        return (dist(self.state0) >= dist(self.state1)).astype(np.uint8)


@dataclass
class ConfigMatrix:
    """Binary state grid of shape (n_rows, 2 * n_element_cols)."""

    states: np.ndarray

    def __post_init__(self):
        states = np.asarray(self.states)
        if states.ndim != 2:
            raise ValueError("configuration matrix must be 2-D")
        if states.shape[1] % 2 != 0:
            raise ValueError("state column count must be even (two polarizations)")
        if not np.isin(states, (0, 1)).all():
            raise ValueError("configuration entries must be 0 or 1")
        self.states = states.astype(np.uint8)

    @classmethod
    def zeros(cls, n_rows: int, n_element_cols: int) -> "ConfigMatrix":
        if n_rows < 1 or n_element_cols < 1:
            raise ValueError("configuration needs at least one row and one column")
        return cls(np.zeros((n_rows, 2 * n_element_cols), dtype=np.uint8))

    @property
    def n_rows(self) -> int:
        return self.states.shape[0]

    @property
    def n_state_cols(self) -> int:
        return self.states.shape[1]

    @property
    def n_element_cols(self) -> int:
        return self.states.shape[1] // 2

    def copy(self) -> "ConfigMatrix":
        return ConfigMatrix(self.states.copy())

    def to_lines(self) -> list[str]:
        """Plain-text rows of 0/1 characters, row 1 first."""
        return ["".join(str(int(v)) for v in row) for row in self.states]

    @classmethod
    def from_lines(cls, lines) -> "ConfigMatrix":
        rows = [line.strip() for line in lines if line.strip()]
        if not rows:
            raise ValueError("no configuration rows found")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("configuration rows differ in length")
        grid = np.array([[int(c) for c in row] for row in rows])
        return cls(grid)


@dataclass(frozen=True)
class PhaseVector:
    """Reflection coefficients of the simulated polarization, length N, row-major."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("phase vector must be a nonempty 1-D array")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def config_to_phase_vector(
    phi: ConfigMatrix, polarization: str = "h", refl: ReflectionModel = ReflectionModel()
) -> PhaseVector:
    """Select one polarization's states, flatten row-major, map to coefficients."""
    if polarization not in POLARIZATIONS:
        raise ValueError(f"polarization must be one of {POLARIZATIONS}, got {polarization!r}")
    offset = 0 if polarization == "h" else 1
    states = phi.states[:, offset::2].reshape(-1)
    return PhaseVector(refl.values(states))


def selected_states(phi: ConfigMatrix, polarization: str = "h") -> np.ndarray:
    """The (n_rows, n_element_cols) state slice of one polarization."""
    if polarization not in POLARIZATIONS:
        raise ValueError(f"polarization must be one of {POLARIZATIONS}, got {polarization!r}")
    offset = 0 if polarization == "h" else 1
    return phi.states[:, offset::2].copy()


def quantize_1bit(omega_cont: np.ndarray, refl: ReflectionModel = ReflectionModel()) -> PhaseVector:
    """Snap a continuous phase vector to the two discrete states."""
    states = refl.nearest_states(omega_cont)
    return PhaseVector(refl.values(states))


def is_column_constant(phi: ConfigMatrix) -> bool:
    """True when every state column is uniform across rows."""
    return bool(np.all(phi.states == phi.states[:1, :]))
