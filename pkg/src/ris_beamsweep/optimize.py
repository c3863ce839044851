"""Phase configuration search: closed-form optimum, greedy scanning, enumeration.

The greedy scan starts from the all-zero surface, inverts polarization
column pairs left to right, then whole rows top to bottom, keeping each
inversion only on strict improvement of the wideband power metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import Scenario, received_amplitudes, wideband_channel
from .config import ConfigMatrix, ReflectionModel, config_to_phase_vector
from .geometry import ArrayGeometry, Direction, array_response
from .patterns import to_db

OBJECTIVES = ("maximize", "minimize")


class EnumerationLimitError(ValueError):
    """Raised when an exhaustive search would exceed the configured bit budget."""


def continuous_optimal_config(
    aoa: Direction, aod: Direction, geom: ArrayGeometry, wavelength: float
) -> np.ndarray:
    """Unit-modulus phase vector that attains the array-factor maximum N^2."""
    pair = array_response(geom, aoa, wavelength) * np.conj(array_response(geom, aod, wavelength))
    return np.conj(pair)


@dataclass
class ScanStep:
    """One candidate inversion of the greedy scan."""

    step_kind: str  # "column_pair" | "row"
    index: int  # 1-based: first state column of the pair, or row number
    candidate_db: float
    accepted: bool
    best_db: float


@dataclass
class ScanTrace:
    """Baseline measurement plus the ordered accept/revert record."""

    objective: str
    baseline_db: float
    steps: list[ScanStep] = field(default_factory=list)

    def best_values(self) -> np.ndarray:
        return np.array([s.best_db for s in self.steps])

    def is_monotone(self) -> bool:
        seq = np.concatenate(([self.baseline_db], self.best_values()))
        diffs = np.diff(seq)
        return bool(np.all(diffs >= 0) if self.objective == "maximize" else np.all(diffs <= 0))

    @property
    def final_db(self) -> float:
        return self.steps[-1].best_db if self.steps else self.baseline_db


def _improves(objective: str, candidate: float, best: float) -> bool:
    return candidate > best if objective == "maximize" else candidate < best


def _power_evaluator(s: Scenario, refl: ReflectionModel, polarization: str):
    wb = wideband_channel(s)

    def power_db(phi: ConfigMatrix) -> float:
        omega = config_to_phase_vector(phi, polarization, refl).values
        y = received_amplitudes(s, omega, wb)
        return float(to_db(np.mean(np.abs(y) ** 2)))

    return power_db


def column_row_scan(
    s: Scenario,
    objective: str = "maximize",
    iterations: int = 1,
    refl: ReflectionModel = ReflectionModel(),
    polarization: str = "h",
) -> tuple[ConfigMatrix, ScanTrace]:
    """Greedy column-pair then row inversion scan over the binary surface.

    Column pairs move both polarization states of one physical column
    together; row steps invert the full state row. Ties revert.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    geom = s.ris_geometry
    phi = ConfigMatrix.zeros(geom.n_rows, geom.n_cols)
    power_db = _power_evaluator(s, refl, polarization)
    best = power_db(phi)
    trace = ScanTrace(objective=objective, baseline_db=best)
    for _ in range(iterations):
        for col in range(0, phi.n_state_cols, 2):
            phi.states[:, col : col + 2] ^= 1
            candidate = power_db(phi)
            accepted = _improves(objective, candidate, best)
            if accepted:
                best = candidate
            else:
                phi.states[:, col : col + 2] ^= 1
            trace.steps.append(ScanStep("column_pair", col + 1, candidate, accepted, best))
        for row in range(phi.n_rows):
            phi.states[row, :] ^= 1
            candidate = power_db(phi)
            accepted = _improves(objective, candidate, best)
            if accepted:
                best = candidate
            else:
                phi.states[row, :] ^= 1
            trace.steps.append(ScanStep("row", row + 1, candidate, accepted, best))
    return phi, trace


def exhaustive_oracle(
    s: Scenario,
    objective: str = "maximize",
    refl: ReflectionModel = ReflectionModel(),
    max_bits: int = 20,
    polarization: str = "h",
) -> tuple[ConfigMatrix, float]:
    """Global optimum over every binary configuration, by enumeration.

    Ties resolve to the smallest configuration integer (bit b of the
    integer is the row-major flattened state at index b), so the result is
    independent of chunking.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    geom = s.ris_geometry
    n_rows, n_state_cols = geom.n_rows, 2 * geom.n_cols
    bits = n_rows * n_state_cols
    if bits > max_bits:
        raise EnumerationLimitError(
            f"{n_rows}x{n_state_cols} configuration has {bits} bits, limit is {max_bits}"
        )
    wb = wideband_channel(s)
    offset = 0 if polarization == "h" else 1
    sim_bits = np.arange(offset, n_state_cols, 2)[None, :] + (
        np.arange(n_rows)[:, None] * n_state_cols
    )
    sim_bits = sim_bits.reshape(-1)  # row-major flatten of the simulated polarization
    c0, c1 = refl.state0, refl.state1

    best_value = None
    best_index = -1
    total = 1 << bits
    chunk = 1 << min(bits, 12)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        states = (idx[:, None] >> sim_bits[None, :]) & 1
        omegas = np.where(states.astype(bool), c1, c0)
        y = np.conj(omegas) @ wb.cascade.T + wb.direct[None, :]
        powers = to_db(np.mean(np.abs(y) ** 2, axis=1))
        pick = int(np.argmax(powers) if objective == "maximize" else np.argmin(powers))
        value = float(powers[pick])
        if best_value is None or _improves(objective, value, best_value):
            best_value = value
            best_index = int(idx[pick])
    full = (best_index >> np.arange(bits, dtype=np.int64)) & 1
    phi = ConfigMatrix(full.reshape(n_rows, n_state_cols).astype(np.uint8))
    return phi, best_value
