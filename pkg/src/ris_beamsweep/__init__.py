"""Desk-scale simulator and optimizer for 1-bit RIS beam sweeping."""

from ._version import __version__
from .channel import (
    ChannelRealization,
    FrequencyGrid,
    GroundSpec,
    NodeSpec,
    NoiseSpec,
    Ray,
    Scenario,
    WallReflector,
    assemble_channels,
    normalize_powers,
    received_signal,
    trace_rays,
    true_rx_azimuth,
    wideband_power,
)
from .codebook import (
    Codebook,
    CodebookEntry,
    SweepReport,
    beam_sweep_estimate,
    build_codebook_model,
    build_codebook_scan,
    case2_row_extension,
    frequency_selectivity_report,
    load_codebook,
    save_codebook,
    second_best_margin,
)
from .config import (
    ConfigMatrix,
    PhaseVector,
    ReflectionModel,
    config_to_phase_vector,
    is_column_constant,
    quantize_1bit,
)
from .geometry import (
    ArrayGeometry,
    Direction,
    Position,
    SPEED_OF_LIGHT,
    array_response,
    direction_between,
    element_positions,
    wave_vector,
)
from .optimize import (
    EnumerationLimitError,
    ScanStep,
    ScanTrace,
    column_row_scan,
    continuous_optimal_config,
    exhaustive_oracle,
)
from .patterns import (
    ElementPattern,
    PatternCut,
    array_factor,
    element_gain,
    main_lobe_direction,
    overall_gain,
    pattern_cut,
)
from .scenario_io import (
    load_preset,
    preset_path,
    read_scenario,
    scenario_fingerprint,
    with_rx_azimuth,
    write_scenario,
)

__all__ = [name for name in dir() if not name.startswith("_")]
