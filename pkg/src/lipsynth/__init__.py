"""Speech-driven lip motion synthesis toolkit.

Builds a dynamic viseme library from blendshape capture data, renders timed
Pinyin scripts into continuous 27-channel lip trajectories via coarticulation
fusion and audio-energy modulation, retargets them onto an actuator space,
and scores motion quality (PCC, RMSE, mean absolute jerk).
"""

from .channels import CHANNELS, CHANNEL_INDEX, NUM_CHANNELS
from .errors import (
    BuildError,
    CalibrationError,
    FormatError,
    InsufficientCyclesError,
    LibraryError,
    LipSyncError,
    MappingError,
    PinyinError,
    ScriptError,
    SynthesisError,
)
from .series import (
    FrameSeries,
    VisemeTrajectory,
    clamp01,
    parse_capture_csv,
    resample_trajectory,
    series_csv_text,
    write_series_csv,
)
from .library import (
    VisemeLibrary,
    deserialize_library,
    load_library,
    save_library,
    serialize_library,
)
from .pinyin import (
    FINALS,
    INITIALS,
    MappingTable,
    SyllableParts,
    VisemeId,
    VISEME_IDS,
    default_table,
    load_mapping_table,
    map_to_visemes,
    split_syllable,
    syllable_to_visemes,
)
from .dtw import dtw_distance
from .builder import (
    BuilderConfig,
    CycleSegment,
    align_and_fuse,
    build_viseme,
    lowpass_filter,
    segment_cycles,
)
from .synthesis import (
    FusionParams,
    SyllableEvent,
    TimedScript,
    blend_dual,
    blend_triple,
    boundary_discontinuity,
    fusion_weight,
    parse_script,
    script_to_json,
    synthesize,
    synthesize_method_a,
    synthesize_method_b,
)
from .audio import (
    EnergyEnvelope,
    ModulationParams,
    ema_smooth,
    frame_rms,
    modulate,
    read_wav,
    rms_envelope,
    smooth_series,
    write_wav,
)
from .retarget import (
    ActuatorFrame,
    ActuatorSpec,
    CalibrationMatrix,
    ClampStats,
    default_calibration,
    fit_actuator_weights,
    load_calibration,
    raw_activation,
    retarget_frame,
    retarget_series,
)
from .metrics import (
    MetricReport,
    evaluate,
    jerk_series,
    maj,
    pcc,
    rmse,
    select_active_channels,
)

__version__ = "0.1.0"
