"""Vibrato measurement for bowed-string recordings.

Pitch is tracked with YIN, the contour is smoothed and split into cycles
around a midpoint trend line, and the acoustic depth is mapped back to the
finger's physical swing along the string.
"""

__version__ = "0.1.0"

from .audio_io import AudioBuffer, decode_wav, encode_wav, trim
from .contour import (
    CycleAnalysis,
    ExtremaConfig,
    SmoothingConfig,
    build_trend,
    find_extrema,
    measure_cycles,
    savgol_smooth,
)
from .errors import AnalysisRejected, AudioFormatError, DomainError, VibratoLabError
from .pipeline import Analysis, analyze_buffer, analyze_file
from .pitch_yin import PitchTrack, YinConfig, band_from_center, yin_track
from .stats import (
    RegressionResult,
    SpearmanResult,
    group_stats,
    polyfit,
    r_squared_of_model,
    spearman,
)
from .synth import SynthSpec, render, true_measurement
from .vibrato_model import (
    CELLO_STRINGS,
    StringSpec,
    VibratoMeasurement,
    acoustic_depth,
    assemble_measurement,
    cents_half_depth,
    model_curves,
    physical_center,
    physical_depth,
)
