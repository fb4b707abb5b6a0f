"""End-to-end measurement of one excerpt: audio -> YIN -> cycles -> quantities."""

from __future__ import annotations

from dataclasses import dataclass

from .audio_io import AudioBuffer, decode_wav, trim
from .contour import CycleAnalysis, ExtremaConfig, SmoothingConfig, measure_cycles
from .errors import AnalysisRejected, DomainError
from .pitch_yin import PitchTrack, YinConfig, yin_track
from .vibrato_model import StringSpec, VibratoMeasurement, assemble_measurement

__all__ = ["Analysis", "analyze_buffer", "analyze_file"]


@dataclass
class Analysis:
    measurement: VibratoMeasurement
    track: PitchTrack
    cycles: CycleAnalysis


def analyze_buffer(
    buffer: AudioBuffer,
    string_freq,
    center_hint,
    band_width_cents=200.0,
    *,
    yin: YinConfig = None,
    smoothing: SmoothingConfig = None,
    extrema: ExtremaConfig = ExtremaConfig(),
    file="",
    player="",
    corpus="",
) -> Analysis:
    """Measure the vibrato in ``buffer`` played on a string tuned to ``string_freq``.

    ``center_hint`` is the intended note; YIN searches ``band_width_cents``
    either side of it unless an explicit ``yin`` config is given.
    """
    string = string_freq if isinstance(string_freq, StringSpec) else StringSpec(float(string_freq))
    if center_hint < string.f_s:
        raise DomainError(
            f"center hint {center_hint} Hz lies below the open string {string.f_s} Hz"
        )
    if yin is None:
        yin = YinConfig.from_center(buffer.sample_rate, center_hint, band_width_cents)
    if len(buffer) < yin.frame_length:
        raise AnalysisRejected("too-short", "excerpt shorter than one analysis frame")
    track = yin_track(buffer, yin)
    cycles = measure_cycles(track, smoothing, extrema)
    m = assemble_measurement(cycles, string, file=file, player=player, corpus=corpus)
    return Analysis(m, track, cycles)


def analyze_file(path, string_freq, center_hint, band_width_cents=200.0,
                 start_s=None, end_s=None, **kwargs) -> Analysis:
    """:func:`analyze_buffer` on a WAV file, optionally trimmed to [start_s, end_s)."""
    buf = decode_wav(path)
    if start_s is not None or end_s is not None:
        buf = trim(buf, start_s or 0.0, buf.duration if end_s is None else end_s)
    kwargs.setdefault("file", str(path))
    return analyze_buffer(buf, string_freq, center_hint, band_width_cents, **kwargs)
