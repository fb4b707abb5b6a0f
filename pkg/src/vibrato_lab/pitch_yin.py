"""YIN fundamental-frequency tracking over a restricted search band.

References
----------
A. de Cheveigne and H. Kawahara, "YIN, a fundamental frequency estimator
for speech and music", J. Acoust. Soc. Am. 111(4), 2002.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import fft as sp_fft

from .audio_io import AudioBuffer
from .errors import DomainError

__all__ = [
    "YinConfig",
    "PitchTrack",
    "band_from_center",
    "yin_track",
    "difference_function",
    "cmndf",
]


def band_from_center(center_hint, width_cents=200.0):
    """Search band of ``width_cents`` either side of ``center_hint``.

    >>> band_from_center(220, 1200)
    (110.0, 440.0)
    """
    if center_hint <= 0:
        raise DomainError(f"center_hint must be positive, got {center_hint}")
    if width_cents <= 0:
        raise DomainError(f"width_cents must be positive, got {width_cents}")
    ratio = 2.0 ** (width_cents / 1200.0)
    return center_hint / ratio, center_hint * ratio


@dataclass(frozen=True)
class YinConfig:
    """Analysis parameters, all in samples except the band edges."""

    f_min: float
    f_max: float
    frame_length: int
    hop_length: int
    threshold: float = 0.1

    def lag_range(self, sample_rate):
        return (
            int(math.floor(sample_rate / self.f_max)),
            int(math.ceil(sample_rate / self.f_min)),
        )

    def validate(self, sample_rate):
        if not 0 < self.f_min < self.f_max < sample_rate / 2:
            raise DomainError(
                f"band ({self.f_min}, {self.f_max}) Hz invalid at sample rate {sample_rate}"
            )
        need = 2 * int(math.ceil(sample_rate / self.f_min))
        if self.frame_length < need:
            raise DomainError(f"frame_length {self.frame_length} < two periods of f_min ({need})")
        if not 0 < self.hop_length <= self.frame_length:
            raise DomainError(f"hop_length {self.hop_length} outside (0, frame_length]")
        if not 0 < self.threshold < 1:
            raise DomainError(f"threshold {self.threshold} outside (0, 1)")
        tau_min, tau_max = self.lag_range(sample_rate)
        if tau_min > tau_max:
            raise DomainError("empty lag search band")

    @classmethod
    def for_band(cls, sample_rate, f_min, f_max, threshold=0.1):
        """Default configuration for a search band.

        The frame holds exactly two periods of ``f_min`` plus one lag of
        headroom for the parabolic refinement, which keeps the integration
        window short enough to follow a 10 Hz vibrato. The hop is 256 samples
        at 44.1 kHz, scaled with the sample rate; for high bands the frame is
        widened to at least one hop so no samples are skipped.
        """
        hop_length = max(1, int(round(256 * sample_rate / 44100)))
        frame_length = max(2 * int(math.ceil(sample_rate / f_min)) + 2, hop_length)
        return cls(f_min, f_max, frame_length, hop_length, threshold)

    @classmethod
    def from_center(cls, sample_rate, center_hint, width_cents=200.0, threshold=0.1):
        f_min, f_max = band_from_center(center_hint, width_cents)
        return cls.for_band(sample_rate, f_min, f_max, threshold)


@dataclass(frozen=True)
class PitchTrack:
    times: np.ndarray
    f0: np.ndarray
    confidence: np.ndarray
    sample_rate: int
    hop_length: int

    def __len__(self):
        return len(self.times)

    @property
    def frame_rate(self):
        return self.sample_rate / self.hop_length

    def to_csv(self, path_or_file):
        """Write ``time_s, f0_hz, confidence`` rows."""
        rows = zip(self.times, self.f0, self.confidence)
        if isinstance(path_or_file, (str, os.PathLike)):
            with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
                _write_track(fh, rows)
        else:
            _write_track(path_or_file, rows)

    @classmethod
    def from_csv(cls, path, sample_rate, hop_length):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1], data[:, 2], sample_rate, hop_length)


def _write_track(fh, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["time_s", "f0_hz", "confidence"])
    for t, f, c in rows:
        writer.writerow([repr(float(t)), repr(float(f)), repr(float(c))])


def difference_function(frames, window, max_lag):
    """Squared difference d(tau) for tau = 0..max_lag, one row per frame.

    ``d(tau) = sum_{j<window} (x_j - x_{j+tau})**2``, evaluated through the
    energy decomposition and an FFT cross-correlation.
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    if frames.shape[1] < window + max_lag:
        raise DomainError("frame too short for the requested window and lag")
    head = frames[:, :window]
    body = frames[:, : window + max_lag]
    n_fft = sp_fft.next_fast_len(window + body.shape[1], real=True)
    spec = sp_fft.rfft(body, n_fft, axis=1) * np.conj(sp_fft.rfft(head, n_fft, axis=1))
    xcorr = sp_fft.irfft(spec, n_fft, axis=1)[:, : max_lag + 1]

    sq = np.concatenate([np.zeros((body.shape[0], 1)), np.cumsum(body**2, axis=1)], axis=1)
    energy_head = sq[:, window][:, None]
    lags = np.arange(max_lag + 1)
    energy_shift = sq[:, lags + window] - sq[:, lags]
    d = energy_head + energy_shift - 2.0 * xcorr
    # FFT round-off can push tiny values negative
    return np.maximum(d, 0.0)


def cmndf(d):
    """Cumulative-mean-normalised difference, d'(0) = 1.

    Lags whose running sum is zero (silence) are assigned 1.
    """
    d = np.atleast_2d(d)
    out = np.ones_like(d)
    running = np.cumsum(d[:, 1:], axis=1)
    lags = np.arange(1, d.shape[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = d[:, 1:] * lags / running
    out[:, 1:] = np.where(running > 0, ratio, 1.0)
    return out


def _select_lags(dprime, tau_min, tau_max, threshold):
    """Index of the chosen lag per frame (absolute threshold, then local min)."""
    band = dprime[:, tau_min : tau_max + 1]
    n_frames, n_lags = band.shape
    below = band < threshold
    has_dip = below.any(axis=1)
    first = np.argmax(below, axis=1)
    chosen = np.argmin(band, axis=1)

    for i in np.flatnonzero(has_dip):
        k = first[i]
        row = band[i]
        # walk down to the bottom of the dip that crossed the threshold
        while k + 1 < n_lags and row[k + 1] < row[k]:
            k += 1
        chosen[i] = k
    return chosen + tau_min


def _parabolic_shift(dprime, lags):
    rows = np.arange(dprime.shape[0])
    a = dprime[rows, lags - 1]
    b = dprime[rows, lags]
    c = dprime[rows, lags + 1]
    denom = a - 2.0 * b + c
    shift = np.zeros_like(b)
    ok = np.abs(denom) > 1e-12
    shift[ok] = 0.5 * (a[ok] - c[ok]) / denom[ok]
    return np.clip(shift, -1.0, 1.0)


def yin_track(buffer: AudioBuffer, cfg: YinConfig) -> PitchTrack:
    """Frame-wise YIN f0 estimate over the band ``[cfg.f_min, cfg.f_max]``.

    Frames start at multiples of ``hop_length`` without padding, so times are
    frame centres ``(i*hop + frame_length/2) / sr``. The difference function
    integrates over the first ``frame_length - tau_max - 1`` samples of each
    frame. Confidence is d' at the selected lag (lower is more periodic).
    """
    sr = buffer.sample_rate
    cfg.validate(sr)
    tau_min, tau_max = cfg.lag_range(sr)
    x = buffer.samples
    if x.size < cfg.frame_length:
        raise DomainError(f"buffer of {x.size} samples shorter than frame_length {cfg.frame_length}")

    frames = sliding_window_view(x, cfg.frame_length)[:: cfg.hop_length]
    window = cfg.frame_length - tau_max - 1
    dprime = cmndf(difference_function(frames, window, tau_max + 1))

    lags = _select_lags(dprime, tau_min, tau_max, cfg.threshold)
    confidence = dprime[np.arange(len(lags)), lags]
    refined = lags + _parabolic_shift(dprime, lags)
    f0 = np.clip(sr / refined, cfg.f_min, cfg.f_max)

    times = (np.arange(len(lags)) * cfg.hop_length + cfg.frame_length / 2) / sr
    return PitchTrack(times, f0, confidence, sr, cfg.hop_length)
