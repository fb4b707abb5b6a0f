"""Smoothing, extremum detection and trend-line analysis of a pitch contour."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import AnalysisRejected, DomainError
from .pitch_yin import PitchTrack

__all__ = [
    "SmoothingConfig",
    "ExtremaConfig",
    "CycleAnalysis",
    "savgol_coeffs",
    "savgol_smooth",
    "savgol_gain",
    "window_for_rate",
    "find_extrema",
    "build_trend",
    "evaluate_trend",
    "measure_cycles",
]


@dataclass(frozen=True)
class SmoothingConfig:
    window: int = 101
    polyorder: int = 3

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise DomainError(f"window must be a positive odd integer, got {self.window}")
        if not 0 <= self.polyorder < self.window:
            raise DomainError(f"polyorder {self.polyorder} must lie in [0, window)")


@dataclass(frozen=True)
class ExtremaConfig:
    min_rate_hz: float = 3.0
    max_rate_hz: float = 10.0
    min_prominence_cents: float = 3.0

    def __post_init__(self):
        if not 0 < self.min_rate_hz < self.max_rate_hz:
            raise DomainError("need 0 < min_rate_hz < max_rate_hz")
        if self.min_prominence_cents < 0:
            raise DomainError("min_prominence_cents must be non-negative")


# -- Savitzky-Golay ----------------------------------------------------------


def savgol_coeffs(n_points, polyorder, pos=None):
    """Weights that evaluate the least-squares polynomial at sample ``pos``.

    The fit runs over ``n_points`` consecutive samples (offsets 0..n-1) and
    the returned weights are to be dotted with those samples. ``pos``
    defaults to the centre of the window.
    """
    if pos is None:
        pos = (n_points - 1) / 2
    if polyorder >= n_points:
        raise DomainError(f"polyorder {polyorder} needs more than {n_points} points")
    # centre and scale the abscissa for a well-conditioned Vandermonde matrix
    half = max((n_points - 1) / 2, 1.0)
    u = (np.arange(n_points) - (n_points - 1) / 2) / half
    A = np.vander(u, polyorder + 1, increasing=True)
    u_eval = (pos - (n_points - 1) / 2) / half
    e = u_eval ** np.arange(polyorder + 1)
    return e @ np.linalg.pinv(A)


def savgol_smooth(values, cfg: SmoothingConfig = SmoothingConfig()):
    """Savitzky-Golay smoothing with per-sample refits near the edges.

    Interior samples use the centred ``cfg.window`` filter. Within half a
    window of either end the polynomial is refitted on the truncated window
    (the samples that exist inside ``[i - half, i + half]``); when that leaves
    too few points for ``cfg.polyorder`` the degree drops to interpolation.
    Sequences shorter than the window use the largest odd window that fits,
    provided it still exceeds the polynomial order.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if n < 1:
        raise DomainError("cannot smooth an empty sequence")
    window = cfg.window
    if n < window:
        window = n if n % 2 else n - 1
        if window <= cfg.polyorder:
            raise DomainError(
                f"polyorder {cfg.polyorder} too high for a {n}-sample sequence"
            )
    half = window // 2
    out = np.empty(n)
    if n >= window:
        c = savgol_coeffs(window, cfg.polyorder)
        out[half : n - half] = np.convolve(x, c[::-1], mode="valid")
    for i in list(range(min(half, n))) + list(range(max(n - half, half), n)):
        lo, hi = max(0, i - half), min(n, i + half + 1)
        order = min(cfg.polyorder, hi - lo - 1)
        out[i] = savgol_coeffs(hi - lo, order, pos=i - lo) @ x[lo:hi]
    return out


def savgol_gain(window, polyorder, freq):
    """Magnitude response of the centred filter at ``freq`` cycles/sample."""
    c = savgol_coeffs(window, polyorder)
    k = np.arange(window) - window // 2
    return np.abs(np.sum(c * np.exp(-2j * np.pi * freq * k)))


def window_for_rate(frame_rate, max_rate_hz, window_max=101, polyorder=3, min_gain=0.99):
    """Largest odd window <= ``window_max`` passing ``max_rate_hz`` with gain >= ``min_gain``.

    Keeps the smoothing "light": the fastest vibrato the extremum search
    admits loses at most ``1 - min_gain`` of its amplitude.
    """
    freq = max_rate_hz / frame_rate
    smallest = polyorder + 2 if polyorder % 2 else polyorder + 1
    for window in range(window_max if window_max % 2 else window_max - 1, smallest - 1, -2):
        if savgol_gain(window, polyorder, freq) >= min_gain:
            return window
    return smallest


# -- extrema and trend -------------------------------------------------------


def _to_cents(f0):
    return 1200.0 * np.log2(f0 / np.median(f0))


def find_extrema(times, smoothed, cfg: ExtremaConfig = ExtremaConfig()):
    """Alternating peak and trough indices of a smoothed f0 contour.

    Uses ``scipy.signal.find_peaks`` on the contour expressed in cents, with a
    minimum spacing of one period of ``cfg.max_rate_hz`` and a minimum
    prominence of ``cfg.min_prominence_cents``. Where two extrema of the same
    kind end up adjacent, the more extreme one is kept.

    Returns
    -------
    peaks, troughs : ndarray of int
    """
    times = np.asarray(times, dtype=np.float64)
    f = np.asarray(smoothed, dtype=np.float64)
    if f.size < 3:
        raise AnalysisRejected("no-vibrato", "contour shorter than three frames")
    if np.any(f <= 0):
        raise DomainError("f0 contour must be positive")
    step = np.median(np.diff(times))
    distance = max(1, int(np.floor(1.0 / (cfg.max_rate_hz * step))))
    cents = _to_cents(f)
    prominence = cfg.min_prominence_cents if cfg.min_prominence_cents > 0 else None
    peaks, _ = find_peaks(cents, distance=distance, prominence=prominence)
    troughs, _ = find_peaks(-cents, distance=distance, prominence=prominence)

    merged = sorted([(i, 1) for i in peaks] + [(i, -1) for i in troughs])
    seq = []
    for idx, kind in merged:
        if seq and seq[-1][1] == kind:
            prev = seq[-1][0]
            if kind * f[idx] > kind * f[prev]:
                seq[-1] = (idx, kind)
            continue
        seq.append((idx, kind))
    peaks = np.array([i for i, k in seq if k == 1], dtype=int)
    troughs = np.array([i for i, k in seq if k == -1], dtype=int)
    if peaks.size < 2 or troughs.size < 2:
        raise AnalysisRejected(
            "no-vibrato", f"found {peaks.size} peaks and {troughs.size} troughs, need 2 of each"
        )
    return peaks, troughs


def build_trend(peaks, troughs, times, f0):
    """Trend nodes at the midpoints of consecutive extrema.

    Returns an ``(n, 2)`` array of ``(time_s, freq_hz)`` nodes.
    """
    order = np.sort(np.concatenate([peaks, troughs]).astype(int))
    if order.size < 2:
        raise DomainError("need at least two extrema to build a trend")
    t = np.asarray(times, dtype=np.float64)[order]
    f = np.asarray(f0, dtype=np.float64)[order]
    return np.column_stack([(t[:-1] + t[1:]) / 2, (f[:-1] + f[1:]) / 2])


def evaluate_trend(trend, t):
    """Piecewise-linear trend at ``t``, held flat outside the node span."""
    trend = np.asarray(trend)
    return np.interp(t, trend[:, 0], trend[:, 1])


@dataclass
class CycleAnalysis:
    times: np.ndarray
    raw_f0: np.ndarray
    smoothed_f0: np.ndarray
    peak_indices: np.ndarray
    trough_indices: np.ndarray
    trend: np.ndarray
    extremum_indices: np.ndarray
    extremum_kinds: np.ndarray
    deviations_hz: np.ndarray
    deviations_cents: np.ndarray
    smoothing_window: int = 0

    @property
    def peak_times(self):
        return self.times[self.peak_indices]

    @property
    def extremum_times(self):
        return self.times[self.extremum_indices]

    def trend_at(self, t):
        return evaluate_trend(self.trend, t)

    def to_csv(self, path_or_file):
        """One row per extremum: kind, index, time, frequency, trend, deviations."""
        if isinstance(path_or_file, (str, os.PathLike)):
            with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
                self._write(fh)
        else:
            self._write(path_or_file)

    def _write(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "frame", "time_s", "f0_hz", "trend_hz", "dev_hz", "dev_cents"])
        trend_vals = self.trend_at(self.extremum_times)
        for j, idx in enumerate(self.extremum_indices):
            w.writerow(
                [
                    "peak" if self.extremum_kinds[j] > 0 else "trough",
                    int(idx),
                    repr(float(self.times[idx])),
                    repr(float(self.smoothed_f0[idx])),
                    repr(float(trend_vals[j])),
                    repr(float(self.deviations_hz[j])),
                    repr(float(self.deviations_cents[j])),
                ]
            )


def measure_cycles(track: PitchTrack, smoothing=None, extrema=ExtremaConfig()):
    """Smooth the track, locate extrema, build the trend and measure deviations.

    With ``smoothing=None`` the Savitzky-Golay window is chosen by
    :func:`window_for_rate` (at most 101 frames, cubic) for the track's frame
    rate and ``extrema.max_rate_hz``.
    """
    times = np.asarray(track.times, dtype=np.float64)
    f0 = np.asarray(track.f0, dtype=np.float64)
    if f0.size < 3:
        raise AnalysisRejected("no-vibrato", "pitch track shorter than three frames")
    if smoothing is None:
        frame_rate = 1.0 / np.median(np.diff(times))
        smoothing = SmoothingConfig(window_for_rate(frame_rate, extrema.max_rate_hz), 3)
    smooth = savgol_smooth(f0, smoothing)

    peaks, troughs = find_extrema(times, smooth, extrema)
    period = np.mean(np.diff(times[peaks]))
    if period > 1.0 / extrema.min_rate_hz:
        raise AnalysisRejected(
            "rate-out-of-band",
            f"vibrato rate {1 / period:.2f} Hz below {extrema.min_rate_hz} Hz",
        )
    trend = build_trend(peaks, troughs, times, smooth)

    idx = np.concatenate([peaks, troughs])
    kinds = np.concatenate([np.ones(peaks.size, int), -np.ones(troughs.size, int)])
    order = np.argsort(idx)
    idx, kinds = idx[order], kinds[order]
    f_ext = smooth[idx]
    f_trend = evaluate_trend(trend, times[idx])
    dev_hz = np.abs(f_ext - f_trend)
    dev_cents = np.abs(1200.0 * np.log2(f_ext / f_trend))

    return CycleAnalysis(
        times=times,
        raw_f0=f0,
        smoothed_f0=smooth,
        peak_indices=peaks,
        trough_indices=troughs,
        trend=trend,
        extremum_indices=idx,
        extremum_kinds=kinds,
        deviations_hz=dev_hz,
        deviations_cents=dev_cents,
        smoothing_window=min(smoothing.window, f0.size if f0.size % 2 else f0.size - 1),
    )
