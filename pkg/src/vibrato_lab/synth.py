"""Synthetic vibrato tones with exactly known parameters.

These are test fixtures: every quantity the pipeline measures is known in
closed form from the :class:`SynthSpec` that produced the audio.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .audio_io import AudioBuffer
from .errors import DomainError

__all__ = ["SynthSpec", "instantaneous_frequency", "render", "render_phase", "true_measurement"]

PEAK_LEVEL = 0.9


@dataclass(frozen=True)
class SynthSpec:
    f_center: float = 440.0
    depth_cents: float = 20.0
    rate_hz: float = 6.0
    duration_s: float = 2.0
    sample_rate: int = 44100
    n_harmonics: int = 3
    drift_hz_per_s: float = 0.0
    noise_rms: float = 0.0
    seed: int = 0

    def validate(self):
        if self.f_center <= 0 or self.sample_rate <= 0 or self.duration_s <= 0:
            raise DomainError("f_center, sample_rate and duration_s must be positive")
        if self.depth_cents < 0 or self.noise_rms < 0:
            raise DomainError("depth_cents and noise_rms must be non-negative")
        if self.n_harmonics < 1:
            raise DomainError("n_harmonics must be at least 1")
        if self.rate_hz <= 0 or self.duration_s * self.rate_hz < 2:
            raise DomainError("need at least two vibrato cycles (duration_s * rate_hz >= 2)")
        f_top = max(self.f_center, self.f_center + self.drift_hz_per_s * self.duration_s)
        f_top *= 2.0 ** (self.depth_cents / 1200.0) * self.n_harmonics
        if f_top >= self.sample_rate / 2:
            raise DomainError(
                f"highest partial {f_top:.1f} Hz aliases at sample rate {self.sample_rate}"
            )
        f_low = self.f_center + min(0.0, self.drift_hz_per_s * self.duration_s)
        if f_low <= 0:
            raise DomainError("drift drives the centre frequency below zero")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SynthSpec":
        return cls(**json.loads(text))


def instantaneous_frequency(spec: SynthSpec, t):
    """f(t) = (f_center + drift*t) * 2**((depth/1200) * sin(2*pi*rate*t))."""
    t = np.asarray(t, dtype=np.float64)
    centre = spec.f_center + spec.drift_hz_per_s * t
    return centre * 2.0 ** (spec.depth_cents / 1200.0 * np.sin(2 * np.pi * spec.rate_hz * t))


def render_phase(spec: SynthSpec):
    """Sample times and the trapezoidal phase integral of the instantaneous frequency."""
    n = int(round(spec.duration_s * spec.sample_rate))
    t = np.arange(n) / spec.sample_rate
    f = instantaneous_frequency(spec, t)
    phase = np.zeros(n)
    phase[1:] = np.cumsum(np.pi * (f[1:] + f[:-1]) / spec.sample_rate)
    return t, phase


def render(spec: SynthSpec) -> AudioBuffer:
    """Render the tone described by ``spec``.

    Phase is the per-sample trapezoidal integral of the instantaneous
    frequency; partial k has amplitude 1/k. The clean signal is normalised to
    a peak of 0.9 before seeded Gaussian noise is added.
    """
    spec.validate()
    t, phase = render_phase(spec)
    n = t.size

    signal = np.zeros(n)
    for k in range(1, spec.n_harmonics + 1):
        signal += np.sin(k * phase) / k
    signal *= PEAK_LEVEL / np.max(np.abs(signal))

    if spec.noise_rms > 0:
        rng = np.random.default_rng(spec.seed)
        rms = np.sqrt(np.mean(signal**2))
        signal = signal + rng.normal(0.0, spec.noise_rms * rms, n)
        # keep the buffer inside the PCM range
        signal = np.clip(signal, -1.0, 1.0)
    return AudioBuffer(signal, spec.sample_rate, "synth")


def true_measurement(spec: SynthSpec, f_s: float, **metadata):
    """The measurement a perfect pipeline would report for ``spec``.

    The acoustic depth in Hz is the symmetric half-excursion
    ``f_c * (2**a - 2**-a) / 2`` with ``a = depth_cents / 1200``.
    """
    from .vibrato_model import VibratoMeasurement, physical_center, physical_depth

    f_c = spec.f_center + spec.drift_hz_per_s * spec.duration_s / 2
    if f_s > f_c:
        raise DomainError(f"string frequency {f_s} Hz above the tone centre {f_c} Hz")
    a = spec.depth_cents / 1200.0
    d_hz = f_c * (2.0**a - 2.0**-a) / 2
    return VibratoMeasurement(
        d_cents=spec.depth_cents,
        d_hz=d_hz,
        f_c=f_c,
        D=physical_depth(d_hz, f_c, f_s),
        x_c=physical_center(f_s, f_c),
        rate_hz=spec.rate_hz,
        n_cycles=int(np.floor(spec.duration_s * spec.rate_hz)),
        **metadata,
    )
