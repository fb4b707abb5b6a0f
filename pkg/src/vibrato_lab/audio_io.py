"""WAV decoding/encoding and manual trimming of note excerpts."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from .errors import AudioFormatError, DomainError

__all__ = ["AudioBuffer", "decode_wav", "encode_wav", "trim"]

# Integer PCM widths we accept, keyed by numpy dtype as returned by scipy.
# scipy left-justifies 24-bit data into int32, so both share one scale.
_INT_SCALE = {
    np.dtype(np.int16): 32768.0,
    np.dtype(np.int32): 2147483648.0,
}


@dataclass(frozen=True)
class AudioBuffer:
    """Mono sample stream in [-1, 1] with its sample rate."""

    samples: np.ndarray
    sample_rate: int
    source_path: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioBuffer samples must be one-dimensional")
        if samples.size == 0:
            raise ValueError("AudioBuffer is empty")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("AudioBuffer contains non-finite samples")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def __len__(self):
        return self.samples.size


def decode_wav(path) -> AudioBuffer:
    """Read a PCM16/24/32 or float32 WAV file as a mono buffer.

    Channels are mixed down by arithmetic mean. Integer formats are divided by
    their maximum magnitude (2**15 for 16-bit, 2**31 for 24/32-bit).
    """
    path = os.fspath(path)
    try:
        sample_rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except ValueError as exc:
        # scipy raises ValueError for non-PCM codecs such as mu-law/ADPCM
        raise AudioFormatError(f"{path}: unsupported WAV codec ({exc})") from exc

    if data.dtype in _INT_SCALE:
        samples = data.astype(np.float64) / _INT_SCALE[data.dtype]
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise AudioFormatError(f"{path}: unsupported sample format {data.dtype}")

    if samples.ndim == 2:
        if samples.shape[1] > 2:
            raise AudioFormatError(f"{path}: {samples.shape[1]} channels, expected 1 or 2")
        samples = samples.mean(axis=1)
    if samples.size == 0:
        raise AudioFormatError(f"{path}: zero-length audio")
    return AudioBuffer(samples, int(sample_rate), path)


def encode_wav(path, buffer: AudioBuffer) -> None:
    """Write ``buffer`` as a mono 16-bit PCM WAV file."""
    pcm = np.clip(np.round(buffer.samples * 32768.0), -32768, 32767).astype("<i2")
    wavfile.write(os.fspath(path), buffer.sample_rate, pcm)


def trim(buffer: AudioBuffer, start_s: float, end_s: float) -> AudioBuffer:
    """Keep samples in the half-open interval [start_s, end_s).

    Boundaries map to sample indices with ``round(t * sample_rate)``.
    """
    if not 0 <= start_s < end_s:
        raise DomainError(f"invalid trim range [{start_s}, {end_s})")
    if end_s > buffer.duration + 0.5 / buffer.sample_rate:
        raise DomainError(f"trim end {end_s} s exceeds duration {buffer.duration:.6f} s")
    i0 = int(round(start_s * buffer.sample_rate))
    i1 = min(int(round(end_s * buffer.sample_rate)), len(buffer))
    if i1 <= i0:
        raise DomainError(f"trim range [{start_s}, {end_s}) contains no samples")
    return AudioBuffer(buffer.samples[i0:i1], buffer.sample_rate, buffer.source_path)
