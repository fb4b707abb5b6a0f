"""
Tracking the pitch of a synthetic vibrato
=========================================

Render a tone whose pitch swings 20 cents either side of A4 six times a
second, then follow its fundamental with YIN and compare against the
frequency we asked for.
"""

import numpy as np

from vibrato_lab import SynthSpec, YinConfig, render, yin_track
from vibrato_lab.synth import instantaneous_frequency

spec = SynthSpec(f_center=440.0, depth_cents=20.0, rate_hz=6.0, duration_s=2.0)
audio = render(spec)
print(f"rendered {audio.duration:.2f} s at {audio.sample_rate} Hz")

# restrict the search to a whole tone either side of the intended note
cfg = YinConfig.from_center(audio.sample_rate, 440.0, width_cents=200.0)
print(f"band {cfg.f_min:.2f}-{cfg.f_max:.2f} Hz, frame {cfg.frame_length}, hop {cfg.hop_length}")

track = yin_track(audio, cfg)

# frame times are window centres, so the truth is sampled there too
truth = instantaneous_frequency(spec, track.times)
err_cents = 1200 * np.log2(track.f0 / truth)
print(f"{track.f0.size} frames at {track.frame_rate:.1f} frames/s")
print(f"tracking error: median {np.median(np.abs(err_cents)):.3f} cents, "
      f"worst {np.max(np.abs(err_cents)):.3f} cents")
print(f"median CMNDF confidence {np.median(track.confidence):.4f} (0 is perfectly periodic)")
