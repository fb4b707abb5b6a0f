"""
Cycles, trend line and depth
============================

A held note rarely sits still: here the centre drifts upward by 15 Hz/s
while the vibrato keeps going. The trend line through the midpoints of
neighbouring peaks and troughs soaks up the drift so the depth is measured
against where the pitch is heading, not where it started.
"""

import numpy as np

from vibrato_lab import SynthSpec, render, yin_track, YinConfig, measure_cycles

spec = SynthSpec(f_center=440.0, depth_cents=25.0, rate_hz=5.5, duration_s=2.5,
                 drift_hz_per_s=15.0)
audio = render(spec)
track = yin_track(audio, YinConfig.from_center(audio.sample_rate, 460.0, 300.0))

cycles = measure_cycles(track)
print(f"smoothing window: {cycles.smoothing_window} frames")
print(f"{cycles.peak_indices.size} peaks, {cycles.trough_indices.size} troughs")

# the trend nodes, one per pair of neighbouring extrema
for t, f in cycles.trend[:6]:
    print(f"  trend node t={t:.3f} s  f={f:.2f} Hz")
print("  ...")

slope = np.polyfit(cycles.trend[:, 0], cycles.trend[:, 1], 1)[0]
print(f"trend slope {slope:.2f} Hz/s (drift was {spec.drift_hz_per_s})")

# deviations are measured from the trend at each extremum
print(f"mean depth {np.mean(cycles.deviations_cents):.2f} cents (asked for {spec.depth_cents})")
rate = 1 / np.mean(np.diff(cycles.peak_times))
print(f"rate {rate:.3f} Hz (asked for {spec.rate_hz})")

# ignore the trend and the depth comes out inflated by the drift
naive = np.abs(1200 * np.log2(cycles.smoothed_f0[cycles.extremum_indices]
                              / np.mean(cycles.smoothed_f0)))
print(f"depth against a fixed mean instead: {np.mean(naive):.2f} cents")
