import math

import numpy as np
import pytest

from vibrato_lab.errors import DomainError
from vibrato_lab.pipeline import analyze_buffer
from vibrato_lab.pitch_yin import YinConfig, yin_track
from vibrato_lab.synth import (
    SynthSpec,
    instantaneous_frequency,
    render,
    render_phase,
    true_measurement,
)


def test_pure_sine_recovered_by_yin():
    spec = SynthSpec(f_center=440.0, depth_cents=0.0, n_harmonics=1)
    buf = render(spec)
    assert np.max(np.abs(buf.samples)) == pytest.approx(0.9)
    track = yin_track(buf, YinConfig.from_center(44100, 440.0))
    assert np.all(np.abs(track.f0 - 440.0) < 0.5)


def test_same_seed_is_bit_identical():
    spec = SynthSpec(noise_rms=0.01, seed=1)
    a, b = render(spec), render(spec)
    assert a.samples.tobytes() == b.samples.tobytes()
    c = render(SynthSpec(noise_rms=0.01, seed=2))
    assert a.samples.tobytes() != c.samples.tobytes()


def test_reference_fixture_measured(vibrato_spec):
    m = analyze_buffer(render(vibrato_spec), 220.0, 440.0).measurement
    assert 19 <= m.d_cents <= 21
    assert 5.95 <= m.rate_hz <= 6.05


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(f_center=8000.0),  # third partial above Nyquist
        dict(rate_hz=0.5, duration_s=2.0),  # one cycle only
        dict(n_harmonics=0),
        dict(depth_cents=-1.0),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(DomainError):
        render(SynthSpec(**kwargs))


def test_instantaneous_frequency_fidelity():
    spec = SynthSpec(f_center=330.0, depth_cents=35.0, rate_hz=5.5, drift_hz_per_s=1.5)
    t, phase = render_phase(spec)
    sr = spec.sample_rate
    f_est = np.diff(phase) * sr / (2 * np.pi)
    f_mid = instantaneous_frequency(spec, (t[1:] + t[:-1]) / 2)
    assert np.max(np.abs(f_est / f_mid - 1)) < 1e-6


def test_spectral_energy_inside_carson_like_band():
    spec = SynthSpec(f_center=440.0, depth_cents=20.0, rate_hz=6.0, n_harmonics=1)
    x = render(spec).samples
    power = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(x.size, 1 / spec.sample_rate)
    a = 2 ** (spec.depth_cents / 1200)
    lo = spec.f_center / a - 2 * spec.rate_hz
    hi = spec.f_center * a + 2 * spec.rate_hz
    inside = power[(freqs >= lo) & (freqs <= hi)].sum()
    assert inside / power.sum() >= 0.99


def test_true_measurement_basics():
    m = true_measurement(SynthSpec(), 220.0)
    assert m.x_c == 0.5
    assert m.rate_hz == 6.0
    assert m.d_cents == 20.0
    assert true_measurement(SynthSpec(depth_cents=0.0), 220.0).D == 0.0
    drifting = true_measurement(SynthSpec(drift_hz_per_s=2.0, duration_s=2.0), 220.0)
    assert drifting.f_c == 442.0
    with pytest.raises(DomainError):
        true_measurement(SynthSpec(f_center=200.0), 220.0)


def test_true_depth_matches_finger_geometry():
    # fingers stopping f_c * 2**(+-a) on a 220 Hz string; D is half the gap
    spec = SynthSpec(f_center=330.0, depth_cents=10.0)
    a = spec.depth_cents / 1200
    x_hi = 1 - 220.0 / (330.0 * 2**a)
    x_lo = 1 - 220.0 / (330.0 * 2**-a)
    geometric = (x_hi - x_lo) / 2
    D = true_measurement(spec, 220.0).D
    assert geometric == pytest.approx(0.0038508391, rel=1e-8)
    assert D == pytest.approx(geometric, rel=1e-4)
    assert D == pytest.approx(0.0038507106, rel=1e-8)


def test_spec_json_roundtrip():
    spec = SynthSpec(f_center=123.0, seed=9, noise_rms=0.003)
    assert SynthSpec.from_json(spec.to_json()) == spec


@pytest.mark.parametrize("seed", range(6))
def test_end_to_end_recovery_random_specs(seed):
    rng = np.random.default_rng(seed)
    spec = SynthSpec(
        f_center=float(rng.uniform(110, 1320)),
        depth_cents=float(rng.uniform(5, 50)),
        rate_hz=float(rng.uniform(4, 8)),
        noise_rms=float(rng.uniform(0, 0.01)),
        seed=seed,
    )
    f_s = 65.406 if spec.f_center < 220 else 220.0
    m = analyze_buffer(render(spec), f_s, spec.f_center).measurement
    truth = true_measurement(spec, f_s)
    assert abs(m.d_cents - truth.d_cents) <= max(1.0, 0.05 * truth.d_cents)
    assert abs(m.rate_hz - truth.rate_hz) <= 0.05
    assert abs(m.f_c - truth.f_c) <= 2.0
    assert math.isfinite(m.D)
