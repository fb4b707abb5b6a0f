import numpy as np
import pytest

from vibrato_lab.audio_io import encode_wav
from vibrato_lab.synth import SynthSpec, render


@pytest.fixture
def vibrato_spec():
    return SynthSpec(f_center=440.0, depth_cents=20.0, rate_hz=6.0, duration_s=2.0)


@pytest.fixture
def vibrato_wav(tmp_path, vibrato_spec):
    path = tmp_path / "vib440.wav"
    encode_wav(path, render(vibrato_spec))
    return path


@pytest.fixture
def flat_wav(tmp_path):
    path = tmp_path / "flat440.wav"
    encode_wav(path, render(SynthSpec(f_center=440.0, depth_cents=0.0)))
    return path


def vibrato_contour(times, f_center=440.0, depth_cents=20.0, rate=6.0, drift=0.0):
    """Geometric FM contour sampled at ``times`` (no audio involved)."""
    times = np.asarray(times)
    return (f_center + drift * times) * 2.0 ** (
        depth_cents / 1200.0 * np.sin(2 * np.pi * rate * times)
    )


# one PASS/FAIL line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
