from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import savgol_filter

from conftest import vibrato_contour
from vibrato_lab.contour import (
    ExtremaConfig,
    SmoothingConfig,
    build_trend,
    evaluate_trend,
    find_extrema,
    measure_cycles,
    savgol_coeffs,
    savgol_gain,
    savgol_smooth,
    window_for_rate,
)
from vibrato_lab.errors import AnalysisRejected, DomainError
from vibrato_lab.pitch_yin import PitchTrack

FPS = 172.0


def track_of(f0, fps=FPS):
    f0 = np.asarray(f0, dtype=float)
    return PitchTrack(np.arange(f0.size) / fps, f0, np.zeros(f0.size), 44032, 256)


def five_point_quadratic_oracle():
    """Solve the normal equations of the 5-point quadratic fit in exact arithmetic."""
    xs = [Fraction(k) for k in range(-2, 3)]
    # moments of x: sum x^0, x^2, x^4 (odd moments vanish)
    s0, s2, s4 = 5, sum(x**2 for x in xs), sum(x**4 for x in xs)
    # value at 0 is c0 = (s4 * sum(y) - s2 * sum(x^2 y)) / (s0*s4 - s2^2)
    det = s0 * s4 - s2 * s2
    return [(s4 - s2 * x**2) / det for x in xs]


def test_five_point_coefficients_match_exact_least_squares():
    exact = five_point_quadratic_oracle()
    assert exact == [Fraction(c, 35) for c in (-3, 12, 17, 12, -3)]
    np.testing.assert_allclose(savgol_coeffs(5, 2), [float(c) for c in exact], atol=1e-12)
    rng = np.random.default_rng(1)
    x = rng.normal(size=40)
    out = savgol_smooth(x, SmoothingConfig(5, 2))
    i = 20
    manual = (-3 * x[i - 2] + 12 * x[i - 1] + 17 * x[i] + 12 * x[i + 1] - 3 * x[i + 2]) / 35
    assert out[i] == pytest.approx(manual, abs=1e-12)


def test_interior_matches_scipy():
    rng = np.random.default_rng(2)
    x = rng.normal(size=400)
    ours = savgol_smooth(x, SmoothingConfig(101, 3))
    ref = savgol_filter(x, 101, 3)
    np.testing.assert_allclose(ours[50:-50], ref[50:-50], atol=1e-12)


def test_edges_refit_on_truncated_window():
    rng = np.random.default_rng(3)
    x = rng.normal(size=60)
    window, order = 11, 3
    out = savgol_smooth(x, SmoothingConfig(window, order))
    half = window // 2
    for i in list(range(half)) + list(range(60 - half, 60)):
        lo, hi = max(0, i - half), min(60, i + half + 1)
        idx = np.arange(lo, hi)
        coef = np.polyfit(idx - i, x[lo:hi], min(order, hi - lo - 1))
        assert out[i] == pytest.approx(coef[-1], abs=1e-10)


def test_constant_is_preserved():
    np.testing.assert_allclose(savgol_smooth(np.full(300, 7.25)), 7.25, rtol=1e-12)


def test_cubic_reproduced_exactly():
    t = np.linspace(-1.5, 2.0, 350)
    y = 0.7 * t**3 - 2.0 * t**2 + 0.3 * t + 5.0
    out = savgol_smooth(y, SmoothingConfig(101, 3))
    np.testing.assert_allclose(out, y, rtol=1e-9, atol=1e-9 * np.max(np.abs(y)))


def test_short_input_shrinks_window():
    y = np.arange(8, dtype=float) ** 2
    # window shrinks to 7 (largest odd <= 8); a quadratic is reproduced
    np.testing.assert_allclose(savgol_smooth(y, SmoothingConfig(101, 3)), y, atol=1e-9)
    with pytest.raises(DomainError):
        savgol_smooth([1.0, 2.0, 3.0], SmoothingConfig(101, 3))
    np.testing.assert_allclose(savgol_smooth([4.0], SmoothingConfig(5, 0)), [4.0])


def test_smoothing_config_validation():
    with pytest.raises(DomainError):
        SmoothingConfig(100, 3)
    with pytest.raises(DomainError):
        SmoothingConfig(5, 5)


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(10, 200),
    window=st.sampled_from([5, 7, 11, 21, 101]),
    order=st.integers(0, 4),
    a=st.floats(-10, 10),
    b=st.floats(-10, 10),
    seed=st.integers(0, 1000),
)
def test_linearity(n, window, order, a, b, seed):
    if order >= min(window, n if n % 2 else n - 1):
        return
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=n), rng.normal(size=n)
    cfg = SmoothingConfig(window, order)
    lhs = savgol_smooth(a * x + b * y, cfg)
    rhs = a * savgol_smooth(x, cfg) + b * savgol_smooth(y, cfg)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * max(1.0, abs(a) + abs(b)) * 10)


def test_window_for_rate_is_largest_passing_window():
    w = window_for_rate(FPS, 10.0)
    assert w % 2 == 1
    assert savgol_gain(w, 3, 10.0 / FPS) >= 0.99
    assert savgol_gain(w + 2, 3, 10.0 / FPS) < 0.99
    # slow frame rates still return a valid cubic window
    assert window_for_rate(20.0, 10.0) >= 5
    assert window_for_rate(5000.0, 3.0) == 101


def test_sinusoid_extrema_count():
    t = np.arange(int(2 * FPS)) / FPS
    f = vibrato_contour(t)
    peaks, troughs = find_extrema(t, f)
    assert peaks.size == 12 and troughs.size == 12
    merged = np.sort(np.concatenate([peaks, troughs]))
    kinds = np.where(np.isin(merged, peaks), 1, -1)
    assert np.all(kinds[1:] != kinds[:-1])


def test_ramp_rejected():
    t = np.arange(300) / FPS
    with pytest.raises(AnalysisRejected) as info:
        find_extrema(t, 440 + 10 * t)
    assert info.value.reason == "no-vibrato"


def test_small_wiggle_below_prominence_ignored():
    t = np.arange(int(2 * FPS)) / FPS
    f = vibrato_contour(t)
    # a narrow 1-cent bump on a rising flank
    bump = 2 ** (1 / 1200 * np.exp(-0.5 * ((t - 0.55) / 0.004) ** 2))
    wiggly = f * bump
    peaks, troughs = find_extrema(t, wiggly, ExtremaConfig(min_prominence_cents=5.0))
    assert peaks.size == 12 and troughs.size == 12


def test_symmetric_trend_is_flat():
    t = np.arange(int(2 * FPS)) / FPS
    f = 440 + 5 * np.sin(2 * np.pi * 6 * t)
    peaks, troughs = find_extrema(t, f)
    trend = build_trend(peaks, troughs, t, f)
    np.testing.assert_allclose(trend[:, 1], 440.0, atol=0.05)
    assert np.all(np.diff(trend[:, 0]) > 0)


def test_trend_follows_linear_drift():
    t = np.arange(int(2 * FPS)) / FPS
    f = 440 + 2.0 * t + 5 * np.sin(2 * np.pi * 6 * t)
    peaks, troughs = find_extrema(t, f)
    trend = build_trend(peaks, troughs, t, f)
    slope = np.polyfit(trend[:, 0], trend[:, 1], 1)[0]
    assert slope == pytest.approx(2.0, rel=0.03)


def test_single_pair_gives_constant_trend():
    t = np.array([0.0, 0.1, 0.2])
    f = np.array([440.0, 450.0, 430.0])
    trend = build_trend(np.array([1]), np.array([2]), t, f)
    assert trend.shape == (1, 2)
    np.testing.assert_allclose(evaluate_trend(trend, [-1.0, 0.15, 5.0]), 440.0)


def test_measure_cycles_depth():
    f = vibrato_contour(np.arange(int(2 * FPS)) / FPS)
    cyc = measure_cycles(track_of(f))
    assert 19.0 <= cyc.deviations_cents.mean() <= 21.0


def test_constant_contour_rejected():
    with pytest.raises(AnalysisRejected):
        measure_cycles(track_of(np.full(300, 440.0)))


@pytest.mark.parametrize("drift", [-2.0, 2.0])
def test_drift_robustness(drift):
    t = np.arange(int(2 * FPS)) / FPS
    base = measure_cycles(track_of(vibrato_contour(t))).deviations_cents.mean()
    drifted = measure_cycles(track_of(vibrato_contour(t, drift=drift))).deviations_cents.mean()
    assert abs(drifted - base) / base < 0.05


@settings(max_examples=60, deadline=None)
@given(
    center=st.floats(80, 1500),
    depth=st.floats(8, 60),
    rate=st.floats(4, 8),
    drift=st.floats(-2, 2),
    noise=st.floats(0, 0.5),
    seed=st.integers(0, 10_000),
)
def test_alternation_and_deviation_sign(center, depth, rate, drift, noise, seed):
    t = np.arange(int(2 * FPS)) / FPS
    rng = np.random.default_rng(seed)
    f = vibrato_contour(t, center, depth, rate, drift) * 2 ** (noise * rng.normal(size=t.size) / 1200)
    cyc = measure_cycles(track_of(f))
    assert np.all(cyc.extremum_kinds[1:] != cyc.extremum_kinds[:-1])
    assert np.all(np.diff(cyc.trend[:, 0]) > 0)
    assert np.all(np.isfinite(cyc.deviations_hz)) and np.all(cyc.deviations_hz >= 0)
    gap = cyc.smoothed_f0[cyc.extremum_indices] - cyc.trend_at(cyc.extremum_times)
    assert np.all(gap[cyc.extremum_kinds > 0] >= -1e-9)
    assert np.all(gap[cyc.extremum_kinds < 0] <= 1e-9)


def test_cycles_csv(tmp_path):
    f = vibrato_contour(np.arange(int(2 * FPS)) / FPS)
    cyc = measure_cycles(track_of(f))
    path = tmp_path / "cycles.csv"
    cyc.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "kind,frame,time_s,f0_hz,trend_hz,dev_hz,dev_cents"
    assert len(lines) == 1 + cyc.extremum_indices.size


def test_too_slow_oscillation_rejected():
    t = np.arange(int(3 * FPS)) / FPS
    with pytest.raises(AnalysisRejected) as info:
        measure_cycles(track_of(vibrato_contour(t, rate=1.5)))
    assert info.value.reason == "rate-out-of-band"
