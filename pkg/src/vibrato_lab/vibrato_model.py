"""String geometry: mapping between pitch deviation and finger motion.

Positions are fractions of the vibrating string length measured from the
nut, so a note at frequency ``f`` on a string tuned to ``f_s`` is stopped at
``x = 1 - f_s / f``. A vibrato whose finger swings ``D`` either side of a
centre ``x_c`` moves the pitch between ``f_s / (1 - x_c + D)`` and
``f_s / (1 - x_c - D)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

__all__ = [
    "CELLO_STRINGS",
    "StringSpec",
    "VibratoMeasurement",
    "MEASUREMENT_COLUMNS",
    "physical_center",
    "physical_depth",
    "acoustic_depth",
    "cents_half_depth",
    "quadratic_depth",
    "ModelCurves",
    "model_curves",
    "find_crossing",
    "assemble_measurement",
]


@dataclass(frozen=True)
class StringSpec:
    f_s: float
    name: str = ""

    def __post_init__(self):
        if not self.f_s > 0:
            raise DomainError(f"open-string frequency must be positive, got {self.f_s}")


# equal temperament, A4 = 440 Hz
CELLO_STRINGS = {
    "C": StringSpec(65.406, "C"),
    "G": StringSpec(97.999, "G"),
    "D": StringSpec(146.832, "D"),
    "A": StringSpec(220.0, "A"),
}

MEASUREMENT_COLUMNS = [
    "d_cents",
    "d_hz",
    "f_c_hz",
    "D_frac",
    "x_c_frac",
    "rate_hz",
    "n_cycles",
    "file",
    "player",
    "corpus",
]


@dataclass(frozen=True)
class VibratoMeasurement:
    d_cents: float
    d_hz: float
    f_c: float
    D: float
    x_c: float
    rate_hz: float
    n_cycles: int
    file: str = ""
    player: str = ""
    corpus: str = ""

    def as_row(self) -> dict:
        """CSV row keyed by :data:`MEASUREMENT_COLUMNS`."""
        return {
            "d_cents": self.d_cents,
            "d_hz": self.d_hz,
            "f_c_hz": self.f_c,
            "D_frac": self.D,
            "x_c_frac": self.x_c,
            "rate_hz": self.rate_hz,
            "n_cycles": self.n_cycles,
            "file": self.file,
            "player": self.player,
            "corpus": self.corpus,
        }

    def as_dict(self):
        return asdict(self)


def physical_center(f_s, f_t):
    """Finger position ``1 - f_s/f_t`` as a fraction of string length.

    Evaluated as ``(f_t - f_s)/f_t``, which rounds once instead of twice.
    """
    if not 0 < f_s:
        raise DomainError(f"string frequency must be positive, got {f_s}")
    if f_t < f_s:
        raise DomainError(f"note {f_t} Hz lies below the open string {f_s} Hz")
    return (f_t - f_s) / f_t


def physical_depth(d_hz, f_c, f_s):
    """Half-amplitude of the finger swing that produces a ``d_hz`` deviation.

    Positive root of ``d*D**2 + f_s*D - d*(1 - x_c)**2 = 0`` with
    ``x_c = 1 - f_s/f_c``, evaluated as
    ``2*d*L**2 / (f_s + sqrt(f_s**2 + 4*d**2*L**2))`` (``L = 1 - x_c``),
    which has no cancellation for small ``d``.
    """
    if d_hz < 0:
        raise DomainError(f"pitch deviation must be non-negative, got {d_hz}")
    if not 0 < f_s <= f_c:
        raise DomainError(f"need 0 < f_s <= f_c, got f_s={f_s}, f_c={f_c}")
    if f_c - d_hz <= 0:
        raise DomainError(f"deviation {d_hz} Hz reaches zero frequency from {f_c} Hz")
    L = f_s / f_c
    return 2.0 * d_hz * L * L / (f_s + math.sqrt(f_s * f_s + 4.0 * d_hz * d_hz * L * L))


def acoustic_depth(D, x_c, f_s):
    """Half peak-to-peak pitch excursion (Hz) of a finger swing ``D`` about ``x_c``."""
    L = 1.0 - x_c
    if not 0 <= x_c < 1:
        raise DomainError(f"x_c must lie in [0, 1), got {x_c}")
    if not 0 <= D < L:
        raise DomainError(f"finger swing D={D} must lie in [0, {L})")
    return f_s * D / (L * L - D * D)


def cents_half_depth(D, x_c):
    """Half peak-to-peak excursion in cents, ``600*log2((L + D)/(L - D))``.

    Vectorised over numpy arrays.
    """
    D = np.asarray(D, dtype=np.float64)
    L = 1.0 - np.asarray(x_c, dtype=np.float64)
    if np.any(L <= 0) or np.any(L > 1) or np.any(D < 0) or np.any(D >= L):
        raise DomainError("need 0 <= D < 1 - x_c and 0 <= x_c < 1")
    out = 600.0 * np.log2((L + D) / (L - D))
    return float(out) if out.ndim == 0 else out


def quadratic_depth(a, h, k) -> Callable:
    """``D(x) = a*(x - h)**2 + k``."""

    def depth(x):
        return a * (np.asarray(x, dtype=np.float64) - h) ** 2 + k

    return depth


def find_crossing(x, diff, fn=None, tol=1e-12, max_iter=200):
    """First sign change of ``diff`` on the grid ``x``, refined by bisection on ``fn``.

    Returns ``None`` when ``diff`` never changes sign (including the
    identically-zero case).
    """
    x = np.asarray(x, dtype=np.float64)
    diff = np.asarray(diff, dtype=np.float64)
    sign = np.sign(diff)
    for i in range(len(x) - 1):
        if sign[i] == 0 and sign[i + 1] != 0 and i > 0 and sign[i - 1] == -sign[i + 1]:
            return float(x[i])
        if sign[i] * sign[i + 1] < 0:
            lo, hi = x[i], x[i + 1]
            if fn is None:
                # linear interpolation when no continuous function is available
                return float(lo - diff[i] * (hi - lo) / (diff[i + 1] - diff[i]))
            f_lo = fn(lo)
            for _ in range(max_iter):
                mid = 0.5 * (lo + hi)
                f_mid = fn(mid)
                if f_mid == 0 or hi - lo < tol:
                    break
                if np.sign(f_mid) == np.sign(f_lo):
                    lo, f_lo = mid, f_mid
                else:
                    hi = mid
            return float(0.5 * (lo + hi))
    return None


@dataclass
class ModelCurves:
    x_c: np.ndarray
    uncompensated: np.ndarray
    compensated: np.ndarray
    crossing: Optional[float]
    f_s: float
    const_D: float

    def crossing_cents(self):
        if self.crossing is None:
            return None
        return cents_half_depth(self.const_D, self.crossing)

    def hz(self, which="compensated"):
        """A curve as the Hz half-excursion about each centre on the ``f_s`` string."""
        cents = self.compensated if which == "compensated" else self.uncompensated
        f_c = self.f_s / (1.0 - self.x_c)
        a = cents / 1200.0
        return f_c * (2.0**a - 2.0**-a) / 2


def model_curves(f_s, x_grid, const_D, quad_D) -> ModelCurves:
    """Pitch depth in cents versus centre position, with and without compensation.

    ``quad_D`` is either a callable ``x -> D`` or an ``(a, h, k)`` vertex-form
    triple. The uncompensated curve keeps the finger swing fixed at
    ``const_D``; the compensated curve uses ``quad_D(x)``. Their crossing is
    located by bisection on ``quad_D(x) - const_D`` (the cents curves differ
    exactly where the swings do).
    """
    if not f_s > 0:
        raise DomainError("f_s must be positive")
    if not callable(quad_D):
        quad_D = quadratic_depth(*quad_D)
    x = np.asarray(x_grid, dtype=np.float64)
    d_comp = quad_D(x)
    unc = cents_half_depth(np.full_like(x, const_D), x)
    comp = cents_half_depth(d_comp, x)

    def gap(v):
        return float(quad_D(v)) - const_D

    crossing = find_crossing(x, d_comp - const_D, gap)
    return ModelCurves(x, np.atleast_1d(unc), np.atleast_1d(comp), crossing, f_s, const_D)


def assemble_measurement(cycles, string, file="", player="", corpus=""):
    """Collect the six vibrato quantities from a :class:`CycleAnalysis`.

    The tonal centre is the mean trend value at the extremum times, the rate
    is the reciprocal of the mean peak-to-peak interval.
    """
    f_s = string.f_s if isinstance(string, StringSpec) else float(string)
    peak_t = cycles.peak_times
    if peak_t.size < 2:
        raise DomainError("need at least two peaks for a rate")
    f_c = float(np.mean(cycles.trend_at(cycles.extremum_times)))
    if f_c < f_s:
        raise DomainError(
            f"tonal centre {f_c:.2f} Hz lies below the open string {f_s} Hz; wrong string?"
        )
    d_hz = float(np.mean(cycles.deviations_hz))
    return VibratoMeasurement(
        d_cents=float(np.mean(cycles.deviations_cents)),
        d_hz=d_hz,
        f_c=f_c,
        D=physical_depth(d_hz, f_c, f_s),
        x_c=physical_center(f_s, f_c),
        rate_hz=float(1.0 / np.mean(np.diff(peak_t))),
        n_cycles=int(peak_t.size - 1),
        file=file,
        player=player,
        corpus=corpus,
    )
