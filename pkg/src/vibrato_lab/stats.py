"""Polynomial regression, R^2 and Spearman rank correlation."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import special
from scipy.stats import rankdata

from .errors import DomainError

__all__ = [
    "RegressionResult",
    "SpearmanResult",
    "GroupSummary",
    "polyfit",
    "r_squared_of_model",
    "spearman",
    "t_two_sided_p",
    "group_stats",
]


@dataclass
class RegressionResult:
    degree: int
    coefficients: tuple  # highest power first, as numpy.polyval expects
    r_squared: float
    n: int
    pearson_r: Optional[float] = None
    vertex_form: Optional[tuple] = None  # (a, h, k) of a*(x - h)**2 + k

    def predict(self, x):
        return np.polyval(self.coefficients, x)

    def as_dict(self):
        return asdict(self)


@dataclass
class SpearmanResult:
    rho: float
    p_value: float
    n: int
    method: str = "t-approximation"

    def as_dict(self):
        return asdict(self)


def _vertex_form(c2, c1, c0):
    if c2 == 0:
        return None
    h = -c1 / (2 * c2)
    return (c2, h, c0 - c2 * h * h)


def polyfit(xs, ys, degree) -> RegressionResult:
    """Least-squares polynomial of degree 1 or 2.

    The design matrix is built on centred, scaled abscissae and solved by QR;
    coefficients are then mapped back to powers of ``x``. Quadratic results
    also carry the vertex form.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if degree not in (1, 2):
        raise DomainError(f"degree must be 1 or 2, got {degree}")
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("xs and ys must be 1-D sequences of equal length")
    n = x.size
    if n <= degree:
        raise DomainError(f"{n} points cannot determine a degree-{degree} polynomial")
    if np.ptp(x) == 0:
        raise DomainError("all x values identical")

    mu, scale = x.mean(), np.ptp(x) / 2
    u = (x - mu) / scale
    A = np.vander(u, degree + 1)
    q, r = np.linalg.qr(A)
    cu = np.linalg.solve(r, q.T @ y)
    coeffs = _compose(cu, mu, scale)

    fitted = A @ cu
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # constant y: nothing to explain, report R^2 = 0 like the zero slope
    r2 = 0.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot

    res = RegressionResult(degree, tuple(float(c) for c in coeffs), r2, n)
    if degree == 1:
        res.pearson_r = 0.0 if np.ptp(y) == 0 else float(np.corrcoef(x, y)[0, 1])
    else:
        res.vertex_form = _vertex_form(*res.coefficients)
    return res


def _compose(cu, mu, scale):
    """Coefficients in x of sum_k cu[k] * ((x - mu)/scale)**(deg-k)."""
    inner = np.poly1d([1.0 / scale, -mu / scale])
    total = np.poly1d([0.0])
    for c in cu:
        total = total * inner + c
    out = np.zeros(len(cu))
    out[len(cu) - len(total.coeffs):] = total.coeffs
    return out


def r_squared_of_model(xs, ys, model):
    """``1 - SS_res/SS_tot`` for an externally supplied model; may be negative."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if y.size < 2:
        raise DomainError("need at least two points")
    pred = np.broadcast_to(np.asarray(model(x), dtype=np.float64), y.shape)
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        if ss_res == 0:
            return 1.0
        raise DomainError("zero total variance with non-zero residuals")
    return 1.0 - ss_res / ss_tot


def t_two_sided_p(t, dof):
    """Two-sided tail probability of Student's t via the regularised incomplete beta."""
    if dof <= 0:
        raise DomainError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    return float(special.betainc(dof / 2.0, 0.5, dof / (dof + t * t)))


def _rank_corr(rx, ry):
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    return float(np.dot(rx, ry) / math.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))


def spearman(xs, ys, exact=None) -> SpearmanResult:
    """Spearman rank correlation with a two-sided p-value.

    Ties get average ranks. The p-value comes from
    ``t = rho * sqrt((n - 2) / (1 - rho**2))`` on ``n - 2`` degrees of
    freedom. For ``n <= 9`` an exact permutation p-value can be requested
    with ``exact=True``.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("xs and ys must be 1-D sequences of equal length")
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
        raise DomainError("missing or non-finite values")
    n = x.size
    if n < 4:
        raise DomainError(f"need at least 4 points, got {n}")
    rx, ry = rankdata(x), rankdata(y)
    if np.ptp(rx) == 0 or np.ptp(ry) == 0:
        raise DomainError("all values tied; rank correlation undefined")
    rho = max(-1.0, min(1.0, _rank_corr(rx, ry)))

    if exact:
        if n > 9:
            raise DomainError("exact permutation p-value is limited to n <= 9")
        return SpearmanResult(rho, _permutation_p(rx, ry, rho), n, "exact-permutation")
    return SpearmanResult(rho, spearman_p(rho, n), n, "t-approximation")


def spearman_p(rho, n):
    """Two-sided p-value of a rank correlation ``rho`` over ``n`` pairs (t-approximation)."""
    dof = n - 2
    if abs(rho) >= 1.0:
        # the t statistic diverges; report the smallest positive double
        return float(np.nextafter(0.0, 1.0))
    t = rho * math.sqrt(dof / (1.0 - rho * rho))
    return max(t_two_sided_p(t, dof), float(np.nextafter(0.0, 1.0)))


def _permutation_p(rx, ry, rho):
    n = rx.size
    perms = np.array(list(itertools.permutations(range(n))))
    ry_c = ry - ry.mean()
    rx_c = rx - rx.mean()
    denom = math.sqrt(np.dot(rx_c, rx_c) * np.dot(ry_c, ry_c))
    rhos = (ry_c[perms] @ rx_c) / denom
    return float(np.mean(np.abs(rhos) >= abs(rho) - 1e-12))


@dataclass
class GroupSummary:
    group: str
    n: int
    mean: Optional[float] = None
    std: Optional[float] = None
    fit: Optional[RegressionResult] = None
    spearman: Optional[SpearmanResult] = None
    warnings: list = field(default_factory=list)


def group_stats(rows, group_key, x_key=None, y_key=None, degree=2, value_key=None):
    """Per-group moments and fits over a list of mapping rows.

    ``value_key`` selects the column summarised by mean and sample standard
    deviation (defaults to ``y_key``). When ``x_key`` and ``y_key`` are given
    each group is also fitted with :func:`polyfit` and tested with
    :func:`spearman`. Undersized groups are kept with a warning instead of a
    result.
    """
    value_key = value_key or y_key
    groups = {}
    for row in rows:
        groups.setdefault(str(row[group_key]) if group_key else "all", []).append(row)

    out = []
    for name, members in groups.items():
        summary = GroupSummary(name, len(members))
        if value_key is not None:
            vals = np.array([float(r[value_key]) for r in members])
            if vals.size >= 2:
                summary.mean = float(vals.mean())
                summary.std = float(vals.std(ddof=1))
            else:
                summary.warnings.append(f"group {name!r}: {vals.size} row(s), moments skipped")
        if x_key is not None and y_key is not None:
            xs = np.array([float(r[x_key]) for r in members])
            ys = np.array([float(r[y_key]) for r in members])
            try:
                summary.fit = polyfit(xs, ys, degree)
            except DomainError as exc:
                summary.warnings.append(f"group {name!r}: fit skipped ({exc})")
            try:
                summary.spearman = spearman(xs, ys)
            except DomainError as exc:
                summary.warnings.append(f"group {name!r}: spearman skipped ({exc})")
        for msg in summary.warnings:
            warnings.warn(msg, stacklevel=2)
        out.append(summary)
    return out
