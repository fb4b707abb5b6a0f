"""
Regression and rank correlation on a results table
==================================================

Fake a table of measurements from three players whose finger swing shrinks
as they move up the string, then fit quadratics per player and overall and
check for a monotone trend in rate.
"""

import warnings

import numpy as np

from vibrato_lab import group_stats, polyfit, spearman
from vibrato_lab.stats import r_squared_of_model

rng = np.random.default_rng(11)
rows = []
for player, scale in (("p1", 1.0), ("p2", 0.9), ("p3", 1.1)):
    x = rng.uniform(0.05, 0.75, 30)
    D = scale * (-0.0079 * (x - 0.054) ** 2 + 0.0066) + rng.normal(0, 4e-4, x.size)
    rate = 5.8 + 1.2 * x + rng.normal(0, 0.25, x.size)
    rows += [{"player": player, "x_c": a, "D": b, "rate": r} for a, b, r in zip(x, D, rate)]

xs = np.array([r["x_c"] for r in rows])
Ds = np.array([r["D"] for r in rows])

fit = polyfit(xs, Ds, 2)
a, h, k = fit.vertex_form
print(f"all players: D = {a:.4f}(x - {h:.3f})^2 + {k:.4f}, R^2 = {fit.r_squared:.3f}")

# how does a constant swing do against the same data?
print(f"constant-swing model R^2 = {r_squared_of_model(xs, Ds, lambda x: np.full_like(x, 0.00497)):.3f}")

for g in group_stats(rows, "player", "x_c", "D"):
    a, h, k = g.fit.vertex_form
    print(f"  {g.group}: n={g.n}  a={a:.4f} h={h:.3f} k={k:.4f}  R^2={g.fit.r_squared:.3f}")

rates = np.array([r["rate"] for r in rows])
sp = spearman(xs, rates)
print(f"rate vs position: rho = {sp.rho:.3f}, p = {sp.p_value:.3g}")

summary = group_stats(rows, None, value_key="rate")[0]
print(f"rate over everyone: mean {summary.mean:.3f} Hz, s = {summary.std:.3f}")

# a lone recording gets a warning rather than a bogus fit
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    group_stats(rows + [{"player": "guest", "x_c": 0.3, "D": 0.005, "rate": 6.1}],
                "player", "x_c", "D")
print("warnings:", *sorted({str(w.message) for w in caught}), sep="\n  ")
