"""
From pitch to finger position
=============================

On a string tuned to ``f_s`` a note ``f`` is stopped at ``1 - f_s/f`` of
the string length. The same finger swing produces a wider pitch wobble the
further up the string it happens, so a player who wants even vibrato has to
narrow the swing as they climb. Compare a constant swing with a quadratic
one that shrinks high up, and find where the two agree.
"""

import numpy as np

from vibrato_lab import CELLO_STRINGS, model_curves, physical_center
from vibrato_lab.vibrato_model import acoustic_depth, physical_depth

a_string = CELLO_STRINGS["A"]

# a fifth above the open string is a third of the way down; three octaves
# up leaves only a twelfth of the string vibrating
print(f"E4 on the A string: x = {physical_center(a_string.f_s, 330.0):.4f}")
print(f"E7 on the A string: x = {physical_center(a_string.f_s, 2640.0):.4f}")

# the same 0.4% swing at three places on the string
for f_c in (247.0, 440.0, 880.0):
    x_c = physical_center(a_string.f_s, f_c)
    d = acoustic_depth(0.004, x_c, a_string.f_s)
    print(f"f_c={f_c:6.1f} Hz  x_c={x_c:.3f}  swing 0.004 -> {d:.2f} Hz")

# and back again: how far does a 3 Hz wobble at 440 Hz move the finger?
print(f"3 Hz at 440 Hz needs a swing of {physical_depth(3.0, 440.0, a_string.f_s):.5f}")

grid = np.linspace(0.0, 0.9, 91)
curves = model_curves(a_string.f_s, grid, const_D=0.00497, quad_D=(-0.0079, 0.054, 0.0066))
print("\n  x_c   constant swing   shrinking swing   (cents)")
for i in range(0, grid.size, 15):
    print(f"  {grid[i]:.2f}   {curves.uncompensated[i]:8.2f}         {curves.compensated[i]:8.2f}")
print(f"curves cross at x_c = {curves.crossing:.4f} ({curves.crossing_cents():.2f} cents)")
