"""Butterworth and super-Gaussian responses with the same 3 dB bandwidth.

Shows how the pole count sets the -20 dB point of a Butterworth filter, picks
the super-Gaussian with the same (f3dB, f20dB) pair, and fits an equivalent
identical super-Gaussian pair to a measured-looking TX+RX cascade.
"""

import numpy as np

from ponsim import FilterSpec, fit_equivalent_gf, supergaussian_params
from ponsim.filters import cascade_db

f3 = 7e9
f = np.linspace(0, 60e9, 6001)

print("poles  f20dB/f3dB   super-Gaussian order n")
for n in range(1, 7):
    bf = FilterSpec.butterworth(n, f3)
    order, _ = supergaussian_params(f3, bf.f20db)
    print(f"{n:5d}  {bf.f20db / f3:10.3f}   {order:8.3f}")

tx = FilterSpec.butterworth(2, 8.1e9)
rx = FilterSpec.butterworth(2, 8.1e9)
meas = cascade_db(f, tx, rx)
g3, g20 = fit_equivalent_gf(f, meas)
print(f"\n2-pole BF pair at 8.1 GHz -> equivalent GF pair "
      f"f3dB = {g3 / 1e9:.2f} GHz, f20dB = {g20 / 1e9:.2f} GHz")
