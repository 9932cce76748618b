"""Optical duobinary under chromatic dispersion.

With narrow filtering the ODB sensitivity improves when a moderate amount of
positive accumulated dispersion is added, unlike intensity-only formats.
"""

from ponsim import FiberSpec, LinkScenario, sensitivity

base = LinkScenario.normalized("odb", 25e9, 32, 56)
for d in (0.0, 100.0, 360.0, 460.0):
    res = sensitivity(base.with_(fiber=FiberSpec(d, 1550.0)))
    print(f"ODB 25G B3dB 32% B20dB 56%  D = {d:5.0f} ps/nm  S = {res.sensitivity_dbm:.2f} dBm")
