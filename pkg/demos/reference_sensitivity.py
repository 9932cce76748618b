"""Back-to-back PAM-2 reference sensitivity at 25 and 50 Gb/s.

Very wide filters (B3dB = 120 %, B20dB = 240 % of the bit rate) make the link
noise limited. The resulting sensitivities are the S0 anchors every power
penalty is measured against.
"""

import time

from ponsim import LinkScenario, sensitivity
from ponsim.reference import s0_dbm

for rb_gbps in (25, 50):
    t0 = time.perf_counter()
    res = sensitivity(LinkScenario.normalized("pam2", rb_gbps * 1e9, 120, 240))
    dt = time.perf_counter() - t0
    print(f"{rb_gbps} Gb/s: S0 = {res.sensitivity_dbm:.2f} dBm "
          f"(bundled anchor {s0_dbm(rb_gbps):.1f} dBm, {dt:.1f} s)")
    near = sorted(res.ber_curve, key=lambda rb: abs(rb[0] - res.sensitivity_dbm))[:4]
    for rop, ber in sorted(near):
        print(f"    ROP {rop:7.2f} dBm  BER {ber:.2e}")
