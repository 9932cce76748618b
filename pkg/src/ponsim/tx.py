"""Transmitter: PRBS, symbol mapping, duobinary precoding and the MZM."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .signal import SAMPLES_PER_BIT, SampledSignal


class ModFormat(enum.Enum):
    PAM2 = "pam2"
    PAM4 = "pam4"
    EDB = "edb"
    ODB = "odb"

    @property
    def bits_per_symbol(self) -> int:
        return 2 if self is ModFormat.PAM4 else 1

    @property
    def bias_mode(self) -> str:
        return "null" if self is ModFormat.ODB else "quadrature"

    @property
    def is_duobinary(self) -> bool:
        return self in (ModFormat.EDB, ModFormat.ODB)

    @property
    def levels(self) -> np.ndarray:
        """Normalized drive levels x in [0, 1]."""
        if self is ModFormat.PAM4:
            return np.array([0.0, 1 / 3, 2 / 3, 1.0])
        return np.array([0.0, 1.0])

    @classmethod
    def parse(cls, value) -> "ModFormat":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("-", ""))
        except ValueError:
            raise ValueError(f"unknown modulation format {value!r}") from None


# Gray map for PAM-4: (msb, lsb) -> level index
GRAY_PAM4 = {(0, 0): 0, (0, 1): 1, (1, 1): 2, (1, 0): 3}
GRAY_PAM4_INV = {v: k for k, v in GRAY_PAM4.items()}


@dataclass(frozen=True)
class MzmParams:
    """Mach-Zehnder drive settings.

    ``amplitude`` (A) and ``bias`` (V_b) both equal ``v_pi / 2`` at
    quadrature and ``v_pi`` at null.
    """

    v_pi: float = 1.0
    amplitude: float = 0.5
    bias: float = 0.5
    cw_power: float = 1e-3

    @classmethod
    def for_format(cls, fmt: ModFormat, v_pi: float = 1.0, cw_power: float = 1e-3) -> "MzmParams":
        ab = v_pi if fmt.bias_mode == "null" else v_pi / 2
        return cls(v_pi=v_pi, amplitude=ab, bias=ab, cw_power=cw_power)


def gen_prbs(order: int = 17, seed: int = 1) -> np.ndarray:
    """Maximal-length sequence from the LFSR x^17 + x^14 + 1.

    ``seed`` is the initial 17-bit register state and must be nonzero.
    Returns ``2**17 - 1`` bits as uint8.
    """
    if order != 17:
        raise ValueError("only PRBS17 is supported")
    state = int(seed) & ((1 << order) - 1)
    if state == 0:
        raise ValueError("PRBS seed must give a nonzero register state")
    n = (1 << order) - 1
    # s[k+17] = s[k+14] xor s[k]; the first 17 outputs are the register
    # contents, the rest follow from the recurrence.
    s = np.empty(n + order, dtype=np.uint8)
    s[:order] = [(state >> i) & 1 for i in range(order)]
    step = order - 14
    for k in range(0, n, step):
        # blocks of 3 new bits only depend on bits already generated
        hi = min(k + step, n)
        s[k + order : hi + order] = s[k + 14 : hi + 14] ^ s[k:hi]
    return s[:n].copy()


def precode_db(data) -> np.ndarray:
    """Duobinary precoder b_k = d_k xor b_{k-1} with b_{-1} = 0."""
    d = np.asarray(data, dtype=np.uint8)
    if d.size == 0:
        raise ValueError("empty bit sequence")
    # running xor is the parity of the cumulative sum
    return (np.cumsum(d, dtype=np.int64) & 1).astype(np.uint8)


def bits_to_levels(bits, fmt: ModFormat) -> np.ndarray:
    """Symbol levels x in [0, 1] for ``bits`` (precoded first for duobinary)."""
    fmt = ModFormat.parse(fmt)
    b = np.asarray(bits, dtype=np.uint8)
    if fmt is ModFormat.PAM4:
        if b.size % 2:
            raise ValueError("PAM-4 needs an even number of bits")
        msb, lsb = b[0::2].astype(int), b[1::2].astype(int)
        # 00->0, 01->1, 11->2, 10->3
        idx = 2 * msb + (msb ^ lsb)
        return fmt.levels[idx]
    if fmt.is_duobinary:
        b = precode_db(b)
    return b.astype(float)


def map_to_drive(bits, fmt: ModFormat, bit_rate: float) -> SampledSignal:
    """Rectangular NRZ drive x(t) at 8 samples per bit period."""
    fmt = ModFormat.parse(fmt)
    levels = bits_to_levels(bits, fmt)
    sps = SAMPLES_PER_BIT * fmt.bits_per_symbol
    return SampledSignal(np.repeat(levels, sps), SAMPLES_PER_BIT * bit_rate, "electrical")


def predistort(x: SampledSignal, p: MzmParams, tol: float = 1e-12) -> SampledSignal:
    """Inverse of the MZM cosine: x_D = (A/pi) arccos(1 - 2x) - V_b."""
    v = x.samples
    if np.any(v < -tol) or np.any(v > 1 + tol):
        raise ValueError("drive signal must lie in [0, 1]")
    v = np.clip(v, 0.0, 1.0)
    return x.with_samples(p.amplitude / np.pi * np.arccos(1.0 - 2.0 * v) - p.bias)


def mzm_modulate(x_f: SampledSignal, p: MzmParams) -> SampledSignal:
    """Chirp-free MZM: E = sqrt(P_cw) cos(pi x_F / V_pi)."""
    if x_f.is_complex:
        raise ValueError("MZM drive must be real")
    field = np.sqrt(p.cw_power) * np.cos(np.pi * x_f.samples / p.v_pi)
    return SampledSignal(field.astype(complex), x_f.sample_rate, "field")
