"""Electrical low-pass filter models: Butterworth and super-Gaussian.

Attenuation in dB is always measured on the power response |H|^2, so the
-3 dB frequency of an N-pole Butterworth is its corner frequency and a
super-Gaussian exp(-(f/f0)^(2n) / 2) crosses -3 dB where (f/f0)^(2n) = ln 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import optimize, signal as sps

LN2 = math.log(2.0)
LN100 = math.log(100.0)  # -20 dB on power


@dataclass(frozen=True)
class FilterSpec:
    """A TX or RX electrical filter.

    Use :meth:`butterworth` or :meth:`supergaussian` rather than the
    constructor. ``kind`` is ``"butterworth"`` or ``"supergaussian"``;
    ``order`` is the pole count or the (real) super-Gaussian order n;
    ``f0`` is the corner (Butterworth) or the f0 parameter (super-Gaussian).
    """

    kind: str
    order: float
    f0: float

    def __post_init__(self):
        if self.kind not in ("butterworth", "supergaussian"):
            raise ValueError(f"unknown filter kind {self.kind!r}")
        if self.f0 <= 0:
            raise ValueError("filter frequency must be positive")
        if self.kind == "butterworth" and (self.order < 1 or int(self.order) != self.order):
            raise ValueError("Butterworth pole count must be a positive integer")
        if self.order <= 0:
            raise ValueError("filter order must be positive")

    @classmethod
    def butterworth(cls, poles: int, f3db: float) -> "FilterSpec":
        return cls("butterworth", int(poles), float(f3db))

    @classmethod
    def supergaussian(cls, f3db: float, f20db: float) -> "FilterSpec":
        n, f0 = supergaussian_params(f3db, f20db)
        return cls("supergaussian", n, f0)

    @property
    def f3db(self) -> float:
        if self.kind == "butterworth":
            return self.f0
        return self.f0 * LN2 ** (1.0 / (2 * self.order))

    @property
    def f20db(self) -> float:
        if self.kind == "butterworth":
            return self.f0 * 99.0 ** (1.0 / (2 * self.order))
        return self.f0 * LN100 ** (1.0 / (2 * self.order))

    def response(self, freqs) -> np.ndarray:
        if self.kind == "butterworth":
            return butterworth_response(int(self.order), self.f0, freqs)
        return supergaussian_response(self.order, self.f0, freqs)

    def describe(self) -> str:
        if self.kind == "butterworth":
            return f"Butterworth {int(self.order)}-pole, f3dB={self.f3db / 1e9:.4g} GHz"
        return (
            f"super-Gaussian n={self.order:.4f}, f3dB={self.f3db / 1e9:.4g} GHz, "
            f"f20dB={self.f20db / 1e9:.4g} GHz"
        )


@dataclass(frozen=True)
class NormalizedBandwidths:
    b3db: float
    b20db: float
    bit_rate: float


def butterworth_response(poles: int, f3db: float, freqs) -> np.ndarray:
    """Minimum-phase analog Butterworth response evaluated at ``freqs`` (Hz).

    Works on two-sided grids; the result is Hermitian in f.
    """
    if poles < 1:
        raise ValueError("Butterworth filter needs at least one pole")
    if f3db <= 0:
        raise ValueError("f3db must be positive")
    _, p, k = sps.buttap(int(poles))
    s = 1j * np.asarray(freqs, dtype=float) / f3db
    H = np.full(s.shape, k, dtype=complex)
    for pole in p:
        H /= s - pole
    return H


def supergaussian_params(f3db: float, f20db: float) -> tuple[float, float]:
    """Order n and f0 giving a super-Gaussian the requested -3/-20 dB points."""
    if not (f3db > 0 and f20db > f3db):
        raise ValueError("need 0 < f3db < f20db")
    n = math.log(LN100 / LN2) / (2.0 * math.log(f20db / f3db))
    f0 = f3db / LN2 ** (1.0 / (2.0 * n))
    return n, f0


def supergaussian_response(n: float, f0: float, freqs) -> np.ndarray:
    """Zero-phase response exp(-(|f|/f0)^(2n) / 2)."""
    if n <= 0 or f0 <= 0:
        raise ValueError("n and f0 must be positive")
    return np.exp(-0.5 * (np.abs(np.asarray(freqs, dtype=float)) / f0) ** (2.0 * n))


def to_normalized(f3db: float, f20db: float | None, bit_rate: float) -> NormalizedBandwidths:
    """Bandwidths as a percentage of the bit rate."""
    if bit_rate <= 0:
        raise ValueError("bit rate must be positive")
    b20 = float("nan") if f20db is None else 100.0 * f20db / bit_rate
    return NormalizedBandwidths(100.0 * f3db / bit_rate, b20, bit_rate)


def from_normalized(b3db_pct: float, b20db_pct: float, bit_rate: float) -> FilterSpec:
    return FilterSpec.supergaussian(b3db_pct * bit_rate / 100.0, b20db_pct * bit_rate / 100.0)


def cascade_db(freqs, *specs: FilterSpec) -> np.ndarray:
    """Power response in dB of a cascade of filters."""
    total = np.zeros(np.shape(freqs))
    for spec in specs:
        total += 20.0 * np.log10(np.maximum(np.abs(spec.response(freqs)), 1e-300))
    return total


def fit_equivalent_gf(freqs, cascade_db_values, floor_db: float = -25.0) -> tuple[float, float]:
    """Fit two identical super-Gaussians to a measured TX+RX cascade.

    Parameters
    ----------
    freqs : array_like
        Frequencies in Hz.
    cascade_db_values : array_like
        Cascade power response 10 log10 |H_tx H_rx|^2 in dB.
    floor_db : float
        Only points between 0 dB and ``floor_db`` enter the least-squares
        cost (uniform weights, error measured in dB).

    Returns
    -------
    (f3db, f20db) of the single super-Gaussian, in Hz.
    """
    f = np.asarray(freqs, dtype=float)
    y = np.asarray(cascade_db_values, dtype=float)
    if f.shape != y.shape or f.size < 3:
        raise ValueError("need matching frequency and magnitude arrays")
    if np.min(y) > -20.0:
        raise ValueError("cascade never reaches -20 dB on the provided grid")
    mask = (f >= 0) & (y >= floor_db)
    f, y = f[mask], y[mask]

    # rough starting point: the cascade of two identical filters crosses
    # -6 dB where each one crosses -3 dB
    order = np.argsort(f)
    f, y = f[order], y[order]
    start3 = _first_crossing(f, y, -6.0)
    start20 = _first_crossing(f, y, -min(40.0, -floor_db)) if np.min(y) <= -40 else 2.0 * start3
    start20 = max(start20, 1.2 * start3)

    db_per_neper = 10.0 / math.log(10.0)

    def residual(theta):
        f3, ratio = math.exp(theta[0]), 1.0 + math.exp(theta[1])
        n, f0 = supergaussian_params(f3, f3 * ratio)
        model = -2.0 * db_per_neper * (f / f0) ** (2.0 * n)
        return model - y

    theta0 = [math.log(start3), math.log(start20 / start3 - 1.0)]
    res = optimize.least_squares(residual, theta0, method="lm", xtol=1e-14, ftol=1e-14)
    f3 = math.exp(res.x[0])
    return f3, f3 * (1.0 + math.exp(res.x[1]))


def _first_crossing(f, y, level):
    below = np.nonzero(y <= level)[0]
    if below.size == 0:
        return float(f[-1])
    i = below[0]
    if i == 0:
        return float(f[0])
    return float(np.interp(level, [y[i], y[i - 1]], [f[i], f[i - 1]]))


def read_response_file(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column ``frequency_Hz magnitude_dB`` text file.

    Blank lines and lines starting with ``#`` are ignored; columns may be
    separated by whitespace or commas.
    """
    freqs, mags = [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
        try:
            freqs.append(float(parts[0]))
            mags.append(float(parts[1]))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not a number") from None
    if not freqs:
        raise ValueError(f"{path}: no data points")
    return np.array(freqs), np.array(mags)


def write_response_file(path, freqs, mags_db, comment: str = "") -> None:
    lines = [f"# {comment}"] if comment else []
    lines.append("# frequency_Hz magnitude_dB")
    lines += [f"{f:.6e} {m:.9f}" for f, m in zip(freqs, mags_db)]
    Path(path).write_text("\n".join(lines) + "\n")
