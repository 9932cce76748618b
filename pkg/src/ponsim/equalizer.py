"""Receiver DSP: timing alignment, T/2-spaced FFE with LMS training, slicing.

Pilot (target) symbols are normalized to unit peak:

======  =========================  ==============================
format  targets                    meaning
======  =========================  ==============================
PAM2    {-1, +1}                   data bit
PAM4    {-1, -1/3, +1/3, +1}       Gray-coded bit pair
EDB     {-1, 0, +1}                add-and-delay of precoded bits
ODB     {-1, +1}                   data bit (antipodal)
======  =========================  ==============================
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tx import ModFormat, precode_db


class AlignmentError(RuntimeError):
    """No usable correlation peak between received signal and pilot."""


class EqualizerDivergence(RuntimeError):
    """LMS training blew up."""


@dataclass(frozen=True)
class EqualizerConfig:
    taps: int = 20
    samples_per_symbol: int = 2
    step_mu: float = 2e-3
    training_symbols: int = 6000
    output_delay: int = 10

    def __post_init__(self):
        if self.taps < 1:
            raise ValueError("taps must be >= 1")
        if self.samples_per_symbol != 2:
            raise ValueError("the FFE runs at two samples per symbol")
        if not self.step_mu > 0:
            raise ValueError("step_mu must be positive")
        if self.training_symbols < 1:
            raise ValueError("training_symbols must be >= 1")
        if not 0 <= self.output_delay < self.taps:
            raise ValueError("output_delay must index a tap")


@dataclass
class FfeResult:
    symbols: np.ndarray
    taps: np.ndarray
    mse: np.ndarray


def make_pilot(bits, fmt) -> np.ndarray:
    """Training targets for the data ``bits`` as transmitted in format ``fmt``."""
    fmt = ModFormat.parse(fmt)
    b = np.asarray(bits, dtype=np.int64)
    if fmt in (ModFormat.PAM2, ModFormat.ODB):
        return 2.0 * b - 1.0
    if fmt is ModFormat.PAM4:
        if b.size % 2:
            raise ValueError("PAM-4 needs an even number of bits")
        msb, lsb = b[0::2], b[1::2]
        idx = 2 * msb + (msb ^ lsb)
        return 2.0 * idx / 3.0 - 1.0
    if fmt is ModFormat.EDB:
        pre = 2.0 * precode_db(b) - 1.0
        prev = np.concatenate(([-1.0], pre[:-1]))
        return 0.5 * (pre + prev)
    raise ValueError(f"no pilot for format {fmt}")


def decide_decode(symbols, fmt) -> np.ndarray:
    """Slice equalized symbols and map them back to data bits."""
    fmt = ModFormat.parse(fmt)
    y = np.asarray(symbols, dtype=float)
    if fmt in (ModFormat.PAM2, ModFormat.ODB):
        return (y > 0).astype(np.uint8)
    if fmt is ModFormat.EDB:
        # outer levels mean equal adjacent precoded bits, i.e. d = 0
        return (np.abs(y) < 0.5).astype(np.uint8)
    if fmt is ModFormat.PAM4:
        idx = np.clip(np.floor((y + 1.0) * 1.5 + 0.5), 0, 3).astype(np.int64)
        msb = idx >> 1
        lsb = msb ^ (idx & 1)
        out = np.empty(2 * y.size, dtype=np.uint8)
        out[0::2], out[1::2] = msb, lsb
        return out
    raise ValueError(f"cannot decode format {fmt}")


def circular_xcorr(x, y) -> np.ndarray:
    """Normalized circular cross-correlation c[l] = <x[k+l], y[k]>."""
    x = np.asarray(x, dtype=float) - np.mean(x)
    y = np.asarray(y, dtype=float) - np.mean(y)
    norm = np.linalg.norm(x) * np.linalg.norm(y)
    if norm == 0:
        return np.zeros(x.size)
    return np.fft.irfft(np.fft.rfft(x) * np.conj(np.fft.rfft(y)), n=x.size) / norm


@dataclass
class Alignment:
    stream: np.ndarray
    phase: int
    delay: int
    correlation: float


def antialias_response(n: int, samples_per_symbol: int) -> np.ndarray:
    """Ideal low-pass at the Nyquist frequency of the 2 samples/symbol stream.

    Returned on the two-sided FFT grid of an ``n``-sample input.
    """
    f = np.fft.fftfreq(n)  # cycles per input sample
    return (np.abs(f) <= 1.0 / samples_per_symbol + 1e-12).astype(float)


def downsample_align(
    samples, pilot, samples_per_symbol: int, floor: float = 0.1, antialias: bool = True
) -> Alignment:
    """Pick sampling phase and bulk delay, then decimate to 2 samples/symbol.

    With ``antialias`` the input is first band-limited to the Nyquist
    frequency of the output rate. The returned stream ``s`` satisfies
    ``s[2k] ~ pilot[k]``; the signal is treated as periodic, so the delay is
    applied as a circular shift. ``delay`` is counted in input samples.
    """
    r = np.asarray(samples, dtype=float)
    pilot = np.asarray(pilot, dtype=float)
    sps = int(samples_per_symbol)
    if sps % 2:
        raise ValueError("samples per symbol must be even")
    n_sym = r.size // sps
    if n_sym * sps != r.size or n_sym != pilot.size:
        raise ValueError("signal length must be pilot length times samples per symbol")
    if antialias:
        H = antialias_response(r.size, sps)[: r.size // 2 + 1]
        r = np.fft.irfft(np.fft.rfft(r) * H, n=r.size)
    best = (-1.0, 0, 0)
    for phase in range(sps):
        c = circular_xcorr(r[phase::sps], pilot)
        lag = int(np.argmax(np.abs(c)))
        if abs(c[lag]) > best[0]:
            best = (abs(c[lag]), phase, lag)
    corr, phase, lag = best
    if corr < floor:
        raise AlignmentError(f"correlation peak {corr:.3g} below {floor}")
    delay = phase + lag * sps
    return Alignment(decimate_aligned(r, delay, sps), phase, delay, corr)


def decimate_aligned(samples, delay: int, samples_per_symbol: int) -> np.ndarray:
    """Circularly advance by ``delay`` samples and keep 2 samples per symbol."""
    r = np.asarray(samples)
    return np.roll(r, -int(delay))[:: samples_per_symbol // 2]


def regressors(stream, n_symbols: int, taps: int, center: int) -> np.ndarray:
    """Tap-input matrix: row k holds stream[2k - center : 2k - center + taps]."""
    idx = 2 * np.arange(n_symbols)[:, None] - center + np.arange(taps)[None, :]
    return np.take(stream, idx, mode="wrap")


def ffe_lms(stream, pilot, cfg: EqualizerConfig = EqualizerConfig()) -> FfeResult:
    """Train a fractionally spaced FFE on the first pilot symbols, then freeze it.

    ``stream`` is the aligned 2-sample/symbol input; it is shifted to zero
    mean and scaled to unit RMS before equalization. Returns one output per
    pilot symbol, the frozen taps and the per-symbol squared training error.
    """
    u = np.asarray(stream, dtype=float)
    d = np.asarray(pilot, dtype=float)
    n_sym = d.size
    if u.size < 2 * n_sym:
        raise ValueError("input shorter than two samples per pilot symbol")
    if cfg.training_symbols >= n_sym:
        raise ValueError("training consumes the whole sequence")
    u = u - u.mean()
    rms = np.sqrt(np.mean(u**2))
    if rms > 0:
        u = u / rms

    X = regressors(u, n_sym, cfg.taps, cfg.output_delay)
    w = np.zeros(cfg.taps)
    n_train = cfg.training_symbols
    mse = np.empty(n_train)
    limit = 100.0 * np.mean(d[:n_train] ** 2)
    mu = cfg.step_mu
    run = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_train):
            x = X[k]
            e = d[k] - w @ x
            w += mu * e * x
            e2 = e * e
            mse[k] = e2
            if not np.isfinite(e2):
                raise EqualizerDivergence(f"non-finite error at training symbol {k}")
            run = run + 1 if e2 > limit else 0
            if run >= 500:
                raise EqualizerDivergence(f"MSE above 100x initial for 500 symbols (k={k})")
    return FfeResult(X @ w, w, mse)


def wiener_taps(stream, pilot, cfg: EqualizerConfig, n_symbols=None) -> np.ndarray:
    """Least-squares (Wiener) FFE solution over the first ``n_symbols``."""
    u = np.asarray(stream, dtype=float)
    u = u - u.mean()
    u = u / np.sqrt(np.mean(u**2))
    n = n_symbols or np.size(pilot)
    X = regressors(u, n, cfg.taps, cfg.output_delay)
    w, *_ = np.linalg.lstsq(X, np.asarray(pilot, dtype=float)[:n], rcond=None)
    return w


def count_ber(rx_bits, tx_bits, count: int = 130_000) -> float:
    """Fraction of mismatches over exactly the first ``count`` bits."""
    rx = np.asarray(rx_bits)
    tx = np.asarray(tx_bits)
    if rx.size < count or tx.size < count:
        raise ValueError(f"need {count} bits, have {min(rx.size, tx.size)}")
    return float(np.count_nonzero(rx[:count] != tx[:count])) / count
