"""Uniformly sampled waveforms and frequency-domain filtering.

All waveforms in the simulator are treated as one period of a periodic
signal, so filtering is a circular convolution done with a single FFT pair.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

SAMPLES_PER_BIT = 8

DOMAINS = ("electrical", "field", "power", "current")


@dataclass(frozen=True)
class SampledSignal:
    """A waveform together with its sample rate.

    Parameters
    ----------
    samples : np.ndarray
        Real or complex samples. Units depend on ``domain``: volts for
        ``electrical``, sqrt(W) for ``field``, W for ``power`` and A for
        ``current``.
    sample_rate : float
        Sampling frequency in Hz.
    domain : str
        One of ``electrical``, ``field``, ``power`` or ``current``.
    """

    samples: np.ndarray
    sample_rate: float
    domain: str = "electrical"

    def __post_init__(self):
        x = np.asarray(self.samples)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.samples)

    def with_samples(self, samples, domain=None) -> "SampledSignal":
        return replace(self, samples=np.asarray(samples), domain=domain or self.domain)


def freq_grid(n: int, sample_rate: float) -> np.ndarray:
    """Two-sided frequency grid in FFT order with resolution ``sample_rate / n``."""
    return np.fft.fftfreq(n, d=1.0 / sample_rate)


def is_hermitian(H: np.ndarray, rtol: float = 1e-9) -> bool:
    """Check ``H[-k] == conj(H[k])`` on an FFT-ordered grid.

    The Nyquist bin of an even-length grid is its own mirror and is skipped;
    only its real part survives when the output is forced real.
    """
    H = np.asarray(H)
    n = H.size
    diff = H - np.conj(np.roll(H[::-1], 1))
    if n % 2 == 0:
        diff[n // 2] = 0
    diff[0] = H[0].imag
    scale = max(np.max(np.abs(H)), 1e-300)
    return bool(np.max(np.abs(diff)) <= rtol * scale)


def apply_response(sig: SampledSignal, H: np.ndarray) -> SampledSignal:
    """Multiply the spectrum of ``sig`` by ``H`` and transform back.

    ``H`` must be sampled on ``freq_grid(len(sig), sig.sample_rate)``. For a
    real input, ``H`` has to be Hermitian-symmetric so the output stays real.
    """
    H = np.asarray(H)
    n = len(sig)
    if H.shape != (n,):
        raise ValueError(f"transfer function has {H.size} points, signal has {n}")
    if sig.is_complex:
        out = np.fft.ifft(np.fft.fft(sig.samples) * H)
        return sig.with_samples(out)
    if not np.isrealobj(H) and not is_hermitian(H):
        raise ValueError("non-Hermitian response applied to a real signal")
    # a real signal with Hermitian H only needs the non-negative half
    half = H[: n // 2 + 1].copy()
    if np.iscomplexobj(half) and n % 2 == 0:
        half[-1] = half[-1].real
    out = np.fft.irfft(np.fft.rfft(sig.samples) * half, n=n)
    return sig.with_samples(out)


def mean_power(sig: SampledSignal) -> float:
    """Time-averaged optical power of a ``power``-domain signal, in W."""
    if sig.domain != "power":
        raise ValueError("mean_power expects a power-domain signal")
    if np.any(sig.samples < 0):
        raise ValueError("optical power cannot be negative")
    return float(np.mean(sig.samples))


def intensity(field: SampledSignal) -> SampledSignal:
    """Instantaneous power |E|^2 of an optical field."""
    return SampledSignal(np.abs(field.samples) ** 2, field.sample_rate, "power")


def dbm_to_watt(p_dbm):
    return 1e-3 * 10.0 ** (np.asarray(p_dbm) / 10.0)


def watt_to_dbm(p_w):
    return 10.0 * np.log10(np.asarray(p_w) / 1e-3)
