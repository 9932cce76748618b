"""Dispersive fiber and variable optical attenuator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .signal import SampledSignal, apply_response, dbm_to_watt, freq_grid

BAND_WAVELENGTH_NM = {"O": 1310.0, "C": 1550.0, "L": 1590.0}


@dataclass(frozen=True)
class FiberSpec:
    """Accumulated chromatic dispersion (ps/nm) at a carrier wavelength (nm)."""

    dispersion_ps_nm: float = 0.0
    wavelength_nm: float = 1550.0

    def __post_init__(self):
        if self.wavelength_nm <= 0:
            raise ValueError("wavelength must be positive")

    @classmethod
    def for_band(cls, band: str, dispersion_ps_nm: float = 0.0) -> "FiberSpec":
        try:
            return cls(dispersion_ps_nm, BAND_WAVELENGTH_NM[band.upper()])
        except KeyError:
            raise ValueError(f"unknown band {band!r}, expected O, C or L") from None

    @property
    def beta2_l(self) -> float:
        """Accumulated GVD beta2*L in s^2."""
        d = self.dispersion_ps_nm * 1e-3  # ps/nm -> s/m
        lam = self.wavelength_nm * 1e-9
        return -d * lam**2 / (2 * np.pi * SPEED_OF_LIGHT)


def dispersion_response(spec: FiberSpec, freqs) -> np.ndarray:
    """All-pass H(f) = exp(j pi lambda^2 D f^2 / c)."""
    d = spec.dispersion_ps_nm * 1e-3
    lam = spec.wavelength_nm * 1e-9
    f = np.asarray(freqs, dtype=float)
    return np.exp(1j * np.pi * lam**2 * d * f**2 / SPEED_OF_LIGHT)


def propagate(field: SampledSignal, spec: FiberSpec) -> SampledSignal:
    if spec.dispersion_ps_nm == 0:
        return field
    H = dispersion_response(spec, freq_grid(len(field), field.sample_rate))
    return apply_response(field.with_samples(field.samples.astype(complex)), H)


def set_rop(field: SampledSignal, target_dbm: float) -> SampledSignal:
    """Scale ``field`` by a real factor so its mean power is ``target_dbm``."""
    p = float(np.mean(np.abs(field.samples) ** 2))
    if p <= 0:
        raise ValueError("cannot set the power of a zero field")
    scale = np.sqrt(dbm_to_watt(target_dbm) / p)
    return field.with_samples(field.samples * scale)
