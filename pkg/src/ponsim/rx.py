"""APD + TIA front end and the receiver electrical filter."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import e as ELECTRON_CHARGE

from .filters import FilterSpec
from .signal import SampledSignal, apply_response, freq_grid


@dataclass(frozen=True)
class ApdParams:
    """APD and TIA constants.

    ``excess_noise`` defaults to ``gain ** 0.75``. ``thermal_psd`` is the
    input-referred current noise density N_0 in A^2/Hz.
    """

    responsivity: float = 0.8
    gain: float = 25.0
    excess_noise: float = field(default=None)
    thermal_psd: float = 1.024e-21
    charge: float = ELECTRON_CHARGE

    def __post_init__(self):
        if self.excess_noise is None:
            object.__setattr__(self, "excess_noise", self.gain**0.75)
        for name in ("responsivity", "gain", "excess_noise", "thermal_psd", "charge"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def shot_coeff(self) -> float:
        """q G^2 F R, the shot-noise variance per watt and per hertz."""
        return self.charge * self.gain**2 * self.excess_noise * self.responsivity

    def shot_variance(self, power, bandwidth):
        return self.shot_coeff * np.asarray(power) * bandwidth

    def thermal_variance(self, bandwidth) -> float:
        return self.thermal_psd * bandwidth


def detect(
    power: SampledSignal,
    params: ApdParams,
    seed=None,
    noise: bool = True,
) -> SampledSignal:
    """Photocurrent i = G R P + n_s + n_T.

    Both noise terms are white over the simulation bandwidth (the sample
    rate). The shot-noise variance follows the instantaneous power sample by
    sample.
    """
    if power.domain != "power":
        raise ValueError("detect expects a power-domain signal")
    p = power.samples
    if np.any(p < 0):
        raise ValueError("optical power cannot be negative")
    current = params.gain * params.responsivity * p
    if noise:
        zs, zt = standard_noise(p.size, seed)
        bw = power.sample_rate
        current = current + np.sqrt(params.shot_variance(p, bw)) * zs
        current = current + np.sqrt(params.thermal_variance(bw)) * zt
    return SampledSignal(current, power.sample_rate, "current")


def standard_noise(n: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Unit-variance shot and thermal noise draws for ``seed``, in that order."""
    rng = np.random.default_rng(seed)
    zs = rng.standard_normal(n)
    zt = rng.standard_normal(n)
    return zs, zt


def rx_filter(i: SampledSignal, spec: FilterSpec) -> SampledSignal:
    H = spec.response(freq_grid(len(i), i.sample_rate))
    return apply_response(i, H)


def noise_bandwidth_factor(spec: FilterSpec, n: int, sample_rate: float) -> float:
    """Output/input variance ratio of white noise through ``spec`` on the grid."""
    H = spec.response(freq_grid(n, sample_rate))
    return float(np.mean(np.abs(H) ** 2))
