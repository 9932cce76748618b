"""Physical-layer simulator for 25/50 Gb/s IM/DD PON links.

Transmitter electrical filtering, chromatic dispersion and an APD receiver
with a 20-tap LMS equalizer, for PAM-2, PAM-4, electrical duobinary (EDB)
and optical duobinary (ODB).
"""

from .equalizer import EqualizerConfig
from .fiber import FiberSpec
from .filters import FilterSpec, fit_equivalent_gf, supergaussian_params, to_normalized
from .link import (
    LinkScenario,
    LinkSimulator,
    SensitivityResult,
    power_penalty,
    sensitivity,
    simulate_ber,
)
from .rx import ApdParams
from .tx import ModFormat, MzmParams

__all__ = [
    "ApdParams",
    "EqualizerConfig",
    "FiberSpec",
    "FilterSpec",
    "LinkScenario",
    "LinkSimulator",
    "ModFormat",
    "MzmParams",
    "SensitivityResult",
    "fit_equivalent_gf",
    "power_penalty",
    "sensitivity",
    "simulate_ber",
    "supergaussian_params",
    "to_normalized",
]

__version__ = "0.1.0"
