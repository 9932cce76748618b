"""Scenario configuration files.

Configs are INI files with one section per subsystem::

    [scenario]
    format = pam2
    rb_gbps = 25
    rop_dbm = -20

    [filter]
    b3db_pct = 120
    b20db_pct = 240

Command-line flags override file values, which override the defaults below.
"""

from __future__ import annotations

import configparser
import copy

from .equalizer import EqualizerConfig
from .fiber import BAND_WAVELENGTH_NM, FiberSpec
from .filters import FilterSpec
from .link import LinkScenario
from .rx import ApdParams
from .tx import ModFormat


class ConfigError(ValueError):
    pass


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(",", " ").split()]


def _strs(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return [str(v) for v in text]
    return str(text).replace(",", " ").split()


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_int(text):
    return None if text in (None, "", "none") else int(text)


def _opt_float(text):
    return None if text in (None, "", "none") else float(text)


# section -> key -> (parser, default)
SCHEMA = {
    "scenario": {
        "format": (str, "pam2"),
        "rb_gbps": (float, 25.0),
        "rop_dbm": (float, -20.0),
        "seed": (int, 1),
        "prbs_seed": (int, 1),
        "noise": (_bool, True),
    },
    "filter": {
        "b3db_pct": (float, 120.0),
        "b20db_pct": (float, 240.0),
        "poles": (_opt_int, None),
        "rx_poles": (_opt_int, None),
    },
    "fiber": {
        "dispersion_ps_nm": (float, 0.0),
        "band": (str, "C"),
        "wavelength_nm": (_opt_float, None),
    },
    "apd": {
        "responsivity": (float, 0.8),
        "gain": (float, 25.0),
        "excess_noise": (_opt_float, None),
        "thermal_psd": (float, 1.024e-21),
    },
    "equalizer": {
        "taps": (int, 20),
        "step_mu": (float, 2e-3),
        "training_symbols": (int, 6000),
        "output_delay": (int, 10),
    },
    "sweep": {
        "formats": (_strs, ["pam2", "pam4", "edb", "odb"]),
        "rb_gbps": (_floats, [25.0]),
        "b3db_pct": (_floats, [15.0, 20.0, 25.0, 30.0, 35.0, 40.0]),
        "b20db_pct": (_floats, [40.0, 60.0, 80.0, 100.0, 120.0, 140.0]),
        "dispersion_ps_nm": (_floats, [0.0]),
        "workers": (int, 1),
        "out": (str, "sweep.csv"),
    },
}


def defaults() -> dict:
    return {sec: {k: copy.copy(d) for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}


def parse_value(section: str, key: str, raw):
    parser, _ = SCHEMA[section][key]
    try:
        return parser(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


def load_config(path=None, settings: dict | None = None) -> dict:
    """Read an INI file on top of ``settings`` (or the defaults)."""
    settings = settings or defaults()
    if path is None:
        return settings
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    unknown = []
    for section in cp.sections():
        if section not in SCHEMA:
            unknown.append(f"[{section}]")
            continue
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                unknown.append(f"{section}.{key}")
                continue
            settings[section][key] = parse_value(section, key, raw)
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(unknown))
    return settings


def apply_overrides(settings: dict, overrides: dict) -> dict:
    """Set ``{(section, key): value}`` entries that are not None."""
    for (section, key), value in overrides.items():
        if value is not None:
            settings[section][key] = parse_value(section, key, value)
    return settings


def wavelength_nm(settings: dict) -> float:
    fib = settings["fiber"]
    if fib["wavelength_nm"] is not None:
        return fib["wavelength_nm"]
    band = fib["band"].upper()
    if band not in BAND_WAVELENGTH_NM:
        raise ConfigError(f"unknown band {fib['band']!r}, expected O, C or L")
    return BAND_WAVELENGTH_NM[band]


def build_filters(b3db_pct, b20db_pct, bit_rate, poles=None, rx_poles=None):
    """TX and RX filters; ``poles`` selects Butterworth, otherwise super-Gaussian."""
    f3 = b3db_pct * bit_rate / 100.0
    if b3db_pct <= 0:
        raise ConfigError("b3db_pct must be positive")
    if poles is not None:
        tx = FilterSpec.butterworth(poles, f3)
    else:
        if not b20db_pct > b3db_pct:
            raise ConfigError(
                f"constraint B20dB > B3dB violated (b20db_pct={b20db_pct:g}, b3db_pct={b3db_pct:g})"
            )
        tx = FilterSpec.supergaussian(f3, b20db_pct * bit_rate / 100.0)
    rx = FilterSpec.butterworth(rx_poles, f3) if rx_poles is not None else tx
    return tx, rx


def scenario_from_settings(settings: dict) -> LinkScenario:
    sc, flt, fib, apd, eq = (settings[k] for k in ("scenario", "filter", "fiber", "apd", "equalizer"))
    try:
        fmt = ModFormat.parse(sc["format"])
        rb = sc["rb_gbps"] * 1e9
        tx, rx = build_filters(flt["b3db_pct"], flt["b20db_pct"], rb, flt["poles"], flt["rx_poles"])
        return LinkScenario(
            bit_rate=rb,
            fmt=fmt,
            tx_filter=tx,
            rx_filter=rx,
            fiber=FiberSpec(fib["dispersion_ps_nm"], wavelength_nm(settings)),
            apd=ApdParams(
                responsivity=apd["responsivity"],
                gain=apd["gain"],
                excess_noise=apd["excess_noise"],
                thermal_psd=apd["thermal_psd"],
            ),
            eq=EqualizerConfig(
                taps=eq["taps"],
                step_mu=eq["step_mu"],
                training_symbols=eq["training_symbols"],
                output_delay=eq["output_delay"],
            ),
            prbs_seed=sc["prbs_seed"],
            noise_seed=sc["seed"],
            noise=sc["noise"],
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def describe_scenario(s: LinkScenario) -> str:
    """Human-readable echo of a resolved scenario."""
    lines = [
        f"format            = {s.fmt.value}",
        f"rb_gbps           = {s.bit_rate / 1e9:g}",
        f"tx_filter         = {s.tx_filter.describe() if s.tx_filter else 'bypass'}",
        f"rx_filter         = {s.rx_filter.describe() if s.rx_filter else 'bypass'}",
        f"b3db_pct          = {100 * s.tx_filter.f3db / s.bit_rate:.4g}" if s.tx_filter else "b3db_pct          = NA",
        f"b20db_pct         = {100 * s.tx_filter.f20db / s.bit_rate:.4g}" if s.tx_filter else "b20db_pct         = NA",
        f"dispersion_ps_nm  = {s.fiber.dispersion_ps_nm:g}",
        f"wavelength_nm     = {s.fiber.wavelength_nm:g}",
        f"apd               = R={s.apd.responsivity:g} A/W, G={s.apd.gain:g}, "
        f"F={s.apd.excess_noise:.4g}, N0={s.apd.thermal_psd:.4g} A^2/Hz",
        f"equalizer         = {s.eq.taps} taps, mu={s.eq.step_mu:g}, "
        f"training={s.eq.training_symbols} symbols",
        f"prbs_seed         = {s.prbs_seed}",
        f"noise_seed        = {s.noise_seed}",
        f"noise             = {s.noise}",
    ]
    return "\n".join(lines)
