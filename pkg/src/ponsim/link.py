"""End-to-end link: scenario description, BER at a given ROP, sensitivity.

A :class:`LinkSimulator` runs everything that does not depend on the received
power once. The photocurrent after the RX filter is linear in the three
components ``G R P``, shot noise and thermal noise, which scale with the ROP
as ``p``, ``sqrt(p)`` and ``1`` respectively, so each new ROP only costs the
equalizer and the slicer. Noise realizations are therefore shared across
ROP points of one scenario.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .equalizer import (
    AlignmentError,
    EqualizerConfig,
    EqualizerDivergence,
    antialias_response,
    count_ber,
    decide_decode,
    decimate_aligned,
    downsample_align,
    ffe_lms,
    make_pilot,
)
from .fiber import FiberSpec, propagate
from .filters import FilterSpec, from_normalized
from .rx import ApdParams, standard_noise
from .signal import SAMPLES_PER_BIT, SampledSignal, apply_response, dbm_to_watt, freq_grid
from .tx import ModFormat, MzmParams, gen_prbs, map_to_drive, mzm_modulate, predistort

log = logging.getLogger(__name__)

TARGET_BER = 1e-3
COUNTED_BITS = 130_000
ROP_RANGE_DBM = (-35.0, 0.0)
MAX_PENALTY_DB = 12.0


@dataclass(frozen=True)
class LinkScenario:
    """Everything needed to simulate one link configuration.

    ``tx_filter`` / ``rx_filter`` set to ``None`` bypass the filter. When
    ``rx_filter`` is left at its default it copies ``tx_filter``.
    """

    bit_rate: float = 25e9
    fmt: ModFormat = ModFormat.PAM2
    tx_filter: FilterSpec | None = None
    rx_filter: FilterSpec | None = field(default="same")
    fiber: FiberSpec = FiberSpec()
    apd: ApdParams = ApdParams()
    eq: EqualizerConfig = EqualizerConfig()
    mzm: MzmParams | None = None
    prbs_seed: int = 1
    noise_seed: int = 1
    prbs_repeats: int = 2
    counted_bits: int = COUNTED_BITS
    noise: bool = True

    def __post_init__(self):
        object.__setattr__(self, "fmt", ModFormat.parse(self.fmt))
        if isinstance(self.rx_filter, str):
            object.__setattr__(self, "rx_filter", self.tx_filter)
        if self.mzm is None:
            object.__setattr__(self, "mzm", MzmParams.for_format(self.fmt))
        expected = "null" if self.fmt is ModFormat.ODB else "quadrature"
        quad = math.isclose(self.mzm.bias, self.mzm.v_pi / 2) and math.isclose(
            self.mzm.amplitude, self.mzm.v_pi / 2
        )
        null = math.isclose(self.mzm.bias, self.mzm.v_pi) and math.isclose(
            self.mzm.amplitude, self.mzm.v_pi
        )
        if (expected == "null" and not null) or (expected == "quadrature" and not quad):
            raise ValueError(f"{self.fmt.name} needs the MZM at {expected} bias")
        if self.bit_rate <= 0:
            raise ValueError("bit rate must be positive")
        if self.prbs_repeats < 1:
            raise ValueError("prbs_repeats must be >= 1")

    @classmethod
    def normalized(
        cls, fmt, bit_rate: float, b3db_pct: float, b20db_pct: float, **kw
    ) -> "LinkScenario":
        """Scenario with identical super-Gaussian TX/RX filters given in % of Rb."""
        return cls(bit_rate=bit_rate, fmt=fmt, tx_filter=from_normalized(b3db_pct, b20db_pct, bit_rate), **kw)

    @property
    def sample_rate(self) -> float:
        return SAMPLES_PER_BIT * self.bit_rate

    def with_(self, **kw) -> "LinkScenario":
        return replace(self, **kw)


@dataclass
class BerResult:
    ber: float
    rop_dbm: float
    ok: bool = True
    reason: str = ""
    mse: float = float("nan")


@dataclass
class SensitivityResult:
    sensitivity_dbm: float
    ber_curve: list = field(default_factory=list)
    converged: bool = True
    reason: str = ""


def _filter(sig: SampledSignal, spec: FilterSpec | None) -> SampledSignal:
    if spec is None:
        return sig
    return apply_response(sig, spec.response(freq_grid(len(sig), sig.sample_rate)))


class LinkSimulator:
    """Precomputed link for one scenario; call :meth:`ber` per ROP.

    Timing is recovered once from the noiseless received waveform (an ideal
    clock recovery) and reused for every ROP.
    """

    def __init__(self, scenario: LinkScenario):
        s = self.scenario = scenario
        fmt = s.fmt
        self.bits = np.tile(gen_prbs(17, s.prbs_seed), s.prbs_repeats)
        if fmt is ModFormat.PAM4 and self.bits.size % 2:
            self.bits = self.bits[:-1]
        self.pilot = make_pilot(self.bits, fmt)
        self.samples_per_symbol = sps = SAMPLES_PER_BIT * fmt.bits_per_symbol
        n_eval_bits = (self.pilot.size - s.eq.training_symbols) * fmt.bits_per_symbol
        if n_eval_bits < s.counted_bits:
            raise ValueError(
                f"only {n_eval_bits} bits after training, {s.counted_bits} requested"
            )

        x = map_to_drive(self.bits, fmt, s.bit_rate)
        x_f = _filter(predistort(x, s.mzm), s.tx_filter)
        field_ = propagate(mzm_modulate(x_f, s.mzm), s.fiber)
        p = np.abs(field_.samples) ** 2
        p_unit = p / p.mean()  # 1 W mean power
        self.rx_power = SampledSignal(p_unit, s.sample_rate, "power")

        # RX filter and the decimator's anti-alias low-pass act on all three
        # current components; fold them into one response
        n = p_unit.size
        H = antialias_response(n, sps)
        if s.rx_filter is not None:
            H = H * s.rx_filter.response(freq_grid(n, s.sample_rate))

        apd, bw = s.apd, s.sample_rate
        sig = self._through(apd.gain * apd.responsivity * p_unit, H)
        self.alignment = downsample_align(sig, self.pilot, sps, antialias=False)
        delay = self.alignment.delay
        self.sig = decimate_aligned(sig, delay, sps)
        if s.noise:
            zs, zt = standard_noise(n, s.noise_seed)
            shot = np.sqrt(apd.shot_coeff * bw * p_unit) * zs
            thermal = math.sqrt(apd.thermal_variance(bw)) * zt
            self.shot = decimate_aligned(self._through(shot, H), delay, sps)
            self.thermal = decimate_aligned(self._through(thermal, H), delay, sps)
        else:
            self.shot = self.thermal = None

    def _through(self, samples, H) -> np.ndarray:
        sig = SampledSignal(samples, self.scenario.sample_rate, "current")
        return apply_response(sig, H).samples

    def stream(self, rop_dbm: float) -> np.ndarray:
        """Aligned 2 samples/symbol photocurrent at ``rop_dbm``."""
        p = float(dbm_to_watt(rop_dbm))
        i = p * self.sig
        if self.shot is not None:
            i = i + math.sqrt(p) * self.shot + self.thermal
        return i

    def ber(self, rop_dbm: float) -> BerResult:
        s = self.scenario
        try:
            res = ffe_lms(self.stream(rop_dbm), self.pilot, s.eq)
        except EqualizerDivergence as exc:
            return BerResult(0.5, rop_dbm, ok=False, reason=str(exc))
        n_train = s.eq.training_symbols
        bps = s.fmt.bits_per_symbol
        rx_bits = decide_decode(res.symbols[n_train:], s.fmt)
        tx_bits = self.bits[n_train * bps :]
        ber = count_ber(rx_bits, tx_bits, s.counted_bits)
        err = res.symbols[n_train:] - self.pilot[n_train:]
        return BerResult(ber, rop_dbm, mse=float(np.mean(err**2)))


class NonOperable(Exception):
    """The link cannot be brought up at all (e.g. no timing lock)."""


def build(scenario: LinkScenario) -> LinkSimulator:
    """Construct a simulator, turning a failed timing lock into :class:`NonOperable`."""
    try:
        return LinkSimulator(scenario)
    except AlignmentError as exc:
        raise NonOperable(str(exc)) from exc


def simulate_ber(scenario: LinkScenario, rop_dbm: float) -> BerResult:
    """BER of ``scenario`` at one received power; failures come back flagged."""
    try:
        sim = build(scenario)
    except NonOperable as exc:
        return BerResult(0.5, rop_dbm, ok=False, reason=str(exc))
    return sim.ber(rop_dbm)


def _log_ber(ber: float, count: int) -> float:
    # zero-error points are placed at half an error
    return math.log10(max(ber, 0.5 / count))


def sensitivity(
    scenario: LinkScenario,
    target: float = TARGET_BER,
    start_dbm: float = -15.0,
    tol_db: float = 0.1,
    rop_range=ROP_RANGE_DBM,
    sim: LinkSimulator | None = None,
) -> SensitivityResult:
    """ROP (dBm) at which the BER crosses ``target``.

    A 1 dB scan from ``start_dbm`` brackets the crossing inside
    ``rop_range``, bisection narrows the bracket to ``tol_db`` and the result
    is interpolated linearly in log10(BER) versus ROP.
    """
    if sim is None:
        try:
            sim = build(scenario)
        except NonOperable as exc:
            return SensitivityResult(float("nan"), [], False, str(exc))
    lo_lim, hi_lim = rop_range
    curve: dict[float, float] = {}

    def ber_at(rop):
        rop = round(rop, 6)
        if rop not in curve:
            curve[rop] = sim.ber(rop).ber
            log.debug("rop %.3f dBm -> BER %.3e", rop, curve[rop])
        return curve[rop]

    def result(value, ok=True, reason=""):
        pts = sorted(curve.items())
        return SensitivityResult(value, pts, ok, reason)

    rop = min(max(start_dbm, lo_lim), hi_lim)
    if ber_at(rop) > target:
        # climb until the target is met: bracket is (rop - 1, rop]
        while ber_at(rop) > target:
            if rop >= hi_lim:
                return result(float("nan"), False, f"BER > {target:g} at {hi_lim} dBm")
            rop = min(rop + 1.0, hi_lim)
        good = rop
        bad = max(rop - 1.0, lo_lim)
        if bad == good:
            bad = good - 1.0
    else:
        while ber_at(rop) <= target:
            if rop <= lo_lim:
                return result(float("nan"), False, f"BER <= {target:g} at {lo_lim} dBm")
            rop = max(rop - 1.0, lo_lim)
        bad = rop
        good = rop + 1.0

    while good - bad > tol_db:
        mid = 0.5 * (good + bad)
        if ber_at(mid) > target:
            bad = mid
        else:
            good = mid

    count = scenario.counted_bits
    yb, yg = _log_ber(ber_at(bad), count), _log_ber(ber_at(good), count)
    yt = math.log10(target)
    if yb == yg:
        value = 0.5 * (good + bad)
    else:
        value = bad + (yb - yt) * (good - bad) / (yb - yg)
        value = min(max(value, bad), good)
    return result(value)


def power_penalty(s_dbm: float, s0_dbm: float) -> float:
    """Sensitivity penalty in dB relative to the reference ``s0_dbm``."""
    if not (math.isfinite(s_dbm) and math.isfinite(s0_dbm)):
        raise ValueError("penalty needs two finite sensitivities")
    return s_dbm - s0_dbm
