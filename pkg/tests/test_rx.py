import math

import numpy as np
import pytest

from ponsim.filters import FilterSpec
from ponsim.rx import ApdParams, detect, noise_bandwidth_factor, rx_filter, standard_noise
from ponsim.signal import SampledSignal, freq_grid
from ponsim.tx import ModFormat, MzmParams, map_to_drive, mzm_modulate, predistort

Q = 1.602176634e-19
FS_25G = 8 * 25e9


def power(p, fs=FS_25G):
    return SampledSignal(np.asarray(p, dtype=float), fs, "power")


class TestApdParams:
    def test_defaults(self):
        p = ApdParams()
        assert p.excess_noise == pytest.approx(25**0.75, rel=1e-12)
        assert 10 * math.log10(p.excess_noise) == pytest.approx(10.48, abs=0.01)
        assert p.charge == Q

    def test_explicit_excess_noise(self):
        assert ApdParams(excess_noise=5.0).excess_noise == 5.0

    @pytest.mark.parametrize("field", ["responsivity", "gain", "thermal_psd"])
    def test_positive(self, field):
        with pytest.raises(ValueError):
            ApdParams(**{field: 0.0})

    def test_variances_at_10_uw(self):
        # q G^2 F R P df and N0 df with df = 8 * 25 GHz
        shot = Q * 25**2 * 25**0.75 * 0.8 * 1e-5 * 2e11
        assert ApdParams().shot_variance(1e-5, 2e11) == pytest.approx(shot, rel=1e-12)
        assert shot == pytest.approx(1.791e-9, rel=1e-3)
        assert ApdParams().thermal_variance(2e11) == pytest.approx(2.048e-10, rel=1e-12)


class TestDetect:
    def test_noiseless(self):
        i = detect(power(np.full(100, 1e-5)), ApdParams(), noise=False)
        assert i.domain == "current"
        np.testing.assert_allclose(i.samples, 2.0e-4, rtol=1e-12)

    def test_variance_constant_power(self):
        i = detect(power(np.full(1_000_000, 1e-5)), ApdParams(), seed=123)
        assert np.mean(i.samples) == pytest.approx(2.0e-4, rel=1e-3)
        assert np.var(i.samples) == pytest.approx(1.996e-9, rel=0.01)

    def test_thermal_only_at_zero_power(self):
        i = detect(power(np.zeros(1_000_000)), ApdParams(), seed=5)
        assert np.var(i.samples) == pytest.approx(2.048e-10, rel=0.01)

    def test_shot_noise_follows_instantaneous_power(self):
        p = np.tile([0.0, 4e-5], 500_000)
        i = detect(power(p), ApdParams(thermal_psd=1e-40), seed=9).samples
        assert np.var(i[0::2]) < 1e-25
        expected = ApdParams().shot_variance(4e-5, FS_25G)
        assert np.var(i[1::2]) == pytest.approx(expected, rel=0.01)

    def test_deterministic_per_seed(self):
        p = power(np.full(1000, 1e-5))
        a, b = detect(p, ApdParams(), seed=3), detect(p, ApdParams(), seed=3)
        np.testing.assert_array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, detect(p, ApdParams(), seed=4).samples)

    def test_matches_standard_noise_draws(self):
        p = power(np.full(64, 1e-5))
        zs, zt = standard_noise(64, 17)
        apd = ApdParams()
        expected = (
            apd.gain * apd.responsivity * 1e-5
            + math.sqrt(apd.shot_variance(1e-5, FS_25G)) * zs
            + math.sqrt(apd.thermal_variance(FS_25G)) * zt
        )
        np.testing.assert_allclose(detect(p, apd, seed=17).samples, expected, rtol=1e-12)

    def test_negative_power(self):
        with pytest.raises(ValueError):
            detect(SampledSignal(np.array([1e-5, -1e-9]), FS_25G, "power"), ApdParams())

    def test_wrong_domain(self):
        with pytest.raises(ValueError):
            detect(SampledSignal(np.ones(4), FS_25G, "current"), ApdParams())

    def test_quadrature_chain_reproduces_drive(self):
        rng = np.random.default_rng(2)
        bits = rng.integers(0, 2, 4000)
        fmt = ModFormat.PAM4
        mzm = MzmParams.for_format(fmt, cw_power=2e-5)
        x = map_to_drive(bits, fmt, 25e9)
        p = np.abs(mzm_modulate(predistort(x, mzm), mzm).samples) ** 2
        i = detect(SampledSignal(p, x.sample_rate, "power"), ApdParams(), noise=False)
        expected = 25 * 0.8 * 2e-5 * x.samples
        assert np.max(np.abs(i.samples - expected)) <= 1e-9 * np.max(expected)


class TestRxFilter:
    def test_wide_filter_passes_through(self):
        rng = np.random.default_rng(0)
        i = SampledSignal(rng.standard_normal(4096), FS_25G, "current")
        out = rx_filter(i, FilterSpec.supergaussian(100 * FS_25G, 200 * FS_25G))
        assert np.max(np.abs(out.samples - i.samples)) < 1e-6 * np.max(np.abs(i.samples))

    def test_white_noise_variance_follows_noise_bandwidth(self):
        n = 2**18
        spec = FilterSpec.supergaussian(8.5e9, 17e9)
        z = np.random.default_rng(8).standard_normal(n)
        out = rx_filter(SampledSignal(z, FS_25G, "current"), spec).samples
        # independent sum of |H|^2 over the grid, divided by the bin count
        H = spec.response(freq_grid(n, FS_25G))
        predicted = np.sum(np.abs(H) ** 2) / n
        assert np.var(out) == pytest.approx(predicted, rel=0.02)
        assert noise_bandwidth_factor(spec, n, FS_25G) == pytest.approx(predicted, rel=1e-12)

    def test_thermal_variance_shrinks_with_bandwidth(self):
        n = 2**16
        z = np.random.default_rng(1).standard_normal(n)
        sig = SampledSignal(z, FS_25G, "current")
        variances = [np.var(rx_filter(sig, FilterSpec.butterworth(2, f)).samples) for f in (20e9, 10e9, 5e9, 2.5e9)]
        assert all(a > b for a, b in zip(variances, variances[1:]))

    def test_asymmetric_pole_counts(self):
        # a 1-pole TX followed by a 2-pole RX behaves like one 3-pole cascade in magnitude
        f = np.linspace(0, 50e9, 101)
        tx, rx = FilterSpec.butterworth(1, 7e9), FilterSpec.butterworth(2, 7e9)
        cascade = np.abs(tx.response(f) * rx.response(f)) ** 2
        expected = 1 / ((1 + (f / 7e9) ** 2) * (1 + (f / 7e9) ** 4))
        np.testing.assert_allclose(cascade, expected, rtol=1e-12)
