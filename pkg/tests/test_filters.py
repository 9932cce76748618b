import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize

from ponsim.filters import (
    FilterSpec,
    butterworth_response,
    cascade_db,
    fit_equivalent_gf,
    from_normalized,
    read_response_file,
    supergaussian_params,
    supergaussian_response,
    to_normalized,
    write_response_file,
)


def power_db(H):
    return 10 * np.log10(np.abs(H) ** 2)


def crossing(fn, level_db, hi):
    """Frequency where the power response ``fn`` falls to ``level_db``."""
    return optimize.brentq(lambda f: power_db(fn(np.array([f])))[0] - level_db, 1.0, hi, xtol=1e-6, rtol=1e-15)


def sg_oracle(f3, f20):
    """Solve exp(-(f/f0)^(2n)) = 1/2 at f3 and 1/100 at f20 numerically."""

    def eqs(theta):
        n, f0 = math.exp(theta[0]), math.exp(theta[1])
        return [(f3 / f0) ** (2 * n) - math.log(2), (f20 / f0) ** (2 * n) - math.log(100)]

    sol = optimize.fsolve(eqs, [0.0, math.log(f3)], xtol=1e-14)
    return math.exp(sol[0]), math.exp(sol[1])


class TestButterworth:
    @pytest.mark.parametrize("poles", range(1, 7))
    def test_half_power_at_corner(self, poles):
        H = butterworth_response(poles, 7e9, np.array([7e9]))
        assert abs(abs(H[0]) ** 2 - 0.5) < 1e-12

    @pytest.mark.parametrize("poles", range(1, 7))
    def test_twenty_db_ratio_matches_root_find(self, poles):
        spec = FilterSpec.butterworth(poles, 7e9)
        f20 = crossing(spec.response, -20.0, 1e13)
        assert spec.f20db / spec.f3db == pytest.approx(99 ** (1 / (2 * poles)), rel=1e-12)
        assert f20 / spec.f3db == pytest.approx(99 ** (1 / (2 * poles)), rel=1e-9)

    def test_steeper_with_more_poles(self):
        ratios = [FilterSpec.butterworth(n, 1.0).f20db for n in range(1, 7)]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))

    def test_hermitian_and_unit_dc(self):
        f = np.fft.fftfreq(64, 1 / 100e9)
        H = butterworth_response(3, 7e9, f)
        assert H[0] == pytest.approx(1.0)
        np.testing.assert_allclose(H[1:32], np.conj(H[-1:-32:-1]), rtol=1e-12)

    def test_magnitude_non_increasing(self):
        f = np.linspace(0, 100e9, 2001)
        for n in range(1, 7):
            assert np.all(np.diff(np.abs(butterworth_response(n, 7e9, f))) <= 1e-15)

    def test_invalid(self):
        with pytest.raises(ValueError):
            FilterSpec.butterworth(0, 1e9)
        with pytest.raises(ValueError):
            butterworth_response(2, -1.0, [0.0])


class TestSuperGaussian:
    def test_reference_pair(self):
        n, f0 = supergaussian_params(8.5e9, 17e9)
        n_ref, f0_ref = sg_oracle(8.5e9, 17e9)
        assert n == pytest.approx(n_ref, rel=1e-9)
        assert f0 == pytest.approx(f0_ref, rel=1e-9)
        assert round(n, 4) == 1.3660
        assert round(f0 / 1e9, 3) == 9.720

    def test_gaussian_ratio(self):
        # n = 1 when f20/f3 = sqrt(ln 100 / ln 2)
        n, _ = supergaussian_params(1.0, math.sqrt(math.log(100) / math.log(2)))
        assert n == pytest.approx(1.0, rel=1e-12)

    @settings(max_examples=1000, deadline=None)
    @given(st.floats(1e8, 1e11), st.floats(1.05, 20.0))
    def test_round_trip(self, f3, ratio):
        spec = FilterSpec.supergaussian(f3, f3 * ratio)
        assert spec.f3db == pytest.approx(f3, rel=1e-9)
        assert spec.f20db == pytest.approx(f3 * ratio, rel=1e-9)
        H = spec.response(np.array([spec.f3db, spec.f20db]))
        np.testing.assert_allclose(power_db(H), [10 * math.log10(0.5), -20.0], atol=1e-9)

    def test_shape(self):
        n, f0 = supergaussian_params(8.5e9, 17e9)
        H = supergaussian_response(n, f0, np.array([0.0, f0, -f0]))
        np.testing.assert_allclose(H, [1.0, math.exp(-0.5), math.exp(-0.5)], rtol=1e-15)

    @pytest.mark.parametrize("f3,f20", [(1e9, 1e9), (2e9, 1e9), (0.0, 1e9)])
    def test_degenerate(self, f3, f20):
        with pytest.raises(ValueError):
            supergaussian_params(f3, f20)


class TestNormalization:
    def test_reference_devices(self):
        nb = to_normalized(8.5e9, 17e9, 25e9)
        assert (nb.b3db, nb.b20db) == pytest.approx((34.0, 68.0))
        nb = to_normalized(8.5e9, 17e9, 50e9)
        assert (nb.b3db, nb.b20db) == pytest.approx((17.0, 34.0))
        assert to_normalized(7e9, None, 25e9).b3db == pytest.approx(28.0)
        assert math.isnan(to_normalized(7e9, None, 25e9).b20db)

    def test_from_normalized(self):
        spec = from_normalized(32, 56, 25e9)
        assert spec.f3db == pytest.approx(8e9)
        assert spec.f20db == pytest.approx(14e9)

    def test_cascade_is_sum_of_db(self):
        f = np.linspace(0, 30e9, 7)
        a, b = FilterSpec.butterworth(1, 7e9), FilterSpec.supergaussian(8e9, 16e9)
        np.testing.assert_allclose(cascade_db(f, a, b), cascade_db(f, a) + cascade_db(f, b), atol=1e-12)


class TestEquivalentFit:
    def test_self_fit(self):
        spec = FilterSpec.supergaussian(8.5e9, 17e9)
        f = np.linspace(0, 40e9, 801)
        f3, f20 = fit_equivalent_gf(f, cascade_db(f, spec, spec))
        assert f3 == pytest.approx(8.5e9, rel=1e-3)
        assert f20 == pytest.approx(17e9, rel=1e-3)

    def test_butterworth_pair(self):
        bf = FilterSpec.butterworth(2, 8.1e9)
        f = np.linspace(0, 40e9, 801)
        f3, f20 = fit_equivalent_gf(f, cascade_db(f, bf, bf))
        assert f3 == pytest.approx(8.1e9, rel=0.05)
        # the BF skirt is shallower than any GF matched in-band
        assert f20 > 17e9

    def test_needs_minus_20_db(self):
        spec = FilterSpec.supergaussian(8.5e9, 17e9)
        f = np.linspace(0, 8e9, 50)
        with pytest.raises(ValueError, match="-20 dB"):
            fit_equivalent_gf(f, cascade_db(f, spec, spec))


class TestResponseFiles:
    def test_round_trip(self, tmp_path):
        f = np.linspace(0, 20e9, 11)
        mag = cascade_db(f, FilterSpec.butterworth(2, 7e9))
        p = tmp_path / "tx.txt"
        write_response_file(p, f, mag, comment="2-pole")
        f2, m2 = read_response_file(p)
        np.testing.assert_allclose(f2, f, rtol=1e-6)
        np.testing.assert_allclose(m2, mag, atol=1e-8)

    def test_commas_and_comments(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("# f, dB\n0, 0\n\n1e9, -3.0\n")
        f, m = read_response_file(p)
        np.testing.assert_array_equal(f, [0, 1e9])
        np.testing.assert_array_equal(m, [0, -3])

    def test_bad_line_reports_location(self, tmp_path):
        p = tmp_path / "r.txt"
        p.write_text("0 0\n1e9 abc\n")
        with pytest.raises(ValueError, match=":2:"):
            read_response_file(p)
        p.write_text("0 0 0\n")
        with pytest.raises(ValueError, match="two columns"):
            read_response_file(p)
