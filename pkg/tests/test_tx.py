import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ponsim.signal import SampledSignal
from ponsim.tx import (
    GRAY_PAM4,
    ModFormat,
    MzmParams,
    bits_to_levels,
    gen_prbs,
    map_to_drive,
    mzm_modulate,
    precode_db,
    predistort,
)


def lfsr_reference(seed, n):
    """Bit-serial Fibonacci LFSR, x^17 + x^14 + 1, one output per shift."""
    reg = [(seed >> i) & 1 for i in range(17)]
    out = []
    for _ in range(n):
        out.append(reg[0])
        new = reg[14] ^ reg[0]
        reg = reg[1:] + [new]
    return np.array(out, dtype=np.uint8)


class TestPrbs:
    def test_length_and_balance(self):
        s = gen_prbs(17, 1)
        assert s.size == 2**17 - 1
        assert int(s.sum()) == 2**16

    def test_matches_bit_serial_register(self):
        np.testing.assert_array_equal(gen_prbs(17, 0x1ACE)[:5000], lfsr_reference(0x1ACE, 5000))

    def test_period(self):
        s = gen_prbs(17, 7)
        # the recurrence holds across the wrap, so the sequence is periodic
        ext = np.concatenate([s, s[:17]])
        assert np.all(ext[17:] == ext[14:-3] ^ ext[:-17])

    def test_deterministic_and_seed_dependent(self):
        np.testing.assert_array_equal(gen_prbs(17, 5), gen_prbs(17, 5))
        assert not np.array_equal(gen_prbs(17, 5), gen_prbs(17, 6))

    def test_zero_seed_rejected(self):
        with pytest.raises(ValueError):
            gen_prbs(17, 0)

    def test_other_orders_rejected(self):
        with pytest.raises(ValueError):
            gen_prbs(15, 1)


class TestPrecoder:
    def test_examples(self):
        np.testing.assert_array_equal(precode_db([1, 1, 0, 1, 1]), [1, 0, 0, 1, 0])
        np.testing.assert_array_equal(precode_db([0, 0, 0]), [0, 0, 0])

    def test_add_and_delay_mod2_recovers_data(self):
        rng = np.random.default_rng(11)
        d = rng.integers(0, 2, 100_000).astype(np.uint8)
        b = precode_db(d).astype(int)
        prev = np.concatenate(([0], b[:-1]))
        np.testing.assert_array_equal((b + prev) % 2, d)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            precode_db([])


class TestMapping:
    def test_pam2_levels(self):
        np.testing.assert_array_equal(bits_to_levels([0, 1, 1], "pam2"), [0, 1, 1])

    def test_pam4_gray(self):
        bits = [0, 0, 0, 1, 1, 1, 1, 0]
        np.testing.assert_allclose(bits_to_levels(bits, "pam4"), [0, 1 / 3, 2 / 3, 1])

    def test_gray_neighbours_differ_in_one_bit(self):
        inv = sorted((v, k) for k, v in GRAY_PAM4.items())
        for (_, a), (_, b) in zip(inv, inv[1:]):
            assert sum(x != y for x, y in zip(a, b)) == 1

    def test_pam4_odd_bits_rejected(self):
        with pytest.raises(ValueError):
            bits_to_levels([0, 1, 1], "pam4")

    def test_duobinary_levels_are_precoded(self):
        np.testing.assert_array_equal(bits_to_levels([1, 1, 0, 1, 1], "edb"), [1, 0, 0, 1, 0])
        np.testing.assert_array_equal(bits_to_levels([1, 1, 0, 1, 1], "odb"), [1, 0, 0, 1, 0])

    def test_drive_sampling(self):
        x = map_to_drive([1, 0], "pam2", 25e9)
        assert x.sample_rate == 200e9
        np.testing.assert_array_equal(x.samples, [1] * 8 + [0] * 8)

    def test_pam4_symbol_spans_two_bits(self):
        x = map_to_drive([1, 0], "pam4", 50e9)
        assert len(x) == 16 and x.sample_rate == 400e9
        assert np.all(x.samples == 1.0)

    def test_parse(self):
        assert ModFormat.parse("PAM-4") is ModFormat.PAM4
        with pytest.raises(ValueError):
            ModFormat.parse("qam16")


class TestMzm:
    @pytest.mark.parametrize("v_pi", [1.0, 3.3])
    def test_quadrature_composition_is_identity_on_power(self, v_pi):
        x = np.linspace(0, 1, 1001)
        p = MzmParams.for_format(ModFormat.PAM2, v_pi=v_pi, cw_power=1.0)
        e = mzm_modulate(predistort(SampledSignal(x, 1.0), p), p)
        assert np.max(np.abs(np.abs(e.samples) ** 2 - x)) < 1e-12

    @pytest.mark.parametrize("v_pi", [1.0, 3.3])
    def test_null_composition_is_linear_in_field(self, v_pi):
        x = np.linspace(0, 1, 1001)
        p = MzmParams.for_format(ModFormat.ODB, v_pi=v_pi, cw_power=1.0)
        e = mzm_modulate(predistort(SampledSignal(x, 1.0), p), p)
        assert np.max(np.abs(e.samples.imag)) == 0
        assert np.max(np.abs(e.samples.real - (2 * x - 1))) < 1e-12

    def test_predistort_examples(self):
        p = MzmParams.for_format(ModFormat.PAM2)
        xd = predistort(SampledSignal(np.array([0.0, 0.5, 1.0]), 1.0), p).samples
        np.testing.assert_allclose(xd, [-0.5, -0.25, 0.0], atol=1e-15)

    def test_predistort_rejects_out_of_range(self):
        p = MzmParams()
        with pytest.raises(ValueError):
            predistort(SampledSignal(np.array([0.0, 1.1]), 1.0), p)

    def test_predistort_tolerates_roundoff(self):
        p = MzmParams()
        out = predistort(SampledSignal(np.array([-1e-13, 1 + 1e-13]), 1.0), p)
        assert np.all(np.isfinite(out.samples))

    def test_complex_drive_rejected(self):
        with pytest.raises(ValueError):
            mzm_modulate(SampledSignal(np.array([0j, 1j]), 1.0), MzmParams())

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=2, max_size=64))
    def test_odb_field_sign_tracks_precoded_bit(self, bits):
        p = MzmParams.for_format(ModFormat.ODB, cw_power=1.0)
        e = mzm_modulate(predistort(map_to_drive(bits, "odb", 25e9), p), p).samples[::8]
        np.testing.assert_allclose(e.real, 2.0 * precode_db(bits) - 1.0, atol=1e-12)
