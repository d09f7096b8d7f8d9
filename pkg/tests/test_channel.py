import numpy as np
import pytest

from polarflip import ebn0_to_sigma2, frame_rng, transmit


class ZeroNoise:
    def standard_normal(self, n):
        return np.zeros(n)


def test_ebn0_conversion_reference_points():
    assert ebn0_to_sigma2(0.0, 0.5) == pytest.approx(1.0)
    assert ebn0_to_sigma2(10 * np.log10(2), 0.5) == pytest.approx(0.5)
    # 2 dB at rate 1/2: 1 / 10^0.2
    assert ebn0_to_sigma2(2.0, 0.5) == pytest.approx(0.6309573444801932, rel=1e-12)


def test_ebn0_rate_validated():
    with pytest.raises(ValueError):
        ebn0_to_sigma2(1.0, 0.0)
    with pytest.raises(ValueError):
        ebn0_to_sigma2(1.0, 1.5)


def test_zero_noise_llrs_have_expected_signs():
    x = np.array([0, 1, 0, 1], dtype=np.uint8)
    frame = transmit(x, 0.25, ZeroNoise())
    assert frame.values.tolist() == [8.0, -8.0, 8.0, -8.0]
    assert np.isfinite(frame.values).all()


def test_sigma2_must_be_positive():
    with pytest.raises(ValueError):
        transmit(np.zeros(4, dtype=np.uint8), 0.0, ZeroNoise())


def test_same_seed_same_frame():
    x = np.zeros(64, dtype=np.uint8)
    a = transmit(x, 0.7, frame_rng(123, 5)).values
    b = transmit(x, 0.7, frame_rng(123, 5)).values
    assert np.array_equal(a, b)
    c = transmit(x, 0.7, frame_rng(123, 6)).values
    assert not np.array_equal(a, c)


def test_stream_values_are_frozen():
    # pin the derivation so a refactor cannot silently reseed every result
    got = frame_rng(1, 0).standard_normal(3)
    expected = np.array(
        [0.561455211185646, -0.9619375618162148, 0.025380113609183755]
    )
    assert np.allclose(got, expected, rtol=0, atol=1e-15)
