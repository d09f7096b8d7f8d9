import numpy as np
import pytest

from polarflip import CrcSpec, build_code, default_code

NO_CRC = CrcSpec(0, 1)


@pytest.fixture
def p8():
    """The small reference layout: N=8, the first three positions frozen."""
    mask = np.zeros(8, dtype=bool)
    mask[[0, 1, 2]] = True
    return build_code(3, 5, NO_CRC, mask=mask)


@pytest.fixture
def p8_crc3():
    """N=8 with a 3-bit CRC, leaving a 2-bit payload; handy for CRC gating."""
    mask = np.zeros(8, dtype=bool)
    mask[[0, 1, 2]] = True
    return build_code(3, 2, CrcSpec(3, 0b1011), mask=mask)


@pytest.fixture(scope="session")
def fixture_code():
    """The committed P(256,128) + CRC-24 code used by all large tests."""
    return default_code()
