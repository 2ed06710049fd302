import numpy as np
import pytest

from gle_memlab import ForceConstants


@pytest.fixture(scope="session")
def morse_a() -> ForceConstants:
    """First/second-neighbor force constants of a Morse-potential chain."""
    return ForceConstants(12.2676, 3.0628)


@pytest.fixture(scope="session")
def morse_b() -> ForceConstants:
    """Variant with a negative (but stable) second-neighbor constant."""
    return ForceConstants(12.2676, -3.0)


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
