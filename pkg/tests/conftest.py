import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ndof.channel import Spectrum

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance outcomes, printed once at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def spectrum_of():
    """Build a Spectrum from raw values (sorted descending)."""
    def make(values, wavelength=1.0, ambient_dim=None, region_dims=(None, None)):
        v = np.sort(np.asarray(values, dtype=float))[::-1]
        return Spectrum(v, wavelength, ambient_dim, region_dims)
    return make


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def four_pi_sq():
    return (4 * math.pi) ** 2
