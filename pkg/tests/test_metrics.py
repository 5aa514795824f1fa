import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from ndof.channel import Spectrum
from ndof.errors import DegenerateSpectrum, InsufficientSpectrum, InvalidArgument
from ndof.geometry import RegionSpec, sample_region
from ndof.metrics import (CORNER_FIT_FLOOR, NdofReport, average_channel_strength, build_report,
                          corner_detect, corner_fit, coupling_strength_quadrature,
                          effective_ndof, effective_rank, eig_level_bounds, normalized_values,
                          power_law_fit, threshold_ndof)

positive_spectra = st.lists(st.floats(min_value=1e-12, max_value=1e6), min_size=1, max_size=60)


def spec(values, **kw):
    return Spectrum(np.sort(np.asarray(values, float))[::-1], kw.pop("wavelength", 1.0), **kw)


def test_flat_spectrum():
    s = spec([2.0] * 17)
    assert effective_ndof(s) == pytest.approx(17)
    assert effective_rank(s) == pytest.approx(17)


def test_two_level_values():
    s = spec([1.0, 1.0, 0.5, 0.5])
    assert effective_ndof(s) == pytest.approx(9.0 / 2.5)
    p = np.array([1, 1, 0.5, 0.5]) / 3.0
    assert effective_rank(s) == pytest.approx(math.exp(-np.sum(p * np.log(p))))


def test_zeros_do_not_count():
    assert effective_rank(spec([1.0, 1.0, 0.0, 0.0])) == pytest.approx(2.0)
    assert effective_ndof(spec([1.0, 1.0, 0.0])) == pytest.approx(2.0)


def test_degenerate():
    with pytest.raises(DegenerateSpectrum):
        effective_ndof(spec([0.0, 0.0]))
    with pytest.raises(DegenerateSpectrum):
        effective_rank(spec([0.0]))


@given(positive_spectra)
def test_jensen(values):
    s = spec(values)
    assert effective_rank(s) >= effective_ndof(s) * (1 - 1e-12)
    assert 1 - 1e-9 <= effective_ndof(s) <= len(values) + 1e-9


@given(positive_spectra, st.floats(min_value=1e-6, max_value=1e6))
def test_scale_invariance(values, c):
    s = spec(values)
    assert effective_ndof(s.scaled(c)) == pytest.approx(effective_ndof(s), rel=1e-9)
    assert effective_rank(s.scaled(c)) == pytest.approx(effective_rank(s), rel=1e-9)


def test_corner_on_synthetic_knee():
    n = np.arange(1, 400)
    z = np.where(n <= 120, n ** -0.1, 120 ** -0.1 * (n / 120.0) ** -12.0)
    fit = corner_fit(spec(z))
    assert abs(fit.index - 120) <= 2
    assert fit.confident
    assert fit.slopes[0] == pytest.approx(-0.1, abs=0.02)


def test_corner_of_flat_block():
    # N equal values followed by nothing: corner at the block edge
    z = np.r_[np.ones(50), np.zeros(50)]
    assert abs(corner_detect(spec(z)) - 50) <= 1


def test_corner_needs_enough_values():
    with pytest.raises(InsufficientSpectrum):
        corner_fit(spec([1.0, 0.5, 0.2]))
    with pytest.raises(InsufficientSpectrum):
        corner_fit(spec(np.r_[1.0, np.full(20, 1e-6)]))


def test_corner_floor_parameter():
    z = np.geomspace(1, 1e-8, 60)
    assert corner_fit(spec(z), fit_floor=1e-9).n_fitted == 60
    assert corner_fit(spec(z), fit_floor=CORNER_FIT_FLOOR).n_fitted < 60


def test_normalized_values():
    lam = 0.5
    s3 = Spectrum([2.0, 1.0], lam, 3, (2, 2))
    np.testing.assert_allclose(normalized_values(s3), (4 * math.pi) ** 2 * np.array([2.0, 1.0]) / lam ** 2)
    s = Spectrum([3.0, 1.0], lam, 3, (1, 1))
    np.testing.assert_allclose(normalized_values(s), [0.75, 0.25])


def test_threshold_ndof():
    lam = 1.0
    scale = lam ** 2 / (4 * math.pi) ** 2
    s = Spectrum(np.array([2.0, 1.0, 0.5, 0.49, 0.1]) * scale, lam, 3, (2, 2))
    assert threshold_ndof(s) == 3
    with pytest.raises(InvalidArgument):
        threshold_ndof(Spectrum([1.0], 1.0, 2, (1, 1)))


def test_line_coupling_against_dblquad():
    # independent oracle: scipy adaptive quadrature of 1/((x-x')^2 + d^2)
    lam = 0.02
    T = sample_region(RegionSpec.segment3d(1.0), lam)
    R = sample_region(RegionSpec.segment3d(1.0, (0, 0, 0.5)), lam)
    ref = integrate.dblquad(lambda y, x: 1 / ((x - y) ** 2 + 0.25), 0, 1, 0, 1, epsabs=1e-12)[0]
    assert coupling_strength_quadrature(T, R) == pytest.approx(ref / (4 * math.pi) ** 2, rel=1e-4)


def test_coupling_p1_scaling():
    T = sample_region(RegionSpec.segment2d(1.0), 0.05)
    R = sample_region(RegionSpec.segment2d(1.0, (0, 1)), 0.05)
    a = coupling_strength_quadrature(T, R, p=1, wavelength=0.05)
    b = coupling_strength_quadrature(T, R, p=1, wavelength=0.1)
    assert b == pytest.approx(2 * a)
    with pytest.raises(InvalidArgument):
        coupling_strength_quadrature(T, R, p=1)
    with pytest.raises(InvalidArgument):
        coupling_strength_quadrature(T, R, p=3)


def test_average_strength_broadside_far():
    T = sample_region(RegionSpec.disc3d(1.0), 0.2)
    R = sample_region(RegionSpec.disc3d(1.0, (0, 0, 30.0)), 0.2)
    assert average_channel_strength(T, R) == pytest.approx(1.0, abs=2e-3)
    lo, hi = eig_level_bounds(T, R)
    assert lo <= average_channel_strength(T, R) <= hi


def test_average_strength_at_least_one():
    T = sample_region(RegionSpec.segment2d(1.0), 0.05)
    R = sample_region(RegionSpec.segment2d(2.0, (1.0, 0.5), 0.4), 0.05)
    for p in (1, 2):
        assert average_channel_strength(T, R, p=p) >= 1.0


def test_bounds_line_pair():
    # l vs 10 l at distance l: the edge pair gives |cos|^2 = 1/(1 + 5.5^2)
    T = sample_region(RegionSpec.segment2d(1.0), 0.01)
    R = sample_region(RegionSpec.segment2d(10.0, (0, 1)), 0.01)
    lo, hi = eig_level_bounds(T, R)
    assert lo == pytest.approx(1.0, abs=1e-4)
    assert hi == pytest.approx(1 + 5.5 ** 2, rel=2e-3)


def test_power_law_fit():
    lam = np.array([0.1, 0.05, 0.02, 0.01])
    assert power_law_fit(zip(lam, 3.0 / lam ** 2), 2) == pytest.approx(3.0)
    assert power_law_fit(zip(lam, 0.7 / lam), 1) == pytest.approx(0.7)
    with pytest.raises(InsufficientSpectrum):
        power_law_fit([(0.1, 1.0)], 1)
    with pytest.raises(InvalidArgument):
        power_law_fit([(0.1, 1.0), (0.2, -1.0), (0.3, 1.0)], 1)


def test_build_report():
    lam = 1.0
    z = np.r_[np.ones(40), np.geomspace(1e-2, 1e-9, 30)] * lam ** 2 / (4 * math.pi) ** 2
    s = Spectrum(z, lam, 3, (2, 2))
    rep = build_report(s, n_a=40.0, bounds=(1.0, 2.0))
    assert rep.n_r >= rep.n_e
    assert rep.n_h == 40
    assert abs(rep.n_c - 40) <= 1
    assert rep.avg_level == pytest.approx((4 * math.pi) ** 2 * s.sum / 40.0)
    rep2 = build_report(Spectrum([1.0, 0.5], 1.0, 2, (1, 1)))
    assert rep2.n_c is None and rep2.n_h is None and rep2.avg_level is None


def test_report_enforces_jensen():
    with pytest.raises(InvalidArgument):
        NdofReport(wavelength=1.0, n_e=5.0, n_r=4.0)
