import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from ndof.asymptotics import (_SERIES_BETA, discs_coupling, discs_coupling_strength,
                              line_pair_coupling, ne0_lines_2d, ne0_lines_3d, ne0_planar,
                              shadow_length_two_lines, sphere_mode_count,
                              sphere_mode_count_asymptotic)
from ndof.errors import InvalidArgument, UnsupportedConfiguration
from ndof.geometry import RegionSpec, rotation3d, sample_region
from ndof.metrics import coupling_strength_quadrature
from ndof.shadow import shadow_ndof, shadow_two_discs

mpmath.mp.dps = 40


def mp_ne0_3d(b):
    b = mpmath.mpf(b)
    num = mpmath.log(1 + b * b) - 2 * b * mpmath.atan(b)
    den = b * b * mpmath.asinh(b) - b * mpmath.sqrt(b * b + 1) + b
    return float(num * num / den / 2)


def mp_ne0_2d(b):
    b = mpmath.mpf(b)
    inner = mpmath.asinh(b) - mpmath.sqrt(1 + 1 / b ** 2) + 1 / b
    den = mpmath.mpf(2) / 3 + b * mpmath.asinh(b) - mpmath.sqrt(1 + b * b) + (1 + b * b) ** 1.5 / 3
    return float(4 * b * inner ** 2 / den)


@pytest.mark.parametrize("beta", [1e-5, 1e-3, 0.5 * _SERIES_BETA, 2 * _SERIES_BETA, 0.1, 1.0, 10.0, 1e3])
def test_lines_3d_against_high_precision(beta):
    # ne0 * lambda / l is a function of beta only
    assert ne0_lines_3d(1.0, 1.0 / beta, 1.0) == pytest.approx(mp_ne0_3d(beta), rel=1e-10)


@pytest.mark.parametrize("beta", [1e-5, 1e-3, 0.5 * _SERIES_BETA, 2 * _SERIES_BETA, 0.1, 1.0, 10.0, 1e3])
def test_lines_2d_against_high_precision(beta):
    assert ne0_lines_2d(1.0, 1.0 / beta, 1.0) == pytest.approx(mp_ne0_2d(beta), rel=1e-10)


def test_far_limit_is_paraxial():
    ell, d, lam = 1.0, 1e4, 1e-3
    for f in (ne0_lines_3d, ne0_lines_2d):
        assert f(ell, d, lam) == pytest.approx(ell * ell / (d * lam), rel=1e-8)


def test_near_limit_logarithmic_3d():
    # for beta -> inf the 3D value behaves like 2 l pi^2 / (4 lambda ln beta) to leading order
    big = ne0_lines_3d(1.0, 1e-6, 1.0)
    bigger = ne0_lines_3d(1.0, 1e-9, 1.0)
    assert bigger < big
    assert big * math.log(1e6) == pytest.approx(bigger * math.log(1e9), rel=0.1)


@given(st.floats(1e-3, 1e3))
def test_ne0_below_shadow(beta):
    L = shadow_length_two_lines(1.0, 1.0 / beta)
    assert ne0_lines_3d(1.0, 1.0 / beta, 1.0) <= L * (1 + 1e-9)
    assert ne0_lines_2d(1.0, 1.0 / beta, 1.0) <= L * (1 + 1e-9)


def test_shadow_length_two_lines():
    assert shadow_length_two_lines(1.0, 1.0) == pytest.approx(2 * (math.sqrt(2) - 1))
    assert shadow_length_two_lines(1.0, 1e8) == pytest.approx(1e-8, rel=1e-6)


def test_line_pair_coupling():
    assert line_pair_coupling(1.0) == pytest.approx((math.pi / 2 - math.log(2)) / (4 * math.pi) ** 2)
    assert line_pair_coupling(1.0) == pytest.approx(5.557e-3, rel=1e-3)
    ref = integrate.dblquad(lambda y, x: 1 / ((x - y) ** 2 + 1), 0, 2, 0, 2, epsabs=1e-13)[0]
    assert line_pair_coupling(2.0) * (4 * math.pi) ** 2 == pytest.approx(ref, rel=1e-9)


def test_discs_coupling_against_cartesian_quadrature():
    lam = 0.2
    for d in (0.3, 1.0, 3.0):
        T = sample_region(RegionSpec.disc3d(1.0), lam)
        R = sample_region(RegionSpec.disc3d(0.7, (0, 0, d)), lam)
        q = coupling_strength_quadrature(T, R)
        assert discs_coupling_strength(1.0, 0.7, d) == pytest.approx(q, rel=2e-3)


def test_discs_coupling_far_field():
    a, r, d = 1.0, 2.0, 500.0
    # int int rho rho' / d^2 = a^2 r^2 / (4 d^2)
    assert discs_coupling(a, r, d) == pytest.approx(a * a * r * r / (4 * d * d), rel=1e-5)


def test_ne0_planar_discs():
    lam = 0.2
    for d in (0.4, 3.2):
        T = sample_region(RegionSpec.disc3d(1.0), lam)
        R = sample_region(RegionSpec.disc3d(1.0, (0, 0, d)), lam)
        ne0 = ne0_planar(T, R, d, lam)
        # same quantity from the radial integral
        h2 = discs_coupling_strength(1.0, 1.0, d)
        ref = h2 * h2 * d * d * (4 * math.pi) ** 4 / (lam ** 2 * math.pi ** 2)
        assert ne0 == pytest.approx(ref, rel=3e-3)
        assert ne0 <= shadow_ndof(shadow_two_discs(1.0, 1.0, d), lam, 3)


def test_ne0_planar_rejects_tilt():
    lam = 0.25
    T = sample_region(RegionSpec.disc3d(1.0), lam)
    R = sample_region(RegionSpec.disc3d(1.0, (0, 0, 2), rotation3d((1, 0, 0), 0.3)), lam)
    with pytest.raises(UnsupportedConfiguration):
        ne0_planar(T, R, 2.0, lam)
    L = sample_region(RegionSpec.segment3d(1.0, (0, 0, 2)), lam)
    with pytest.raises(UnsupportedConfiguration):
        ne0_planar(T, L, 2.0, lam)


def test_sphere_modes():
    assert [sphere_mode_count(L) for L in range(4)] == [0, 6, 16, 30]
    assert sphere_mode_count_asymptotic(3) == 18
    assert sphere_mode_count_asymptotic(100) == 20000
    with pytest.raises(InvalidArgument):
        sphere_mode_count(1.5)
    with pytest.raises(InvalidArgument):
        sphere_mode_count(-1)


def test_argument_checks():
    with pytest.raises(InvalidArgument):
        ne0_lines_3d(1.0, 0.0, 1.0)
    with pytest.raises(InvalidArgument):
        ne0_lines_2d(1.0, 1.0, -1.0)
    with pytest.raises(InvalidArgument):
        discs_coupling(1.0, 1.0, 0.0)
    with pytest.raises(InvalidArgument):
        line_pair_coupling(0.0)
