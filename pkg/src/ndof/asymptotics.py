"""Closed-form and semi-analytic NDoF predictions.

Covers the stationary-phase effective-NDoF limits for two equal parallel
lines, the planar-pair bound built from the coupling strength, the exact
coupling integrals for lines and coaxial discs, and spherical mode counts.

Notation: ``beta = ell / d`` for lines of length ``ell`` at distance ``d``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .errors import InvalidArgument, UnsupportedConfiguration
from .geometry import SampledRegion
from .metrics import FOUR_PI_SQ, coupling_strength_quadrature

__all__ = [
    "ne0_lines_3d",
    "ne0_lines_2d",
    "shadow_length_two_lines",
    "line_pair_coupling",
    "ne0_planar",
    "discs_coupling",
    "discs_coupling_strength",
    "sphere_mode_count",
    "sphere_mode_count_asymptotic",
]

# below this beta the closed forms are replaced by their Taylor series
_SERIES_BETA = 1e-2


def _check_lines(ell, d, wavelength):
    if not (ell > 0 and d > 0 and wavelength > 0):
        raise InvalidArgument("ell, d and wavelength must be positive")
    return ell / d


def ne0_lines_3d(ell: float, d: float, wavelength: float) -> float:
    """High-frequency effective NDoF of two equal parallel lines in 3D.

    Tends to ``ell^2 / (d lambda)`` as ``beta -> 0``.
    """
    b = _check_lines(ell, d, wavelength)
    if b < _SERIES_BETA:
        b2 = b * b
        ratio = 1 - b2 / 4 + 83 * b2 * b2 / 720
    else:
        num = math.log1p(b * b) - 2 * b * math.atan(b)
        den = b * b * math.asinh(b) - b * math.sqrt(b * b + 1) + b
        ratio = num * num / den / (2 * b)
    return ell * b / wavelength * ratio


def ne0_lines_2d(ell: float, d: float, wavelength: float) -> float:
    """High-frequency effective NDoF of two equal parallel lines in 2D.

    Tends to ``ell^2 / (d lambda)`` as ``beta -> 0``.
    """
    b = _check_lines(ell, d, wavelength)
    if b < _SERIES_BETA:
        b2 = b * b
        ratio = 1 - b2 / 4 + 31 * b2 * b2 / 360
    else:
        s = math.sqrt(1 + b * b)
        inner = math.asinh(b) - s / b + 1 / b
        den = 2 / 3 + b * math.asinh(b) - s + s ** 3 / 3
        ratio = 4 * inner * inner / den
    return ell * b / wavelength * ratio


def shadow_length_two_lines(ell: float, d: float) -> float:
    """Mutual shadow length ``2 (sqrt(ell^2 + d^2) - d)`` of two facing lines."""
    if not (ell > 0 and d > 0):
        raise InvalidArgument("ell and d must be positive")
    return 2 * ell * ell / (math.hypot(ell, d) + d)


def line_pair_coupling(beta: float) -> float:
    """Coupling strength of two equal parallel lines under the 3D kernel.

    ``(2 beta atan(beta) - ln(1 + beta^2)) / (4 pi)^2``; dimensionless and a
    function of ``beta`` only.
    """
    if not beta > 0:
        raise InvalidArgument("beta must be positive")
    return (2 * beta * math.atan(beta) - math.log1p(beta * beta)) / FOUR_PI_SQ


def _plane_normal(S: SampledRegion, tol):
    n = S.normals[0]
    if not np.all(np.abs(S.normals @ n) > 1 - tol):
        raise UnsupportedConfiguration("region is not planar")
    return n


def ne0_planar(T: SampledRegion, R: SampledRegion, d: float, wavelength: float,
               refine: int = 4, tol: float = 1e-9) -> float:
    """Planar-pair NDoF estimate ``||H||^4 d^2 (4 pi)^4 / (lambda^2 A_T A_R)``.

    ``||H||_F^2`` comes from :func:`coupling_strength_quadrature`. The
    estimate never exceeds the shadow NDoF and approaches it in the
    paraxial regime.

    Raises
    ------
    UnsupportedConfiguration
        If either region is not a flat surface or the two are not parallel.
    """
    if T.region_dim != 2 or R.region_dim != 2 or T.ambient_dim != 3:
        raise UnsupportedConfiguration("planar estimate needs two flat surfaces in 3D")
    if not (d > 0 and wavelength > 0):
        raise InvalidArgument("d and wavelength must be positive")
    nt = _plane_normal(T, tol)
    nr = _plane_normal(R, tol)
    if abs(abs(float(nt @ nr)) - 1) > tol:
        raise UnsupportedConfiguration("surfaces are not parallel")
    h2 = coupling_strength_quadrature(T, R, p=2, refine=refine)
    return h2 * h2 * d * d * FOUR_PI_SQ ** 2 / (wavelength ** 2 * T.measure * R.measure)


def discs_coupling(a: float, r: float, d: float, rel_tol: float = 1e-6) -> float:
    """Radial double integral for coaxial parallel discs.

    ``int_0^r int_0^a rho rho' / (sqrt((rho+rho')^2+d^2) sqrt((rho-rho')^2+d^2))``

    The azimuthal integrations have been done analytically, so the
    coupling strength is ``(2 pi)^2 / (4 pi)^2`` times this value, see
    :func:`discs_coupling_strength`.
    """
    if not (a > 0 and r > 0 and d > 0):
        raise InvalidArgument("a, r and d must be positive")

    def f(rho_t, rho_r):
        return rho_t * rho_r / math.sqrt(((rho_t + rho_r) ** 2 + d * d)
                                         * ((rho_t - rho_r) ** 2 + d * d))

    # the integrand peaks along rho = rho'; tell quad where
    def inner(rho_r):
        pts = [rho_r] if 0 < rho_r < a else None
        return integrate.quad(f, 0, a, args=(rho_r,), epsrel=rel_tol * 0.1,
                              epsabs=0, points=pts, limit=200)[0]

    pts = [a] if a < r else None
    return integrate.quad(inner, 0, r, epsrel=rel_tol, epsabs=0, points=pts, limit=200)[0]


def discs_coupling_strength(a: float, r: float, d: float, rel_tol: float = 1e-6) -> float:
    """``||H||_F^2`` of two coaxial discs under the 3D scalar kernel."""
    return discs_coupling(a, r, d, rel_tol) / 4.0


def sphere_mode_count(L: int) -> int:
    """Vector spherical modes up to degree ``L``: ``2 L (L + 2)``."""
    if isinstance(L, bool) or int(L) != L or L < 0:
        raise InvalidArgument(f"L must be a non-negative integer, got {L!r}")
    L = int(L)
    return 2 * L * (L + 2)


def sphere_mode_count_asymptotic(ka: float) -> float:
    """Large-sphere mode count ``2 (ka)^2``."""
    if not ka >= 0:
        raise InvalidArgument("ka must be non-negative")
    return 2.0 * ka * ka
