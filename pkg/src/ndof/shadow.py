"""Geometric NDoF estimates from mutual shadow (view) measures.

The mutual shadow measure between a transmitter T and receiver R is the
projected-visibility double integral

    A_TR = int_T int_R |nT.R^| |nR.R^| / R^2   dS dS'     (surfaces in 3D)
    L_TR = int_T int_R |nT.R^| |nR.R^| / R     dl dl'     (curves)

and ``A_TR / lambda^2`` (or ``L_TR / lambda``) predicts where the
eigenspectrum turns from propagating to reactive. These are the same
integrals as radiative view factors, up to normalisation.

Only configurations in which every sample pair is mutually visible are
accepted. Visibility is checked by requiring that no region straddles the
tangent plane of any sample of the other region; occlusion by third
bodies is not modelled.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._pairs import check_compatible, pair_sum, row_blocks, separation
from .errors import InvalidArgument, UnsupportedConfiguration
from .geometry import SampledRegion

__all__ = [
    "ShadowMethod",
    "ShadowResult",
    "shadow_area",
    "shadow_length",
    "shadow_two_discs",
    "shadow_enclosed_convex",
    "paraxial_area",
    "shadow_ndof",
    "check_mutual_visibility",
]


class ShadowMethod(str, enum.Enum):
    QUADRATURE = "quadrature"
    ANALYTIC_TWO_DISCS = "analytic_two_discs"
    PARAXIAL = "paraxial"
    ENCLOSED_CONVEX = "enclosed_convex"


@dataclass(frozen=True)
class ShadowResult:
    measure: float
    n_a: float
    method: ShadowMethod
    low_freq_offset: float = 0.0

    def __post_init__(self):
        if self.measure < 0:
            raise InvalidArgument("shadow measure must be non-negative")


def check_mutual_visibility(T: SampledRegion, R: SampledRegion, front_only: bool = False):
    """Raise unless every sample pair faces each other without grazing.

    For each sample, ``n . R^`` must keep one strict sign over all samples
    of the other region. With ``front_only`` the transmitter side is not
    checked (pairs behind the transmitter are masked out instead).
    """
    check_compatible(T, R)
    t_min = np.full(len(T), np.inf)
    t_max = np.full(len(T), -np.inf)
    r_min = np.full(len(R), np.inf)
    r_max = np.full(len(R), -np.inf)
    for rows in row_blocks(len(T), len(R)):
        rv = R.points[None, :, :] - T.points[rows, None, :]
        ct = np.einsum("ijk,ik->ij", rv, T.normals[rows])
        cr = np.einsum("ijk,jk->ij", rv, R.normals)
        if front_only:
            cr = np.where(ct > 0, cr, np.nan)
        t_min[rows] = ct.min(axis=1)
        t_max[rows] = ct.max(axis=1)
        r_min = np.fmin(r_min, np.nanmin(np.where(np.isnan(cr), np.inf, cr), axis=0))
        r_max = np.fmax(r_max, np.nanmax(np.where(np.isnan(cr), -np.inf, cr), axis=0))

    def straddles(lo, hi):
        seen = np.isfinite(lo)
        return np.any(seen & ~((lo > 0) | (hi < 0)))

    if (not front_only and straddles(t_min, t_max)) or straddles(r_min, r_max):
        raise UnsupportedConfiguration(
            "regions are not fully mutually visible; occlusion-aware shadow "
            "measures are not supported")


def _shadow_integrand(power, front_only):
    def f(rv, d, nt, nr):
        dot_t = np.sum(rv * nt, axis=-1)
        val = np.abs(dot_t) * np.abs(np.sum(rv * nr, axis=-1)) / d ** (power + 2)
        if front_only:
            val = np.where(dot_t > 0, val, 0.0)
        return val
    return f


def shadow_area(T: SampledRegion, R: SampledRegion, refine: int = 4,
                front_only: bool = False, check: bool = True) -> float:
    """Total mutual shadow area A_TR (m^2) of two surfaces in 3D."""
    if T.region_dim != 2 or R.region_dim != 2 or T.ambient_dim != 3:
        raise InvalidArgument("shadow_area needs two surfaces in 3D")
    separation(T, R)
    if check:
        check_mutual_visibility(T, R, front_only)
    return pair_sum(T, R, _shadow_integrand(2, front_only), refine)


def shadow_length(T: SampledRegion, R: SampledRegion, refine: int = 4,
                  front_only: bool = False, check: bool = True) -> float:
    """Total mutual shadow length L_TR (m) of two curves.

    The curves are normally in 2D; coplanar segments in 3D (with normals in
    their common plane) are accepted too.

    ``front_only`` keeps only pairs in front of the transmitter, which is
    the exact visibility rule for a closed convex transmitter inside a
    surrounding receiver.
    """
    if T.region_dim != 1 or R.region_dim != 1:
        raise InvalidArgument("shadow_length needs two curves")
    separation(T, R)
    if check:
        check_mutual_visibility(T, R, front_only)
    return pair_sum(T, R, _shadow_integrand(1, front_only), refine)


def shadow_two_discs(a: float, r: float, d: float) -> float:
    """Closed-form mutual shadow area of two coaxial parallel discs.

    ``(pi^2/2) (D - sqrt(D^2 - 4 a^2 r^2))`` with ``D = a^2 + r^2 + d^2``,
    evaluated in the cancellation-free form ``2 pi^2 a^2 r^2 / (D + sqrt(...))``.
    """
    if not (a > 0 and r > 0 and d > 0):
        raise InvalidArgument("disc radii and separation must be positive")
    delta = a * a + r * r + d * d
    root = math.sqrt(delta * delta - 4 * a * a * r * r)
    return 2 * math.pi ** 2 * a * a * r * r / (delta + root)


def shadow_enclosed_convex(measure: float, dim: int) -> float:
    """Shadow measure of a convex transmitter enclosed by its receiver.

    ``2 L`` for a curve of circumference ``L`` in 2D, ``pi A`` for a
    surface of area ``A`` in 3D.
    """
    if measure < 0:
        raise InvalidArgument("measure must be non-negative")
    if dim == 2:
        return 2.0 * measure
    if dim == 3:
        return math.pi * measure
    raise InvalidArgument(f"dim must be 2 or 3, got {dim!r}")


def _centroid(S: SampledRegion):
    return (S.weights[:, None] * S.points).sum(axis=0) / S.weights.sum()


def paraxial_area(T: SampledRegion, R: SampledRegion, d: float = None) -> float:
    """Far-separation shadow measure ``d^-2 int_T |n.R^| int_R |n.R^|``.

    ``R^`` is the axis between the two centroids and ``d`` defaults to the
    centroid distance. For broadside plates this is ``A_T A_R / d^2``.
    """
    check_compatible(T, R)
    axis = _centroid(R) - _centroid(T)
    dist = float(np.linalg.norm(axis))
    if dist == 0:
        raise InvalidArgument("regions share a centroid; no paraxial axis")
    axis /= dist
    d = dist if d is None else d
    if not d > 0:
        raise InvalidArgument("separation must be positive")
    proj_t = float(np.sum(T.weights * np.abs(T.normals @ axis)))
    proj_r = float(np.sum(R.weights * np.abs(R.normals @ axis)))
    return proj_t * proj_r / d ** 2


def shadow_ndof(measure: float, wavelength: float, dim: int,
                low_freq_correction: bool = False, offset: float = 1.0) -> float:
    """Shadow-based NDoF per polarisation.

    ``dim=2`` treats ``measure`` as a shadow length (``L/lambda``), ``dim=3``
    as a shadow area (``A/lambda^2``). With ``low_freq_correction`` the
    additive ``offset`` is applied (1 for planar/curve pairs, 6 for a
    source enclosed by a sphere).
    """
    if measure < 0:
        raise InvalidArgument("measure must be non-negative")
    if not wavelength > 0:
        raise InvalidArgument("wavelength must be positive")
    if dim == 2:
        n = measure / wavelength
    elif dim == 3:
        n = measure / wavelength ** 2
    else:
        raise InvalidArgument(f"dim must be 2 or 3, got {dim!r}")
    return n + (offset if low_freq_correction else 0.0)
