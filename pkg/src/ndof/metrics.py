"""Spectrum-based NDoF estimators and channel-strength quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np

from ._pairs import pair_extrema, pair_sum, separation
from .channel import Spectrum
from .errors import DegenerateSpectrum, InsufficientSpectrum, InvalidArgument
from .geometry import SampledRegion

__all__ = [
    "NdofReport",
    "CornerFit",
    "effective_ndof",
    "effective_rank",
    "corner_fit",
    "corner_detect",
    "threshold_ndof",
    "normalized_values",
    "coupling_strength_quadrature",
    "average_channel_strength",
    "eig_level_bounds",
    "power_law_fit",
    "build_report",
    "CORNER_FIT_FLOOR",
]

FOUR_PI_SQ = (4 * math.pi) ** 2

#: Only eigenvalues above this fraction of the largest enter the corner fit.
CORNER_FIT_FLOOR = 1e-3
_MIN_CORNER_VALUES = 8
_CONFIDENT_SLOPE_GAP = 0.5


def _positive(s: Spectrum) -> np.ndarray:
    z = s.values
    total = z.sum()
    if not total > 0:
        raise DegenerateSpectrum("spectrum has no positive eigenvalues")
    return z


def effective_ndof(s: Spectrum) -> float:
    """Participation ratio ``(sum z)^2 / sum z^2``."""
    z = _positive(s)
    # scale first so squares cannot under/overflow
    z = z / z[0]
    return float(z.sum() ** 2 / np.dot(z, z))


def effective_rank(s: Spectrum) -> float:
    """Exponential of the Shannon entropy of the normalised spectrum (0 ln 0 = 0)."""
    z = _positive(s)
    p = z / z.sum()
    p = p[p > 0]
    return float(math.exp(-np.dot(p, np.log(p))))


@dataclass(frozen=True)
class CornerFit:
    """Result of the two-line fit in (ln n, ln zeta).

    ``index`` is the last mode of the left (propagating) line. ``confident``
    is False when the two slopes differ by less than 0.5, i.e. no clear
    knee is visible.
    """

    index: int
    slopes: Tuple[float, float]
    residual: float
    n_fitted: int
    confident: bool


def _segment_residuals(x, y):
    """Least-squares line residual of every prefix and every suffix."""
    M = len(x)
    x = x - x.mean()
    y = y - y.mean()
    cols = np.column_stack([np.ones(M), x, y, x * x, x * y, y * y])
    zero = np.zeros((1, 6))
    pre = np.vstack([zero, np.cumsum(cols, axis=0)])   # pre[m] = sums over first m
    suf = pre[-1] - pre                                 # suf[m] = sums over m..M-1

    def resid(S):
        n, sx, sy, sxx, sxy, syy = S.T
        with np.errstate(invalid="ignore", divide="ignore"):
            vxx = sxx - sx * sx / n
            vxy = sxy - sx * sy / n
            vyy = syy - sy * sy / n
            r = vyy - np.where(vxx > 0, vxy * vxy / vxx, 0.0)
            slope = np.where(vxx > 0, vxy / vxx, np.nan)
        small = n < 3
        r = np.where(small, 0.0, np.maximum(r, 0.0))
        return r, slope

    return resid(pre), resid(suf)


def corner_fit(s: Spectrum, fit_floor: float = CORNER_FIT_FLOOR) -> CornerFit:
    """Locate the spectral corner by the best split into two log-log lines.

    Eigenvalues below ``fit_floor * zeta_1`` are excluded. The split ``m``
    (left line on modes ``1..m``, right line on ``m+1..M``) is searched
    over ``3 <= m <= M``; an empty right part covers spectra whose tail
    drops straight through the floor. Ties go to the larger ``m``.

    Raises
    ------
    InsufficientSpectrum
        Fewer than 8 eigenvalues above the fit floor.
    """
    z = _positive(s)
    kept = z[z > fit_floor * z[0]]
    M = len(kept)
    if M < _MIN_CORNER_VALUES:
        raise InsufficientSpectrum(
            f"corner fit needs >= {_MIN_CORNER_VALUES} eigenvalues above "
            f"{fit_floor:g} x zeta_1, got {M}")
    x = np.log(np.arange(1, M + 1, dtype=float))
    y = np.log(kept)
    (left, left_slope), (right, right_slope) = _segment_residuals(x, y)
    m = np.arange(3, M + 1)
    total = left[m] + right[m]
    best = total.min()
    scale = max(float(np.sum((y - y.mean()) ** 2)), 1e-300)
    ties = np.nonzero(total <= best + 1e-12 * scale)[0]
    index = int(m[ties[-1]])
    s1 = float(left_slope[index])
    if M - index >= 2:
        s2 = float(right_slope[index])
    else:
        # the spectrum leaves the fit window right after the split
        s2 = -math.inf if len(z) > M else float("nan")
    confident = bool(abs(s1 - s2) >= _CONFIDENT_SLOPE_GAP) if not math.isnan(s2) else False
    return CornerFit(index, (s1, s2), float(total[ties[-1]]), M, confident)


def corner_detect(s: Spectrum, fit_floor: float = CORNER_FIT_FLOOR) -> int:
    """Corner position N_c (see :func:`corner_fit`)."""
    return corner_fit(s, fit_floor).index


def normalized_values(s: Spectrum) -> np.ndarray:
    """Eigenvalues on the scale where the propagating plateau sits near 1.

    3D surface pairs and 2D curve pairs use ``(4 pi)^2 zeta / lambda^2``;
    other pairs (e.g. lines in 3D) use ``zeta / sum(zeta)``.
    """
    if s.is_surface_pair_3d or s.is_curve_pair_2d:
        return FOUR_PI_SQ * s.values / s.wavelength ** 2
    total = s.sum
    return s.values / total if total > 0 else np.zeros_like(s.values)


def threshold_ndof(s: Spectrum, wavelength: Optional[float] = None) -> int:
    """Count of eigenvalues with ``(4 pi)^2 zeta / lambda^2 >= 1/2``.

    Only defined for pairs of surfaces in 3D.
    """
    if not s.is_surface_pair_3d:
        raise InvalidArgument("threshold NDoF is defined for 3D surface pairs only")
    wavelength = s.wavelength if wavelength is None else wavelength
    return int(np.count_nonzero(FOUR_PI_SQ * s.values / wavelength ** 2 >= 0.5))


def _check_p(p):
    if p not in (1, 2):
        raise InvalidArgument(f"p must be 1 or 2, got {p!r}")


def coupling_strength_quadrature(T: SampledRegion, R: SampledRegion, p: int = 2,
                                 wavelength: Optional[float] = None, refine: int = 4) -> float:
    """Coupling strength ``sum zeta_n = ||H||_F^2`` as a geometric double integral.

    ``p=2`` integrates ``1/((4 pi R)^2)`` (3D scalar kernel, any region
    dimension). ``p=1`` integrates the high-frequency 2D kernel
    ``lambda / ((4 pi)^2 R)`` and needs ``wavelength``.
    """
    _check_p(p)
    separation(T, R)
    if p == 2:
        return pair_sum(T, R, lambda rv, d, nt, nr: 1.0 / d ** 2, refine) / FOUR_PI_SQ
    if wavelength is None or not wavelength > 0:
        raise InvalidArgument("p=1 coupling strength needs a positive wavelength")
    return wavelength * pair_sum(T, R, lambda rv, d, nt, nr: 1.0 / d, refine) / FOUR_PI_SQ


def _cosines(rv, d, nt, nr):
    ct = np.abs(np.sum(rv * nt, axis=-1)) / d
    cr = np.abs(np.sum(rv * nr, axis=-1)) / d
    return ct * cr


def average_channel_strength(T: SampledRegion, R: SampledRegion, p: int = 2,
                             refine: int = 4) -> float:
    """Asymptotic average level of the propagating eigenvalues.

    Ratio of ``int int R^-p`` to ``int int |nT.R^||nR.R^| R^-p``; it is 1
    for paraxial broadside pairs and grows with obliqueness.
    """
    _check_p(p)
    separation(T, R)
    num = pair_sum(T, R, lambda rv, d, nt, nr: d ** -float(p), refine)
    den = pair_sum(T, R, lambda rv, d, nt, nr: _cosines(rv, d, nt, nr) * d ** -float(p), refine)
    if not den > 0:
        raise InvalidArgument("regions are not mutually visible (zero projected coupling)")
    return num / den


def eig_level_bounds(T: SampledRegion, R: SampledRegion) -> Tuple[float, float]:
    """Bounds on the average propagating level from incidence-angle extrema.

    Returns ``(1/max q, 1/min q)`` with ``q = |R^.nT| |R^.nR|`` over all
    sample pairs; the upper bound is ``inf`` for grazing pairs.
    """
    separation(T, R)
    lo, hi = pair_extrema(T, R, _cosines)
    if not hi > 0:
        raise InvalidArgument("regions are not mutually visible")
    upper = math.inf if lo <= 1e-15 else 1.0 / lo
    return 1.0 / hi, upper


def power_law_fit(series: Iterable[Tuple[float, float]], p: int) -> float:
    """Fit ``N ~ alpha / lambda^p`` to ``(wavelength, ndof)`` pairs.

    The fit is least squares in log space, so every sweep point counts
    with the same relative weight: ``ln alpha = mean(ln N + p ln lambda)``.
    """
    data = np.asarray(list(series), dtype=float)
    if data.ndim != 2 or data.shape[0] < 3 or data.shape[1] != 2:
        raise InsufficientSpectrum("power-law fit needs at least 3 (wavelength, ndof) points")
    lam, n = data.T
    if np.any(lam <= 0) or np.any(n <= 0):
        raise InvalidArgument("wavelengths and NDoF values must be positive")
    return float(np.exp(np.mean(np.log(n) + p * np.log(lam))))


@dataclass
class NdofReport:
    """All estimator outputs for one scenario evaluation."""

    wavelength: float
    n_e: float
    n_r: float
    n_c: Optional[int] = None
    n_h: Optional[int] = None
    n_a: Optional[float] = None
    coupling_strength: Optional[float] = None
    avg_level: Optional[float] = None
    bounds: Optional[Tuple[float, float]] = None
    corner_confident: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_r < self.n_e - 1e-9 * max(1.0, self.n_e):
            raise InvalidArgument(f"effective rank {self.n_r} below effective NDoF {self.n_e}")


def build_report(s: Spectrum, n_a: Optional[float] = None,
                 bounds: Optional[Tuple[float, float]] = None,
                 fit_floor: float = CORNER_FIT_FLOOR) -> NdofReport:
    """Evaluate every spectral estimator on ``s``.

    ``n_a`` (shadow NDoF) and ``bounds`` come from geometry and are passed
    through. ``avg_level`` is the measured counterpart of the asymptotic
    average channel strength and is only filled for normalisable pairs.
    """
    try:
        fit = corner_fit(s, fit_floor)
        n_c, confident = fit.index, fit.confident
    except InsufficientSpectrum:
        n_c, confident = None, None
    n_h = threshold_ndof(s) if s.is_surface_pair_3d else None
    avg = None
    if n_a and (s.is_surface_pair_3d or s.is_curve_pair_2d):
        avg = FOUR_PI_SQ * s.sum / (s.wavelength ** 2 * n_a)
    return NdofReport(
        wavelength=s.wavelength,
        n_e=effective_ndof(s),
        n_r=effective_rank(s),
        n_c=n_c,
        n_h=n_h,
        n_a=n_a,
        coupling_strength=s.sum,
        avg_level=avg,
        bounds=bounds,
        corner_confident=confident,
    )
