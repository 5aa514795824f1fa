"""Weighted channel matrices and correlation-operator eigenspectra.

The channel between sampled regions T and R is discretised as::

    H[i, j] = sqrt(wR[i]) * G(|rR[i] - rT[j]|) * sqrt(wT[j])

so that ``H^H H`` is the symmetric Nystrom discretisation of the
correlation operator and its eigenvalues (the squared singular values of
``H``) carry the physical dimension of the continuous ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ._pairs import check_compatible, row_blocks
from .errors import InvalidArgument, NumericalFailure, RegionsOverlap
from .geometry import SampledRegion
from .greens import Kernel, KernelVariant

__all__ = [
    "ChannelMatrix",
    "Spectrum",
    "assemble_channel",
    "compute_spectrum",
    "channel_spectrum",
    "merge_spectra",
    "EIGENVALUE_FLOOR",
    "DEFAULT_GUARD",
]

EIGENVALUE_FLOOR = 1e-14
DEFAULT_GUARD = 1e-9  # minimum sample distance, in wavelengths


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Complex ``N_R x N_T`` channel matrix with its wavelength metadata."""

    entries: np.ndarray
    wavelength: float
    variant: KernelVariant
    frobenius_sq: float
    ambient_dim: int
    region_dims: tuple = (None, None)  # (transmitter, receiver)

    @property
    def shape(self):
        return self.entries.shape


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Descending non-negative eigenvalues of a correlation operator.

    ``sources`` optionally tags each value with the index of the spectrum
    it came from (set by :func:`merge_spectra`).
    """

    values: np.ndarray
    wavelength: float
    ambient_dim: Optional[int] = None
    region_dims: tuple = (None, None)
    sources: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size:
            if not np.all(np.isfinite(values)):
                raise InvalidArgument("spectrum contains non-finite values")
            if np.any(np.diff(values) > 1e-12 * abs(values[0])):
                raise InvalidArgument("spectrum values must be sorted in descending order")
            if values[-1] < -EIGENVALUE_FLOOR * max(values[0], 0.0):
                raise InvalidArgument("spectrum values must be non-negative")
            values = np.maximum(values, 0.0)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if not self.wavelength > 0:
            raise InvalidArgument(f"wavelength must be positive, got {self.wavelength!r}")
        if self.sources is not None:
            sources = np.array(self.sources, dtype=int).ravel()
            if sources.shape != values.shape:
                raise InvalidArgument("sources must tag every spectrum value")
            sources.setflags(write=False)
            object.__setattr__(self, "sources", sources)

    def __len__(self):
        return len(self.values)

    @property
    def sum(self) -> float:
        return float(np.sum(self.values))

    @property
    def is_surface_pair_3d(self) -> bool:
        return self.ambient_dim == 3 and tuple(self.region_dims) == (2, 2)

    @property
    def is_curve_pair_2d(self) -> bool:
        return self.ambient_dim == 2 and tuple(self.region_dims) == (1, 1)

    def retained(self) -> np.ndarray:
        """Values above the eigenvalue floor (clamped zeros dropped)."""
        return self.values[self.values > 0]

    def scaled(self, factor: float) -> "Spectrum":
        return Spectrum(self.values * factor, self.wavelength, self.ambient_dim,
                        self.region_dims, self.sources)


def assemble_channel(T: SampledRegion, R: SampledRegion, kernel: Kernel,
                     guard: float = DEFAULT_GUARD) -> ChannelMatrix:
    """Build the weighted channel matrix from ``T`` (columns) to ``R`` (rows).

    Raises
    ------
    InvalidArgument
        If the regions or kernel live in different ambient dimensions.
    RegionsOverlap
        If some sample pair is closer than ``guard`` wavelengths.
    """
    check_compatible(T, R)
    if kernel.ambient_dim != T.ambient_dim:
        raise InvalidArgument(
            f"{kernel.variant.value} kernel used with {T.ambient_dim}D regions")
    min_distance = guard * kernel.wavelength
    sqrt_wt = np.sqrt(T.weights)
    sqrt_wr = np.sqrt(R.weights)
    # rows of H^T in C order are the columns of a Fortran-ordered H
    HT = np.empty((len(T), len(R)), dtype=complex)
    for rows in row_blocks(len(T), len(R)):
        diff = R.points[None, :, :] - T.points[rows, None, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        closest = dist.min()
        if closest <= min_distance:
            raise RegionsOverlap(
                f"regions overlap: samples {closest:.3e} m apart, guard {min_distance:.3e} m")
        block = kernel(dist)
        block *= sqrt_wt[rows, None]
        block *= sqrt_wr[None, :]
        HT[rows] = block
    entries = HT.T
    if not np.all(np.isfinite(HT)):
        raise NumericalFailure("non-finite channel matrix entries")
    frob = float(np.vdot(HT, HT).real)
    return ChannelMatrix(entries, kernel.wavelength, kernel.variant, frob,
                         T.ambient_dim, (T.region_dim, R.region_dim))


def _singular_values(a, overwrite):
    try:
        return scipy.linalg.svd(a, compute_uv=False, overwrite_a=overwrite,
                                check_finite=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        if overwrite:
            raise NumericalFailure("SVD (gesdd) did not converge") from None
    try:
        return scipy.linalg.svd(a, compute_uv=False, check_finite=False, lapack_driver="gesvd")
    except np.linalg.LinAlgError:
        raise NumericalFailure("SVD did not converge") from None


def compute_spectrum(H: ChannelMatrix, overwrite: bool = False) -> Spectrum:
    """Eigenvalues of ``H^H H`` as squared singular values of ``H``.

    Values below ``EIGENVALUE_FLOOR`` times the largest are clamped to 0.
    With ``overwrite=True`` the matrix storage is reused by LAPACK and
    ``H.entries`` is destroyed.
    """
    sigma = _singular_values(H.entries, overwrite)
    zeta = np.sort(sigma.astype(float) ** 2)[::-1]
    if zeta.size and zeta[0] > 0:
        zeta[zeta < EIGENVALUE_FLOOR * zeta[0]] = 0.0
    return Spectrum(zeta, H.wavelength, H.ambient_dim, H.region_dims)


def channel_spectrum(T: SampledRegion, R: SampledRegion, kernel: Kernel,
                     guard: float = DEFAULT_GUARD):
    """Assemble and decompose in one go, reusing the matrix memory.

    Returns ``(spectrum, frobenius_sq)``.
    """
    H = assemble_channel(T, R, kernel, guard)
    frob = H.frobenius_sq
    return compute_spectrum(H, overwrite=True), frob


def merge_spectra(spectra: Sequence[Spectrum]) -> Spectrum:
    """Pool several spectra into one descending spectrum.

    Every output value is tagged in ``sources`` with the position of its
    input spectrum in ``spectra``.
    """
    spectra = list(spectra)
    if not spectra:
        raise InvalidArgument("nothing to merge")
    wavelength = spectra[0].wavelength
    for s in spectra[1:]:
        if not math.isclose(s.wavelength, wavelength, rel_tol=1e-12):
            raise InvalidArgument(
                f"cannot merge spectra at wavelengths {wavelength!r} and {s.wavelength!r}")
    non_empty = [s for s in spectra if len(s)]
    dims = {(s.ambient_dim, tuple(s.region_dims)) for s in non_empty}
    ambient_dim, region_dims = dims.pop() if len(dims) == 1 else (None, (None, None))
    values = np.concatenate([s.values for s in spectra])
    tags = np.concatenate([np.full(len(s), k, dtype=int) for k, s in enumerate(spectra)])
    order = np.argsort(-values, kind="stable")
    return Spectrum(values[order], wavelength, ambient_dim, region_dims, tags[order])
