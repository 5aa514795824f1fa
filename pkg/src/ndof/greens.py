"""Scalar free-space Green's functions in 2D and 3D.

Time convention exp(+jwt), so outgoing waves carry exp(-jkr).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, SingularKernel
from .special import hankel2_0

__all__ = ["KernelVariant", "Kernel", "green3d", "green2d"]


class KernelVariant(str, enum.Enum):
    SCALAR3D = "scalar3d"
    SCALAR2D_EXACT = "scalar2d_exact"
    SCALAR2D_ASYMPTOTIC = "scalar2d_asymptotic"

    @property
    def ambient_dim(self) -> int:
        return 3 if self is KernelVariant.SCALAR3D else 2


def _distances(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise SingularKernel("Green's function evaluated at non-positive distance")
    return r


def green3d(r, k):
    """exp(-jkr) / (4 pi r)."""
    r = _distances(r)
    return np.exp(-1j * k * r) / (4 * math.pi * r)


def green2d(r, k, variant="exact"):
    """2D Green's function, exact ``(j/4) H0^(2)(kr)`` or its large-kr form.

    The asymptotic variant is ``(1/4pi) sqrt(lambda/(j r)) exp(-jkr)`` with
    the square-root branch ``sqrt(1/j) = exp(j 3pi/4)``, which is the one
    that continues the exact kernel (the principal branch flips the sign).
    """
    r = _distances(r)
    variant = getattr(variant, "value", variant)
    if variant in ("exact", KernelVariant.SCALAR2D_EXACT.value):
        return 0.25j * hankel2_0(k * r)
    if variant in ("asymptotic", KernelVariant.SCALAR2D_ASYMPTOTIC.value):
        wavelength = 2 * math.pi / k
        return np.sqrt(wavelength / r) * np.exp(-1j * (k * r - 0.75 * math.pi)) / (4 * math.pi)
    raise InvalidArgument(f"unknown 2D kernel variant {variant!r}")


@dataclass(frozen=True)
class Kernel:
    """A scalar kernel bound to a wavenumber (rad/m)."""

    variant: KernelVariant
    wavenumber: float

    def __post_init__(self):
        object.__setattr__(self, "variant", KernelVariant(self.variant))
        if not (self.wavenumber > 0 and math.isfinite(self.wavenumber)):
            raise InvalidArgument(f"wavenumber must be positive, got {self.wavenumber!r}")

    @classmethod
    def for_wavelength(cls, variant, wavelength: float) -> "Kernel":
        if not wavelength > 0:
            raise InvalidArgument(f"wavelength must be positive, got {wavelength!r}")
        return cls(KernelVariant(variant), 2 * math.pi / wavelength)

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.wavenumber

    @property
    def ambient_dim(self) -> int:
        return self.variant.ambient_dim

    def __call__(self, r):
        if self.variant is KernelVariant.SCALAR3D:
            return green3d(r, self.wavenumber)
        if self.variant is KernelVariant.SCALAR2D_EXACT:
            return green2d(r, self.wavenumber, "exact")
        return green2d(r, self.wavenumber, "asymptotic")
