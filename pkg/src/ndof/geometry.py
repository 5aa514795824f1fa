"""Region descriptions and their quadrature discretisations.

A :class:`RegionSpec` is a parametric shape (segment, arc, polyline, disc,
rectangle) placed in 2D or 3D space by a pose, i.e. an ``origin`` and an
orthonormal ``frame`` whose columns are the local axes expressed in world
coordinates::

    world = origin + frame @ local

Every shape is defined in its local frame as follows.

=============  =================================================  ==========
kind           local geometry                                     normal
=============  =================================================  ==========
segment2d      x in [-l/2, l/2], y = 0                            +y
segment3d      x in [-l/2, l/2], y = z = 0                        +z
arc2d          rho (sin phi, cos phi), phi in [-span/2, span/2]   radial
polyline2d     straight edges through ``vertices``                left-hand
disc3d         x^2 + y^2 <= a^2, z = 0                            +z
rectangle3d    |x| <= w/2, |y| <= h/2, z = 0                      +z
=============  =================================================  ==========

:func:`sample_region` turns a spec into a :class:`SampledRegion` using the
midpoint rule on uniform parametric grids.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument, UnsupportedGeometry

__all__ = [
    "RegionKind",
    "RegionSpec",
    "SampledRegion",
    "sample_region",
    "sample_regions",
    "region_measure",
    "rotation2d",
    "rotation3d",
    "MIN_SAMPLES",
]

MIN_SAMPLES = 4
_ORTHO_TOL = 1e-9


class RegionKind(str, enum.Enum):
    SEGMENT2D = "segment2d"
    SEGMENT3D = "segment3d"
    ARC2D = "arc2d"
    POLYLINE2D = "polyline2d"
    DISC3D = "disc3d"
    RECTANGLE3D = "rectangle3d"

    @property
    def ambient_dim(self) -> int:
        return 3 if self in (RegionKind.SEGMENT3D, RegionKind.DISC3D,
                             RegionKind.RECTANGLE3D) else 2

    @property
    def region_dim(self) -> int:
        """1 for curves, 2 for surfaces."""
        return 2 if self in (RegionKind.DISC3D, RegionKind.RECTANGLE3D) else 1


def rotation2d(angle: float) -> np.ndarray:
    """Counter-clockwise rotation by ``angle`` radians."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def rotation3d(axis: Sequence[float], angle: float) -> np.ndarray:
    """Rotation by ``angle`` radians about ``axis`` (Rodrigues formula)."""
    u = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise InvalidArgument("rotation axis must be non-zero")
    u = u / norm
    K = np.array([[0, -u[2], u[1]], [u[2], 0, -u[0]], [-u[1], u[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * K @ K


@dataclass(frozen=True)
class RegionSpec:
    """Parametric transmitter/receiver region.

    Only the shape parameters relevant to ``kind`` are used: ``length`` for
    segments, ``radius`` (and ``span`` in radians) for arcs and discs,
    ``width``/``height`` for rectangles and ``vertices`` for polylines.
    Use the named constructors (:meth:`segment2d`, :meth:`disc3d`, ...)
    rather than calling this directly.
    """

    kind: RegionKind
    length: Optional[float] = None
    radius: Optional[float] = None
    span: Optional[float] = None
    width: Optional[float] = None
    height: Optional[float] = None
    vertices: Optional[tuple] = None
    origin: tuple = ()
    frame: tuple = ()

    def __post_init__(self):
        try:
            kind = RegionKind(self.kind)
        except ValueError:
            raise UnsupportedGeometry(f"unsupported region kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        dim = kind.ambient_dim
        origin = tuple(float(v) for v in self.origin) if len(self.origin) else (0.0,) * dim
        if len(origin) != dim:
            raise InvalidArgument(f"{kind.value} needs a {dim}-component origin")
        frame = np.eye(dim) if self.frame is None or len(self.frame) == 0 else np.asarray(self.frame, dtype=float)
        if frame.shape != (dim, dim):
            raise InvalidArgument(f"{kind.value} needs a {dim}x{dim} frame")
        if np.max(np.abs(frame.T @ frame - np.eye(dim))) > _ORTHO_TOL:
            raise InvalidArgument("orientation frame is not orthonormal")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "frame", tuple(map(tuple, frame)))
        self._validate_shape()

    def _validate_shape(self):
        def positive(name):
            value = getattr(self, name)
            if value is None or not np.isfinite(value) or value <= 0:
                raise InvalidArgument(f"{self.kind.value}: {name} must be > 0, got {value!r}")

        kind = self.kind
        if kind in (RegionKind.SEGMENT2D, RegionKind.SEGMENT3D):
            positive("length")
        elif kind == RegionKind.ARC2D:
            positive("radius")
            positive("span")
            if self.span > 2 * math.pi:
                raise InvalidArgument("arc2d: span must not exceed 2*pi")
        elif kind == RegionKind.DISC3D:
            positive("radius")
        elif kind == RegionKind.RECTANGLE3D:
            positive("width")
            positive("height")
        elif kind == RegionKind.POLYLINE2D:
            verts = np.asarray(self.vertices, dtype=float)
            if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 2:
                raise InvalidArgument("polyline2d needs at least two 2D vertices")
            if np.any(np.linalg.norm(np.diff(verts, axis=0), axis=1) <= 0):
                raise InvalidArgument("polyline2d: consecutive vertices must be distinct")
            object.__setattr__(self, "vertices", tuple(map(tuple, verts)))

    # -- named constructors ------------------------------------------------
    @classmethod
    def segment2d(cls, length, center=(0.0, 0.0), angle=0.0):
        return cls(RegionKind.SEGMENT2D, length=length, origin=tuple(center),
                   frame=rotation2d(angle))

    @classmethod
    def segment3d(cls, length, center=(0.0, 0.0, 0.0), frame=None):
        return cls(RegionKind.SEGMENT3D, length=length, origin=tuple(center),
                   frame=() if frame is None else frame)

    @classmethod
    def arc2d(cls, radius, span, center=(0.0, 0.0), angle=0.0):
        return cls(RegionKind.ARC2D, radius=radius, span=span, origin=tuple(center),
                   frame=rotation2d(angle))

    @classmethod
    def polyline2d(cls, vertices, origin=(0.0, 0.0), angle=0.0):
        return cls(RegionKind.POLYLINE2D, vertices=tuple(map(tuple, vertices)),
                   origin=tuple(origin), frame=rotation2d(angle))

    @classmethod
    def disc3d(cls, radius, center=(0.0, 0.0, 0.0), frame=None):
        return cls(RegionKind.DISC3D, radius=radius, origin=tuple(center),
                   frame=() if frame is None else frame)

    @classmethod
    def rectangle3d(cls, width, height, center=(0.0, 0.0, 0.0), frame=None):
        return cls(RegionKind.RECTANGLE3D, width=width, height=height,
                   origin=tuple(center), frame=() if frame is None else frame)

    # -- properties --------------------------------------------------------
    @property
    def ambient_dim(self) -> int:
        return self.kind.ambient_dim

    @property
    def region_dim(self) -> int:
        return self.kind.region_dim

    @property
    def frame_matrix(self) -> np.ndarray:
        return np.array(self.frame)

    @property
    def origin_vector(self) -> np.ndarray:
        return np.array(self.origin)

    def moved(self, rotation, translation) -> "RegionSpec":
        """Apply the rigid motion ``x -> rotation @ x + translation``."""
        rotation = np.asarray(rotation, dtype=float)
        origin = rotation @ self.origin_vector + np.asarray(translation, dtype=float)
        return replace(self, origin=tuple(origin), frame=rotation @ self.frame_matrix)


@dataclass(frozen=True, eq=False)
class SampledRegion:
    """Quadrature discretisation of a region.

    ``cell_edges[i]`` holds the ``region_dim`` edge vectors of the
    parametric cell represented by sample ``i``; they are used for local
    refinement of near-singular pair integrals.
    """

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    measure: float
    ambient_dim: int
    region_dim: int
    cell_edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("points", "normals", "weights", "cell_edges"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = len(self.weights)
        if n < 1:
            raise InvalidArgument("a sampled region needs at least one point")
        if self.points.shape != (n, self.ambient_dim) or self.normals.shape != (n, self.ambient_dim):
            raise InvalidArgument("points/normals shape does not match weights")
        if np.any(self.weights <= 0):
            raise InvalidArgument("quadrature weights must be positive")
        if np.any(np.abs(np.linalg.norm(self.normals, axis=1) - 1) > 1e-12):
            raise InvalidArgument("normals must have unit length")

    def __len__(self):
        return len(self.weights)

    @property
    def spacing(self) -> float:
        """Largest cell edge length."""
        return float(np.max(np.linalg.norm(self.cell_edges, axis=-1)))

    def moved(self, rotation, translation) -> "SampledRegion":
        rotation = np.asarray(rotation, dtype=float)
        return SampledRegion(
            points=self.points @ rotation.T + np.asarray(translation, dtype=float),
            normals=self.normals @ rotation.T,
            weights=self.weights,
            measure=self.measure,
            ambient_dim=self.ambient_dim,
            region_dim=self.region_dim,
            cell_edges=self.cell_edges @ rotation.T,
        )

    @classmethod
    def union(cls, *regions: "SampledRegion") -> "SampledRegion":
        """Concatenate disjoint pieces into one region."""
        if not regions:
            raise InvalidArgument("union of zero regions")
        dims = {(r.ambient_dim, r.region_dim) for r in regions}
        if len(dims) != 1:
            raise InvalidArgument("cannot join regions of different dimensionality")
        ambient_dim, region_dim = dims.pop()
        return cls(
            points=np.concatenate([r.points for r in regions]),
            normals=np.concatenate([r.normals for r in regions]),
            weights=np.concatenate([r.weights for r in regions]),
            measure=sum(r.measure for r in regions),
            ambient_dim=ambient_dim,
            region_dim=region_dim,
            cell_edges=np.concatenate([r.cell_edges for r in regions]),
        )


def region_measure(spec: RegionSpec) -> float:
    """Analytic length (curves) or area (surfaces) of ``spec``."""
    kind = spec.kind
    if kind in (RegionKind.SEGMENT2D, RegionKind.SEGMENT3D):
        return float(spec.length)
    if kind == RegionKind.ARC2D:
        return float(spec.radius * spec.span)
    if kind == RegionKind.POLYLINE2D:
        verts = np.asarray(spec.vertices)
        return float(np.sum(np.linalg.norm(np.diff(verts, axis=0), axis=1)))
    if kind == RegionKind.DISC3D:
        return math.pi * spec.radius ** 2
    if kind == RegionKind.RECTANGLE3D:
        return float(spec.width * spec.height)
    raise UnsupportedGeometry(f"no measure for {kind}")


def _count(extent, wavelength, ppw, minimum=1):
    # guard against 50.000000000001 -> 51
    return max(minimum, math.ceil(extent * ppw / wavelength - 1e-9))


def _midpoints(n):
    return (np.arange(n) + 0.5) / n


def _sample_segment(length, n):
    t = _midpoints(n) - 0.5
    pts = np.zeros((n, 2))
    pts[:, 0] = t * length
    normals = np.tile([0.0, 1.0], (n, 1))
    edges = np.tile([[length / n, 0.0]], (n, 1, 1))
    return pts, normals, np.full(n, length / n), edges


def _sample_local(spec: RegionSpec, wavelength: float, ppw: float):
    kind = spec.kind
    if kind in (RegionKind.SEGMENT2D, RegionKind.SEGMENT3D):
        n = _count(spec.length, wavelength, ppw, MIN_SAMPLES)
        pts, normals, w, edges = _sample_segment(spec.length, n)
        if kind == RegionKind.SEGMENT3D:
            pts = np.column_stack([pts, np.zeros(n)])
            normals = np.tile([0.0, 0.0, 1.0], (n, 1))
            edges = np.concatenate([edges, np.zeros((n, 1, 1))], axis=2)
        return pts, normals, w, edges

    if kind == RegionKind.ARC2D:
        rho, span = spec.radius, spec.span
        n = _count(rho * span, wavelength, ppw, MIN_SAMPLES)
        phi = (_midpoints(n) - 0.5) * span
        radial = np.column_stack([np.sin(phi), np.cos(phi)])
        tangent = np.column_stack([np.cos(phi), -np.sin(phi)])
        ds = rho * span / n
        return rho * radial, radial, np.full(n, ds), (tangent * ds)[:, None, :]

    if kind == RegionKind.POLYLINE2D:
        verts = np.asarray(spec.vertices)
        edges_len = np.linalg.norm(np.diff(verts, axis=0), axis=1)
        counts = [_count(L, wavelength, ppw) for L in edges_len]
        short = MIN_SAMPLES - sum(counts)
        if short > 0:
            counts[int(np.argmax(edges_len))] += short
        parts = []
        for p0, p1, L, n in zip(verts[:-1], verts[1:], edges_len, counts):
            tangent = (p1 - p0) / L
            t = _midpoints(n)[:, None]
            normal = np.array([-tangent[1], tangent[0]])
            parts.append((p0 + t * (p1 - p0), np.tile(normal, (n, 1)),
                          np.full(n, L / n), np.tile(tangent * L / n, (n, 1, 1))))
        return tuple(np.concatenate(x) for x in zip(*parts))

    if kind == RegionKind.DISC3D:
        a = spec.radius
        h = wavelength / ppw
        n_rings = _count(a, wavelength, ppw)
        dr = a / n_rings
        pts, edges, weights = [], [], []
        for i in range(n_rings):
            rho = (i + 0.5) * dr
            m = max(MIN_SAMPLES, math.ceil(2 * math.pi * rho / h - 1e-9))
            # stagger odd rings by half a step
            phi = (np.arange(m) + 0.5 * (i % 2)) * (2 * math.pi / m)
            c, s = np.cos(phi), np.sin(phi)
            pts.append(np.column_stack([rho * c, rho * s, np.zeros(m)]))
            ring_area = math.pi * dr * dr * ((i + 1) ** 2 - i ** 2)
            weights.append(np.full(m, ring_area / m))
            arc = 2 * math.pi * rho / m
            e = np.zeros((m, 2, 3))
            e[:, 0, 0], e[:, 0, 1] = c * dr, s * dr
            e[:, 1, 0], e[:, 1, 1] = -s * arc, c * arc
            edges.append(e)
        pts = np.concatenate(pts)
        normals = np.tile([0.0, 0.0, 1.0], (len(pts), 1))
        return pts, normals, np.concatenate(weights), np.concatenate(edges)

    if kind == RegionKind.RECTANGLE3D:
        W, H = spec.width, spec.height
        nx = _count(W, wavelength, ppw, 2)
        ny = _count(H, wavelength, ppw, 2)
        X, Y = np.meshgrid((_midpoints(nx) - 0.5) * W, (_midpoints(ny) - 0.5) * H, indexing="ij")
        n = nx * ny
        pts = np.column_stack([X.ravel(), Y.ravel(), np.zeros(n)])
        normals = np.tile([0.0, 0.0, 1.0], (n, 1))
        e = np.zeros((n, 2, 3))
        e[:, 0, 0] = W / nx
        e[:, 1, 1] = H / ny
        return pts, normals, np.full(n, W * H / n), e

    raise UnsupportedGeometry(f"cannot sample {kind}")


def sample_region(spec: RegionSpec, wavelength: float, points_per_wavelength: float = 5.0) -> SampledRegion:
    """Discretise ``spec`` with spacing at most ``wavelength/points_per_wavelength``.

    Curves get uniform midpoint samples along arc length, rectangles a
    uniform midpoint grid, and discs concentric rings whose azimuthal
    counts grow with circumference. Each weight is the exact measure of its
    cell, so the weights sum to the region measure. At least
    ``MIN_SAMPLES`` points are always produced.

    Raises
    ------
    InvalidArgument
        If ``wavelength <= 0`` or ``points_per_wavelength < 2``.
    UnsupportedGeometry
        If ``spec.kind`` is unknown.
    """
    if not (wavelength > 0 and math.isfinite(wavelength)):
        raise InvalidArgument(f"wavelength must be positive, got {wavelength!r}")
    if not points_per_wavelength >= 2:
        raise InvalidArgument(f"points_per_wavelength must be >= 2, got {points_per_wavelength!r}")
    if not isinstance(spec, RegionSpec):
        raise UnsupportedGeometry(f"expected a RegionSpec, got {type(spec).__name__}")
    pts, normals, weights, edges = _sample_local(spec, wavelength, points_per_wavelength)
    frame = spec.frame_matrix
    return SampledRegion(
        points=pts @ frame.T + spec.origin_vector,
        normals=normals @ frame.T,
        weights=weights,
        measure=region_measure(spec),
        ambient_dim=spec.ambient_dim,
        region_dim=spec.region_dim,
        cell_edges=edges @ frame.T,
    )


def sample_regions(specs, wavelength, points_per_wavelength=5.0) -> SampledRegion:
    """Sample one spec or the union of several."""
    if isinstance(specs, RegionSpec):
        return sample_region(specs, wavelength, points_per_wavelength)
    return SampledRegion.union(*(sample_region(s, wavelength, points_per_wavelength) for s in specs))


def estimate_sample_count(spec: RegionSpec, wavelength: float, points_per_wavelength: float = 5.0) -> int:
    """Number of samples :func:`sample_region` would produce, without building them."""
    kind = spec.kind
    if kind == RegionKind.DISC3D:
        h = wavelength / points_per_wavelength
        n_rings = _count(spec.radius, wavelength, points_per_wavelength)
        dr = spec.radius / n_rings
        return sum(max(MIN_SAMPLES, math.ceil(2 * math.pi * (i + 0.5) * dr / h - 1e-9))
                   for i in range(n_rings))
    if kind == RegionKind.RECTANGLE3D:
        return (_count(spec.width, wavelength, points_per_wavelength, 2)
                * _count(spec.height, wavelength, points_per_wavelength, 2))
    if kind == RegionKind.POLYLINE2D:
        verts = np.asarray(spec.vertices)
        lengths = np.linalg.norm(np.diff(verts, axis=0), axis=1)
        return max(MIN_SAMPLES, sum(_count(L, wavelength, points_per_wavelength) for L in lengths))
    return _count(region_measure(spec), wavelength, points_per_wavelength, MIN_SAMPLES)
