"""Scenario configuration, pipeline runner and CSV/JSON emitters.

A scenario is a JSON document::

    {
      "id": "discs",
      "transmitter": {"kind": "disc3d", "radius": 1.0},
      "receiver": {"kind": "disc3d", "radius": 1.0, "center": [0, 0, "d"]},
      "d": 1.0,
      "wavelength": 0.2,
      "metrics": ["n_e", "n_r", "n_c", "n_h", "n_a", "ne0"],
      "sweep": {"parameter": "d", "start": 0.5, "stop": 4, "count": 4}
    }

Region objects take ``kind`` plus the shape fields of
:class:`~ndof.geometry.RegionSpec`, a ``center`` and an orientation
(``angle``/``angle_deg`` in 2D; ``normal`` with optional ``tangent``, or a
full ``frame``, in 3D). A region of kind ``"union"`` with ``parts`` is
sampled as one region. A *list* of receivers is treated as a split
receiver: one channel per part, with the eigenvalues merged afterwards.

Any center coordinate may be the string ``"d"`` or ``"-d"``; it is
replaced by the separation of the current sweep point.
"""

from __future__ import annotations

import json
import math
import os
import re
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import asymptotics, metrics, shadow
from .channel import Spectrum, channel_spectrum, merge_spectra
from .errors import ConfigError, InvalidArgument, NdofError
from .geometry import (RegionKind, RegionSpec, SampledRegion, estimate_sample_count,
                       rotation2d, sample_regions)
from .greens import Kernel, KernelVariant

__all__ = [
    "SCHEMA_VERSION",
    "DEFAULT_MAX_SAMPLES",
    "METRICS",
    "Sweep",
    "ScenarioConfig",
    "RunRecord",
    "parse_config",
    "load_config",
    "run_scenario",
    "emit_spectrum_csv",
    "emit_report_json",
    "record_to_dict",
]

SCHEMA_VERSION = 1
DEFAULT_MAX_SAMPLES = 12_000
METRICS = ("n_e", "n_r", "n_c", "n_h", "n_a", "ne0", "coupling_strength",
           "avg_level", "avg_level_asymptotic", "bounds")
_SPECTRAL = {"n_e", "n_r", "n_c", "n_h", "coupling_strength", "avg_level"}
_SWEEP_PARAMETERS = ("d", "wavelength", "beta")
_FORMATS = ("csv", "json", "both")

_SHAPE_FIELDS = {
    RegionKind.SEGMENT2D: ("length",),
    RegionKind.SEGMENT3D: ("length",),
    RegionKind.ARC2D: ("radius", "span"),
    RegionKind.POLYLINE2D: ("vertices",),
    RegionKind.DISC3D: ("radius",),
    RegionKind.RECTANGLE3D: ("width", "height"),
}
_ORIENT_FIELDS = {"center", "angle", "angle_deg", "normal", "tangent", "frame"}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _line_of(text, key):
    """1-based line of the first occurrence of ``"key"`` in ``text``."""
    if not text or key is None:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key.split(".")[-1].split("[")[0]), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


class _Ctx:
    """Raises ConfigError with the line of the offending field."""

    def __init__(self, text):
        self.text = text

    def error(self, message, path):
        raise ConfigError(message, field=path, line=_line_of(self.text, path))


def _number(ctx, value, path, positive=False, allow_d=False):
    if allow_d and value in ("d", "-d"):
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        ctx.error(f"expected a finite number, got {value!r}", path)
    if positive and not value > 0:
        ctx.error(f"must be positive, got {value!r}", path)
    return float(value)


def _vector(ctx, value, path, dim=None, allow_d=False):
    if not isinstance(value, (list, tuple)) or (dim is not None and len(value) != dim):
        want = f"{dim}-component " if dim else ""
        ctx.error(f"expected a {want}list of numbers, got {value!r}", path)
    return tuple(_number(ctx, v, f"{path}[{i}]", allow_d=allow_d) for i, v in enumerate(value))


@dataclass(frozen=True)
class RegionTemplate:
    """A region description whose center may still refer to ``d``."""

    kind: str
    params: Tuple[Tuple[str, Any], ...]
    parts: Tuple["RegionTemplate", ...] = ()

    @property
    def ambient_dim(self) -> int:
        if self.kind == "union":
            return self.parts[0].ambient_dim
        return RegionKind(self.kind).ambient_dim

    @property
    def region_dim(self) -> int:
        if self.kind == "union":
            return self.parts[0].region_dim
        return RegionKind(self.kind).region_dim

    @property
    def uses_d(self) -> bool:
        if self.kind == "union":
            return any(p.uses_d for p in self.parts)
        return any(c in ("d", "-d") for c in dict(self.params).get("center", ()))

    def resolve(self, d: Optional[float]) -> List[RegionSpec]:
        """Concrete specs (several for a union) with ``d`` substituted."""
        if self.kind == "union":
            return [s for p in self.parts for s in p.resolve(d)]
        return [_build_spec(self.kind, dict(self.params), d)]


def _frame3d(normal, tangent):
    n = np.asarray(normal, dtype=float)
    n /= np.linalg.norm(n)
    if tangent is None:
        helper = np.eye(3)[int(np.argmin(np.abs(n)))]
        t = helper - (helper @ n) * n
    else:
        t = np.asarray(tangent, dtype=float)
        t = t - (t @ n) * n
    t /= np.linalg.norm(t)
    return np.column_stack([t, np.cross(n, t), n])


def _build_spec(kind, p, d):
    kind = RegionKind(kind)
    dim = kind.ambient_dim
    center = p.get("center", (0.0,) * dim)
    center = tuple({"d": d, "-d": None if d is None else -d}.get(c, c)
                   if isinstance(c, str) else c for c in center)
    if any(c is None for c in center):
        raise InvalidArgument("center refers to 'd' but no separation is defined")
    shape = {k: p[k] for k in _SHAPE_FIELDS[kind]}
    if dim == 2:
        angle = p.get("angle", math.radians(p.get("angle_deg", 0.0)))
        frame = rotation2d(angle)
    elif "frame" in p:
        frame = np.array(p["frame"], dtype=float).T  # rows are local axes
    elif "normal" in p:
        frame = _frame3d(p["normal"], p.get("tangent"))
    else:
        frame = np.eye(3)
    if kind == RegionKind.POLYLINE2D:
        return RegionSpec(kind, vertices=shape["vertices"], origin=center, frame=frame)
    return RegionSpec(kind, origin=center, frame=frame, **shape)


def _parse_region(ctx, obj, path) -> RegionTemplate:
    if not isinstance(obj, dict):
        ctx.error("expected a region object", path)
    kind = obj.get("kind")
    if kind == "union":
        parts = obj.get("parts")
        if not isinstance(parts, list) or not parts:
            ctx.error("union needs a non-empty 'parts' list", f"{path}.parts")
        tpls = tuple(_parse_region(ctx, q, f"{path}.parts[{i}]") for i, q in enumerate(parts))
        if len({(t.ambient_dim, t.region_dim) for t in tpls}) != 1:
            ctx.error("union parts must share ambient and region dimension", f"{path}.parts")
        return RegionTemplate("union", (), tpls)
    try:
        rk = RegionKind(kind)
    except ValueError:
        ctx.error(f"unknown region kind {kind!r}; expected one of "
                  f"{[k.value for k in RegionKind] + ['union']}", f"{path}.kind")
    dim = rk.ambient_dim
    allowed = set(_SHAPE_FIELDS[rk]) | _ORIENT_FIELDS | {"kind"}
    for key in obj:
        if key not in allowed:
            ctx.error(f"unexpected key for {kind}", f"{path}.{key}")
    params = {}
    for key in _SHAPE_FIELDS[rk]:
        if key not in obj:
            ctx.error(f"{kind} needs '{key}'", f"{path}.{key}")
        if key == "vertices":
            verts = obj[key]
            if not isinstance(verts, list) or len(verts) < 2:
                ctx.error("expected a list of at least two [x, y] vertices", f"{path}.vertices")
            params[key] = tuple(_vector(ctx, v, f"{path}.vertices[{i}]", 2) for i, v in enumerate(verts))
        else:
            params[key] = _number(ctx, obj[key], f"{path}.{key}", positive=True)
    if "center" in obj:
        params["center"] = _vector(ctx, obj["center"], f"{path}.center", dim, allow_d=True)
    if dim == 2:
        for key in ("normal", "tangent", "frame"):
            if key in obj:
                ctx.error("2D regions are oriented with 'angle' or 'angle_deg'", f"{path}.{key}")
        if "angle" in obj and "angle_deg" in obj:
            ctx.error("give either 'angle' or 'angle_deg'", f"{path}.angle")
        for key in ("angle", "angle_deg"):
            if key in obj:
                params[key] = _number(ctx, obj[key], f"{path}.{key}")
    else:
        for key in ("angle", "angle_deg"):
            if key in obj:
                ctx.error("3D regions are oriented with 'normal' or 'frame'", f"{path}.{key}")
        if "frame" in obj:
            if "normal" in obj:
                ctx.error("give either 'frame' or 'normal'", f"{path}.frame")
            rows = obj["frame"]
            if not isinstance(rows, list) or len(rows) != 3:
                ctx.error("frame must list the three local axes", f"{path}.frame")
            params["frame"] = tuple(_vector(ctx, r, f"{path}.frame[{i}]", 3) for i, r in enumerate(rows))
        if "normal" in obj:
            params["normal"] = _vector(ctx, obj["normal"], f"{path}.normal", 3)
            if not np.linalg.norm(params["normal"]) > 0:
                ctx.error("normal must be non-zero", f"{path}.normal")
            if "tangent" in obj:
                params["tangent"] = _vector(ctx, obj["tangent"], f"{path}.tangent", 3)
    tpl = RegionTemplate(rk.value, tuple(sorted(params.items())))
    try:
        tpl.resolve(1.0)
    except NdofError as exc:
        ctx.error(str(exc), path)
    return tpl


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario description.

    ``receiver`` holds one template per channel; more than one means a
    split receiver whose spectra are merged. ``visible_receiver`` optionally
    replaces the receiver in the shadow and bound computations (the part
    actually seen by the transmitter).
    """

    id: str
    transmitter: RegionTemplate
    receiver: Tuple[RegionTemplate, ...]
    wavelengths: Tuple[float, ...]
    metrics: Tuple[str, ...]
    points_per_wavelength: float = 5.0
    kernel: Optional[KernelVariant] = None
    d: Optional[float] = None
    reference_length: Optional[float] = None
    sweep: Optional[Sweep] = None
    visible_receiver: Optional[RegionTemplate] = None
    transmitter_front_only: bool = False
    low_freq_correction: bool = False
    low_freq_offset: float = 1.0
    corner_fit_floor: float = metrics.CORNER_FIT_FLOOR
    max_samples: int = DEFAULT_MAX_SAMPLES
    output_dir: Optional[str] = None
    output_format: str = "both"
    description: str = ""

    @property
    def split(self) -> bool:
        return len(self.receiver) > 1

    @property
    def kernel_variant(self) -> KernelVariant:
        if self.kernel is not None:
            return self.kernel
        return KernelVariant.SCALAR3D if self.transmitter.ambient_dim == 3 else KernelVariant.SCALAR2D_EXACT

    def points(self) -> List[Dict[str, float]]:
        """Resolved ``(wavelength, d, sweep value)`` for every run, in order."""
        out = []
        sweep_values = self.sweep.values if self.sweep else (None,)
        for lam in self.wavelengths:
            for v in sweep_values:
                point = {"wavelength": lam, "d": self.d, "beta": None}
                if self.sweep is not None:
                    name = self.sweep.parameter
                    if name == "wavelength":
                        point["wavelength"] = v
                    elif name == "d":
                        point["d"] = v
                    else:
                        point["beta"] = v
                        point["d"] = self.reference_length / v
                out.append(point)
        return out


_TOP_KEYS = {"id", "description", "transmitter", "receiver", "visible_receiver", "wavelength",
             "points_per_wavelength", "kernel", "metrics", "d", "reference_length", "sweep",
             "transmitter_front_only", "low_freq_correction", "low_freq_offset",
             "corner_fit_floor", "max_samples", "output"}


def _parse_sweep(ctx, obj):
    if not isinstance(obj, dict):
        ctx.error("expected a sweep object", "sweep")
    name = obj.get("parameter")
    if name not in _SWEEP_PARAMETERS:
        ctx.error(f"sweep parameter must be one of {list(_SWEEP_PARAMETERS)}", "sweep.parameter")
    if "values" in obj:
        if any(k in obj for k in ("start", "stop", "count")):
            ctx.error("give either 'values' or 'start'/'stop'/'count'", "sweep.values")
        raw = obj["values"]
        if not isinstance(raw, list) or not raw:
            ctx.error("expected a non-empty list", "sweep.values")
        values = [_number(ctx, v, f"sweep.values[{i}]", positive=True) for i, v in enumerate(raw)]
    else:
        start = _number(ctx, obj.get("start"), "sweep.start", positive=True)
        stop = _number(ctx, obj.get("stop"), "sweep.stop", positive=True)
        count = obj.get("count")
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            ctx.error("count must be a positive integer", "sweep.count")
        spacing = obj.get("spacing", "log")
        if spacing not in ("log", "linear"):
            ctx.error("spacing must be 'log' or 'linear'", "sweep.spacing")
        if count > 1 and not stop > start:
            ctx.error("sweep range must be strictly increasing (stop > start)", "sweep.stop")
        if count == 1:
            values = [start]
        elif spacing == "log":
            values = list(np.geomspace(start, stop, count))
        else:
            values = list(np.linspace(start, stop, count))
    if any(b <= a for a, b in zip(values, values[1:])):
        ctx.error("sweep values must be strictly increasing", "sweep.values")
    return Sweep(name, tuple(float(v) for v in values))


def parse_config(obj: Dict[str, Any], text: Optional[str] = None) -> ScenarioConfig:
    """Validate a decoded scenario document.

    ``text`` is the raw source, used only to attach line numbers to errors.
    """
    ctx = _Ctx(text)
    if not isinstance(obj, dict):
        raise ConfigError("scenario must be a JSON object", line=1 if text else None)
    for key in obj:
        if key not in _TOP_KEYS:
            ctx.error("unknown key", key)
    sid = obj.get("id", "scenario")
    if not isinstance(sid, str) or not sid:
        ctx.error("id must be a non-empty string", "id")
    if "transmitter" not in obj:
        ctx.error("missing transmitter", "transmitter")
    if "receiver" not in obj:
        ctx.error("missing receiver", "receiver")
    tx = _parse_region(ctx, obj["transmitter"], "transmitter")
    rx_raw = obj["receiver"]
    if isinstance(rx_raw, list):
        if not rx_raw:
            ctx.error("receiver list is empty", "receiver")
        rx = tuple(_parse_region(ctx, r, f"receiver[{i}]") for i, r in enumerate(rx_raw))
    else:
        rx = (_parse_region(ctx, rx_raw, "receiver"),)
    vis = None
    if obj.get("visible_receiver") is not None:
        vis = _parse_region(ctx, obj["visible_receiver"], "visible_receiver")
    for t, path in [(r, "receiver") for r in rx] + ([(vis, "visible_receiver")] if vis else []):
        if t.ambient_dim != tx.ambient_dim:
            ctx.error(f"{t.ambient_dim}D receiver with {tx.ambient_dim}D transmitter", path)

    sweep = _parse_sweep(ctx, obj["sweep"]) if obj.get("sweep") is not None else None

    lam = obj.get("wavelength")
    if sweep is not None and sweep.parameter == "wavelength":
        if lam is not None:
            ctx.error("wavelength is swept; do not also give it", "wavelength")
        wavelengths = (None,)
    elif isinstance(lam, list):
        if not lam:
            ctx.error("expected a non-empty list", "wavelength")
        wavelengths = tuple(_number(ctx, v, f"wavelength[{i}]", positive=True) for i, v in enumerate(lam))
    elif lam is None:
        ctx.error("missing wavelength", "wavelength")
    else:
        wavelengths = (_number(ctx, lam, "wavelength", positive=True),)

    d = obj.get("d")
    if d is not None:
        d = _number(ctx, d, "d", positive=True)
    ref = obj.get("reference_length")
    if ref is not None:
        ref = _number(ctx, ref, "reference_length", positive=True)
    if sweep is not None and sweep.parameter == "beta" and ref is None:
        segs = [t for t in (tx,) if t.kind in ("segment2d", "segment3d")]
        if not segs:
            ctx.error("beta sweep needs 'reference_length' unless the transmitter is a segment",
                      "reference_length")
        ref = dict(segs[0].params)["length"]
    uses_d = tx.uses_d or any(r.uses_d for r in rx) or (vis is not None and vis.uses_d)
    if uses_d and d is None and (sweep is None or sweep.parameter == "wavelength"):
        ctx.error("a region center uses 'd' but neither 'd' nor a d/beta sweep is given", "d")

    names = obj.get("metrics", list(METRICS))
    if not isinstance(names, list) or not names:
        ctx.error("at least one metric must be requested", "metrics")
    for i, m in enumerate(names):
        if m not in METRICS:
            ctx.error(f"unknown metric {m!r}; expected one of {list(METRICS)}", f"metrics[{i}]")

    ppw = _number(ctx, obj.get("points_per_wavelength", 5.0), "points_per_wavelength", positive=True)
    if ppw < 2:
        ctx.error("points_per_wavelength must be >= 2", "points_per_wavelength")
    kernel = obj.get("kernel")
    if kernel is not None:
        try:
            kernel = KernelVariant(kernel)
        except ValueError:
            ctx.error(f"unknown kernel {kernel!r}; expected one of "
                      f"{[k.value for k in KernelVariant]}", "kernel")
        if kernel.ambient_dim != tx.ambient_dim:
            ctx.error(f"{kernel.value} kernel does not match {tx.ambient_dim}D regions", "kernel")

    max_samples = obj.get("max_samples", DEFAULT_MAX_SAMPLES)
    if isinstance(max_samples, bool) or not isinstance(max_samples, int) or max_samples < 1:
        ctx.error("max_samples must be a positive integer", "max_samples")
    floor = _number(ctx, obj.get("corner_fit_floor", metrics.CORNER_FIT_FLOOR),
                    "corner_fit_floor", positive=True)
    if floor >= 1:
        ctx.error("corner_fit_floor must be below 1", "corner_fit_floor")

    flags = {}
    for key in ("transmitter_front_only", "low_freq_correction"):
        v = obj.get(key, False)
        if not isinstance(v, bool):
            ctx.error("expected true or false", key)
        flags[key] = v
    offset = _number(ctx, obj.get("low_freq_offset", 1.0), "low_freq_offset")

    out_dir, fmt = None, "both"
    if obj.get("output") is not None:
        out = obj["output"]
        if not isinstance(out, dict):
            ctx.error("expected an object with 'directory' and/or 'format'", "output")
        out_dir = out.get("directory")
        if out_dir is not None and not isinstance(out_dir, str):
            ctx.error("expected a path string", "output.directory")
        fmt = out.get("format", "both")
        if fmt not in _FORMATS:
            ctx.error(f"format must be one of {list(_FORMATS)}", "output.format")
    description = obj.get("description", "")
    if not isinstance(description, str):
        ctx.error("expected a string", "description")

    return ScenarioConfig(
        id=sid, transmitter=tx, receiver=rx, wavelengths=wavelengths,
        metrics=tuple(dict.fromkeys(names)), points_per_wavelength=ppw, kernel=kernel,
        d=d, reference_length=ref, sweep=sweep, visible_receiver=vis,
        low_freq_offset=offset, corner_fit_floor=floor, max_samples=max_samples,
        output_dir=out_dir, output_format=fmt, description=description, **flags)


def load_config(source: str) -> ScenarioConfig:
    """Parse a scenario from a file path or from JSON text."""
    text = source
    if not source.lstrip().startswith("{"):
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read scenario file {source!r}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    return parse_config(obj, text)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

@dataclass
class RunRecord:
    """Outcome of one sweep point.

    ``spectrum`` is None when only geometric metrics were requested.
    ``values`` holds every emitted quantity (None where not applicable).
    """

    scenario: str
    index: int
    params: Dict[str, Optional[float]]
    spectrum: Optional[Spectrum]
    report: Optional[metrics.NdofReport]
    values: Dict[str, Any]
    elapsed: float = field(default=0.0, compare=False)


def _count_samples(templates, lam, ppw):
    return sum(estimate_sample_count(s, lam, ppw) for t in templates for s in t.resolve(1.0))


def _guard_size(cfg: ScenarioConfig, lam: float):
    n_t = _count_samples([cfg.transmitter], lam, cfg.points_per_wavelength)
    parts = [_count_samples([r], lam, cfg.points_per_wavelength) for r in cfg.receiver]
    n_r = max(parts) if cfg.split else parts[0]
    if max(n_t, n_r) > cfg.max_samples:
        mem = 16 * n_t * n_r / 2 ** 20
        raise ConfigError(
            f"scenario {cfg.id!r} at wavelength {lam:g} needs {n_t} x {n_r} samples "
            f"(~{mem:.0f} MiB channel matrix), above the cap of {cfg.max_samples} per side; "
            "raise 'max_samples' or lower the resolution", field="max_samples")


def _ne0(tx_specs, rx_specs, T, R, lam, tol=1e-9):
    """Closed-form effective NDoF when the pair matches a known geometry."""
    if len(tx_specs) != 1 or len(rx_specs) != 1:
        return None
    a, b = tx_specs[0], rx_specs[0]
    offset = b.origin_vector - a.origin_vector
    if a.kind == b.kind and a.kind in (RegionKind.SEGMENT2D, RegionKind.SEGMENT3D):
        ta, tb = a.frame_matrix[:, 0], b.frame_matrix[:, 0]
        dist = float(np.linalg.norm(offset))
        if (math.isclose(a.length, b.length, rel_tol=tol) and abs(abs(ta @ tb) - 1) < tol
                and dist > 0 and abs(ta @ offset) < tol * dist):
            f = asymptotics.ne0_lines_3d if a.ambient_dim == 3 else asymptotics.ne0_lines_2d
            return f(a.length, dist, lam)
        return None
    planar = (RegionKind.DISC3D, RegionKind.RECTANGLE3D)
    if a.kind in planar and b.kind in planar:
        na, nb = a.frame_matrix[:, 2], b.frame_matrix[:, 2]
        if abs(abs(na @ nb) - 1) < tol:
            d = abs(float(na @ offset))
            if d > 0:
                return asymptotics.ne0_planar(T, R, d, lam)
    return None


def _coaxial_discs(tx_specs, rx_specs, tol=1e-9):
    if len(tx_specs) != 1 or len(rx_specs) != 1:
        return None
    a, b = tx_specs[0], rx_specs[0]
    if a.kind != RegionKind.DISC3D or b.kind != RegionKind.DISC3D:
        return None
    na, nb = a.frame_matrix[:, 2], b.frame_matrix[:, 2]
    offset = b.origin_vector - a.origin_vector
    d = float(np.linalg.norm(offset))
    if d > 0 and abs(abs(na @ nb) - 1) < tol and abs(abs(na @ offset) - d) < tol * d:
        return a.radius, b.radius, d
    return None


def _shadow_ndof(cfg, tx_specs, T, vis_specs, V, lam):
    """Shadow NDoF (None when the region pair has no shadow measure)."""
    if T.region_dim != V[0].region_dim:
        return None
    discs = _coaxial_discs(tx_specs, vis_specs[0]) if len(V) == 1 else None
    if discs is not None:
        measure = shadow.shadow_two_discs(*discs)
    elif T.region_dim == 2 and T.ambient_dim == 3:
        measure = sum(shadow.shadow_area(T, R, front_only=cfg.transmitter_front_only) for R in V)
    elif T.region_dim == 1:
        measure = sum(shadow.shadow_length(T, R, front_only=cfg.transmitter_front_only) for R in V)
    else:
        return None
    dim = 3 if T.region_dim == 2 else 2
    return shadow.shadow_ndof(measure, lam, dim, cfg.low_freq_correction, cfg.low_freq_offset)


def _run_point(cfg: ScenarioConfig, index: int, point: Dict[str, Optional[float]]) -> RunRecord:
    t0 = time.perf_counter()
    lam, d = point["wavelength"], point["d"]
    ppw = cfg.points_per_wavelength
    wanted = set(cfg.metrics)
    tx_specs = cfg.transmitter.resolve(d)
    rx_specs = [r.resolve(d) for r in cfg.receiver]
    T = sample_regions(tx_specs, lam, ppw)
    Rs = [sample_regions(s, lam, ppw) for s in rx_specs]
    if cfg.visible_receiver is not None:
        vis_specs = [cfg.visible_receiver.resolve(d)]
        V = [sample_regions(vis_specs[0], lam, ppw)]
    else:
        vis_specs, V = rx_specs, Rs

    spectrum = None
    if wanted & _SPECTRAL:
        kernel = Kernel.for_wavelength(cfg.kernel_variant, lam)
        parts = [channel_spectrum(T, R, kernel)[0] for R in Rs]
        spectrum = merge_spectra(parts) if cfg.split else parts[0]

    n_a = None
    if wanted & {"n_a", "avg_level"}:
        n_a = _shadow_ndof(cfg, tx_specs, T, vis_specs, V, lam)
    bounds = None
    if "bounds" in wanted:
        bounds = metrics.eig_level_bounds(T, SampledRegion.union(*V) if len(V) > 1 else V[0])

    values: Dict[str, Any] = {k: None for k in METRICS}
    report = None
    if spectrum is not None:
        # the shadow offset is for display; level normalisation uses the bare measure
        bare = None
        if n_a is not None:
            bare = n_a - (cfg.low_freq_offset if cfg.low_freq_correction else 0.0)
        report = metrics.build_report(spectrum, n_a=bare if bare and bare > 0 else None,
                                      bounds=bounds, fit_floor=cfg.corner_fit_floor)
        values.update(n_e=report.n_e, n_r=report.n_r, n_c=report.n_c, n_h=report.n_h,
                      coupling_strength=report.coupling_strength, avg_level=report.avg_level)
        values["corner_confident"] = report.corner_confident
    values["n_a"] = n_a
    values["bounds"] = list(bounds) if bounds is not None else None
    if "ne0" in wanted and not cfg.split:
        values["ne0"] = _ne0(tx_specs, rx_specs[0], T, Rs[0], lam)
    if "avg_level_asymptotic" in wanted and len(V) == 1:
        values["avg_level_asymptotic"] = metrics.average_channel_strength(T, V[0])
    for key in METRICS:
        if key not in wanted:
            values[key] = None
    values["n_samples"] = [len(T), sum(len(R) for R in Rs)]
    return RunRecord(cfg.id, index, dict(point), spectrum, report, values,
                     time.perf_counter() - t0)


def run_scenario(config: ScenarioConfig) -> List[RunRecord]:
    """Evaluate every sweep point of ``config`` in order.

    The pipeline has no randomness, so identical configs give identical
    records (apart from ``elapsed``). Errors are re-raised with the
    scenario id and sweep point prepended.
    """
    points = config.points()
    for lam in sorted({p["wavelength"] for p in points}):
        _guard_size(config, lam)
    records = []
    for i, point in enumerate(points):
        try:
            records.append(_run_point(config, i, point))
        except NdofError as exc:
            shown = ", ".join(f"{k}={v:g}" for k, v in point.items() if v is not None)
            exc.args = (f"scenario {config.id!r} ({shown}): {exc}",) + exc.args[1:]
            raise
    return records


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _safe_name(text):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("_") or "scenario"


def spectrum_csv_path(record: RunRecord, directory: str) -> str:
    return os.path.join(directory, f"{_safe_name(record.scenario)}_{record.index:03d}.csv")


def emit_spectrum_csv(record: RunRecord, path: str, max_modes: Optional[int] = None) -> int:
    """Write ``n, zeta, zeta_normalized`` for every retained eigenvalue.

    ``max_modes`` truncates the rows for plotting; metrics are unaffected
    because they were computed before. Returns the number of data rows.
    """
    if record.spectrum is None:
        raise InvalidArgument(f"record {record.scenario!r}/{record.index} has no spectrum")
    s = record.spectrum
    keep = int(np.count_nonzero(s.values > 0))
    if max_modes is not None:
        keep = min(keep, max_modes)
    zeta = s.values[:keep]
    norm = metrics.normalized_values(s)[:keep]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("n,zeta,zeta_normalized\n")
        for n, (z, zn) in enumerate(zip(zeta, norm), start=1):
            fh.write(f"{n},{float(z)!r},{float(zn)!r}\n")
    return keep


def _jsonable(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else None


def record_to_dict(record: RunRecord) -> Dict[str, Any]:
    v = record.values
    if v.get("n_e") is not None and v.get("n_r") is not None:
        assert v["n_r"] >= v["n_e"] - 1e-9 * max(1.0, v["n_e"]), "effective rank below effective NDoF"
    out = {
        "scenario": record.scenario,
        "index": record.index,
        "lambda": record.params.get("wavelength"),
        "d": record.params.get("d"),
        "beta": record.params.get("beta"),
    }
    for key in METRICS:
        out[key] = v.get(key)
    out["corner_confident"] = v.get("corner_confident")
    out["n_samples"] = v.get("n_samples")
    out["n_modes"] = len(record.spectrum) if record.spectrum is not None else None
    return {k: _jsonable(x) for k, x in out.items()}


def emit_report_json(records: Sequence[RunRecord], path: str, timing: bool = True) -> None:
    """Write all records as one JSON document (schema ``SCHEMA_VERSION``).

    Inapplicable or unrequested values are ``null``; an infinite bound is
    also written as ``null``. ``timing`` adds per-record elapsed seconds,
    which is the only non-deterministic content.
    """
    doc = {"schema_version": SCHEMA_VERSION, "records": []}
    for r in records:
        entry = record_to_dict(r)
        if timing:
            entry["timing"] = {"elapsed_s": round(r.elapsed, 3)}
        doc["records"].append(entry)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
