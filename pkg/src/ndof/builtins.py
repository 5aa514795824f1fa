"""Registry of built-in scenarios.

Each builtin is a list of scenario documents in the same JSON form that
:func:`ndof.scenarios.parse_config` accepts, so ``--scenario name`` and a
file with the same content behave identically. Where the reference
geometry needs far more samples than fit in desk memory, the builtin is a
scaled-down variant; the docstring of each factory states the scaling and
the expected headline numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List

__all__ = ["Builtin", "BUILTINS", "get_builtin", "builtin_names"]

_ALL_2D = ["n_e", "n_r", "n_c", "n_a", "coupling_strength", "avg_level", "bounds"]


@dataclass(frozen=True)
class Builtin:
    name: str
    summary: str
    expected: str
    factory: Callable[[], List[dict]]

    def configs(self) -> List[dict]:
        return self.factory()


def _disc(radius, z=0.0):
    c = [0.0, 0.0, "d"] if z == "d" else [0.0, 0.0, z]
    return {"kind": "disc3d", "radius": radius, "center": c}


def _fig1_discs():
    """Coaxial discs, receiver radius a in {10, 50} wavelengths, transmitter
    radius r in {1, 8} a, separation d = a.

    Only the r = a = 10 wavelength case fits under the default sample cap;
    the others are rejected with a size estimate.
    """
    out = []
    for a_over_lam in (10, 50):
        for r_over_a in (1, 8):
            out.append({
                "id": f"fig1_discs/r{r_over_a}a_a{a_over_lam}lambda",
                "transmitter": _disc(float(r_over_a)),
                "receiver": _disc(1.0, "d"),
                "d": 1.0,
                "wavelength": 1.0 / a_over_lam,
                "metrics": ["n_e", "n_r", "n_c", "n_h", "n_a", "coupling_strength", "avg_level"],
            })
    return out


def _fig1_discs_desk():
    """Desk-scale coaxial discs: a = 5 wavelengths, r in {1, 2} a, d = a."""
    return [{
        "id": f"fig1_discs_desk/r{k}a",
        "transmitter": _disc(float(k)),
        "receiver": _disc(1.0, "d"),
        "d": 1.0,
        "wavelength": 0.2,
        "metrics": ["n_e", "n_r", "n_c", "n_h", "n_a", "ne0", "coupling_strength",
                    "avg_level", "avg_level_asymptotic"],
    } for k in (1, 2)]


def _fig3_discs_lines():
    """NDoF against electrical size for equal coaxial discs in 3D (d = a)
    and equal parallel lines in 2D (d = l), with the +1 low-frequency
    shadow correction. Sizes reach a = 5 and l = 100 wavelengths.
    """
    discs = {
        "id": "fig3_discs_lines/discs",
        "transmitter": _disc(1.0),
        "receiver": _disc(1.0, "d"),
        "d": 1.0,
        "sweep": {"parameter": "wavelength", "start": 0.2, "stop": 2.0, "count": 6},
        "low_freq_correction": True,
        "metrics": ["n_e", "n_r", "n_c", "n_h", "n_a", "coupling_strength"],
    }
    lines = {
        "id": "fig3_discs_lines/lines2d",
        "transmitter": {"kind": "segment2d", "length": 1.0},
        "receiver": {"kind": "segment2d", "length": 1.0, "center": [0.0, "d"]},
        "d": 1.0,
        "sweep": {"parameter": "wavelength", "start": 0.01, "stop": 1.0, "count": 7},
        "low_freq_correction": True,
        "metrics": ["n_e", "n_r", "n_c", "n_a", "ne0", "coupling_strength"],
    }
    return [discs, lines]


def _lines3d(sid, wavelength, sweep, metrics):
    return {
        "id": sid,
        "transmitter": {"kind": "segment3d", "length": 1.0},
        "receiver": {"kind": "segment3d", "length": 1.0, "center": [0.0, 0.0, "d"]},
        "wavelength": wavelength,
        "sweep": sweep,
        "metrics": metrics,
    }


def _fig4_lines():
    """Equal parallel lines in 3D, d/l from 0.1 to 10, wavelengths
    {1, 2, 4} x 0.01 l; emits numerical N_e next to the closed-form ne0.
    """
    return [_lines3d("fig4_lines", [0.01, 0.02, 0.04],
                     {"parameter": "d", "start": 0.1, "stop": 10.0, "count": 9},
                     ["n_e", "n_r", "n_c", "n_a", "ne0", "coupling_strength"])]


def _fig5_lines_spectra():
    """Spectra of equal parallel 3D lines at wavelength 0.001 l for
    d/l in {0.1, 0.3, 1, 3, 10} (5000 samples per side)."""
    return [_lines3d("fig5_lines_spectra", 0.001,
                     {"parameter": "d", "values": [0.1, 0.3, 1.0, 3.0, 10.0]},
                     ["n_e", "n_r", "n_c", "n_a", "ne0", "coupling_strength"])]


def _fig6_discs():
    """Equal coaxial discs, d/a in {0.1, ..., 3.2}, at a = {2.5, 5}
    wavelengths (a desk-scale stand-in for a = 25 to 100 wavelengths).
    """
    return [{
        "id": "fig6_discs",
        "transmitter": _disc(1.0),
        "receiver": _disc(1.0, "d"),
        "wavelength": [0.4, 0.2],
        "sweep": {"parameter": "d", "values": [0.1, 0.2, 0.4, 0.8, 1.6, 3.2]},
        "metrics": ["n_e", "n_r", "n_c", "n_h", "n_a", "ne0", "coupling_strength",
                    "avg_level", "avg_level_asymptotic"],
    }]


# four receivers with one common shadow length, transmitter l = 1 on y = 0
_F7_X0 = 2.25


def _f7_shoulders():
    return [{"kind": "segment2d", "length": 5.0 - _F7_X0, "center": [-(5.0 + _F7_X0) / 2, 1.0]},
            {"kind": "segment2d", "length": 5.0 - _F7_X0, "center": [(5.0 + _F7_X0) / 2, 1.0]}]


def _f7_arc():
    return {"kind": "arc2d", "radius": math.hypot(1.0, _F7_X0), "span": 2 * math.atan(_F7_X0)}


def _fig7_cases():
    """Transmitter line l, wavelength 0.002 l, receivers with equal shadow
    length (N_a ~ 980):

    a. parallel line of length 10 l at d = l (N_e ~ 0.4 N_a, N_r ~ 0.66 N_a,
       normalised zeta_1 ~ 25 under the bound 31.25)
    b. concentric arc through the ends of (a) (N_e ~ 0.84 N_a, N_r ~ 0.93 N_a,
       zeta_1 ~ 5 under the bound 5.6)
    c. flat shoulders |x| >= 2.25 l joined by a concentric arc
    d. as (c) with shoulders and arc as separate channels, eigenvalues merged
    """
    base = {
        "transmitter": {"kind": "segment2d", "length": 1.0},
        "wavelength": 0.002,
        "max_samples": 40_000,
        "metrics": _ALL_2D,
    }
    hybrid = {"kind": "union", "parts": _f7_shoulders() + [_f7_arc()]}
    cases = {
        "a": {"receiver": {"kind": "segment2d", "length": 10.0, "center": [0.0, 1.0]}},
        "b": {"receiver": {"kind": "arc2d", "radius": math.sqrt(26.0), "span": 2 * math.atan(5.0)}},
        "c": {"receiver": hybrid},
        "d": {"receiver": [{"kind": "union", "parts": _f7_shoulders()}, _f7_arc()]},
    }
    return [dict(base, id=f"fig7_cases/{k}", **v) for k, v in cases.items()]


def _square(side, y_front, turn=0.0):
    """Closed square polyline; the unrotated one has its front edge on y_front."""
    cy = y_front + 0.5
    verts = []
    for k in range(5):
        ang = turn + math.pi / 4 + k * math.pi / 2
        verts.append([side / math.sqrt(2) * math.cos(ang), cy + side / math.sqrt(2) * math.sin(ang)])
    return {"kind": "polyline2d", "vertices": verts}


def _fig8_squares():
    """Six receivers with shadow length ~0.138 l (N_a ~ 69 at wavelength
    0.002 l, a half-resolution stand-in for 0.001 l) facing a line l:

    a. parallel line offset sideways by 2 l, 6.24 l away
    b. parallel line 7.21 l away (flat spectrum, N_e ~ N_a)
    c. line tilted by 30 degrees, 6.25 l away
    d. short line (0.271 l) close by at (l, l), tilted by -45 degrees
    e. three nested squares behind the front edge of (b)
    f. unit square behind the front edge of (b) (N_e in 0.3-0.5 N_a)

    For (e) and (f) the shadow uses only the visible front edge.
    """
    d_b = 7.211876811594203
    front = {"kind": "segment2d", "length": 1.0, "center": [0.0, d_b]}
    base = {
        "transmitter": {"kind": "segment2d", "length": 1.0},
        "wavelength": 0.002,
        "max_samples": 25_000,
        "metrics": _ALL_2D,
    }
    cases = {
        "a": {"receiver": {"kind": "segment2d", "length": 1.0, "center": [2.0, 6.24]}},
        "b": {"receiver": front},
        "c": {"receiver": {"kind": "segment2d", "length": 1.0, "center": [0.0, 6.25], "angle_deg": 30.0}},
        "d": {"receiver": {"kind": "segment2d", "length": 0.271, "center": [1.0, 1.0], "angle_deg": -45.0}},
        "e": {"receiver": {"kind": "union", "parts": [
                  _square(1.0, d_b), _square(1 / math.sqrt(2), d_b, math.pi / 4), _square(0.5, d_b)]},
              "visible_receiver": front},
        "f": {"receiver": _square(1.0, d_b), "visible_receiver": front},
    }
    return [dict(base, id=f"fig8_squares/{k}", **v) for k, v in cases.items()]


BUILTINS: Dict[str, Builtin] = {b.name: b for b in [
    Builtin("fig1_discs", "coaxial discs r in {1,8}a, a in {10,50} wavelengths, d = a",
            "corners near N_a = 377, 9425, 972, 24289", _fig1_discs),
    Builtin("fig1_discs_desk", "coaxial discs a = 5 wavelengths, r in {1,2}a, d = a",
            "corner near N_a = 94.3 for r = a", _fig1_discs_desk),
    Builtin("fig3_discs_lines", "NDoF against size for discs (3D) and lines (2D)",
            "N_e < N_r < N_a ~ N_c for large sizes", _fig3_discs_lines),
    Builtin("fig4_lines", "3D parallel lines, d/l sweep at three wavelengths",
            "N_e within ~10% of ne0 at 0.01 l", _fig4_lines),
    Builtin("fig5_lines_spectra", "3D parallel line spectra at wavelength 0.001 l",
            "corner at n ~ N_a for every d", _fig5_lines_spectra),
    Builtin("fig6_discs", "equal discs, d/a sweep", "ne0 <= N_a, N_c ~ N_a", _fig6_discs),
    Builtin("fig7_cases", "line transmitter, four receivers with equal shadow length",
            "(a) N_e ~ 0.40 N_a, (b) N_e ~ 0.84 N_a, N_r ~ 0.93 N_a", _fig7_cases),
    Builtin("fig8_squares", "line transmitter, six receivers with N_a ~ 69",
            "(f) N_e ~ 0.3-0.5 N_a", _fig8_squares),
]}


def builtin_names() -> List[str]:
    return list(BUILTINS)


def get_builtin(name: str) -> Builtin:
    try:
        return BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; available: {', '.join(BUILTINS)}") from None
