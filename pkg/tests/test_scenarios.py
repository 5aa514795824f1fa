import csv
import json
import math

import numpy as np
import pytest

from ndof import scenarios
from ndof.builtins import BUILTINS
from ndof.channel import Spectrum
from ndof.errors import ConfigError
from ndof.metrics import NdofReport
from ndof.scenarios import (RunRecord, emit_report_json, emit_spectrum_csv, load_config,
                            parse_config, run_scenario)

LINES_2D = {
    "id": "lines",
    "transmitter": {"kind": "segment2d", "length": 1.0},
    "receiver": {"kind": "segment2d", "length": 1.0, "center": [0.0, "d"]},
    "d": 1.0,
    "wavelength": 0.05,
    "metrics": ["n_e", "n_r", "n_c", "n_a", "ne0", "coupling_strength", "avg_level", "bounds"],
}


def cfg(**over):
    doc = json.loads(json.dumps(LINES_2D))
    doc.update(over)
    return doc


def test_single_point_record():
    (rec,) = run_scenario(parse_config(cfg()))
    v = rec.values
    assert rec.params == {"wavelength": 0.05, "d": 1.0, "beta": None}
    assert v["n_a"] == pytest.approx(2 * (math.sqrt(2) - 1) / 0.05, rel=2e-3)
    assert v["n_r"] >= v["n_e"]
    assert v["ne0"] is not None and v["ne0"] < v["n_a"]
    assert v["coupling_strength"] == pytest.approx(rec.spectrum.sum)
    lo, hi = v["bounds"]
    assert lo <= v["avg_level"] <= hi


def test_d_sweep_monotone_shadow():
    doc = cfg(sweep={"parameter": "d", "start": 0.5, "stop": 4.0, "count": 4}, metrics=["n_a"])
    doc.pop("d")
    recs = run_scenario(parse_config(doc))
    assert [r.params["d"] for r in recs] == pytest.approx(list(np.geomspace(0.5, 4.0, 4)))
    na = [r.values["n_a"] for r in recs]
    assert all(b < a for a, b in zip(na, na[1:]))
    assert all(r.spectrum is None for r in recs)


def test_beta_sweep_sets_distance():
    doc = cfg(sweep={"parameter": "beta", "values": [0.5, 1.0, 2.0]}, metrics=["ne0"])
    doc.pop("d")
    recs = run_scenario(parse_config(doc))
    assert [r.params["d"] for r in recs] == pytest.approx([2.0, 1.0, 0.5])


def test_wavelength_grid_with_sweep():
    doc = cfg(wavelength=[0.1, 0.05], sweep={"parameter": "d", "values": [1.0, 2.0]}, metrics=["n_a"])
    recs = run_scenario(parse_config(doc))
    assert [(r.params["wavelength"], r.params["d"]) for r in recs] == [
        (0.1, 1.0), (0.1, 2.0), (0.05, 1.0), (0.05, 2.0)]


def test_wavelength_sweep():
    doc = cfg(sweep={"parameter": "wavelength", "start": 0.05, "stop": 0.2, "count": 3}, metrics=["n_e"])
    doc.pop("wavelength")
    recs = run_scenario(parse_config(doc))
    assert [r.params["wavelength"] for r in recs] == pytest.approx([0.05, 0.1, 0.2])


def test_split_receiver_merges():
    doc = cfg(receiver=[{"kind": "segment2d", "length": 0.5, "center": [-0.25, 1.0]},
                        {"kind": "segment2d", "length": 0.5, "center": [0.25, 1.0]}],
              metrics=["n_e", "n_a", "ne0"])
    (rec,) = run_scenario(parse_config(doc))
    assert set(rec.spectrum.sources) == {0, 1}
    assert rec.values["ne0"] is None
    (joint,) = run_scenario(parse_config(cfg(metrics=["n_a"])))
    assert rec.values["n_a"] == pytest.approx(joint.values["n_a"], rel=1e-9)


def test_union_region_and_visible_override():
    square = {"kind": "polyline2d", "vertices": [[-0.5, 2], [0.5, 2], [0.5, 3], [-0.5, 3], [-0.5, 2]]}
    front = {"kind": "segment2d", "length": 1.0, "center": [0.0, 2.0]}
    doc = cfg(receiver=square, visible_receiver=front, metrics=["n_a", "n_e"])
    doc.pop("d")
    (rec,) = run_scenario(parse_config(doc))
    assert rec.values["n_a"] == pytest.approx(2 * (math.sqrt(5) - 2) / 0.05, rel=2e-3)


def test_discs_use_closed_form_shadow():
    doc = {"transmitter": {"kind": "disc3d", "radius": 1.0},
           "receiver": {"kind": "disc3d", "radius": 1.0, "center": [0, 0, "d"]},
           "d": 1.0, "wavelength": 0.5, "metrics": ["n_a", "n_h", "ne0"]}
    (rec,) = run_scenario(parse_config(doc))
    assert rec.values["n_a"] == pytest.approx(math.pi ** 2 * (3 - math.sqrt(5)) / 2 / 0.25)
    assert rec.values["n_h"] is not None


def test_deterministic_output(tmp_path):
    config = parse_config(cfg())
    paths = []
    for k in range(2):
        recs = run_scenario(config)
        p = tmp_path / f"r{k}.json"
        emit_report_json(recs, p, timing=False)
        c = tmp_path / f"r{k}.csv"
        emit_spectrum_csv(recs[0], c)
        paths.append((p.read_bytes(), c.read_bytes()))
    assert paths[0] == paths[1]


def test_csv_round_trip(tmp_path):
    (rec,) = run_scenario(parse_config(cfg()))
    path = tmp_path / "s.csv"
    rows = emit_spectrum_csv(rec, path)
    with open(path) as fh:
        data = list(csv.DictReader(fh))
    assert rows == len(data) == len(rec.spectrum.retained())
    zeta = np.array([float(r["zeta"]) for r in data])
    np.testing.assert_allclose(zeta, rec.spectrum.retained(), rtol=1e-12)
    norm = np.array([float(r["zeta_normalized"]) for r in data])
    np.testing.assert_allclose(norm, (4 * math.pi) ** 2 * zeta / 0.05 ** 2, rtol=1e-12)
    assert [int(r["n"]) for r in data] == list(range(1, rows + 1))


def test_csv_truncation_does_not_touch_metrics(tmp_path):
    (rec,) = run_scenario(parse_config(cfg()))
    before = dict(rec.values)
    assert emit_spectrum_csv(rec, tmp_path / "t.csv", max_modes=5) == 5
    assert rec.values == before


def test_flat_spectrum_csv(tmp_path):
    s = Spectrum(np.full(10, 0.25), 1.0)
    rec = RunRecord("flat", 0, {"wavelength": 1.0, "d": None, "beta": None}, s,
                    NdofReport(1.0, 10.0, 10.0), {"n_e": 10.0, "n_r": 10.0})
    emit_spectrum_csv(rec, tmp_path / "f.csv")
    with open(tmp_path / "f.csv") as fh:
        zs = {row["zeta"] for row in csv.DictReader(fh)}
    assert zs == {"0.25"}


def test_json_nulls_and_schema(tmp_path):
    (rec,) = run_scenario(parse_config(cfg()))
    emit_report_json([rec], tmp_path / "r.json")
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["schema_version"] == scenarios.SCHEMA_VERSION
    r = doc["records"][0]
    assert r["n_h"] is None  # 2D
    assert r["avg_level_asymptotic"] is None  # not requested
    for key in ("lambda", "d", "n_e", "n_r", "n_c", "n_a", "ne0", "coupling_strength"):
        assert isinstance(r[key], (int, float)) and math.isfinite(r[key])


def test_json_rejects_jensen_violation(tmp_path):
    rec = RunRecord("bad", 0, {"wavelength": 1.0}, None, None, {"n_e": 3.0, "n_r": 2.0})
    with pytest.raises(AssertionError):
        emit_report_json([rec], tmp_path / "bad.json")


def test_size_guard():
    doc = cfg(wavelength=1e-4)
    with pytest.raises(ConfigError, match="MiB"):
        run_scenario(parse_config(doc))
    doc["max_samples"] = 50
    doc["wavelength"] = 0.05
    with pytest.raises(ConfigError, match="cap of 50"):
        run_scenario(parse_config(doc))


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d.pop("transmitter"), "transmitter"),
    (lambda d: d.update(metrics=[]), "metrics"),
    (lambda d: d.update(metrics=["n_x"]), "metrics[0]"),
    (lambda d: d.update(wavelength=-1), "wavelength"),
    (lambda d: d.update(sweep={"parameter": "d", "start": 2, "stop": 1, "count": 3}), "sweep.stop"),
    (lambda d: d.update(sweep={"parameter": "d", "values": [1, 3, 2]}), "sweep.values"),
    (lambda d: d.update(sweep={"parameter": "q", "values": [1]}), "sweep.parameter"),
    (lambda d: d["receiver"].update(kind="sphere"), "receiver.kind"),
    (lambda d: d["receiver"].update(length=0), "receiver.length"),
    (lambda d: d["receiver"].update(normal=[0, 0, 1]), "receiver.normal"),
    (lambda d: d.update(kernel="scalar3d"), "kernel"),
    (lambda d: d.pop("d"), "d"),
    (lambda d: d.update(bogus=1), "bogus"),
    (lambda d: d.update(points_per_wavelength=1), "points_per_wavelength"),
])
def test_config_errors_name_the_field(mutate, field):
    doc = cfg()
    mutate(doc)
    with pytest.raises(ConfigError) as info:
        parse_config(doc)
    assert info.value.field == field


def test_config_error_line_numbers(tmp_path):
    text = json.dumps(cfg(), indent=2).replace('"length": 1.0,\n    "center"', '"length": -1.0,\n    "center"')
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(ConfigError) as info:
        load_config(str(path))
    line = info.value.line
    assert line is not None and '"length"' in text.splitlines()[line - 1]
    assert str(info.value).startswith(f"line {line}")


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "id": "x",\n  "wavelength": ,\n}')
    with pytest.raises(ConfigError) as info:
        load_config(str(path))
    assert info.value.line == 3


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/scenario.json")


def test_3d_orientation_forms():
    base = {"transmitter": {"kind": "rectangle3d", "width": 1.0, "height": 1.0},
            "wavelength": 0.25, "metrics": ["n_a"]}
    a = dict(base, receiver={"kind": "rectangle3d", "width": 1.0, "height": 1.0,
                             "center": [0, 0, 2], "normal": [0, 0, 1], "tangent": [1, 0, 0]})
    b = dict(base, receiver={"kind": "rectangle3d", "width": 1.0, "height": 1.0,
                             "center": [0, 0, 2], "frame": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})
    va = run_scenario(parse_config(a))[0].values["n_a"]
    vb = run_scenario(parse_config(b))[0].values["n_a"]
    assert va == pytest.approx(vb)


@pytest.mark.parametrize("name", list(BUILTINS))
def test_builtins_parse(name):
    docs = BUILTINS[name].configs()
    assert docs
    for doc in docs:
        config = parse_config(doc)
        assert config.metrics
        assert config.id.startswith(name)


def test_fig7_builtin_shadow_lengths_agree():
    # geometry only: all four receivers share one shadow length
    values = []
    for doc in BUILTINS["fig7_cases"].configs():
        doc = dict(doc, metrics=["n_a"], wavelength=0.02)
        values.append(run_scenario(parse_config(doc))[0].values["n_a"])
    assert max(values) / min(values) - 1 < 2e-3
