"""Command-line entry points, exercised in process through main(argv).

Each command is checked against the library call it wraps, and the JSON
report envelope (schema version, manifest hashes, inputs/outputs) is
validated on real files in a temp directory.
"""

import hashlib
import json

import numpy as np
import pytest

from regscan import __version__
from regscan.cli import main
from regscan.dyadic import count_bound
from regscan.fieldio import read_field, write_field
from regscan.grid import Box3, Cylinder, SpaceTimeField, VectorGrid
from regscan.localquant import AnalysisConfig, quant_report
from regscan.lorentz import weak_norm


@pytest.fixture(scope="module")
def field_file(tmp_path_factory):
    """A smooth solenoidal 4-frame field on [0,1]^3, written to disk."""
    box = Box3((0, 0, 0), (1, 1, 1), (32, 32, 32))
    tp = 2 * np.pi
    base = VectorGrid.sample(box, lambda x, y, z: (
        np.sin(tp * x) * np.cos(tp * y),
        -np.cos(tp * x) * np.sin(tp * y),
        0.3 * np.ones_like(z))).stack()
    times = np.linspace(0.0, 0.15, 4)
    field = SpaceTimeField(tuple(times), [
        VectorGrid.from_array(box, (1.0 + 0.5 * t) * base) for t in times])
    path = tmp_path_factory.mktemp("cli") / "field.rsf"
    write_field(path, field)
    return str(path), field


def run_json(capsys, argv):
    rc = main(argv + ["--json"])
    out = capsys.readouterr().out
    assert rc == 0
    return json.loads(out)


def test_count_bound_document(capsys):
    doc = run_json(capsys, ["count-bound", "--M", "1.0", "--eps", "0.1"])
    assert doc["kind"] == "count-bound"
    assert doc["schema_version"] == 1
    assert doc["payload"]["bound"] == 10001000.0
    assert doc["payload"]["bound_int"] == 10001000
    man = doc["manifest"]
    assert man["command"] == "count-bound"
    assert man["config"]["M"] == 1.0 and man["config"]["eps"] == 0.1
    assert len(man["config_hash"]) == 64
    assert man["inputs"] == {} and man["outputs"] == []
    assert man["version"] == __version__
    assert man["wall_time_s"] >= 0.0


def test_count_bound_summary_lines(capsys):
    assert main(["count-bound", "--M", "1.0", "--eps", "0.1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "regscan count-bound"
    assert "  bound = 10001000.0" in out


def test_count_bound_rejects_bad_arguments(capsys):
    assert main(["count-bound", "--M", "-1.0", "--eps", "0.1"]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["type"] == "ValueError"


def test_config_hash_is_deterministic(capsys):
    a = run_json(capsys, ["count-bound", "--M", "2.0", "--eps", "0.2"])
    b = run_json(capsys, ["count-bound", "--M", "2.0", "--eps", "0.2"])
    assert a["manifest"]["config_hash"] == b["manifest"]["config_hash"]
    assert a["payload"] == b["payload"]


def test_out_file_matches_stdout(capsys, tmp_path):
    path = tmp_path / "cb.json"
    doc = run_json(capsys, ["count-bound", "--M", "1.0", "--eps", "0.1",
                            "--out", str(path)])
    assert json.loads(path.read_text()) == doc
    assert doc["manifest"]["outputs"] == [str(path)]


def test_norms_matches_library(capsys, field_file):
    path, field = field_file
    doc = run_json(capsys, ["norms", path, "--M", "auto"])
    payload = doc["payload"]
    mag = field.frames[-1].magnitude()
    assert payload["frame"] == 3
    assert payload["time"] == pytest.approx(0.15)
    assert payload["weak_norm"] == pytest.approx(weak_norm(mag, 3.0), rel=1e-12)
    assert payload["ratio_bound"] == pytest.approx(np.sqrt(3.0), rel=1e-12)
    assert set(payload["lp_norms"]) == {"2.0", "3.0", "6.0"}
    assert isinstance(payload["l4_interpolation"], dict)
    assert isinstance(payload["local_l2"], dict)
    assert doc["manifest"]["inputs"] == {
        path: hashlib.sha256(open(path, "rb").read()).hexdigest()}


def test_norms_frame_selection(capsys, field_file):
    path, field = field_file
    doc = run_json(capsys, ["norms", path, "--frame", "0"])
    assert doc["payload"]["frame"] == 0
    assert doc["payload"]["time"] == 0.0
    mag = field.frames[0].magnitude()
    assert doc["payload"]["weak_norm"] == pytest.approx(
        weak_norm(mag, 3.0), rel=1e-12)
    by_time = run_json(capsys, ["norms", path, "--time", "0.05"])
    assert by_time["payload"]["frame"] == 1


def test_norms_rejects_out_of_range_frame(capsys, field_file):
    path, _ = field_file
    assert main(["norms", path, "--frame", "7"]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["type"] == "ValueError"
    assert "out of range" in err["error"]


def test_scan_matches_library(capsys, field_file):
    path, field = field_file
    doc = run_json(capsys, ["scan", path, "--x0", "0.5,0.5,0.5",
                            "--t0", "0.15", "--r", "0.35"])
    direct = quant_report(
        field, Cylinder(center=(0.5, 0.5, 0.5), t0=0.15, r=0.35),
        AnalysisConfig(eps=0.1, zeta=1.0)).to_dict()
    payload = doc["payload"]
    assert payload["q3"] == pytest.approx(direct["q3"], rel=1e-12)
    assert payload["q3_small"] == direct["q3_small"]
    assert payload["energy_sup"] == pytest.approx(direct["energy_sup"], rel=1e-12)


def test_localize_payload(capsys, field_file):
    path, _ = field_file
    doc = run_json(capsys, ["localize", path, "--eps", "0.1", "--kmax", "2"])
    payload = doc["payload"]
    assert payload["frame"] == 3
    assert payload["k_max"] == 2
    assert payload["n_clusters"] >= 1
    assert payload["regular"] is False
    assert payload["bound"] == pytest.approx(
        count_bound(payload["M"], 0.1), rel=1e-12)
    assert len(payload["levels"]) <= 3


def test_stokes_check_payload(capsys, field_file):
    path, _ = field_file
    doc = run_json(capsys, [
        "stokes-check", path, "--cube", "0.25,0.25,0.25,0.5",
        "--bump", "0.5,0.5,0.5,0.22,0.1,0.1"])
    payload = doc["payload"]
    assert payload["cube"] == {"corner": [0.25, 0.25, 0.25], "side": 0.5}
    assert set(payload["iterations"]) == {"ph", "p1", "p2"}
    assert payload["projection_residual"] <= 1e-4
    assert payload["harmonic_residual"] >= 0.0
    assert payload["gradp_over_f"] > 0.0
    assert {"lhs", "rhs", "slack_relative"} <= set(payload["energy"])


@pytest.mark.parametrize("cube", ["0.25,0.25,0.5", "0.25,0.25,0.25,0.5,0.9",
                                  "a,b,c,d"])
def test_stokes_check_rejects_malformed_cube(capsys, field_file, cube):
    path, _ = field_file
    with pytest.raises(SystemExit) as exc:
        main(["stokes-check", path, "--cube", cube])
    assert exc.value.code == 2
    assert "--cube" in capsys.readouterr().err


def test_simulate_writes_field_and_report(capsys, tmp_path):
    cfg = {"n": 16, "nu": 0.05, "dt": 0.01, "t_end": 0.05, "save_every": 1}
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "run.rsf"
    rep = tmp_path / "run-report.json"
    doc = run_json(capsys, ["simulate", "--config", str(cfg_path),
                            "--out", str(out), "--report", str(rep)])
    payload = doc["payload"]
    assert payload["frames"] == 6
    assert payload["energy_final"] < payload["energy_initial"]
    assert payload["max_cfl"] < 0.5
    assert payload["field_sha256"] == hashlib.sha256(
        out.read_bytes()).hexdigest()
    field = read_field(out)
    assert len(field.frames) == 6
    assert np.allclose(field.times, np.arange(6) * 0.01)
    assert json.loads(rep.read_text()) == doc
    assert str(cfg_path) in doc["manifest"]["inputs"]


def test_simulate_rejects_bad_config(capsys, tmp_path):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"n": 4, "nu": 0.1, "dt": 0.01,
                                    "t_end": 0.05}))
    assert main(["simulate", "--config", str(cfg_path),
                 "--out", str(tmp_path / "x.rsf")]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["type"] == "ValueError"


@pytest.mark.parametrize("cfg, expected", [
    ({"n": 16, "t_end": 0.05, "banana": 3}, "unknown config keys: banana"),
    ({"n": "sixteen", "t_end": 0.05}, "invalid config"),
])
def test_simulate_rejects_malformed_config(capsys, tmp_path, cfg, expected):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(cfg_path),
                 "--out", str(tmp_path / "x.rsf")]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["type"] == "ValueError"
    assert expected in err["error"]


def test_report_summarizes_saved_documents(capsys, tmp_path):
    path = tmp_path / "cb.json"
    run_json(capsys, ["count-bound", "--M", "1.0", "--eps", "0.1",
                      "--out", str(path)])
    assert main(["report", str(path)]) == 0
    out = capsys.readouterr().out
    assert "kind=count-bound" in out
    assert "bound = 10001000.0" in out


def test_report_rejects_unknown_schema(capsys, tmp_path):
    path = tmp_path / "stale.json"
    path.write_text(json.dumps({"kind": "norms", "schema_version": 99,
                                "payload": {}}))
    assert main(["report", str(path)]) == 1
    captured = capsys.readouterr()
    assert "unsupported schema 99" in captured.out
    assert json.loads(captured.err)["type"] == "ValueError"


def test_missing_input_file_is_a_clean_error(capsys, tmp_path):
    assert main(["norms", str(tmp_path / "absent.rsf")]) == 1
    captured = capsys.readouterr()
    assert captured.out == ""
    err = json.loads(captured.err)
    assert "absent.rsf" in err["error"]


def test_unwritable_out_path_is_a_clean_error(capsys, tmp_path, field_file):
    path, _ = field_file
    target = tmp_path / "missing-dir" / "report.json"
    assert main(["norms", path, "--out", str(target)]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["type"] == "FileNotFoundError"
    assert "missing-dir" in err["error"]


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out
