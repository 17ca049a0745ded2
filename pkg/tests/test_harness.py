import json
import subprocess
import sys

import pytest

from sgdl import cli, harness
from sgdl.errors import ConfigParse, NoRelativeSystem, UnknownScenario

SMALL_GRID = {"n_points": 256, "z_min": -16.0, "z_max": 16.0, "dt": 0.01, "n_steps": 100}


def sg_doc(**extra):
    doc = {"schema_version": 1, "name": "sg", "grid": SMALL_GRID,
           "hamiltonian": {"environment": {"mode": "linear_recorder", "dim": 4}},
           "params": {"record_every": 10}}
    doc.update(extra)
    return doc


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- config ------------------------------------------------------------------------

def test_parse_full_config():
    cfg = harness.parse_config(sg_doc(atom={"Z": 10, "A": 20, "mass_ratio": 1000.0},
                                      packet={"width": 1.5}, seed=3))
    assert cfg.grid.n_points == 256 and cfg.packet.width == 1.5
    assert cfg.atom.constants.nucleon_mass == 1000.0
    assert cfg.hamiltonian.environment.mode.value == "linear_recorder"


@pytest.mark.parametrize("doc", [
    sg_doc(extra=1),
    sg_doc(schema_version=2),
    sg_doc(grid={**SMALL_GRID, "points": 3}),
    sg_doc(hamiltonian={"environment": {"mode": "linear_recorder", "bogus": 1}}),
    sg_doc(params={"coupling": 0.1}),
    sg_doc(grid={**SMALL_GRID, "n_points": 100}),
    sg_doc(seed=-1),
    sg_doc(atom={"Z": 5, "A": 3}),
])
def test_config_rejects_bad_documents(doc):
    with pytest.raises(ConfigParse):
        harness.parse_config(doc)


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        harness.parse_config({"schema_version": 1, "name": "teleport"})


def test_malformed_json_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigParse):
        harness.load_config(bad)


# -- scenario execution and outputs ------------------------------------------------

def test_sg_run_writes_csv_json_svg(tmp_path, monkeypatch):
    monkeypatch.setenv("SGDL_OUT_DIR", str(tmp_path))
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(sg_doc(outputs={"csv_path": "run.csv", "json_path": "run.json",
                                                   "svg_path": "charts"})))
    result = harness.run(cfg_path)
    table = harness.read_run_csv(tmp_path / "run.csv")
    # repr() floats round-trip exactly
    for col in harness.CSV_COLUMNS:
        assert table[col] == result["series"][col]
    saved = json.loads((tmp_path / "run.json").read_text())
    assert saved["summary"] == pytest.approx(result["summary"])
    svgs = sorted(p.name for p in (tmp_path / "charts").glob("*.svg"))
    assert "sg_record_overlap.svg" in svgs and len(svgs) == 5
    assert (tmp_path / "charts" / "sg_norm.svg").read_text().startswith("<svg")


def test_environment_on_hydrogen_is_rejected():
    cfg = harness.parse_config(sg_doc(atom={"Z": 1, "A": 1}))
    with pytest.raises(NoRelativeSystem) as info:
        harness.execute(cfg)
    assert info.value.to_dict()["module"] == "dynamics"


def test_potential_scenario_csv(tmp_path, monkeypatch):
    monkeypatch.setenv("SGDL_OUT_DIR", str(tmp_path))
    cfg = harness.parse_config({"schema_version": 1, "name": "potential", "atom": {"Z": 2, "A": 4},
                                "params": {"method": "closed-form", "points": 5},
                                "outputs": {"csv_path": "v.csv"}})
    harness.execute(cfg)
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "omega,value,method,Z" and len(lines) == 6
    assert lines[1].split(",")[2:] == ["closed-form", "2"]


# -- command line -------------------------------------------------------------------

def test_cli_adiabatic(capsys):
    code, out, _ = run_cli(capsys, "adiabatic", "--Z", "47", "--A", "107", "--mass-ratio", "1836.15")
    assert code == 0
    assert json.loads(out)["kappa3"] == pytest.approx(106 / 107 ** 2)


def test_cli_error_document(capsys):
    code, out, err = run_cli(capsys, "adiabatic", "--Z", "1", "--A", "1")
    assert code == 1 and out == ""
    doc = json.loads(err)
    assert doc["error"] == "NoRelativeSystem" and doc["module"] == "atomic-model"
    assert doc["operation"] == "adiabatic_parameters"


def test_cli_config_errors_exit_2(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema_version": 1, "name": "nope"}))
    code, _, err = run_cli(capsys, "run", str(cfg))
    assert code == 2 and json.loads(err)["error"] == "UnknownScenario"
    code, _, err = run_cli(capsys, "run", str(tmp_path / "missing.json"))
    assert code == 2 and json.loads(err)["error"] == "ConfigParse"


def test_cli_potential_and_scaling(capsys):
    code, out, _ = run_cli(capsys, "potential", "--Z", "2", "--points", "3")
    assert code == 0 and out.count("\n") == 4
    code, out, _ = run_cli(capsys, "scaling", "--Z", "2,2")
    assert code == 1


def test_reproduce_static_is_deterministic(tmp_path, capsys):
    outs = []
    for sub in ("a", "b"):
        code, _, _ = run_cli(capsys, "reproduce", "--skip", "dynamics", "--skip", "adiabatic_bounds",
                             "--out-dir", str(tmp_path / sub))
        assert code == 0
        outs.append((tmp_path / sub / "reproduce_summary.json").read_bytes())
    assert outs[0] == outs[1]
    summary = json.loads(outs[0])
    assert [i["item"] for i in summary["items"]] == [n for n in harness.STATIC_ITEMS
                                                     if n != "adiabatic_bounds"]
    assert (tmp_path / "a" / "reproduce_timing.json").exists()


def test_reproduce_tampered_tolerance_fails(tmp_path, capsys):
    tol = tmp_path / "tol.json"
    tol.write_text(json.dumps({"scaling_max": 1.9}))
    code, out, _ = run_cli(capsys, "reproduce", "--skip", "dynamics", "--tolerances", str(tol),
                           "--out-dir", str(tmp_path))
    assert code == 1
    status = {i["item"]: i["status"] for i in json.loads(out)["items"]}
    assert status["scaling"] == "FAIL" and status["conformance"] == "PASS"


def test_reproduce_rejects_unknown_tolerance(tmp_path, capsys):
    tol = tmp_path / "tol.json"
    tol.write_text(json.dumps({"nonsense": 1}))
    code, _, err = run_cli(capsys, "reproduce", "--skip", "dynamics", "--tolerances", str(tol),
                           "--out-dir", str(tmp_path))
    assert code == 2 and json.loads(err)["error"] == "ConfigParse"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sgdl", "adiabatic", "--Z", "2", "--A", "4"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["kappa3"] == pytest.approx(3 / 16)
