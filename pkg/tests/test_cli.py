import csv
import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from bragg_entanglement import __version__, cli


def _write(tmp_path, cfg, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(cfg))
    return str(path)


def _read(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_grid():
    assert cli.grid({"start": 0.5, "stop": 2.0, "step": 0.5}) == [0.5, 1.0, 1.5, 2.0]
    assert cli.grid({"stop": 0.03, "step": 0.01}) == pytest.approx([0.01, 0.02, 0.03])
    assert cli.grid([3, 1]) == [3.0, 1.0]


def test_evolve_outputs_and_sidecar(tmp_path, capsys):
    cfg = {"schema_version": 1, "scenario": "evolve", "times": {"start": 0.25, "stop": 1.0, "step": 0.25},
           "pairs": ["qA_mqB"], "pictures": ["quasi", "particle"]}
    out = tmp_path / "trace.csv"
    assert cli.main(["--config", _write(tmp_path, cfg), "--out", str(out)]) == 0
    assert "wrote" in capsys.readouterr().out
    header, rows = _read(out)
    assert header == ["t_us", "xi_n_qA_mqB_quasi", "xi_p_qA_mqB_quasi", "n1_qA_mqB_quasi", "n2_qA_mqB_quasi",
                      "undef_qA_mqB_quasi", "xi_n_qA_mqB_particle", "xi_p_qA_mqB_particle", "n1_qA_mqB_particle",
                      "n2_qA_mqB_particle", "undef_qA_mqB_particle"]
    assert len(rows) == 4 and float(rows[2][2]) < 1.0
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["version"] == __version__
    assert side["config"]["system"]["eta_A"] == 1.62 and side["config"]["q_xi"] == 2.0
    assert side["rows"] == 4


def test_outputs_are_bit_identical(tmp_path):
    cfg = {"schema_version": 1, "scenario": "detect", "detect": {"shots": 2000}, "pairs": ["qA_mqB"]}
    path = _write(tmp_path, cfg)
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    cli.main(["--config", path, "--out", str(a), "--seed", "4", "--quiet"])
    cli.main(["--config", path, "--out", str(b), "--seed", "4", "--quiet"])
    cli.main(["--config", path, "--out", str(c), "--seed", "5", "--quiet"])
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_sweep_scenario(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = {"schema_version": 1, "scenario": "sweep", "ratios": [1.25, 0.5, 1.0], "pairs": ["qA_mqB"]}
    assert cli.main(["--config", _write(tmp_path, cfg), "--out", str(out), "--quiet"]) == 0
    header, rows = _read(out)
    assert header[0] == "ratio"
    assert [float(r[0]) for r in rows] == [0.5, 1.0, 1.25]
    assert float(rows[0][2]) > 1 and float(rows[2][2]) < 1


def test_dispersion_and_oracle_scenarios(tmp_path):
    out = tmp_path / "disp.csv"
    cfg = {"schema_version": 1, "scenario": "dispersion", "dispersion": {"q_xi": [2.0]}}
    cli.main(["--config", _write(tmp_path, cfg), "--out", str(out), "--quiet"])
    header, rows = _read(out)
    assert float(rows[0][header.index("u_q")]) == pytest.approx(1.0051419616550832, rel=1e-15)
    out = tmp_path / "oracle.csv"
    cfg = {"schema_version": 1, "scenario": "oracle-compare", "system": {"n_probe": 1.0}, "times": [0.05, 0.1],
           "pairs": ["qA_mqB"], "oracle": {"probe_cap": 16}}
    cli.main(["--config", _write(tmp_path, cfg), "--out", str(out), "--quiet"])
    header, rows = _read(out)
    assert all(r[header.index("ok")] == "1" for r in rows)


def test_seventeen_significant_digits(tmp_path):
    out = tmp_path / "d.csv"
    cfg = {"schema_version": 1, "scenario": "dispersion", "dispersion": {"q_xi": [0.1]}}
    cli.main(["--config", _write(tmp_path, cfg), "--out", str(out), "--quiet"])
    _, rows = _read(out)
    assert rows[0][0] == "0.10000000000000001"


@pytest.mark.parametrize(
    "cfg, where",
    [
        ({"schema_version": 1, "scenario": "evolve", "bogus": 1}, ""),
        ({"schema_version": 2, "scenario": "evolve"}, "schema_version"),
        ({"schema_version": 1, "scenario": "evolve", "system": {"eta_A": -1}}, "system/eta_A"),
        ({"schema_version": 1, "scenario": "evolve", "pairs": ["qA_qA"]}, "pairs/0"),
        ({"schema_version": 1, "scenario": "fly"}, "scenario"),
    ],
)
def test_invalid_config_reports_json_error(tmp_path, capsys, cfg, where):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cfg))
    code = cli.main(["--config", str(path), "--quiet"])
    err = json.loads(capsys.readouterr().err)
    assert code == cli.EXIT_INVALID
    assert err["error"] == "invalid_config" and err["path"] == where


def test_unparseable_config(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert cli.main(["--config", str(path)]) == cli.EXIT_INVALID
    assert json.loads(capsys.readouterr().err)["error"] == "invalid_config"


def test_json_config_and_missing_file(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"schema_version": 1, "scenario": "dispersion", "dispersion": {"q_xi": [1.0]}}))
    assert cli.main(["--config", str(path), "--out", str(tmp_path / "x.csv"), "--quiet"]) == 0
    assert cli.main(["--config", str(tmp_path / "nope.yaml")]) == cli.EXIT_IO
    assert json.loads(capsys.readouterr().err)["error"] == "unreadable_config"


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    cfg = {"schema_version": 1, "scenario": "dispersion", "dispersion": {"q_xi": [1.0]}}
    code = cli.main(["--config", _write(tmp_path, cfg), "--out", str(blocker / "out.csv"), "--quiet"])
    assert code == cli.EXIT_IO
    assert json.loads(capsys.readouterr().err)["error"] == "unwritable_output"


def test_memory_ceiling(tmp_path, capsys):
    cfg = {"schema_version": 1, "scenario": "oracle-compare", "times": [0.1], "oracle": {"max_dim": 100}}
    code = cli.main(["--config", _write(tmp_path, cfg), "--out", str(tmp_path / "o.csv"), "--quiet"])
    assert code == cli.EXIT_MEMORY
    assert json.loads(capsys.readouterr().err)["error"] == "memory_ceiling"


def test_scenario_override_and_module_entry(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "bragg_entanglement", "--scenario", "dispersion", "--out", str(out), "--quiet"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    header, rows = _read(out)
    assert header[0] == "q_xi" and len(rows) == 50
    assert np.all(np.diff([float(r[2]) for r in rows]) > 0)
