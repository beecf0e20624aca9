import json
import shutil
import subprocess

import numpy as np
import pytest

from chaindisc.cli import run
from chaindisc.core import Coloring, loads_coloring, loads_points
from chaindisc.generators import generate
from chaindisc.reports import SCHEMA_VERSION, mask_timestamp


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_disc_basis_exact(capsys):
    rep = report(capsys, "disc", "--gen", "basis:8", "--mode", "exact")
    assert rep["summary"]["value"] == 1 and rep["summary"]["exact"] is True
    assert rep["schema_version"] == SCHEMA_VERSION
    assert list(rep)[:6] == ["schema_version", "tool_version", "command", "config", "summary", "rows"]
    assert rep["provenance"]["seed"] == 0 and "timestamp" in rep["provenance"]


def test_malformed_csv_is_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,oops\n")
    code, out, err = invoke(capsys, "disc", "--input", str(bad))
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "config"


def test_missing_input_and_unknown_generator(capsys):
    assert invoke(capsys, "disc")[0] == 2
    assert invoke(capsys, "disc", "--gen", "nonsense:3")[0] == 2
    assert invoke(capsys, "disc", "--gen", "basis:4", "--constants", "k1")[0] == 2


def test_size_error_exit_three(capsys):
    code, _, err = invoke(capsys, "disc", "--gen", "basis:30", "--mode", "exact")
    assert code == 3 and json.loads(err)["error"] == "size"


def test_precondition_exit_three(capsys):
    code, _, err = invoke(capsys, "matousek", "--gen", "random-box:6,6", "--d", "1")
    assert code == 3 and json.loads(err)["error"] == "precondition"


def test_budget_failure_exit_four(capsys):
    code, _, err = invoke(capsys, "partial", "--gen", "basis:8", "--budget", "50", "--constants", "k4=1e-9")
    assert code == 4
    assert json.loads(err)["error"] == "budget"


def test_reports_deterministic_modulo_timestamp(capsys):
    argv = ("spencer", "--gen", "random-signs:20,20", "--seed", "3")
    a, b = invoke(capsys, *argv)[1], invoke(capsys, *argv)[1]
    c = invoke(capsys, *argv, "--threads", "4")[1]
    masked = [json.dumps(mask_timestamp(json.loads(x)), indent=2) for x in (a, b, c)]
    assert masked[0] == masked[1] == masked[2]
    # only the timestamp line may differ in the raw bytes
    diff = [(x, y) for x, y in zip(a.splitlines(), b.splitlines()) if x != y]
    assert all('"timestamp"' in x for x, _ in diff)


def test_lab_thread_independent(capsys):
    argv = ("lab", "orderstats", "--trials", "300", "--seed", "2")
    one = report(capsys, *argv, "--threads", "1")
    assert mask_timestamp(one) == mask_timestamp(report(capsys, *argv, "--threads", "8"))


def test_generate_csv_round_trip(tmp_path, capsys):
    out = tmp_path / "pts.csv"
    code, _, _ = invoke(capsys, "generate", "--gen", "random-box:5,7", "--seed", "4", "--format", "csv",
                        "--out", str(out))
    assert code == 0
    assert loads_points(out.read_text()) == generate("random-box:5,7", seed=4)
    rep = report(capsys, "disc", "--input", str(out), "--mode", "exact")
    assert rep["summary"]["value"] >= 0


def test_coloring_csv_round_trip(capsys):
    code, out, _ = invoke(capsys, "disc", "--gen", "basis:6", "--mode", "exact", "--format", "csv")
    assert code == 0
    col = loads_coloring(out)
    assert isinstance(col, Coloring) and col.is_full
    rep = report(capsys, "disc", "--gen", "basis:6", "--mode", "exact")
    assert col.tolist() == rep["summary"]["coloring"]


def test_generators():
    assert generate("basis:3").points.tolist() == np.eye(3).tolist()
    assert len(generate("cube:4")) == 16
    from chaindisc.shatter import vc_dim
    assert vc_dim(generate("intervals:6,8", seed=1), 0.5) == 1


def test_vc_and_chaining_commands(capsys):
    rep = report(capsys, "vc", "--gen", "cube:3", "--eps", "1", "--hull")
    assert rep["summary"]["vc"] == 3
    rep = report(capsys, "vc", "--gen", "cube:2", "--lower", "--deltas", "0.5,1")
    assert rep["summary"]["hdisc_vc_lower"] == 2
    rep = report(capsys, "vc", "--gen", "cube:2", "--eps", "1", "--indices", "1,2")
    assert rep["summary"]["shattered"] and rep["summary"]["witness"]["indices"] == [1, 2]
    assert report(capsys, "gamma2", "--gen", "basis:4", "--strategy", "exhaustive")["summary"]["value"] > 0
    assert report(capsys, "pack", "--gen", "basis:4", "--eps", "1")["summary"]["value"] == 4
    assert report(capsys, "entropy-number", "--gen", "basis:4", "--k", "2")["summary"]["value"] == 0
    ent = report(capsys, "entropy", "--gen", "basis:2", "--a", "1")
    assert ent["summary"]["ratio"] == pytest.approx(0.40938, abs=1e-5)


def test_lab_config_validation(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"measure": "gaussian", "index_set": "random-sphere:4,8", "colour": 1}))
    assert invoke(capsys, "lab", "gap", "--config", str(cfg))[0] == 2
    cfg.write_text("{not json")
    assert invoke(capsys, "lab", "gap", "--config", str(cfg))[0] == 2
    cfg.write_text(json.dumps({"index_set": "random-sphere:4,8", "k_list": [8], "trials": 2, "budget": 16}))
    rep = report(capsys, "lab", "gap", "--config", str(cfg))
    assert rep["command"] == "lab gap" and rep["summary"]["summary"][0]["k"] == 8


def test_lab_gap_csv(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"index_set": "random-sphere:4,8", "k_list": [8, 16], "trials": 2, "budget": 16}))
    code, out, _ = invoke(capsys, "lab", "gap", "--config", str(cfg), "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "k,median_r" and len(out.splitlines()) == 3


@pytest.mark.skipif(shutil.which("chaindisc") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["chaindisc", "disc", "--gen", "basis:8", "--mode", "exact"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["summary"]["value"] == 1
