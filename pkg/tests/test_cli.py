import json
import re
import subprocess
import sys

import numpy as np
import pytest

from scrollforge import AffinePiece, PWLSystem, RegionPredicate
from scrollforge.analysis import adjacent_only
from scrollforge.cli import main
from scrollforge.systems import write_system


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_rows(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--system", "example1-double", "--x0", "0,0,0",
                       "--duration", "50", "--out", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,x1,x2,x3,region"
    assert len(lines) - 1 == 5001
    assert (tmp_path / "transitions.csv").exists()
    assert "samples: 5001" in out


def test_simulate_example2_long_run_bounded(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--system", "example2-triple", "--x0", "0.1,0.1,0.1",
                       "--duration", "500", "--out", str(tmp_path))
    assert code == 0
    bound = float(re.search(r"max\|x\|: (\S+)", out).group(1))
    assert bound < 20


def test_bad_schema_exit_code(tmp_path, capsys):
    bad = tmp_path / "custom.json"
    bad.write_text(json.dumps({"planes": {}, "pieces": []}))
    code, _, err = run(capsys, "simulate", "--system", f"file:{bad}", "--out", str(tmp_path))
    assert code == 2
    assert "SchemaError" in err


def test_bad_x0_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--system", "example1-double", "--x0", "1,2"])
    assert exc.value.code == 2


def test_divergence_exit_code(tmp_path, capsys):
    path = tmp_path / "unstable.json"
    write_system(PWLSystem((AffinePiece(RegionPredicate(), np.eye(3), (0, 0, 0)),)), path)
    code, _, err = run(capsys, "simulate", "--system", f"file:{path}", "--x0", "1,0,0",
                       "--duration", "100", "--out", str(tmp_path))
    assert code == 3
    assert "Divergence" in err


def test_analyze_report(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "--system", "example1-triple", "--seed", "42",
                       "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert 0.94 <= report["k_median"] <= 1.04
    assert report["lle"] > 0.5
    assert len(report["k_per_c"]) == 100
    assert (tmp_path / "kc.csv").read_text().splitlines()[0] == "c,Kc"
    assert json.loads((tmp_path / "manifest.json").read_text())["seed"] == 42


def test_analyze_example2_grammar(tmp_path, capsys):
    code, _, _ = run(capsys, "analyze", "--system", "example2-triple", "--x0", "0.1,0.1,0.1",
                     "--no-lle", "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert "lle" not in report
    assert adjacent_only(report["symbols"], "135")


def test_analyze_toggles(tmp_path, capsys):
    code, _, _ = run(capsys, "analyze", "--system", "example1-double", "--no-lle", "--no-k",
                     "--duration", "20", "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert "lle" not in report and "k_median" not in report
    assert not (tmp_path / "kc.csv").exists()


def test_analyze_too_short_for_k(tmp_path, capsys):
    code, _, err = run(capsys, "analyze", "--system", "example1-double", "--no-lle",
                       "--duration", "20", "--out", str(tmp_path))
    assert code == 2 and "samples" in err


def test_analyze_reproducible(tmp_path, capsys):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run(capsys, "analyze", "--system", "example1-double", "--seed", "7",
                   "--lle-duration", "100", "--out", str(out))[0] == 0
        outputs.append((out / "report.json").read_bytes())
    assert outputs[0] == outputs[1]


@pytest.mark.parametrize("system", ["example1-double", "example1-triple", "example2-triple"])
def test_verify_factories(system, capsys):
    code, out, _ = run(capsys, "verify", "--system", system)
    assert code == 0
    assert out.strip().endswith("equilibrium-free: yes")


def test_verify_contracting_file(tmp_path, capsys):
    path = tmp_path / "minus_x.json"
    write_system(PWLSystem((AffinePiece(RegionPredicate(), -np.eye(3), (0, 0, 0)),)), path)
    code, out, _ = run(capsys, "verify", "--system", f"file:{path}")
    assert code == 0
    assert out.strip().endswith("equilibrium-free: no")


def test_output_dir_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SCROLLFORGE_OUT", str(tmp_path / "env"))
    assert run(capsys, "simulate", "--system", "example1-double", "--duration", "1")[0] == 0
    assert (tmp_path / "env" / "trajectory.csv").exists()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "scrollforge", "verify", "--system", "example1-double"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "equilibrium-free: yes" in res.stdout
