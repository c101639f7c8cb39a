import csv
import json
import math
import subprocess
import sys

import pytest

from fraccd.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    lines = [json.loads(s) for s in out.splitlines() if s.strip()]
    return code, lines, err


def test_eval_laplacian_of_u_eps(capsys):
    code, lines, _ = _run(capsys, "eval", "--op", "L", "--profile", "u_eps", "--beta", "1", "--eps", "0.1")
    assert code == 0 and len(lines) == 1
    assert lines[0]["value"] >= 20 / math.pi


def test_eval_truncated_inside_plateau_is_zero(capsys):
    code, lines, _ = _run(capsys, "eval", "--op", "gamma2_M", "--profile", "u_eps",
                          "--eps", "0.1", "--M", "0.1")
    assert code == 0 and lines == [lines[0]] and lines[0]["value"] == 0.0


def test_eval_writes_files_only_when_asked(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["eval", "--op", "L", "--profile", "const"]) == 0
    assert list(tmp_path.iterdir()) == []
    prefix = str(tmp_path / "run")
    assert main(["eval", "--op", "L", "--profile", "const", "--out", prefix]) == 0
    doc = json.loads((tmp_path / "run.json").read_text())
    assert set(doc) == {"manifest", "columns", "rows", "summary"}
    assert doc["manifest"]["command"] == "eval"
    capsys.readouterr()


@pytest.mark.parametrize("argv, fragment", [
    (["eval", "--op", "L", "--profile", "u_eps", "--beta", "1", "--eps", "0.6"], "beta/2"),
    (["eval", "--op", "nope", "--profile", "u_eps"], "invalid choice"),
    (["eval", "--op", "L", "--profile", "v_N_eps", "--eps", "0.3"], "4*eps < beta"),
    (["ball", "--R", "-1"], "R must be positive"),
])
def test_usage_and_domain_errors_exit_one(capsys, argv, fragment):
    code, _, err = _run(capsys, *argv)
    assert code == 1
    assert fragment in err


def test_sweep_outputs_are_deterministic(capsys, tmp_path):
    texts = []
    for k in range(2):
        prefix = str(tmp_path / f"s{k}")
        code = main(["sweep", "--beta", "1", "--eps-list", "0.1,0.05", "--no-decompose", "--out", prefix])
        assert code == 0
        texts.append((tmp_path / f"s{k}.csv").read_text())
    capsys.readouterr()
    assert texts[0] == texts[1]
    rows = list(csv.reader(texts[0].splitlines()))
    assert rows[0][:4] == ["eps", "eps_L", "eps_gamma2", "n_star"]
    assert [float(r[0]) for r in rows[1:]] == [0.1, 0.05]
    assert "\r" not in texts[0]


def test_no_temporary_files_left_behind(capsys, tmp_path):
    main(["verify", "--what", "lemmas", "--grid", "40", "--out", str(tmp_path / "lem")])
    capsys.readouterr()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["lem.csv", "lem.json"]


def test_verify_lemmas_passes(capsys, tmp_path):
    code, lines, _ = _run(capsys, "verify", "--what", "lemmas", "--grid", "60",
                          "--out", str(tmp_path / "v"))
    assert code == 0 and lines[-1]["summary"]["violations"] == 0


def test_cd_check_with_fixed_witness_is_inconclusive_or_decided(capsys, tmp_path):
    code, lines, _ = _run(capsys, "cd-check", "--beta", "1", "--eps", "0.05", "--N", "8",
                          "--Ndim", "10", "--out", str(tmp_path / "c"))
    verdict = lines[-1]["summary"]["verdict"]
    assert verdict in {"VIOLATED", "SATISFIED", "INCONCLUSIVE"}
    assert code == (2 if verdict == "INCONCLUSIVE" else 0)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fraccd", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("fraccd ")
