import json
import subprocess
import sys

import pytest

from zetasize.cli import EXIT_DISAGREE, EXIT_ERROR, EXIT_FINITE, EXIT_INFINITE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_estimate_json(capsys):
    code, out, _ = run(capsys, "estimate", "--Q", "[0, 1]", "--delta", "3/2")
    assert code == EXIT_FINITE
    doc = json.loads(out)
    assert doc["result"]["value"] == pytest.approx(1)
    assert len(doc["input_sha256"]) == 64
    assert doc["config"]["command"] == "estimate"


def test_estimate_reproducible(capsys):
    a = run(capsys, "estimate", "--Q", "[0.01, 0, 1]", "--delta", "3/2")[1]
    b = run(capsys, "estimate", "--Q", "[0.01, 0, 1]", "--delta", "3/2")[1]
    assert a == b


def test_estimate_infinite_exit(capsys):
    code, _, _ = run(capsys, "estimate", "--Q", "[0.04, -0.4, 1]", "--delta", "3/2")
    assert code == EXIT_INFINITE


def test_degenerate_message(capsys):
    code, _, err = run(capsys, "estimate", "--Q", "[0, 1]", "--delta", "2")
    assert code == EXIT_ERROR and "(0, 0)" in err


def test_finiteness(capsys):
    assert run(capsys, "finiteness", "--Q", "[0, 1]", "--delta", "1/2")[0] == EXIT_FINITE
    assert run(capsys, "finiteness", "--Q", "[0, 1]", "--delta", "5/2")[0] == EXIT_INFINITE


def test_scales_csv(capsys, tmp_path):
    path = tmp_path / "scales.csv"
    code, _, _ = run(capsys, "scales", "--Q", "[0, -0.01, 0, 1]", "--format", "csv", "--out", str(path))
    assert code == EXIT_FINITE
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ") and len(lines) > 2


def test_compare_family_file(capsys, tmp_path):
    fam = {"delta": "3/2", "generator": "planted-gap", "roots": [0.0], "gaps": [0.1, 0.01]}
    path = tmp_path / "fam.json"
    path.write_text(json.dumps(fam))
    code, out, _ = run(capsys, "compare", "@" + str(path))
    assert code == EXIT_FINITE
    assert json.loads(out)["result"]["joint_finite"] == 2


def test_compare_empty_family(capsys):
    assert run(capsys, "compare", '{"delta": "1/2", "instances": []}')[0] == EXIT_ERROR


def test_lct(capsys):
    germ = json.dumps({"n": 1, "terms": [{"exp": [3], "coef": [1, 0]}]})
    code, out, _ = run(capsys, "lct", "--germ", germ)
    assert code == EXIT_FINITE
    assert json.loads(out)["result"]["delta0"] in ("2/3", 2 / 3)


def test_usage_errors(capsys):
    assert run(capsys, "estimate", "--delta", "1")[0] == EXIT_ERROR
    assert run(capsys, "nonsense")[0] == EXIT_ERROR
    assert run(capsys, "estimate", "--Q", "not json", "--delta", "1")[0] == EXIT_ERROR


def test_distfn(capsys):
    germ = json.dumps({"n": 1, "terms": [{"exp": [2], "coef": [1, 0]}]})
    code, out, _ = run(capsys, "distfn", "--germ", germ, "--samples", "20000")
    assert code == EXIT_FINITE
    assert len(json.loads(out)["result"]["rows"]) == 3


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "zetasize.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "estimate" in proc.stdout
