import json
import subprocess
import sys

import numpy as np
import pytest

from pnglab.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dist_mean_f0(capsys):
    code, out, err = _run(capsys, "dist", "mean", "--which", "f0")
    assert code == 0
    assert abs(json.loads(out)["mean"]) < 1e-3
    manifest = json.loads(err.strip().splitlines()[-1])
    assert manifest["command"] == "dist mean" and manifest["params"]["which"] == "f0"


def test_dist_table_csv(capsys):
    code, out, _ = _run(capsys, "dist", "table", "--which", "g", "--w", "0.5", "--pdf")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,cdf,pdf"
    cdf = np.array([float(r.split(",")[1]) for r in lines[1:]])
    assert np.all(np.diff(cdf) >= 0) and 0 <= cdf[0] and cdf[-1] <= 1


def test_painleve_dump(capsys):
    code, out, _ = _run(capsys, "dist", "table", "--which", "painleve")
    assert code == 0
    assert out.splitlines()[0] == "x,u,u_prime,v,E,F"


def test_exact_png(capsys):
    code, out, _ = _run(capsys, "exact", "png", "--t", "4", "--alpha-plus", "0.5", "--alpha-minus", "0.5", "--l-max", "30", "--out", "-")
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 31
    cdf = [float(r.split(",")[1]) for r in rows]
    assert all(b >= a for a, b in zip(cdf, cdf[1:]))


def test_sim_png_empty(capsys):
    code, out, _ = _run(capsys, "sim", "png", "--t", "1e-9", "--samples", "10", "--seed", "7")
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 10 and all(r.split(",")[1] == "0" for r in rows)


def test_sim_reproducible(capsys):
    args = ("sim", "lpp", "--n", "6", "--q", "0.25", "--samples", "20", "--seed", "3")
    assert _run(capsys, *args)[1] == _run(capsys, *args)[1]


def test_sim_tasep(capsys):
    code, out, _ = _run(capsys, "sim", "tasep", "--q", "0.5", "--steps", "5", "--window", "20")
    assert code == 0 and len(out.splitlines()) > 1


def test_exit_codes(capsys):
    assert _run(capsys, "exact", "png", "--t", "13", "--l-max", "5")[0] == 3
    assert _run(capsys, "dist", "table", "--which", "h", "--w-plus", "5", "--w-minus", "0")[0] == 3
    assert _run(capsys, "dist", "table", "--which", "g")[0] == 2
    assert _run(capsys, "dist", "table", "--which", "nope")[0] == 2
    assert _run(capsys, "sim", "png", "--t", "-1")[0] == 2


def test_out_file_and_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# png run\nt = 2\nl_max = 5\nalpha_plus = 0.5\n")
    out = tmp_path / "cdf.csv"
    code = main(["exact", "png", "--config", str(cfg), "--l-max", "8", "--out", str(out)])
    capsys.readouterr()
    assert code == 0
    assert len(out.read_text().splitlines()) == 10  # flag beat the config value
    assert not list(tmp_path.glob(".pnglab-*"))


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert _run(capsys, "exact", "png", "--t", "1", "--l-max", "3", "--config", str(cfg))[0] == 2


def test_compare_report(capsys):
    code, out, _ = _run(
        capsys, "compare", "--model", "png", "--regime", "png_tw", "--t", "3",
        "--samples", "200", "--seed", "1", "--target", "fgue",
    )
    assert code == 0
    rec = json.loads(out)
    assert rec["n"] == 200 and rec["target"] == "GUE" and rec["exact_available"]


@pytest.mark.parametrize("argv", [["--version"], ["exact", "png", "--t", "1", "--l-max", "2"]])
def test_console_script(argv):
    res = subprocess.run([sys.executable, "-m", "pnglab.cli", *argv], capture_output=True, text=True)
    assert res.returncode == 0
