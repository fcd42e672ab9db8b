import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from revpulse.cli import main, parse_config, read_csv

FIG1 = ["--gamma", "1e-3"]
FIG5 = ["--big-gamma", "1e-4", "--t1", "2400"]
FIG7 = ["--gamma", "1e-3", "--big-gamma", "1e-4", "--nbar", "0.3"]


def _run(tmp_path, args, name="out.csv"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def test_synth_fig1_feasible(tmp_path):
    code, out = _run(tmp_path, ["synth", *FIG1, "--verify"])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# {")
    assert "t,E,f,fdot,u,h,feasible" in lines
    d = read_csv(out)
    assert d["t"][0] == pytest.approx(-800.0) and d["t"][-1] == pytest.approx(800.0)
    assert np.all(d["feasible"] == 1)


def test_synth_fig5_infeasible(tmp_path):
    code, out = _run(tmp_path, ["synth", *FIG5])
    assert code == 2
    trailer = [ln for ln in out.read_text().splitlines() if ln.startswith("# first_violation_time=")]
    tv = float(trailer[0].split("=")[1])
    assert np.isfinite(tv) and tv > 0
    assert read_csv(out)["t"][-1] < tv


def test_synth_zero_field(tmp_path):
    code, out = _run(tmp_path, ["synth", "--af", "0.8"])
    assert code == 0
    assert np.all(read_csv(out)["E"] == 0.0)


def test_byte_stable(tmp_path):
    _, out = _run(tmp_path, ["synth", *FIG1, "--dt", "2"])
    first = out.read_bytes()
    _, out = _run(tmp_path, ["synth", *FIG1, "--dt", "2"])
    assert out.read_bytes() == first


def test_header_records_parameters(tmp_path):
    _, out = _run(tmp_path, ["synth", *FIG1, "--dt", "2"])
    head = json.loads(out.read_text().splitlines()[0][2:])
    assert head["gamma"] == 1e-3 and head["t0"] == -800.0 and head["dt"] == 2.0


def test_config_file_precedence(tmp_path):
    conf = tmp_path / "run.cfg"
    conf.write_text("# fig 1\ngamma = 1e-3\naf = 0.4\nalpha=0.02\n")
    cfg = parse_config(["synth", "--config", str(conf), "--af", "0.35"])
    assert cfg.gamma == 1e-3 and cfg.alpha == 0.02
    assert cfg.a_f == 0.35
    assert cfg.t0 == -400.0 and cfg.t1 == 400.0


def test_defaults():
    cfg = parse_config(["synth"])
    assert (cfg.omega, cfg.mu, cfg.alpha, cfg.gamma, cfg.Gamma, cfg.nbar, cfg.phi0) == \
        (2e-2, 6.0, 1e-2, 0.0, 0.0, 0.0, 0.0)
    assert cfg.t0 == -800.0 and cfg.t1 == 800.0


@pytest.mark.parametrize("argv", [
    ["synth", "--ai", "1.5"],
    ["bogus"],
    ["synth", "--gamma", "-1"],
    ["map", "--steps", "1"],
    ["synth", "--omega", "abc"],
])
def test_usage_errors(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 64


def test_numerical_failure_exit(tmp_path):
    # a carrier step above period/50 is refused by the integrator
    code, _ = _run(tmp_path, ["simulate", *FIG1, "--dt", "10"])
    assert code == 3


def test_simulate_rwa_exact(tmp_path, capsys):
    code, out = _run(tmp_path, ["simulate", *FIG1, "--rwa"])
    assert code == 0
    d = read_csv(out)
    assert np.max(np.abs(d["rho_gg"] - d["f"])) <= 1e-6
    assert "max_pop_dev=" in capsys.readouterr().out


def test_simulate_fig1_lab(tmp_path):
    code, out = _run(tmp_path, ["simulate", *FIG1])
    assert code == 0
    d = read_csv(out)
    assert abs(d["rho_gg"][-1] - 0.3) <= 0.02
    assert np.allclose(d["rho_gg"] + d["rho_ee"], 1.0, rtol=0, atol=1e-15)


def test_simulate_fig7_tail(tmp_path):
    hold = 800 + 10 / (2 * 1.16e-3)
    code, out = _run(tmp_path, ["simulate", *FIG7, "--af", "0.6", "--t1", str(hold)])
    assert code == 0
    d = read_csv(out)
    tail = d["t"] >= d["t"][-1] - 2 * np.pi / 2e-2
    assert np.all(np.abs(d["abs_rho_ge"][tail] - 0.076564) <= 0.05 * 0.076564)


def test_simulate_divergent_exit(tmp_path):
    code, _ = _run(tmp_path, ["simulate", *FIG5, "--rwa"])
    assert code == 2


def test_map_outputs(tmp_path, capsys):
    svg = tmp_path / "map.svg"
    code, out = _run(tmp_path, ["map", *FIG1, "--axis", "af", "--steps", "21", "--dt", "4",
                                "--svg", str(svg)])
    assert code == 0
    text = out.read_text().splitlines()
    assert "a_f,t,u,accessible" in text
    matrix = (tmp_path / "out.matrix.csv").read_text().splitlines()
    assert json.loads(matrix[0][2:])["axis"] == "a_f"
    root = ET.fromstring(svg.read_text())
    assert root.tag.endswith("svg")
    assert "accessible a_f" in capsys.readouterr().out


def test_map_nbar_reports_bound(tmp_path, capsys):
    code, _ = _run(tmp_path, ["map", "--big-gamma", "1e-4", "--af", "0.4", "--axis", "nbar",
                              "--steps", "11", "--horizon", "800"])
    assert code == 0
    line = capsys.readouterr().out
    bound = float(line.split("nbar bound=")[1].split(";")[0])
    assert bound == pytest.approx(0.35, abs=0.05)


def test_steady_fig7(capsys):
    assert main(["steady", *FIG7, "--af", "0.6"]) == 0
    out = capsys.readouterr().out
    assert "0.076564" in out
    row = out.strip().splitlines()[-1]
    assert '"0.5,0.8125"' in row


def test_steady_infeasible_and_degenerate(capsys):
    assert main(["steady", *FIG7, "--af", "0.3"]) == 2
    assert main(["steady", "--af", "0.3"]) == 0
    assert "degenerate: steady coherence 0" in capsys.readouterr().out


def test_nbar_bound_command(capsys):
    assert main(["nbar-bound", "--big-gamma", "1e-4", "--af", "0.4", "--horizon", "800"]) == 0
    assert "nbar bound=0.34" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "revpulse.cli", "steady", *FIG7, "--af", "0.6"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "0.076564" in res.stdout
