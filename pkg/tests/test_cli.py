import json
import subprocess
import sys
from pathlib import Path

import pytest

from airy_evolve import cli, validation
from airy_evolve.scenarios import ConfigError, Scenario, load_config

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(autouse=True)
def _no_env_out(monkeypatch):
    monkeypatch.delenv("AIRY_EVOLVE_OUT", raising=False)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def _manifest(out):
    return json.loads((out / "manifest.json").read_text(encoding="utf-8"))


def test_validate_gleisher(tmp_path, capsys):
    assert cli.main(["validate", "gleisher", "--out", str(tmp_path)]) == 0
    m = _manifest(tmp_path)
    assert m["passed"]
    checks = m["scenarios"][0]["checks"]
    assert checks and all(c["name"].startswith("gleisher[") and c["value"] < 1e-6 for c in checks)
    assert "PASS" in capsys.readouterr().out


def test_airy_packet_flags(tmp_path):
    assert cli.main(["airy-packet", "--b", "1", "--A", "1", "--tau-max", "2", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "airy-packet_trajectory.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "tau,x_peak,expected_x_peak,max_density"
    assert len(lines) == 12
    snap = (tmp_path / "airy-packet.csv").read_text(encoding="utf-8").splitlines()
    assert snap[0] == "tau,x,re,im,abs2"


def test_poly_csv(tmp_path):
    assert cli.main(["poly", "--family", "heat", "--n-max", "2", "--lambda", "1/2", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "poly.csv").read_bytes().decode("utf-8")
    assert "\r" not in text
    rows = text.splitlines()
    assert rows[0] == "n,degree,coefficient-numerator,coefficient-denominator"
    assert "2,0,1,1" in rows and "2,2,1,1" in rows


@pytest.mark.parametrize("argv,header", [
    (["heat", "--beta", "0.5", "--t", "0.4"], "x,re,im,abs2"),
    (["schrodinger", "--b", "0.5", "--tau", "0.5"], "x,re,im,abs2"),
    (["transform", "--transform", "gw", "--param", "0.2"], "x,re,im,abs2"),
    (["wei-norman", "--beta", "sin:1,1"], "t,a,b,c,d"),
    (["centroid", "--phi", "constant:0.5"], "t,X_c"),
])
def test_each_subcommand(tmp_path, argv, header):
    assert cli.main(argv + ["--out", str(tmp_path)]) == 0
    csv_file = tmp_path / f"{argv[0]}.csv"
    assert csv_file.read_text(encoding="utf-8").splitlines()[0] == header


def test_determinism(tmp_path):
    cfg = _write(tmp_path / "c.ini", "[scenario w]\nkind = wei-norman\nbeta = poly:1,0.5\n"
                                     "[scenario h]\nkind = heat\nbeta = 0.5\nn = 512\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", str(cfg), "--out", str(a)]) == 0
    assert cli.main(["run", str(cfg), "--out", str(b), "--parallel"]) == 0
    for name in ("w.csv", "h.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seventeen_digit_floats(tmp_path):
    assert cli.main(["centroid", "--phi", "sin:1,1", "--n", "11", "--t-max", "1", "--out", str(tmp_path)]) == 0
    last = (tmp_path / "centroid.csv").read_text(encoding="utf-8").splitlines()[-1]
    t, xc = last.split(",")
    assert float(t) == 1.0 and repr(float(xc)) in (xc, repr(float(format(float(xc), ".17g"))))
    assert len(xc.replace("-", "").replace(".", "").lstrip("0").split("e")[0]) >= 16


def test_env_var_overrides_output(tmp_path, monkeypatch):
    env_out = tmp_path / "env"
    monkeypatch.setenv("AIRY_EVOLVE_OUT", str(env_out))
    cfg = _write(tmp_path / "c.ini", f"[run]\noutput = {tmp_path / 'cfg'}\n[scenario p]\nkind = poly\nn_max = 3\n")
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "flag")]) == 0
    assert (env_out / "p.csv").exists()
    assert not (tmp_path / "cfg").exists() and not (tmp_path / "flag").exists()


def test_config_output_key(tmp_path):
    cfg = _write(tmp_path / "c.ini", f"[run]\noutput = {tmp_path / 'cfg'}\n[scenario p]\nkind = poly\n")
    assert cli.main(["run", str(cfg)]) == 0
    assert (tmp_path / "cfg" / "p.csv").exists()


def test_empty_scenario_list(tmp_path):
    cfg = _write(tmp_path / "c.ini", "[run]\nparallel = true\n")
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert _manifest(tmp_path / "o") == {"passed": True, "scenarios": []}


@pytest.mark.parametrize("text", [
    "[scenario a]\nkind = teleport\n",
    "[scenario a]\nbeta = 1\n",
    "[scenario a]\nkind = heat\nbogus = 1\n",
    "[scenario a]\nkind = heat\nbeta = abc\n",
    "[something]\nx = 1\n",
    "[scenario a]\nkind = wei-norman\nbeta = cosh:1\n",
    "not an ini file",
])
def test_malformed_config_exit_two(tmp_path, text, capsys):
    cfg = _write(tmp_path / "c.ini", text)
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "airy-evolve:" in capsys.readouterr().err


def test_missing_config_exit_two(tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.ini")]) == 2


def test_invalid_numeric_range_exit_two(tmp_path):
    assert cli.main(["heat", "--n", "1", "--out", str(tmp_path)]) == 2
    assert cli.main(["heat", "--t", "-1", "--out", str(tmp_path)]) == 2


def test_failed_check_exit_one(tmp_path, monkeypatch):
    def failing():
        return [validation.Check("always-fails", 1.0, 0.5, False, "forced")]

    monkeypatch.setitem(validation.CHECKS, "always-fails", failing)
    assert cli.main(["validate", "always-fails", "--out", str(tmp_path)]) == 1
    check = _manifest(tmp_path)["scenarios"][0]["checks"][0]
    assert check["name"] == "always-fails" and not check["passed"]


def test_unknown_check_is_config_error(tmp_path):
    assert cli.main(["validate", "nope", "--out", str(tmp_path)]) == 2


def test_subcommand_config_filters_kind(tmp_path):
    cfg = _write(tmp_path / "c.ini", "[scenario p]\nkind = poly\n[scenario c]\nkind = centroid\n")
    assert cli.main(["poly", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert [s["name"] for s in _manifest(tmp_path / "o")["scenarios"]] == ["p"]


def test_scenario_build_defaults_and_case():
    s = Scenario.build("x", "airy-packet", {"a": "1.5", "tau-max": "1"})
    assert s.parameters["A"] == 1.5 and s.parameters["tau_max"] == 1.0 and s.parameters["b"] == 1.0
    with pytest.raises(ConfigError):
        Scenario.build("x", "poly", {"lambda": "1/0"})


def test_acceptance_preset_names_every_criterion(tmp_path):
    cfg = load_config(ROOT / "configs" / "acceptance.ini")
    assert all(s.kind == "validate" for s in cfg.scenarios)
    listed = {c.strip() for s in cfg.scenarios for c in s.parameters["checks"].split(",")}
    assert listed == set(validation.CHECKS)
    names = [c.name for c in validation.run_checks(sorted(listed - {"airy-packet", "transform-identities"}))]
    required = ["gleisher[quad,beta=0.5,t=1.0]", "heat-oracle[", "gw-monomials-equal-H2", "cubic-monomials-equal-H3",
                "recurrences[p=4", "wei-norman-paths[piecewise]", "wei-norman-constant-phase-exact",
                "wei-norman-vs-cn", "centroid-acceleration[phi=sin]", "weyl-conjugation", "chain-rule[gaussian"]
    for prefix in required:
        assert any(n.startswith(prefix) for n in names), prefix


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "airy_evolve.cli", "poly", "--n-max", "2", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "manifest.json").exists()
