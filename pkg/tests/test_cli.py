import json
from importlib.resources import files

import jsonschema
import pytest

from kvnlab.cli import COMMANDS, ConfigError, HO_SOURCE, load_config, main, run

SCHEMA = json.loads(files("kvnlab").joinpath("report_schema.json").read_text())

SMALL_GRID = ["--n", "64", "--half-width", "5", "--sigma", "0.5", "--t-final", "1", "--dt", "0.1"]


def _report(out, command):
    return json.loads((out / f"{command}.json").read_text())


def _run(tmp_path, command, *extra):
    out = tmp_path / command
    code = main([command, "--out", str(out), *extra])
    return code, out


def test_verify_algebra_on_oscillator(tmp_path):
    code, out = _run(tmp_path, "verify-algebra", "--hamiltonian", HO_SOURCE)
    doc = _report(out, "verify-algebra")
    assert code == 0
    assert len(doc["checks"]) == 11
    assert all(c["status"] == "pass" and c["residual"] == "0" for c in doc["checks"])
    jsonschema.validate(doc, SCHEMA)


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dof": 2, "hamiltonian": "q_1*p_2", "out": str(tmp_path / "r")}))
    assert main(["verify-algebra", "--config", str(cfg)]) == 0
    assert _report(tmp_path / "r", "verify-algebra")["model"]["dof"] == 2


def test_lambda_observable_is_rejected_by_t3(tmp_path, capsys):
    code, out = _run(tmp_path, "check-symmetries", "--observable", "lam_q_1")
    assert code == 1
    doc = _report(out, "check-symmetries")
    failed = [c for c in doc["checks"] if c["status"] == "fail"]
    assert len(failed) == 1 and "T3" in failed[0]["name"]
    assert failed[0]["details"]["failing"] == "T3"
    assert "T3" in capsys.readouterr().out
    jsonschema.validate(doc, SCHEMA)


def test_superfield_observable_is_invariant(tmp_path):
    code, _ = _run(tmp_path, "check-symmetries", "--observable", "q_1^2 + p_1", "--superfield")
    assert code == 0


def test_propagate_with_zero_hamiltonian(tmp_path):
    code, out = _run(tmp_path, "propagate", "--hamiltonian", "0", *SMALL_GRID)
    assert code == 0
    doc = _report(out, "propagate")
    assert all(c["status"] == "pass" for c in doc["checks"])
    rows = (out / "propagate.csv").read_text().splitlines()
    assert rows[0] == "q,p,re_psi,im_psi,rho" and len(rows) == 64 * 64 + 1
    header = json.loads((out / "propagate.header.json").read_text())
    assert header["grid"]["n_q"] == 64


@pytest.mark.parametrize(
    "command,extra",
    [
        ("superfield-expand", ["--hamiltonian", "1/2*p_1^2 + 1/4*q_1^4"]),
        ("action-check", ["--hamiltonian", "q_1^3"]),
        ("picture-change", []),
        ("check-symmetries", []),
        ("kernel-check", SMALL_GRID + ["--center", "1", "0.5"]),
        ("interference", ["--n", "128", "--half-width", "8", "--center", "-3", "0", "--center1", "3", "0"]),
    ],
)
def test_every_command_produces_valid_passing_report(tmp_path, command, extra):
    code, out = _run(tmp_path, command, *extra)
    doc = _report(out, command)
    jsonschema.validate(doc, SCHEMA)
    assert doc["command"] == command
    assert code == 0, [c for c in doc["checks"] if c["status"] == "fail"]


def test_reports_are_byte_identical_apart_from_timing(tmp_path):
    texts = []
    for k in range(2):
        out = tmp_path / str(k)
        main(["kernel-check", "--out", str(out), *SMALL_GRID])
        doc = _report(out, "kernel-check")
        doc["elapsed_ms"] = 0
        texts.append(json.dumps(doc, sort_keys=True))
    assert texts[0] == texts[1]


def test_invalid_config_exits_without_report(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"hamiltonain": "q_1", "out": str(tmp_path / "r")}))
    assert main(["verify-algebra", "--config", str(cfg)]) == 2
    assert "unknown config key" in capsys.readouterr().err
    assert not (tmp_path / "r").exists()


@pytest.mark.parametrize(
    "argv,message",
    [
        (["verify-algebra", "--hamiltonian", "q_1 + "], "end of input"),
        (["verify-algebra", "--hamiltonian", "q_3"], "unknown symbol"),
        (["propagate", "--hamiltonian", "q_1*p_1"], "non-separable"),
        (["propagate", "--dt", "-1"], "dt must be positive"),
        (["interference"], "center1"),
    ],
)
def test_errors_exit_2_and_write_nothing(tmp_path, capsys, argv, message):
    out = tmp_path / "r"
    assert main([*argv, "--out", str(out)]) == 2
    assert message in capsys.readouterr().err
    assert not list(out.glob("*.json")) if out.exists() else True


def test_load_config_validation():
    with pytest.raises(ConfigError, match="grid.x"):
        load_config({"grid": {"x": 1}})
    with pytest.raises(ConfigError):
        load_config({"dof": 1.5})
    with pytest.raises(ConfigError):
        load_config({"center": [1]})
    with pytest.raises(ConfigError):
        load_config({"order": 4})
    assert load_config({}).hamiltonian == HO_SOURCE


def test_run_rejects_unknown_command():
    with pytest.raises(ConfigError):
        run("plot", load_config({}))


def test_command_list():
    assert set(COMMANDS) == set(SCHEMA["properties"]["command"]["enum"])
