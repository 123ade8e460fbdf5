import json
import subprocess
import sys
from importlib import resources

import pytest

from envrig.cli import main
from envrig.records import parse_dump
from envrig.runtime import FAULT_ENV_VAR


def run_cli(*argv):
    return main(list(argv))


def fixture_path(tmp_path, name="cartpole.sdf"):
    text = resources.files("envrig").joinpath("models", name).read_text()
    path = tmp_path / name
    path.write_text(text)
    return path


# --- run --------------------------------------------------------------------


def test_run_zero_policy_from_exact_upright_scores_500(capsys):
    code = run_cli(
        "run", "--env", "cartpole-balance", "--seed", "42", "--steps", "500",
        "--policy", "zero", "--init-noise", "0",
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "total_reward=500" in out
    assert "episodes=1" in out


def test_run_dump_twice_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for path in (a, b):
        code = run_cli(
            "run", "--env", "cartpole-balance", "--seed", "42", "--steps", "200",
            "--policy", "random", "--dump", str(path),
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    header, records = parse_dump(a.read_text())
    assert header.env == "cartpole-balance"
    assert header.seed == 42
    assert len(records) == 200


def test_unknown_env_exits_2_and_lists_ids(capsys):
    code = run_cli("run", "--env", "nosuch", "--steps", "1")
    err = capsys.readouterr().err
    assert code == 2
    for env_id in ("cartpole-balance", "cartpole-swingup", "pendulum-swingup"):
        assert env_id in err


def test_script_policy_runs_and_validates(tmp_path):
    script = tmp_path / "actions.jsonl"
    script.write_text("\n".join(["[0.5]", "[-0.5]", "0.25"]) + "\n")
    assert run_cli(
        "run", "--env", "cartpole-balance", "--steps", "3", "--policy", f"script:{script}"
    ) == 0
    # script shorter than steps -> usage error
    assert run_cli(
        "run", "--env", "cartpole-balance", "--steps", "5", "--policy", f"script:{script}"
    ) == 2


def test_bad_policy_spec():
    assert run_cli("run", "--env", "cartpole-balance", "--policy", "greedy") == 2


def test_bad_engine_flag_is_usage_error(capsys):
    assert run_cli("run", "--env", "cartpole-balance", "--engine", "warp") == 2


# --- verify-determinism ------------------------------------------------------


def test_verify_determinism_passes(capsys):
    code = run_cli(
        "verify-determinism", "--env", "cartpole-balance", "--seed", "1",
        "--steps", "300", "--repeats", "3",
    )
    assert code == 0
    assert "deterministic" in capsys.readouterr().out


def test_verify_determinism_requires_two_repeats(capsys):
    code = run_cli(
        "verify-determinism", "--env", "cartpole-balance", "--repeats", "1"
    )
    assert code == 2


def test_verify_determinism_catches_injected_fault(capsys, monkeypatch):
    monkeypatch.setenv(FAULT_ENV_VAR, "1")
    code = run_cli(
        "verify-determinism", "--env", "cartpole-balance", "--seed", "1",
        "--steps", "50", "--repeats", "2",
    )
    err = capsys.readouterr().err
    assert code == 1
    assert "diverges" in err and "step" in err


# --- benchmark -----------------------------------------------------------------


def test_benchmark_report_is_consistent(capsys):
    code = run_cli("benchmark", "--env", "cartpole-balance", "--steps", "500")
    captured = capsys.readouterr()
    assert code == 0
    report = json.loads(captured.out)
    assert report["sim_seconds"] == 500 * 0.01
    assert report["achieved_rtf"] == pytest.approx(
        report["sim_seconds"] / report["wall_seconds"], rel=1e-9
    )
    assert report["ticks_per_second"] > 0
    assert "ticks/s" in captured.err


def test_benchmark_parallel_mode(capsys):
    code = run_cli(
        "benchmark", "--env", "cartpole-balance", "--steps", "50",
        "--parallel", "3", "--workers", "2",
    )
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["instances"] == 3


# --- replay ---------------------------------------------------------------------


@pytest.fixture
def dump_file(tmp_path):
    path = tmp_path / "episode.jsonl"
    assert run_cli(
        "run", "--env", "cartpole-balance", "--seed", "11", "--steps", "150",
        "--policy", "random", "--dump", str(path),
    ) == 0
    return path


def test_replay_fresh_dump(dump_file, capsys):
    assert run_cli("replay", str(dump_file)) == 0
    assert "replay ok" in capsys.readouterr().out


def test_replay_detects_tampering(dump_file, capsys):
    lines = dump_file.read_text().splitlines()
    record = json.loads(lines[40])
    record["rew"] = record["rew"] + 1.0
    lines[40] = json.dumps(record, separators=(",", ":"))
    dump_file.write_text("\n".join(lines) + "\n")
    code = run_cli("replay", str(dump_file))
    err = capsys.readouterr().err
    assert code == 1
    assert "step 40" in err


def test_replay_truncated_line_names_it(dump_file, capsys):
    text = dump_file.read_text()
    dump_file.write_text(text[:-30])
    code = run_cli("replay", str(dump_file))
    err = capsys.readouterr().err
    assert code == 1
    assert "malformed dump" in err
    assert "line 151" in err


def test_replay_refuses_incompatible_version(dump_file, capsys):
    lines = dump_file.read_text().splitlines()
    header = json.loads(lines[0])
    header["version"] = "99.0.0"
    lines[0] = json.dumps(header, separators=(",", ":"))
    dump_file.write_text("\n".join(lines) + "\n")
    assert run_cli("replay", str(dump_file)) == 2


def test_replay_flag_conflicts_with_header(dump_file):
    assert run_cli("replay", str(dump_file), "--seed", "999") == 2
    assert run_cli("replay", str(dump_file), "--env", "pendulum-swingup") == 2


def test_replay_missing_file():
    assert run_cli("replay", "/nonexistent/dump.jsonl") == 2


# --- parse ----------------------------------------------------------------------


def test_parse_shipped_fixture(tmp_path, capsys):
    path = fixture_path(tmp_path)
    assert run_cli("parse", str(path)) == 0
    captured = capsys.readouterr()
    assert captured.err == ""


def test_parse_invalid_file(tmp_path, capsys):
    path = tmp_path / "bad.sdf"
    path.write_text(
        '<model name="m"><link name="a"><inertial><mass>0</mass>'
        "<inertia><ixx>1</ixx><iyy>1</iyy><izz>1</izz></inertia>"
        "</inertial></link></model>"
    )
    code = run_cli("parse", str(path))
    err = capsys.readouterr().err
    assert code == 1
    assert "mass > 0" in err
    assert str(path) in err


def test_parse_print_round_trips(tmp_path, capsys):
    path = fixture_path(tmp_path)
    assert run_cli("parse", str(path), "--print") == 0
    canonical = capsys.readouterr().out
    path2 = tmp_path / "canonical.sdf"
    path2.write_text(canonical)
    assert run_cli("parse", str(path2)) == 0


def test_parse_binary_garbage(tmp_path, capsys):
    path = tmp_path / "junk.sdf"
    path.write_bytes(bytes(range(256)))
    code = run_cli("parse", str(path))
    assert code == 1
    assert "UTF-8" in capsys.readouterr().err


# --- serve ----------------------------------------------------------------------


def serve_session(requests, *extra_args):
    proc = subprocess.Popen(
        [sys.executable, "-m", "envrig.cli", "serve", *extra_args],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        text=True,
    )
    out, _ = proc.communicate("\n".join(requests) + "\n", timeout=60)
    return proc.returncode, out.splitlines()


def test_serve_protocol_round_trip():
    code, lines = serve_session(
        [
            '{"op":"reset"}',
            '{"op":"step","act":[0.0]}',
            '{"op":"render","mode":"text"}',
            '{"op":"flip"}',
            '{"op":"step","act":[9.9]}',
            '{"op":"close"}',
        ],
        "--env", "cartpole-balance", "--seed", "42", "--init-noise", "0",
    )
    assert code == 0
    hello = json.loads(lines[0])
    assert hello["env"] == "cartpole-balance"
    assert hello["observation_space"]["kind"] == "box"
    assert json.loads(lines[1])["obs"] == [0.0, 0.0, 0.0, 0.0]
    record = json.loads(lines[2])
    assert record["rew"] == 1.0 and record["done"] is False
    assert "x=0.0000" in json.loads(lines[3])["text"]
    assert json.loads(lines[4])["error"]["type"] == "ValidationError"
    assert json.loads(lines[5])["error"]["type"] == "ValidationError"
    assert json.loads(lines[6]) == {"ok": True}


def test_serve_unknown_env():
    code, lines = serve_session([], "--env", "nosuch")
    assert code == 2
    error = json.loads(lines[0])["error"]
    assert "cartpole-balance" in error["ids"]


def test_serve_step_matches_run_dump(tmp_path):
    script = tmp_path / "acts.jsonl"
    actions = ["[0.3]", "[-0.7]", "[0.1]", "[1.0]", "[-1.0]"]
    script.write_text("\n".join(actions) + "\n")
    dump = tmp_path / "dump.jsonl"
    assert run_cli(
        "run", "--env", "pendulum-swingup", "--seed", "8", "--steps", "5",
        "--policy", f"script:{script}", "--dump", str(dump),
    ) == 0
    requests = ['{"op":"reset"}'] + [f'{{"op":"step","act":{a}}}' for a in actions] + ['{"op":"close"}']
    code, lines = serve_session(requests, "--env", "pendulum-swingup", "--seed", "8")
    assert code == 0
    assert lines[2:7] == dump.read_text().splitlines()[1:]
