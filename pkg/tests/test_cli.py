import json

import pytest

from sbeval.cli import EXIT_FATAL, EXIT_OK, EXIT_PARTIAL, main
from sbeval.fixtures import character_program_text, fixture_path


def test_run_all_and_report(demo_workspace, capsys):
    code = main(["-w", str(demo_workspace), "-c", str(demo_workspace / "demo.toml"), "run-all"])
    out = capsys.readouterr().out
    assert code == EXIT_PARTIAL
    assert "| alpha | 97.6365 |" in out
    golden = fixture_path("golden", "demo", "ranking.md").read_text()
    assert main(["-w", str(demo_workspace), "report"]) == EXIT_OK
    assert capsys.readouterr().out == golden


def test_single_stages(demo_workspace, capsys):
    args = ["-w", str(demo_workspace), "-c", str(demo_workspace / "demo.toml"), "--program", "alpha"]
    for stage in ("extract", "convert", "stabilize", "render", "classify", "diversity", "score"):
        assert main(args + [stage]) == EXIT_OK, stage
    assert "| alpha | 100.0000 |" in capsys.readouterr().out


def test_gather_mock_then_score(tmp_path, capsys):
    ws = tmp_path / "ws"
    script = tmp_path / "script.json"
    script.write_text(json.dumps({"default": "```\n" + character_program_text("I") + "```"}))
    base = ["-w", str(ws), "-t", "2"]
    assert main(base + ["gather", "--name", "mock", "--script", str(script)]) == EXIT_OK
    assert (ws / "mock" / "responses" / "Z" / "02.txt").is_file()
    assert main(base + ["run-all"]) == EXIT_OK
    assert "| mock |" in capsys.readouterr().out


def test_gather_tot_with_bundled_prompts(tmp_path):
    ws = tmp_path / "ws"
    script = fixture_path("mock", "zero_shot.json")
    cfg = tmp_path / "c.toml"
    cfg.write_text('[evaluation]\ntrials = 2\nalphabet = "T"\n')
    code = main(["-w", str(ws), "-c", str(cfg), "gather", "--name", "tot", "--strategy", "tot_bfs",
                 "--script", str(script)])
    assert code == EXIT_OK
    record = json.loads((ws / "tot" / "records" / "T" / "01.json").read_text())
    assert len(record["transcript"]) == 9


@pytest.mark.parametrize("argv", [
    ["report"],
    ["-c", "missing.toml", "extract"],
    ["gather", "--name", "x"],
])
def test_fatal_errors(tmp_path, argv, capsys):
    assert main(["-w", str(tmp_path)] + argv) == EXIT_FATAL
    assert "sbeval: error:" in capsys.readouterr().err


def test_missing_workspace(tmp_path, capsys):
    assert main(["-w", str(tmp_path / "absent"), "extract"]) == EXIT_FATAL


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "sbeval", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "run-all" in out.stdout
