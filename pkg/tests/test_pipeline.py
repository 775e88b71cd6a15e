import csv
import json
import shutil

import pytest

import oracles
from sbeval.config import ClassifierConfig, ConfigError, PipelineConfig, load_config
from sbeval.core import EvaluationConfig
from sbeval.fixtures import character_program_text, fixture_path
from sbeval.harness import StrategyPrompts
from sbeval.metrics import rank_prompt_scores
from sbeval.pipeline import (
    Workspace,
    WorkspaceError,
    emit_report,
    run_all,
    run_classify,
    run_extract,
    run_gather,
    run_score,
    run_stage,
)
from sbeval.providers import MockProvider


def _cfg(trials, alphabet):
    return PipelineConfig(evaluation=EvaluationConfig(trials=trials, alphabet=tuple(alphabet)))


def _fenced(ch):
    return f"Sure.\n```python\n{character_program_text(ch)}```\n"


def _write_responses(root, program, mapping):
    for (ch, i), text in mapping.items():
        p = root / program / "responses" / ch / f"{i:02d}.txt"
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_extract_counts_one_malformed(tmp_path):
    for program in ("p1", "p2"):
        _write_responses(tmp_path, program, {(ch, i): _fenced(ch) for ch in "AB" for i in (1, 2)})
    (tmp_path / "p2" / "responses" / "B" / "02.txt").write_text("```\nab_drop(1, 2)\n```")
    ws = Workspace(tmp_path, _cfg(2, "AB"))
    summary = run_extract(ws)
    assert (summary.ok, summary.failed) == (7, 1)
    failures = _rows(tmp_path / "p2" / "scores" / "failures.csv")
    assert [(r["stage"], r["character"], r["trial"]) for r in failures] == [("extract", "B", "02")]
    assert not (tmp_path / "p2" / "code" / "B" / "02.txt").exists()


def test_missing_external_logits_is_fatal(tmp_path):
    _write_responses(tmp_path, "p", {("A", 1): _fenced("A")})
    cfg = PipelineConfig(classifier=ClassifierConfig("external", logits_path=tmp_path / "none.json"))
    with pytest.raises(ConfigError):
        run_classify(Workspace(tmp_path, cfg))


def test_external_logits_drive_similarity(tmp_path):
    _write_responses(tmp_path, "p", {("A", i): _fenced("A") for i in (1, 2)})
    logits = tmp_path / "logits.json"
    table = {"A/01.pgm": [0.0] * 26, "p/A/02.pgm": [5.0] + [0.0] * 25}
    logits.write_text(json.dumps(table))
    cfg = PipelineConfig(evaluation=EvaluationConfig(2, alphabet=("A",)),
                         classifier=ClassifierConfig("external", logits_path=logits))
    ws = Workspace(tmp_path, cfg)
    for stage in ("extract", "convert", "stabilize", "render", "classify"):
        run_stage(stage, ws)
    sims = [float(r["sim"]) for r in _rows(tmp_path / "p" / "scores" / "similarity.csv")]
    assert sims[0] == pytest.approx(1 / 26)
    assert sims[1] > 0.8


def test_score_is_idempotent_and_stages_rerun(demo_workspace):
    ws = Workspace(demo_workspace, load_config(demo_workspace / "demo.toml"))
    run_all(ws)
    report_dir = demo_workspace / "report"
    first = {p.name: p.read_bytes() for p in report_dir.iterdir()}
    run_score(ws)
    assert {p.name: p.read_bytes() for p in report_dir.iterdir()} == first
    # drop every downstream artifact and rebuild from the responses
    for program in ("alpha", "beta"):
        for sub in ("code", "levels", "images", "scores"):
            shutil.rmtree(demo_workspace / program / sub)
    shutil.rmtree(report_dir)
    run_all(ws)
    assert {p.name: p.read_bytes() for p in report_dir.iterdir()} == first


def test_all_empty_responses_tie_at_rank_one(tmp_path):
    for program in ("a", "b", "c"):
        _write_responses(tmp_path, program, {(ch, i): "" for ch in "AB" for i in (1, 2)})
    report, summaries = run_all(Workspace(tmp_path, _cfg(2, "AB")))
    assert list(report.prompt) == [0, 0, 0] and report.ranks == (1, 1, 1)
    assert summaries[0].failed == 12
    md = (tmp_path / "report" / "ranking.md").read_text()
    assert md.count("| 0.0000 | 0.000000 | 1 |") == 3


def test_identical_responses_score_zero(tmp_path):
    _write_responses(tmp_path, "solo", {("H", 1): _fenced("H"), ("H", 2): _fenced("H")})
    report, _ = run_all(Workspace(tmp_path, _cfg(2, "H")))
    assert report.div[0, 0] == 0.0 and report.char[0, 0] == 0.0 and report.prompt[0] == 0.0


def test_demo_matches_plain_scoring_oracle(demo_workspace):
    ws = Workspace(demo_workspace, load_config(demo_workspace / "demo.toml"))
    report, _ = run_all(ws)
    T, letters, programs = 3, ws.alphabet, ["alpha", "beta"]
    sta = [[[0.0] * 2 for _ in letters] for _ in range(T)]
    sim = [[[0.0] * 2 for _ in letters] for _ in range(T)]
    div = [[0.0] * 2 for _ in letters]
    for k, program in enumerate(programs):
        scores = demo_workspace / program / "scores"
        stab = {(r["character"], r["trial"]): r for r in _rows(scores / "stability.csv")}
        simi = {(r["character"], r["trial"]): r for r in _rows(scores / "similarity.csv")}
        for j, ch in enumerate(letters):
            vectors = []
            for i in range(T):
                a, b = stab[ch, f"{i + 1:02d}"], simi[ch, f"{i + 1:02d}"]
                if a["status"] == b["status"] == "ok":
                    sta[i][j][k] = float(a["sta"])
                    sim[i][j][k] = float(b["sim"])
                    vectors.append([float(b[f"p_{c}"]) for c in "ABCDEFGHIJKLMNOPQRSTUVWXYZ"])
            div[j][k] = oracles.diversity(vectors, T)
    want = oracles.prompt_scores(sta, sim, div, len(letters))
    assert report.prompt.tolist() == pytest.approx(want, rel=1e-12)
    assert want[0] > want[1] and report.ranks == (1, 2)


def test_gather_with_mock_provider(tmp_path):
    provider = MockProvider({"default": _fenced("L")}, latency=1.0)
    ws = Workspace(tmp_path, _cfg(2, "LT"))
    summary = run_gather(ws, "mocked", "zero_shot", provider, prompts=StrategyPrompts("Draw {character}"),
                         clock=provider.clock)
    assert (summary.ok, summary.failed) == (4, 0)
    record = json.loads((tmp_path / "mocked" / "records" / "T" / "02.json").read_text())
    assert record["status"] == "ok" and record["seconds_used"] == 1.0
    assert (tmp_path / "mocked" / "responses" / "L" / "01.txt").read_text() == _fenced("L")


def test_gather_failures_leave_empty_responses(tmp_path):
    provider = MockProvider({"default": "x" * 200_000})
    ws = Workspace(tmp_path, _cfg(2, "A"))
    summary = run_gather(ws, "big", "zero_shot", provider, prompts=StrategyPrompts("Draw {character}"),
                         clock=provider.clock)
    assert summary.failed == 2
    assert (tmp_path / "big" / "responses" / "A" / "01.txt").read_text() == ""
    assert "budget_exceeded" in (tmp_path / "big" / "scores" / "failures.csv").read_text()


def test_workspace_errors(tmp_path):
    with pytest.raises(WorkspaceError):
        Workspace(tmp_path / "nope", PipelineConfig())
    with pytest.raises(WorkspaceError):
        run_score(Workspace(tmp_path, PipelineConfig()))
    with pytest.raises(ValueError):
        run_stage("gather", Workspace(tmp_path, PipelineConfig()))


def test_emit_report_ties_and_zeros(tmp_path):
    emit_report(rank_prompt_scores(["a", "b", "c"], [0.2, 0.2, 0.1]), tmp_path)
    rows = _rows(tmp_path / "report" / "ranking.csv")
    assert [r["rank"] for r in rows] == ["1", "1", "3"]
    emit_report(rank_prompt_scores(["a", "b"], [0, 0]), tmp_path)
    md = (tmp_path / "report" / "ranking.md").read_text().splitlines()
    assert md[0] == "| Program | norm_prompt_k | prompt_k | Rank |"
    assert md[2:] == ["| a | 0.0000 | 0.000000 | 1 |", "| b | 0.0000 | 0.000000 | 1 |"]


def test_config_loading(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('[evaluation]\ntrials = 4\nalphabet = "XYZ"\n[classifier]\nmode = "external"\n'
                    'logits = "l.json"\n[xml]\ncell_size = 0.5\n[xml.blocks]\nb11 = ["Tiny", 0]\n')
    cfg = load_config(path)
    assert cfg.evaluation.trials == 4 and cfg.evaluation.alphabet == ("X", "Y", "Z")
    assert cfg.classifier.logits_path == tmp_path / "l.json"
    assert cfg.xml.cell_size == 0.5 and cfg.xml.block_name_map[next(iter(cfg.xml.block_name_map))][0] == "Tiny"
    for bad in ('[budgets]\nseed = 1\n', '[evaluation]\ntrials = 1\n', '[classifier]\nmode = "vit"\n',
                'evaluation = 3\n', '[evaluation\n'):
        path.write_text(bad)
        with pytest.raises(ConfigError):
            load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.toml")


def test_bundled_demo_config_exists():
    assert (fixture_path("demo_workspace") / "demo.toml").is_file()
