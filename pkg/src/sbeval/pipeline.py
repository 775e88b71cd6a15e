"""Stage-by-stage evaluation over a workspace directory.

Layout (trial numbers are 1-based, two digits)::

    <root>/<program>/responses/<CHAR>/<NN>.txt   gathered responses
    <root>/<program>/records/<CHAR>/<NN>.json    harness transcripts
    <root>/<program>/code/<CHAR>/<NN>.txt        extracted drop_block calls
    <root>/<program>/levels/<CHAR>/<NN>.xml      settled levels
    <root>/<program>/images/<CHAR>/<NN>.pgm      rendered structures
    <root>/<program>/scores/*.csv                per-stage tables, failures.csv
    <root>/report/{scores,weights,ranking}.csv, ranking.md

A missing or unusable input fails that trial only; the run carries on.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import harness
from .classify import LABELS, ExternalLogitsClassifier, LogitsError, TemplateClassifier, softmax
from .config import ConfigError, PipelineConfig
from .core import index_of
from .extraction import extract as extract_response
from .extraction import format_calls, parse_drop_calls
from .levelgen import assess_stability, settle
from .metrics import RankedReport, diversity, score_tables
from .raster import decode_pgm, encode_pgm, rasterize
from .xml_codec import XmlLevelError, level_to_xml, xml_to_level

log = logging.getLogger(__name__)

STAGES = ("gather", "extract", "convert", "stabilize", "render", "classify", "diversity", "score")
REPORT_DIR = "report"


class WorkspaceError(RuntimeError):
    """Fatal problem with the workspace as a whole."""


@dataclass(frozen=True)
class StageSummary:
    stage: str
    ok: int
    failed: int

    @property
    def total(self) -> int:
        return self.ok + self.failed

    def __str__(self):
        return f"{self.stage}: ok={self.ok} failed={self.failed}"


def _write(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, bytes):
        path.write_bytes(data)
    else:
        path.write_text(data, encoding="utf-8", newline="\n")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _read_csv(path: Path) -> list[dict]:
    if not path.is_file():
        return []
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


class Workspace:
    def __init__(self, root, config: PipelineConfig):
        self.root = Path(root)
        self.config = config
        if not self.root.is_dir():
            raise WorkspaceError(f"workspace {self.root} is not a directory")

    @property
    def trials(self) -> int:
        return self.config.evaluation.trials

    @property
    def alphabet(self):
        return self.config.evaluation.alphabet

    def programs(self) -> list[str]:
        try:
            entries = sorted(p.name for p in self.root.iterdir() if p.is_dir())
        except OSError as exc:
            raise WorkspaceError(f"cannot list workspace {self.root}: {exc}") from exc
        return [name for name in entries if name != REPORT_DIR and not name.startswith(".")]

    def trial_ids(self):
        for ch in self.alphabet:
            for i in range(1, self.trials + 1):
                yield ch, i

    def path(self, program: str, kind: str, ch: str, trial: int, ext: str) -> Path:
        return self.root / program / kind / ch / f"{trial:02d}.{ext}"

    def scores(self, program: str, name: str) -> Path:
        return self.root / program / "scores" / name

    def report(self, name: str) -> Path:
        return self.root / REPORT_DIR / name

    def record_failures(self, program: str, stage: str, failures) -> None:
        path = self.scores(program, "failures.csv")
        rows = [r for r in _read_csv(path) if r["stage"] != stage]
        rows += [{"stage": stage, "character": ch, "trial": f"{i:02d}", "reason": why} for ch, i, why in failures]
        order = {s: n for n, s in enumerate(STAGES)}
        rows.sort(key=lambda r: (order.get(r["stage"], 99), r["character"], r["trial"]))
        if not rows and not path.exists():
            return
        _write(path, _csv_text(["stage", "character", "trial", "reason"],
                               [[r["stage"], r["character"], r["trial"], r["reason"]] for r in rows]))


def _per_trial(ws: Workspace, stage: str, programs, work) -> StageSummary:
    """Apply ``work(program, ch, trial)`` everywhere; it returns None or a failure reason."""
    ok = failed = 0
    for program in programs:
        failures = []
        for ch, i in ws.trial_ids():
            reason = work(program, ch, i)
            if reason is None:
                ok += 1
            else:
                failed += 1
                failures.append((ch, i, reason))
        ws.record_failures(program, stage, failures)
    summary = StageSummary(stage, ok, failed)
    log.info("%s", summary)
    return summary


def _clear(path: Path) -> None:
    if path.exists():
        path.unlink()


def run_gather(ws: Workspace, program: str, strategy: str, provider, *, prompts=None, tot=None,
               clock=None) -> StageSummary:
    """Run one strategy for every (character, trial) and store the responses."""
    kwargs = {"prompts": prompts, "tot": tot}
    if clock is not None:
        kwargs["clock"] = clock
    (ws.root / program).mkdir(parents=True, exist_ok=True)

    def work(prog, ch, i):
        record = harness.run_strategy(strategy, ch, provider, ws.config.budgets,
                                      program_id=prog, trial_index=i, **kwargs)
        _write(ws.path(prog, "responses", ch, i, "txt"), record.final_response)
        _write(ws.path(prog, "records", ch, i, "json"), record.to_json())
        if record.status is not harness.TrialStatus.OK:
            return f"{record.status.value}: {record.reason}"
        return None

    return _per_trial(ws, "gather", [program], work)


def run_extract(ws: Workspace, programs=None) -> StageSummary:
    strict = ws.config.strict_extraction

    def work(program, ch, i):
        src = ws.path(program, "responses", ch, i, "txt")
        dst = ws.path(program, "code", ch, i, "txt")
        _clear(dst)
        try:
            text = src.read_text(encoding="utf-8")
        except FileNotFoundError:
            return "missing response"
        except (OSError, UnicodeDecodeError) as exc:
            return f"unreadable response: {exc}"
        result = extract_response(text, strict=strict)
        if not result.ok:
            detail = result.diagnostics[0] if result.diagnostics else ""
            return f"{result.status.value}: {detail}"
        _write(dst, format_calls(result.calls))
        return None

    return _per_trial(ws, "extract", programs or ws.programs(), work)


def run_convert(ws: Workspace, programs=None) -> StageSummary:
    cfg = ws.config
    settled = {}

    def work(program, ch, i):
        src = ws.path(program, "code", ch, i, "txt")
        dst = ws.path(program, "levels", ch, i, "xml")
        _clear(dst)
        if not src.is_file():
            return "no extracted code"
        result = parse_drop_calls(src.read_text(encoding="utf-8"))
        if not result.ok:
            return f"{result.status.value}: extracted code does not parse"
        outcome = settle(result.calls, cfg.grid)
        settled.setdefault(program, []).append([ch, f"{i:02d}", len(outcome.level.blocks), outcome.dropped_out])
        _write(dst, level_to_xml(outcome.level, cfg.xml))
        return None

    programs = programs or ws.programs()
    summary = _per_trial(ws, "convert", programs, work)
    for program in programs:
        _write(ws.scores(program, "settle.csv"),
               _csv_text(["character", "trial", "placed", "dropped_out"], settled.get(program, [])))
    return summary


def _load_level(ws: Workspace, program, ch, i):
    src = ws.path(program, "levels", ch, i, "xml")
    if not src.is_file():
        return None, "no level"
    try:
        return xml_to_level(src.read_text(encoding="utf-8"), ws.config.xml, ws.config.grid), None
    except XmlLevelError as exc:
        return None, f"bad level: {exc}"


def run_stabilize(ws: Workspace, programs=None) -> StageSummary:
    rows: dict[str, list] = {}

    def work(program, ch, i):
        level, why = _load_level(ws, program, ch, i)
        if level is None:
            rows.setdefault(program, []).append([ch, f"{i:02d}", "failed", 0, 0, 0.0])
            return why
        rep = assess_stability(level)
        rows.setdefault(program, []).append([ch, f"{i:02d}", "ok", rep.total_blocks, rep.moving_blocks, repr(rep.sta)])
        return None

    programs = programs or ws.programs()
    summary = _per_trial(ws, "stabilize", programs, work)
    for program in programs:
        _write(ws.scores(program, "stability.csv"),
               _csv_text(["character", "trial", "status", "total_blocks", "moving_blocks", "sta"], rows.get(program, [])))
    return summary


def run_render(ws: Workspace, programs=None) -> StageSummary:
    cfg = ws.config

    def work(program, ch, i):
        dst = ws.path(program, "images", ch, i, "pgm")
        _clear(dst)
        level, why = _load_level(ws, program, ch, i)
        if level is None:
            return why
        _write(dst, encode_pgm(rasterize(level, cfg.cell_px, cfg.pad_cells)))
        return None

    return _per_trial(ws, "render", programs or ws.programs(), work)


def make_classifier(config: PipelineConfig):
    cc = config.classifier
    if cc.mode == "external":
        if cc.logits_path is None or not Path(cc.logits_path).is_file():
            raise ConfigError(f"external classifier selected but logits file {cc.logits_path} is missing")
        return ExternalLogitsClassifier.from_file(cc.logits_path)
    from .fixtures import default_templates

    return TemplateClassifier(default_templates(config.grid, config.cell_px, config.pad_cells), cc.alpha)


def run_classify(ws: Workspace, programs=None, classifier=None) -> StageSummary:
    if classifier is None:
        classifier = make_classifier(ws.config)
    external = isinstance(classifier, ExternalLogitsClassifier)
    rows: dict[str, list] = {}

    def work(program, ch, i):
        src = ws.path(program, "images", ch, i, "pgm")
        failed_row = [ch, f"{i:02d}", "failed", 0.0] + [""] * len(LABELS)
        if not src.is_file():
            rows.setdefault(program, []).append(failed_row)
            return "no image"
        try:
            image = decode_pgm(src.read_bytes())
            key = f"{ch}/{i:02d}.pgm"
            if external and f"{program}/{key}" in classifier.table:
                key = f"{program}/{key}"
            probs = softmax(classifier(image, key))
        except (ValueError, LogitsError) as exc:
            rows.setdefault(program, []).append(failed_row)
            return f"classification failed: {exc}"
        sim = float(probs[index_of(ch, LABELS)])
        rows.setdefault(program, []).append([ch, f"{i:02d}", "ok", repr(sim)] + [repr(float(p)) for p in probs])
        return None

    programs = programs or ws.programs()
    summary = _per_trial(ws, "classify", programs, work)
    header = ["character", "trial", "status", "sim"] + [f"p_{ch}" for ch in LABELS]
    for program in programs:
        _write(ws.scores(program, "similarity.csv"), _csv_text(header, rows.get(program, [])))
    return summary


def _raw_metrics(ws: Workspace, program: str):
    """(status, sta, sim, vector) per (char, trial) from the stage tables."""
    stab = {(r["character"], int(r["trial"])): r for r in _read_csv(ws.scores(program, "stability.csv"))}
    simi = {(r["character"], int(r["trial"])): r for r in _read_csv(ws.scores(program, "similarity.csv"))}
    out = {}
    for ch, i in ws.trial_ids():
        a, b = stab.get((ch, i)), simi.get((ch, i))
        if a and b and a["status"] == "ok" and b["status"] == "ok":
            vec = np.array([float(b[f"p_{c}"]) for c in LABELS])
            out[ch, i] = ("ok", float(a["sta"]), float(b["sim"]), vec)
        else:
            out[ch, i] = ("failed", 0.0, 0.0, None)
    return out


def run_diversity(ws: Workspace, programs=None) -> StageSummary:
    ok = failed = 0
    for program in programs or ws.programs():
        raw = _raw_metrics(ws, program)
        raw_rows, div_rows, failures = [], [], []
        for ch in ws.alphabet:
            vectors = []
            for i in range(1, ws.trials + 1):
                status, sta, sim, vec = raw[ch, i]
                raw_rows.append([ch, f"{i:02d}", status, repr(sta), repr(sim)])
                if status == "ok":
                    vectors.append(vec)
                    ok += 1
                else:
                    failed += 1
                    failures.append((ch, i, "failed upstream"))
            div_rows.append([ch, len(vectors), repr(diversity(vectors, ws.trials))])
        _write(ws.scores(program, "raw.csv"), _csv_text(["character", "trial", "status", "sta", "sim"], raw_rows))
        _write(ws.scores(program, "diversity.csv"), _csv_text(["character", "vectors", "div"], div_rows))
        ws.record_failures(program, "diversity", failures)
    summary = StageSummary("diversity", ok, failed)
    log.info("%s", summary)
    return summary


def _f(x: float, places: int) -> str:
    text = f"{x:.{places}f}"
    return text[1:] if text.startswith("-") and float(text) == 0 else text


def emit_report(report: RankedReport, root) -> list[Path]:
    """Write ``ranking.csv`` and ``ranking.md`` under ``<root>/report``."""
    out = Path(root) / REPORT_DIR
    rows = report.standings()
    csv_path = out / "ranking.csv"
    _write(csv_path, _csv_text(
        ["program", "prompt_k", "norm_prompt_k", "rank"],
        [[r.program, _f(r.prompt, 8), _f(r.norm_prompt, 6), r.rank] for r in rows],
    ))
    md = ["| Program | norm_prompt_k | prompt_k | Rank |", "|:---|---:|---:|---:|"]
    md += [f"| {r.program} | {_f(r.norm_prompt, 4)} | {_f(r.prompt, 6)} | {r.rank} |" for r in rows]
    md_path = out / "ranking.md"
    _write(md_path, "\n".join(md) + "\n")
    return [csv_path, md_path]


def run_score(ws: Workspace, programs=None) -> tuple[RankedReport, StageSummary]:
    """Pool every program's raw metrics, then weight, score and rank."""
    programs = programs or ws.programs()
    if not programs:
        raise WorkspaceError(f"no program directories in {ws.root}")
    T, C, P = ws.trials, len(ws.alphabet), len(programs)
    sta = np.zeros((T, C, P))
    sim = np.zeros((T, C, P))
    div = np.zeros((C, P))
    status = np.zeros((T, C, P), dtype=bool)
    for k, program in enumerate(programs):
        raw = {(r["character"], int(r["trial"])): r for r in _read_csv(ws.scores(program, "raw.csv"))}
        divs = {r["character"]: float(r["div"]) for r in _read_csv(ws.scores(program, "diversity.csv"))}
        for j, ch in enumerate(ws.alphabet):
            div[j, k] = divs.get(ch, 0.0)
            for i in range(1, T + 1):
                row = raw.get((ch, i))
                if row and row["status"] == "ok":
                    status[i - 1, j, k] = True
                    sta[i - 1, j, k] = float(row["sta"])
                    sim[i - 1, j, k] = float(row["sim"])
    report = score_tables(sta, sim, div, ws.config.evaluation, programs)

    score_rows = []
    for k, program in enumerate(programs):
        for j, ch in enumerate(ws.alphabet):
            for i in range(T):
                score_rows.append([
                    program, ch, f"{i + 1:02d}", "ok" if status[i, j, k] else "failed",
                    _f(sta[i, j, k], 6), _f(sim[i, j, k], 6), _f(div[j, k], 6),
                    _f(report.trial[i, j, k], 8), _f(report.char[j, k], 8),
                ])
    _write(ws.report("scores.csv"), _csv_text(
        ["program", "character", "trial", "status", "sta", "sim", "div", "trial_score", "char_score"], score_rows))
    w = report.weights
    _write(ws.report("weights.csv"), _csv_text(
        ["character", "w_sta", "w_sim", "w_div", "weight"],
        [[ch, _f(w.w_sta[j], 6), _f(w.w_sim[j], 6), _f(w.w_div[j], 6), _f(w.weight[j], 8)]
         for j, ch in enumerate(ws.alphabet)],
    ))
    emit_report(report, ws.root)
    n_ok = int(status.sum())
    summary = StageSummary("score", n_ok, status.size - n_ok)
    log.info("%s", summary)
    return report, summary


def run_stage(stage: str, ws: Workspace, programs=None):
    """Run one post-gather stage; returns its StageSummary."""
    if stage == "gather":
        raise ValueError("gather needs a provider and strategy; use run_gather")
    runners = {
        "extract": run_extract,
        "convert": run_convert,
        "stabilize": run_stabilize,
        "render": run_render,
        "classify": run_classify,
        "diversity": run_diversity,
    }
    if stage == "score":
        return run_score(ws, programs)[1]
    if stage not in runners:
        raise ValueError(f"unknown stage {stage!r}")
    return runners[stage](ws, programs)


def run_all(ws: Workspace, programs=None) -> tuple[RankedReport, list[StageSummary]]:
    programs = programs or ws.programs()
    summaries = [run_stage(s, ws, programs) for s in STAGES[1:-1]]
    report, summary = run_score(ws, programs)
    summaries.append(summary)
    return report, summaries
