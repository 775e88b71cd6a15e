"""Command line entry point: ``sbeval <stage> --workspace DIR``.

Exit codes: 0 success, 1 fatal error, 2 finished but some trials failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, PipelineConfig, load_config
from .harness import STRATEGIES, StrategyPrompts, ToTConfig
from .providers import ChatCompletionsProvider, MockProvider

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2


def _load_prompts(path):
    from .config import tomllib
    from .fixtures import HARD_CHARACTERS, character_program_text, fixture_path

    path = Path(path) if path else fixture_path("prompts.toml")
    data = tomllib.loads(path.read_text(encoding="utf-8"))
    examples = tuple((ch, character_program_text(ch)) for ch in data.get("examples", HARD_CHARACTERS))
    prompts = StrategyPrompts(data["task_prompt"], data.get("format_prompt", ""), examples)
    tot = data.get("tot", {})
    tot_cfg = ToTConfig(
        task_prompt=tot.get("task_prompt", data["task_prompt"]),
        eval_prompt=tot["eval_prompt"],
        final_prompt=tot.get("final_prompt", data.get("format_prompt", "")),
        step_prompt=tot.get("step_prompt", "Step {step}: give your next thought."),
        max_depth=int(tot.get("max_depth", 2)),
        branching=int(tot.get("branching", 2)),
    ) if "eval_prompt" in tot else None
    return prompts, tot_cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbeval", description="Score LLM-generated Science Birds structures.")
    parser.add_argument("--workspace", "-w", required=True, type=Path, help="workspace root")
    parser.add_argument("--config", "-c", type=Path, help="TOML config file")
    parser.add_argument("--trials", "-t", type=int, help="override trials per character")
    parser.add_argument("--program", action="append", help="restrict to these program directories")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gather", help="run a prompting strategy and store responses")
    g.add_argument("--provider", choices=["mock", "live"], default="mock")
    g.add_argument("--strategy", choices=STRATEGIES, default="zero_shot")
    g.add_argument("--name", required=True, help="program directory to write")
    g.add_argument("--script", type=Path, help="mock provider script (JSON)")
    g.add_argument("--prompts", type=Path, help="prompt fixture (TOML); defaults to the bundled one")
    g.add_argument("--model", default=None, help="live model name")

    for stage in pipeline.STAGES[1:]:
        sub.add_parser(stage, help=f"run the {stage} stage")
    sub.add_parser("run-all", help="run extract through score")
    sub.add_parser("report", help="print the ranking table")
    return parser


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    if args.trials is not None:
        cfg = cfg.with_trials(args.trials)
    return cfg


def _gather(args, ws):
    prompts, tot = _load_prompts(args.prompts)
    if args.provider == "mock":
        if args.script is None:
            raise ConfigError("--provider mock needs --script")
        provider = MockProvider.from_file(args.script)
        clock = provider.clock
    else:
        provider = ChatCompletionsProvider(model=args.model) if args.model else ChatCompletionsProvider()
        clock = None
    if args.strategy == "tot_bfs" and tot is None:
        raise ConfigError("prompt fixture has no [tot] eval_prompt")
    return pipeline.run_gather(ws, args.name, args.strategy, provider, prompts=prompts, tot=tot, clock=clock)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        if args.command == "gather":
            args.workspace.mkdir(parents=True, exist_ok=True)
        ws = pipeline.Workspace(args.workspace, cfg)
        programs = args.program
        if args.command == "gather":
            summaries = [_gather(args, ws)]
        elif args.command == "run-all":
            report, summaries = pipeline.run_all(ws, programs)
        elif args.command == "report":
            md = ws.report("ranking.md")
            if not md.is_file():
                raise pipeline.WorkspaceError(f"{md} does not exist; run the score stage first")
            sys.stdout.write(md.read_text(encoding="utf-8"))
            return EXIT_OK
        else:
            summaries = [pipeline.run_stage(args.command, ws, programs)]
    except (ConfigError, pipeline.WorkspaceError, OSError) as exc:
        print(f"sbeval: error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    for summary in summaries:
        print(summary)
    if args.command in ("run-all", "score"):
        sys.stdout.write(ws.report("ranking.md").read_text(encoding="utf-8"))
    return EXIT_PARTIAL if any(s.failed for s in summaries) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
