"""Single-file TOML configuration for the pipeline and harness."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import UPPERCASE, BlockType, EvaluationConfig, GridConfig
from .harness import Budgets
from .xml_codec import DEFAULT_BLOCK_NAMES, XmlMappingConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ClassifierConfig:
    mode: str = "template"  # "template" or "external"
    alpha: float = 10.0
    logits_path: Path | None = None

    def __post_init__(self):
        if self.mode not in ("template", "external"):
            raise ConfigError(f"classifier mode must be 'template' or 'external', not {self.mode!r}")
        if self.alpha <= 0:
            raise ConfigError("classifier alpha must be positive")


@dataclass(frozen=True)
class PipelineConfig:
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    xml: XmlMappingConfig = field(default_factory=XmlMappingConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    budgets: Budgets = field(default_factory=Budgets)
    cell_px: int = 16
    pad_cells: int = 1
    strict_extraction: bool = True

    def with_trials(self, trials: int) -> "PipelineConfig":
        ev = EvaluationConfig(trials, self.evaluation.programs, self.evaluation.alphabet)
        return replace(self, evaluation=ev)


def _table(data: dict, name: str) -> dict:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table")
    return value


def from_dict(data: dict, base_dir: Path | None = None) -> PipelineConfig:
    try:
        ev = _table(data, "evaluation")
        alphabet = ev.get("alphabet", "".join(UPPERCASE))
        evaluation = EvaluationConfig(
            trials=int(ev.get("trials", 10)),
            programs=int(ev.get("programs", 1)),
            alphabet=tuple(alphabet),
        )
        g = _table(data, "grid")
        grid = GridConfig(int(g.get("width", 20)), int(g.get("height", 16)))

        x = _table(data, "xml")
        names = dict(DEFAULT_BLOCK_NAMES)
        for key, entry in _table(x, "blocks").items():
            names[BlockType.parse(key)] = (str(entry[0]), int(entry[1]))
        xml = XmlMappingConfig(
            block_name_map=names,
            cell_size=float(x.get("cell_size", 1.0)),
            origin_x=float(x.get("origin_x", -10.0)),
            origin_y=float(x.get("origin_y", -3.5)),
            material=str(x.get("material", "stone")),
        )

        c = _table(data, "classifier")
        logits = c.get("logits")
        if logits is not None:
            logits = Path(logits)
            if base_dir is not None and not logits.is_absolute():
                logits = base_dir / logits
        classifier = ClassifierConfig(str(c.get("mode", "template")), float(c.get("alpha", 10.0)), logits)

        b = _table(data, "budgets")
        budgets = Budgets(
            max_tokens=int(b.get("max_tokens", 25_000)),
            max_seconds=float(b.get("max_seconds", 120.0)),
        )
        if "temperature" in b or "seed" in b:
            raise ConfigError("temperature and seed are fixed by the rules and cannot be configured")

        r = _table(data, "raster")
        e = _table(data, "extraction")
        return PipelineConfig(
            evaluation=evaluation,
            grid=grid,
            xml=xml,
            classifier=classifier,
            budgets=budgets,
            cell_px=int(r.get("cell_px", 16)),
            pad_cells=int(r.get("pad_cells", 1)),
            strict_extraction=bool(e.get("strict", True)),
        )
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        raise ConfigError(f"bad configuration: {exc}") from exc


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(data, base_dir=path.parent)
