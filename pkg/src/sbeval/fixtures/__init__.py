"""Bundled data: letter programs, published standings, mock scripts, goldens."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..core import UPPERCASE, GridConfig
from ..extraction import parse_drop_calls

# the three characters with the highest weights in the previous edition
HARD_CHARACTERS = ("G", "Q", "S")


def fixture_path(*parts) -> Path:
    return Path(str(resources.files(__name__).joinpath(*parts)))


def load_manifest() -> list[dict]:
    return json.loads(fixture_path("manifest.json").read_text(encoding="utf-8"))["fixtures"]


def character_program_text(character: str) -> str:
    return fixture_path("characters", f"{character}.txt").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def character_program(character: str):
    result = parse_drop_calls(character_program_text(character))
    if not result.ok:
        raise ValueError(f"bundled program for {character} does not parse: {result.diagnostics}")
    return result.calls


def character_programs() -> dict:
    return {ch: character_program(ch) for ch in UPPERCASE}


@lru_cache(maxsize=None)
def default_templates(grid: GridConfig = GridConfig(), cell_px: int = 16, pad_cells: int = 1):
    """Template set rendered from the bundled letter programs."""
    from ..classify import TemplateSet
    from ..levelgen import settle
    from ..raster import rasterize

    images = {
        ch: [rasterize(settle(calls, grid).level, cell_px, pad_cells)]
        for ch, calls in character_programs().items()
    }
    return TemplateSet.from_images(images)


def load_table1(column: str = "original") -> list[tuple[str, float, float, int]]:
    """Rows of (program, norm_prompt, prompt, rank) for one column of the
    previous edition's standings ("original", "old_vit" or "new_vit")."""
    data = json.loads(fixture_path("table1.json").read_text(encoding="utf-8"))
    if column not in data["columns"]:
        raise KeyError(f"unknown column {column!r}; choose from {data['columns']}")
    return [(row["program"], *row[column][:2], int(row[column][2])) for row in data["rows"]]


def load_table1_dataset() -> list[tuple[str, float]]:
    """The 16 published (program, prompt score) pairs, original standings."""
    return [(name, prompt) for name, _, prompt, _ in load_table1("original")]
