"""Level <-> Science Birds style XML."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .core import BlockType, GridConfig, Level, LevelError, PlacedBlock

DEFAULT_BLOCK_NAMES = {
    BlockType.B11: ("SquareSmall", 0),
    BlockType.B13: ("RectSmall", 90),
    BlockType.B31: ("RectSmall", 0),
}


class XmlLevelError(ValueError):
    pass


@dataclass(frozen=True)
class XmlMappingConfig:
    """World placement of grid cells.

    A block's world x is ``origin_x + (left_col + width / 2) * cell_size``,
    so the origin is the world coordinate of the grid's lower-left corner.
    """

    block_name_map: dict = field(default_factory=lambda: dict(DEFAULT_BLOCK_NAMES))
    cell_size: float = 1.0
    origin_x: float = -10.0
    origin_y: float = -3.5
    material: str = "stone"

    def __post_init__(self):
        if self.cell_size <= 0:
            raise ValueError("cell_size must be positive")
        missing = set(BlockType) - set(self.block_name_map)
        if missing:
            raise ValueError(f"block_name_map misses {sorted(b.value for b in missing)}")
        keys = list(self.block_name_map.values())
        if len(set(keys)) != len(keys):
            raise ValueError("block_name_map entries must be distinct (type name, rotation) pairs")

    def lookup(self, name: str, rotation: int) -> BlockType:
        for block, entry in self.block_name_map.items():
            if entry == (name, rotation):
                return block
        raise XmlLevelError(f"unknown block type {name!r} with rotation {rotation}")


def _fmt(value: float) -> str:
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


def level_to_xml(level: Level, cfg: XmlMappingConfig = XmlMappingConfig()) -> str:
    lines = [
        '<?xml version="1.0" encoding="utf-8"?>',
        f'<Level width="2" gridWidth="{level.grid.width}" gridHeight="{level.grid.height}">',
        '  <Camera x="0" y="2" minWidth="20" maxWidth="30"/>',
        "  <Birds>",
        '    <Bird type="BirdRed"/>',
        "  </Birds>",
        '  <Slingshot x="-8" y="-2.5"/>',
    ]
    if not level.blocks:
        lines.append("  <GameObjects/>")
    else:
        lines.append("  <GameObjects>")
        for block in level.blocks:
            name, rotation = cfg.block_name_map[block.block_type]
            x = cfg.origin_x + (block.left_col + block.width / 2) * cfg.cell_size
            y = cfg.origin_y + (block.bottom_row + block.height / 2) * cfg.cell_size
            lines.append(
                f'    <Block type="{name}" material="{cfg.material}" '
                f'x="{_fmt(x)}" y="{_fmt(y)}" rotation="{rotation}"/>'
            )
        lines.append("  </GameObjects>")
    lines.append("</Level>")
    return "\n".join(lines) + "\n"


def _lattice(value: float, origin: float, half_extent: float, cell_size: float, what: str) -> int:
    cells = (value - origin) / cell_size - half_extent
    nearest = round(cells)
    if abs(cells - nearest) > 1e-6:
        raise XmlLevelError(f"{what} coordinate {value} is off the cell lattice")
    return int(nearest)


def xml_to_level(doc: str, cfg: XmlMappingConfig = XmlMappingConfig(), grid: GridConfig | None = None) -> Level:
    try:
        root = ET.fromstring(doc)
    except ET.ParseError as exc:
        raise XmlLevelError(f"not well-formed XML: {exc}") from exc
    if root.tag != "Level":
        raise XmlLevelError(f"root element is {root.tag!r}, expected 'Level'")
    if grid is None:
        try:
            grid = GridConfig(int(root.get("gridWidth", 20)), int(root.get("gridHeight", 16)))
        except ValueError as exc:
            raise XmlLevelError(f"bad grid size: {exc}") from exc
    objects = root.find("GameObjects")
    if objects is None:
        raise XmlLevelError("missing GameObjects element")
    blocks = []
    for idx, elem in enumerate(objects):
        if elem.tag != "Block":
            raise XmlLevelError(f"unexpected element {elem.tag!r} in GameObjects")
        try:
            name = elem.attrib["type"]
            x = float(elem.attrib["x"])
            y = float(elem.attrib["y"])
            rotation = int(float(elem.attrib.get("rotation", "0")))
        except (KeyError, ValueError) as exc:
            raise XmlLevelError(f"block {idx}: bad or missing attribute ({exc})") from exc
        block_type = cfg.lookup(name, rotation)
        col = _lattice(x, cfg.origin_x, block_type.width / 2, cfg.cell_size, "x")
        row = _lattice(y, cfg.origin_y, block_type.height / 2, cfg.cell_size, "y")
        blocks.append(PlacedBlock(block_type, col, row))
    try:
        return Level(grid, tuple(blocks))
    except LevelError as exc:
        raise XmlLevelError(str(exc)) from exc
