"""Shared vocabulary: block geometry, grid extents, placed blocks and levels."""

from __future__ import annotations

import enum
import string
from dataclasses import dataclass, field


class BlockType(enum.Enum):
    """Rectangular block, named bWH (width, height) in cells."""

    B11 = "b11"
    B13 = "b13"
    B31 = "b31"

    @property
    def width(self) -> int:
        return _DIMENSIONS[self][0]

    @property
    def height(self) -> int:
        return _DIMENSIONS[self][1]

    @classmethod
    def parse(cls, name: str) -> "BlockType":
        return cls(name.strip().lower())


_DIMENSIONS = {
    BlockType.B11: (1, 1),
    BlockType.B13: (1, 3),
    BlockType.B31: (3, 1),
}


def block_dimensions(tag: BlockType) -> tuple[int, int]:
    return _DIMENSIONS[tag]


@dataclass(frozen=True)
class DropCall:
    block_type: BlockType
    x_position: int

    def to_source(self) -> str:
        return f"drop_block('{self.block_type.value}', {self.x_position})"


def occupied_columns(call: DropCall) -> tuple[int, int]:
    """Inclusive column span of a block centred on ``call.x_position``."""
    half = (call.block_type.width - 1) // 2
    return call.x_position - half, call.x_position + half


@dataclass(frozen=True)
class GridConfig:
    width: int = 20
    height: int = 16

    def __post_init__(self):
        if self.width < 3 or self.height < 3:
            raise ValueError(f"grid must be at least 3x3, got {self.width}x{self.height}")


@dataclass(frozen=True)
class PlacedBlock:
    block_type: BlockType
    left_col: int
    bottom_row: int

    @property
    def width(self) -> int:
        return self.block_type.width

    @property
    def height(self) -> int:
        return self.block_type.height

    @property
    def right_col(self) -> int:
        return self.left_col + self.width - 1

    @property
    def top_row(self) -> int:
        return self.bottom_row + self.height - 1

    @property
    def center_x(self) -> float:
        return self.left_col + self.width / 2

    def cells(self):
        for r in range(self.bottom_row, self.bottom_row + self.height):
            for c in range(self.left_col, self.left_col + self.width):
                yield (c, r)


class LevelError(ValueError):
    pass


@dataclass(frozen=True)
class Level:
    """A settled structure. Block order is drop order."""

    grid: GridConfig
    blocks: tuple[PlacedBlock, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        seen = set()
        for idx, block in enumerate(self.blocks):
            if block.left_col < 0 or block.right_col >= self.grid.width or block.bottom_row < 0:
                raise LevelError(f"block {idx} lies outside the grid: {block}")
            if block.top_row >= self.grid.height:
                raise LevelError(f"block {idx} lies above the grid: {block}")
            for cell in block.cells():
                if cell in seen:
                    raise LevelError(f"block {idx} overlaps another block at cell {cell}")
                seen.add(cell)

    def occupied_cells(self) -> set[tuple[int, int]]:
        return {cell for block in self.blocks for cell in block.cells()}


UPPERCASE = tuple(string.ascii_uppercase)


def character_at(position: int, alphabet=UPPERCASE) -> str:
    return alphabet[position]


def index_of(character: str, alphabet=UPPERCASE) -> int:
    return alphabet.index(character)


@dataclass(frozen=True)
class EvaluationConfig:
    """Sizes of the score tensor: T trials, C characters, P programs.

    ``alphabet`` lists the evaluated characters; classifier outputs always
    cover the full A-Z label set.
    """

    trials: int = 10
    programs: int = 1
    alphabet: tuple[str, ...] = field(default=UPPERCASE)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if self.trials < 2:
            raise ValueError("diversity needs at least two trials per character")
        if self.programs < 1:
            raise ValueError("need at least one program")
        if not self.alphabet:
            raise ValueError("alphabet is empty")
        unknown = [ch for ch in self.alphabet if ch not in UPPERCASE]
        if unknown:
            raise ValueError(f"characters outside A-Z: {unknown}")

    @property
    def characters(self) -> int:
        return len(self.alphabet)
