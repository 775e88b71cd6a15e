"""Deterministic stand-in for the physics evaluator.

Blocks fall straight down onto a column height map; stability is judged by
whether each block's horizontal centre sits over its (non-moving) supports.
This is a proxy, not a rigid-body simulation: it will disagree with a real
physics engine on friction-held or toppling structures.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import DropCall, GridConfig, Level, PlacedBlock, occupied_columns


@dataclass(frozen=True)
class SettleOutcome:
    level: Level
    dropped_out: int


@dataclass(frozen=True)
class StabilityReport:
    total_blocks: int
    moving_blocks: int
    sta: float
    moving_ids: tuple[int, ...] = ()


def settle(calls, grid: GridConfig = GridConfig()) -> SettleOutcome:
    tops = [0] * grid.width
    placed = []
    rejected = 0
    for call in calls:
        left, right = occupied_columns(call)
        if left < 0 or right >= grid.width:
            rejected += 1
            continue
        bottom = max(tops[left:right + 1])
        top = bottom + call.block_type.height
        if top > grid.height:
            rejected += 1
            continue
        placed.append(PlacedBlock(call.block_type, left, bottom))
        for col in range(left, right + 1):
            tops[col] = top
    return SettleOutcome(Level(grid, tuple(placed)), rejected)


def _contacts(blocks):
    """For each block, the (supporter index, lo col, hi col) overlaps beneath it."""
    below = []
    for b in blocks:
        found = []
        if b.bottom_row > 0:
            for s_idx, s in enumerate(blocks):
                if s.top_row + 1 != b.bottom_row:
                    continue
                lo = max(b.left_col, s.left_col)
                hi = min(b.right_col, s.right_col)
                if lo <= hi:
                    found.append((s_idx, lo, hi))
        below.append(found)
    return below


def moving_set(level: Level) -> set[int]:
    blocks = level.blocks
    contacts = _contacts(blocks)
    moving: set[int] = set()
    changed = True
    while changed:
        changed = False
        for idx, b in enumerate(blocks):
            if idx in moving or b.bottom_row == 0:
                continue
            live = [(lo, hi) for s_idx, lo, hi in contacts[idx] if s_idx not in moving]
            if live:
                lo = min(c[0] for c in live)
                hi = max(c[1] for c in live) + 1
                if lo <= b.center_x <= hi:
                    continue
            moving.add(idx)
            changed = True
    return moving


def assess_stability(level: Level) -> StabilityReport:
    total = len(level.blocks)
    if total == 0:
        return StabilityReport(0, 0, 0.0, ())
    moving = sorted(moving_set(level))
    return StabilityReport(total, len(moving), (total - len(moving)) / total, tuple(moving))


def build(calls, grid: GridConfig = GridConfig()) -> tuple[SettleOutcome, StabilityReport]:
    outcome = settle(calls, grid)
    return outcome, assess_stability(outcome.level)
