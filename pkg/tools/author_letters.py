"""Find drop_block programs that reproduce hand-drawn letter bitmaps.

Usage: python tools/author_letters.py src/sbeval/fixtures/letter_bitmaps.txt out_dir

The bitmap file holds blocks of the form::

    A
    .###.
    #...#

(``#`` filled, ``.`` empty, top row first) separated by blank lines. A depth
first search picks a drop order that fills exactly the drawn cells; the
resulting programs are written to ``out_dir/<letter>.txt``.
"""

import sys
from pathlib import Path

from sbeval.core import BlockType, DropCall
from sbeval.extraction import format_calls

OFFSET = 8


def parse_letters(text):
    out = {}
    for chunk in text.strip().split("\n\n"):
        lines = chunk.strip().splitlines()
        name, rows = lines[0].strip(), lines[1:]
        cells = set()
        for r, line in enumerate(reversed(rows)):
            for c, ch in enumerate(line.strip()):
                if ch == "#":
                    cells.add((c, r))
        out[name] = cells
    return out


def solve(target):
    width = max(c for c, _ in target) + 1
    tops = [0] * width
    filled = set()
    calls = []

    def dead():
        return any((c, r) not in filled and r < tops[c] for c, r in target)

    def moves(cell):
        c, r = cell
        for block in (BlockType.B13, BlockType.B31, BlockType.B11):
            w, h = block.width, block.height
            for left in range(c - w + 1, c + 1):
                if left < 0 or left + w > width:
                    continue
                span = range(left, left + w)
                if max(tops[x] for x in span) != r:
                    continue
                cells = {(x, y) for x in span for y in range(r, r + h)}
                if cells <= target and not cells & filled:
                    yield block, left, cells

    def dfs():
        todo = sorted((r, c) for c, r in target if (c, r) not in filled)
        if not todo:
            return True
        r, c = todo[0]
        for block, left, cells in moves((c, r)):
            saved = list(tops)
            for x in range(left, left + block.width):
                tops[x] = r + block.height
            filled.update(cells)
            calls.append(DropCall(block, left + (block.width - 1) // 2 + OFFSET))
            if not dead() and dfs():
                return True
            calls.pop()
            filled.difference_update(cells)
            tops[:] = saved
        return False

    return calls if dfs() else None


def main(src, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failed = []
    for name, cells in parse_letters(Path(src).read_text()).items():
        calls = solve(cells)
        if calls is None:
            failed.append(name)
            continue
        (out / f"{name}.txt").write_text(format_calls(calls))
    if failed:
        print("unbuildable:", " ".join(failed))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:3]))
