"""Regenerate the bundled two-program demo workspace.

alpha answers every character with three different structures; beta repeats
one structure per character (apart from A-E) and botches a few responses.
"""

import shutil
import sys
from pathlib import Path

from sbeval.core import UPPERCASE, BlockType, DropCall
from sbeval.extraction import format_calls
from sbeval.fixtures import character_program, fixture_path


def variants(ch):
    base = list(character_program(ch))
    xs = [c.x_position for c in base]
    return [
        base,
        base + [DropCall(BlockType.B11, min(xs))],
        base + [DropCall(BlockType.B11, max(xs)), DropCall(BlockType.B11, max(xs))],
    ]


def wrap(ch, calls):
    return f"Here is the letter {ch}:\n\n```python\n{format_calls(calls)}```\n"


def main(out=None):
    root = Path(out) if out else fixture_path("demo_workspace")
    if root.exists():
        shutil.rmtree(root)
    for ch in UPPERCASE:
        alpha = variants(ch)
        for i, calls in enumerate(alpha, start=1):
            path = root / "alpha" / "responses" / ch / f"{i:02d}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(wrap(ch, calls))
        for i in range(1, 4):
            if ch in "ABCDE":
                text = wrap(ch, alpha[i - 1]) if i < 3 else "```\nab_drop('b11', 3)\n```\n"
            elif ch == "Z" and i == 2:
                text = "Sorry, I cannot draw that letter."
            else:
                text = wrap(ch, alpha[0])
            path = root / "beta" / "responses" / ch / f"{i:02d}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
    (root / "demo.toml").write_text('[evaluation]\ntrials = 3\nalphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"\n')


if __name__ == "__main__":
    main(*sys.argv[1:2])
