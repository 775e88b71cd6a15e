"""
Dropping blocks and judging stability
=====================================

Build a small arch, then knock one support away.
"""

from sbeval import BlockType, DropCall, build, rasterize

B11, B13, B31 = BlockType.B11, BlockType.B13, BlockType.B31

arch = [DropCall(B13, 4), DropCall(B13, 6), DropCall(B31, 5), DropCall(B11, 5)]
outcome, report = build(arch)
print("arch:", report.total_blocks, "blocks,", report.moving_blocks, "moving, sta =", report.sta)

# only the left leg remains, so the lintel hangs off its edge
lean = [DropCall(B13, 4), DropCall(B31, 5), DropCall(B11, 5)]
outcome, report = build(lean)
print("lean:", report.total_blocks, "blocks, moving ids", report.moving_ids, "sta =", round(report.sta, 3))

# quick look at the shape, one character per cell
pix = rasterize(outcome.level, cell_px=1, pad_cells=0).pixels
for row in pix:
    print("".join("#" if p == 0 else "." for p in row))
