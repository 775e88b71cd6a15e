"""
Scoring the bundled two-program demo
====================================

alpha varies its structures between trials, beta mostly repeats itself.
"""

import shutil
import tempfile
from pathlib import Path

from sbeval.config import load_config
from sbeval.fixtures import fixture_path
from sbeval.pipeline import Workspace, run_all

root = Path(tempfile.mkdtemp()) / "demo"
shutil.copytree(fixture_path("demo_workspace"), root)
report, summaries = run_all(Workspace(root, load_config(root / "demo.toml")))

for s in summaries:
    print(s)
print((root / "report" / "ranking.md").read_text())

k = report.programs.index("beta")
for j, ch in enumerate(report.alphabet[:8]):
    print(ch, "div", round(report.div[j, k], 4), "char", round(report.char[j, k], 6))
