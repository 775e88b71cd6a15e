"""
Reproducing the published standings
====================================

Normalize the sixteen published prompt scores and compare with the
published percentages and ranks.
"""

import numpy as np

from sbeval import EvaluationConfig
from sbeval.fixtures import load_table1
from sbeval.metrics import aggregate_and_rank

rows = load_table1("original")
names = [r[0] for r in rows]
prompts = [r[2] for r in rows]

# one "character" whose score is the prompt score itself
report = aggregate_and_rank([prompts], EvaluationConfig(trials=2, alphabet=("A",)), names)

print(f"{'program':<20} {'published':>10} {'ours':>10} {'rank':>5}")
for (name, norm, _, rank), ours, our_rank in zip(rows, report.norm_prompt, report.ranks):
    print(f"{name:<20} {norm:>10.4f} {ours:>10.4f} {our_rank:>3}/{rank}")

worst = np.max(np.abs(report.norm_prompt - [r[1] for r in rows]))
print(f"largest gap {worst:.4f} percentage points")
