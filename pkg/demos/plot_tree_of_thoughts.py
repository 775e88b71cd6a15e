"""
Tree of thoughts against a scripted provider
============================================

Two depths, two candidates each, then a final formatting call.
"""

from sbeval.harness import ToTConfig, tot_bfs
from sbeval.providers import MockProvider

script = {
    "0": "Start with two pillars.", "1": "Start with a wide slab.",
    "2": "0.9 0.5", "3": "0.4 0.8",
    "4": "Cap the pillars with a bar.", "5": "Add a spire.",
    "6": "garbage", "7": "0.2 0.3",
    "8": "```\ndrop_block('b13', 8)\ndrop_block('b13', 10)\ndrop_block('b31', 9)\n```",
}
cfg = ToTConfig(
    task_prompt="Plan a structure shaped like {character}.",
    eval_prompt="Rate stability and similarity of: {thought}",
    final_prompt="Write the plan as drop_block calls.",
)
provider = MockProvider(script, latency=1.5)
record = tot_bfs(cfg, "H", provider, clock=provider.clock)

print("calls:", len(provider.calls), "expected", cfg.expected_calls)
print("status:", record.status.value, "tokens:", record.tokens_used, "seconds:", record.seconds_used)
for msg in provider.calls[-1]["messages"]:
    print(f"  {msg['role']:>9}: {msg['content'][:50]!r}")
print(record.final_response)
