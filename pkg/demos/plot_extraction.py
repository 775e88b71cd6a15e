"""
Pulling programs out of chat replies
====================================
"""

from sbeval import extract

replies = [
    "Sure!\n```python\ndrop_block('b31', 10)\ndrop_block('b11', 10)\n```",
    "draft ```drop_block('b11', 1)``` final ```drop_block('b13', 4)```",
    "I would rather not.",
    "```\nfor x in range(3):\n    drop_block('b11', x)\n```",
]

for text in replies:
    res = extract(text)
    print(res.status.value, [c.to_source() for c in res.calls], res.diagnostics)

# lenient mode skips lines it cannot read instead of failing the block
res = extract("```\nbuild the base\ndrop_block('b11', 3)\n```", strict=False)
print(res.status.value, [c.to_source() for c in res.calls], res.diagnostics)
