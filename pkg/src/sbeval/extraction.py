"""Code extraction: pull the last fenced block out of a response and parse
its ``drop_block`` calls."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .core import BlockType, DropCall

FENCE = "```"

_INFO_STRING = re.compile(r"[\w+.\-]+")
_CALL = re.compile(
    r"""^\s*drop_block\s*\(\s*
        (?P<quote>['"]?)(?P<block>b11|b13|b31)(?P=quote)\s*,\s*
        (?P<x>[+-]?\d+)\s*
        \)\s*(?:\#.*)?$""",
    re.VERBOSE | re.IGNORECASE,
)
_FUNC_NAME = re.compile(r"^\s*drop_block\b")


class ExtractionStatus(str, enum.Enum):
    OK = "ok"
    NO_FENCE = "no_fence"
    NO_CALLS = "no_calls"
    MALFORMED = "malformed"


@dataclass(frozen=True)
class ExtractionResult:
    calls: tuple[DropCall, ...]
    status: ExtractionStatus
    diagnostics: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.status is ExtractionStatus.OK


def extract_last_fenced_block(response: str) -> str | None:
    """Return the text between the last two ``` fences, or None.

    A language tag directly after the opening fence is dropped along with
    its line break.
    """
    positions = []
    start = response.find(FENCE)
    while start != -1:
        positions.append(start)
        start = response.find(FENCE, start + len(FENCE))
    if len(positions) < 2:
        return None
    opening, closing = positions[-2], positions[-1]
    body = response[opening + len(FENCE):closing]
    first_line, newline, rest = body.partition("\n")
    if newline and _INFO_STRING.fullmatch(first_line.strip()):
        return rest
    if newline and not first_line.strip():
        return rest
    return body


def _ignorable(line: str) -> bool:
    stripped = line.strip()
    return not stripped or stripped.startswith("#")


def parse_drop_calls(code: str, strict: bool = True) -> ExtractionResult:
    """Parse one call per line.

    In strict mode any line that is neither a call, blank, nor a ``#``
    comment fails the whole block. Lenient mode skips such lines and
    records them in the diagnostics.
    """
    calls = []
    diagnostics = []
    for lineno, line in enumerate(code.splitlines(), start=1):
        if _ignorable(line):
            continue
        match = _CALL.match(line)
        if match is None:
            if _FUNC_NAME.match(line):
                reason = "bad drop_block arguments"
            else:
                reason = "not a drop_block call"
            diagnostics.append(f"line {lineno}: {reason}: {line.strip()!r}")
            if strict:
                return ExtractionResult((), ExtractionStatus.MALFORMED, tuple(diagnostics))
            continue
        block = BlockType.parse(match.group("block"))
        calls.append(DropCall(block, int(match.group("x"))))
    if not calls:
        diagnostics.append("no drop_block calls found")
        return ExtractionResult((), ExtractionStatus.NO_CALLS, tuple(diagnostics))
    return ExtractionResult(tuple(calls), ExtractionStatus.OK, tuple(diagnostics))


def extract(response: str, strict: bool = True) -> ExtractionResult:
    """Full extraction stage for one raw response."""
    code = extract_last_fenced_block(response)
    if code is None:
        return ExtractionResult((), ExtractionStatus.NO_FENCE, ("fewer than two ``` fences",))
    return parse_drop_calls(code, strict=strict)


def format_calls(calls) -> str:
    return "".join(call.to_source() + "\n" for call in calls)
