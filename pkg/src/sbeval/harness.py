"""Budgeted trial sessions and reference prompting strategies.

Every provider call goes through :class:`TrialSession`, which charges
tokens, watches the wall clock and refuses further calls once a limit has
been hit. Any failure ends the trial with an empty final response.
"""

from __future__ import annotations

import enum
import json
import math
import re
import time
from dataclasses import dataclass, field

from .providers import ProviderError

STRATEGIES = ("zero_shot", "zero_shot_multi_turn", "few_shot", "tot_bfs")


def count_tokens(text: str) -> int:
    """Rough token count: one token per four UTF-8 bytes, rounded up."""
    return math.ceil(len(text.encode("utf-8")) / 4)


@dataclass(frozen=True)
class Budgets:
    max_tokens: int = 25_000
    max_seconds: float = 120.0
    temperature: float = 1.0
    seed: int = 42


class TrialStatus(str, enum.Enum):
    OK = "ok"
    BUDGET_EXCEEDED = "budget_exceeded"
    PROVIDER_ERROR = "provider_error"
    TIMEOUT = "timeout"


class TrialAborted(Exception):
    def __init__(self, status: TrialStatus, reason: str):
        super().__init__(f"{status.value}: {reason}")
        self.status = status
        self.reason = reason


class Conversation:
    ROLES = ("system", "user", "assistant")

    def __init__(self, messages=()):
        self.messages: list[dict] = []
        for m in messages:
            self.append(m["role"], m["content"])

    def append(self, role: str, content: str) -> None:
        if role not in self.ROLES:
            raise ValueError(f"unknown role {role!r}")
        if role == "assistant" and self.messages and self.messages[-1]["role"] == "assistant":
            raise ValueError("two consecutive assistant turns")
        self.messages.append({"role": role, "content": content})

    def copy(self) -> "Conversation":
        return Conversation(self.messages)

    def __len__(self):
        return len(self.messages)


class TrialSession:
    """Single-owner state for one trial; not safe for concurrent sends."""

    def __init__(self, provider, budgets: Budgets = Budgets(), clock=time.monotonic, counter=count_tokens):
        self.provider = provider
        self.budgets = budgets
        self.clock = clock
        self.counter = counter
        self.started = clock()
        self.tokens_used = 0
        self.transcript: list[list[dict]] = []
        self.failure: TrialAborted | None = None

    @property
    def seconds_used(self) -> float:
        return self.clock() - self.started

    def _abort(self, status: TrialStatus, reason: str):
        self.failure = TrialAborted(status, reason)
        raise self.failure

    def _check_clock(self):
        if self.seconds_used > self.budgets.max_seconds:
            self._abort(TrialStatus.TIMEOUT, f"{self.seconds_used:.1f}s > {self.budgets.max_seconds}s")

    def send(self, conversation: Conversation, message: str) -> str:
        if self.failure is not None:
            raise self.failure
        self._check_clock()
        charge = self.counter(message)
        if self.tokens_used + charge > self.budgets.max_tokens:
            self._abort(TrialStatus.BUDGET_EXCEEDED, f"prompt would bring usage to {self.tokens_used + charge}")
        conversation.append("user", message)
        try:
            reply = self.provider.complete(
                [dict(m) for m in conversation.messages], self.budgets.temperature, self.budgets.seed
            )
        except ProviderError as exc:
            self._abort(TrialStatus.PROVIDER_ERROR, str(exc))
        except Exception as exc:  # noqa: BLE001 - any provider failure fails the trial
            self._abort(TrialStatus.PROVIDER_ERROR, f"{type(exc).__name__}: {exc}")
        self.transcript.append([dict(m) for m in conversation.messages] + [{"role": "assistant", "content": reply}])
        self.tokens_used += charge + self.counter(reply)
        if self.tokens_used > self.budgets.max_tokens:
            self._abort(TrialStatus.BUDGET_EXCEEDED, f"usage {self.tokens_used} > {self.budgets.max_tokens}")
        self._check_clock()
        conversation.append("assistant", reply)
        return reply


@dataclass
class TrialRecord:
    program_id: str
    character: str
    trial_index: int
    final_response: str
    status: TrialStatus
    tokens_used: int
    seconds_used: float
    transcript: list = field(default_factory=list)
    reason: str = ""

    def to_json(self) -> str:
        data = {
            "program_id": self.program_id,
            "character": self.character,
            "trial_index": self.trial_index,
            "status": self.status.value,
            "reason": self.reason,
            "tokens_used": self.tokens_used,
            "seconds_used": self.seconds_used,
            "final_response": self.final_response,
            "transcript": self.transcript,
        }
        return json.dumps(data, indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def fill(template: str, **values) -> str:
    """Substitute ``{name}`` placeholders without touching other braces."""
    for key, value in values.items():
        template = template.replace("{" + key + "}", str(value))
    return template


@dataclass(frozen=True)
class StrategyPrompts:
    """User-supplied prompt texts. ``{character}`` is replaced by the target."""

    task_prompt: str
    format_prompt: str = ""
    examples: tuple = ()  # (character, drop_block program text) pairs

    def few_shot_prompt(self, character: str) -> str:
        parts = [fill(self.task_prompt, character=character).rstrip(), "", "Examples"]
        for ex_char, program in self.examples:
            parts += ["", f"Character: {ex_char}", "```", program.rstrip(), "```"]
        return "\n".join(parts) + "\n"


@dataclass(frozen=True)
class ToTConfig:
    task_prompt: str
    eval_prompt: str
    final_prompt: str
    step_prompt: str = "Step {step}: give your next thought."
    max_depth: int = 2
    branching: int = 2

    def __post_init__(self):
        if self.max_depth < 1 or self.branching < 1:
            raise ValueError("max_depth and branching must be >= 1")

    @property
    def expected_calls(self) -> int:
        return 2 * self.max_depth * self.branching + 1


_NUMBER = re.compile(r"[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?")


def parse_thought_score(reply: str) -> float:
    """Product of the first two numbers in an evaluation reply; 0 if absent."""
    numbers = _NUMBER.findall(reply)
    if len(numbers) < 2:
        return 0.0
    value = float(numbers[0]) * float(numbers[1])
    return value if math.isfinite(value) else 0.0


def _tot_search(session: TrialSession, cfg: ToTConfig, character: str) -> str:
    chain = Conversation()
    first = True
    for depth in range(1, cfg.max_depth + 1):
        step = fill(cfg.step_prompt, step=depth, character=character)
        if first:
            step = fill(cfg.task_prompt, character=character).rstrip() + "\n\n" + step
        candidates = []
        for _ in range(cfg.branching):
            candidates.append(session.send(chain.copy(), step))
        scores = []
        for thought in candidates:
            prompt = fill(cfg.eval_prompt, character=character, thought=thought, step=depth)
            scores.append(parse_thought_score(session.send(Conversation(), prompt)))
        best = max(range(len(candidates)), key=lambda idx: (scores[idx], -idx))
        chain.append("user", step)
        chain.append("assistant", candidates[best])
        first = False
    return session.send(chain, fill(cfg.final_prompt, character=character))


def _record(session, program_id, character, trial_index, response) -> TrialRecord:
    failure = session.failure
    return TrialRecord(
        program_id=program_id,
        character=character,
        trial_index=trial_index,
        final_response="" if failure else response,
        status=failure.status if failure else TrialStatus.OK,
        tokens_used=session.tokens_used,
        seconds_used=session.seconds_used,
        transcript=session.transcript,
        reason=failure.reason if failure else "",
    )


def _run(body, provider, budgets, clock, program_id, character, trial_index) -> TrialRecord:
    session = TrialSession(provider, budgets, clock=clock)
    response = ""
    try:
        response = body(session)
    except TrialAborted:
        pass
    return _record(session, program_id, character, trial_index, response)


def tot_bfs(cfg: ToTConfig, character: str, provider, budgets: Budgets = Budgets(), *,
            clock=time.monotonic, program_id: str = "", trial_index: int = 1) -> TrialRecord:
    """Breadth-first tree of thoughts keeping the best candidate per level."""
    return _run(lambda s: _tot_search(s, cfg, character), provider, budgets, clock,
                program_id, character, trial_index)


def run_strategy(strategy: str, character: str, provider, budgets: Budgets = Budgets(), *,
                 prompts: StrategyPrompts | None = None, tot: ToTConfig | None = None,
                 clock=time.monotonic, program_id: str = "", trial_index: int = 1) -> TrialRecord:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    if strategy == "tot_bfs":
        if tot is None:
            raise ValueError("tot_bfs needs a ToTConfig")
        return tot_bfs(tot, character, provider, budgets, clock=clock,
                       program_id=program_id, trial_index=trial_index)
    if prompts is None:
        raise ValueError(f"{strategy} needs StrategyPrompts")
    if strategy == "zero_shot_multi_turn" and not prompts.format_prompt:
        raise ValueError("zero_shot_multi_turn needs a format_prompt")

    def body(session: TrialSession) -> str:
        conv = Conversation()
        if strategy == "few_shot":
            return session.send(conv, prompts.few_shot_prompt(character))
        reply = session.send(conv, fill(prompts.task_prompt, character=character))
        if strategy == "zero_shot_multi_turn":
            reply = session.send(conv, fill(prompts.format_prompt, character=character))
        return reply

    return _run(body, provider, budgets, clock, program_id, character, trial_index)
