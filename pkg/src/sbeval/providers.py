"""Chat-completion backends: a scripted mock and a live HTTP client."""

from __future__ import annotations

import json
import os
import urllib.error
import urllib.request
from pathlib import Path
from typing import Protocol

DEFAULT_MODEL = "gpt-3.5-turbo-0125"
DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
API_KEY_ENV = "CHATGPT4PCG_API_KEY"


class ProviderError(RuntimeError):
    pass


class Provider(Protocol):
    def complete(self, messages: list[dict], temperature: float, seed: int) -> str: ...


class ManualClock:
    """Injectable monotonic clock for tests and the mock provider."""

    def __init__(self, start: float = 0.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


class MockProvider:
    """Replays scripted replies by global call index.

    ``script`` maps call index -> reply text. A ``"default"`` entry answers
    any unscripted index; without it an unscripted call is a provider error.
    Each call advances ``clock`` by ``latency`` seconds (plus any per-call
    entry in ``delays``).
    """

    def __init__(self, script, clock: ManualClock | None = None, latency: float = 0.0, delays=None):
        if isinstance(script, (list, tuple)):
            script = {str(i): reply for i, reply in enumerate(script)}
        self.script = {str(k): v for k, v in script.items()}
        self.clock = clock or ManualClock()
        self.latency = latency
        self.delays = {int(k): float(v) for k, v in (delays or {}).items()}
        self.calls: list[dict] = []

    @classmethod
    def from_file(cls, path, **kwargs) -> "MockProvider":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(data, dict) and "replies" in data:
            script = dict(data["replies"])
            if "default" in data:
                script["default"] = data["default"]
            kwargs.setdefault("latency", data.get("latency", 0.0))
            kwargs.setdefault("delays", data.get("delays"))
            return cls(script, **kwargs)
        return cls(data, **kwargs)

    def complete(self, messages, temperature, seed):
        index = len(self.calls)
        self.calls.append({"messages": [dict(m) for m in messages], "temperature": temperature, "seed": seed})
        self.clock.advance(self.latency + self.delays.get(index, 0.0))
        reply = self.script.get(str(index), self.script.get("default"))
        if reply is None:
            raise ProviderError(f"mock script has no reply for call {index}")
        return reply


class ChatCompletionsProvider:
    """Minimal JSON-over-HTTPS client for a chat-completions endpoint."""

    def __init__(self, model: str = DEFAULT_MODEL, endpoint: str = DEFAULT_ENDPOINT,
                 api_key: str | None = None, timeout: float = 120.0):
        self.model = model
        self.endpoint = endpoint
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.timeout = timeout

    def request_body(self, messages, temperature, seed) -> dict:
        return {
            "model": self.model,
            "messages": [{"role": m["role"], "content": m["content"]} for m in messages],
            "temperature": temperature,
            "seed": seed,
        }

    def complete(self, messages, temperature, seed):
        if not self.api_key:
            raise ProviderError(f"no API key; set {API_KEY_ENV}")
        body = json.dumps(self.request_body(messages, temperature, seed)).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint,
            data=body,
            headers={"Content-Type": "application/json", "Authorization": f"Bearer {self.api_key}"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
            raise ProviderError(f"chat completion failed: {exc}") from exc
        try:
            return payload["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected response shape: {payload!r:.200}") from exc
