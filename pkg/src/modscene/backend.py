"""Completion backends.

The mock backend replays canned replies from a fixtures directory, keyed
by module label and per-module call order, so scenario runs are exact and
offline. The live backend speaks the OpenAI-style chat completions
protocol against whatever endpoint the environment points at.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .errors import EngineError

ENV_URL = "ENGINE_LLM_URL"
ENV_MODEL = "ENGINE_LLM_MODEL"
ENV_KEY = "ENGINE_LLM_KEY"

DEFAULT_MODEL = "gpt-4o-mini"
DEFAULT_TEMPERATURE = 0.2


@dataclass
class CompletionRequest:
    module: str  # module label: "central" or the element name
    messages: list[dict] = field(default_factory=list)  # {"role": ..., "content": ...}
    model: str = DEFAULT_MODEL
    temperature: float = DEFAULT_TEMPERATURE


class MockBackend:
    """Replies from ``<fixtures>/<module>-<index>.txt``, index counting
    calls per module from 0. Missing file means the scenario asked for
    more generations than were recorded."""

    def __init__(self, fixtures_dir: str | Path):
        self.fixtures_dir = Path(fixtures_dir)
        self._counts: dict[str, int] = {}
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> str:
        with self._lock:
            index = self._counts.get(request.module, 0)
            self._counts[request.module] = index + 1
        path = self.fixtures_dir / f"{request.module}-{index}.txt"
        try:
            return path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise EngineError(
                "fixture-exhausted",
                f"no fixture {path.name} under {self.fixtures_dir}",
            ) from None


class LiveBackend:
    """Chat-completions client with bounded exponential-backoff retries.

    Auth rejections fail immediately; connection errors and 5xx replies
    retry up to ``retries`` times before giving up.
    """

    def __init__(
        self,
        url: str,
        model: str = DEFAULT_MODEL,
        api_key: str = "",
        retries: int = 3,
        timeout: float = 60.0,
        backoff: float = 0.5,
    ):
        self.url = url
        self.model = model
        self.api_key = api_key
        self.retries = retries
        self.timeout = timeout
        self.backoff = backoff

    def complete(self, request: CompletionRequest) -> str:
        payload = {
            "model": request.model or self.model,
            "messages": request.messages,
            "temperature": request.temperature,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error = "no attempt made"
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                response = httpx.post(self.url, json=payload, headers=headers, timeout=self.timeout)
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if response.status_code in (401, 403):
                raise EngineError("auth-failure", f"completion endpoint rejected credentials ({response.status_code})")
            if response.status_code >= 500:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.status_code != 200:
                raise EngineError("backend-unreachable", f"completion endpoint returned HTTP {response.status_code}")
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (ValueError, LookupError, TypeError):
                raise EngineError("backend-unreachable", "completion reply missing choices[0].message.content") from None
        raise EngineError("backend-unreachable", f"gave up after {self.retries + 1} attempts: {last_error}")


def live_backend_from_env(retries: int = 3) -> LiveBackend:
    url = os.environ.get(ENV_URL, "")
    if not url:
        raise EngineError("backend-unreachable", f"{ENV_URL} is not set; cannot use the live backend")
    return LiveBackend(
        url=url,
        model=os.environ.get(ENV_MODEL, DEFAULT_MODEL),
        api_key=os.environ.get(ENV_KEY, ""),
        retries=retries,
    )
