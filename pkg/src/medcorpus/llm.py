"""Pluggable text-completion client: HTTP endpoint or in-memory stub.

Core logic never talks to a vendor SDK; it sees only ``complete(prompt)``.
The HTTP client posts ``{"model", "prompt", "temperature"}`` as JSON and
expects ``{"text": ...}`` back.  Auth comes from the ``MEDCORPUS_LLM_TOKEN``
environment variable unless a token is passed explicitly.
"""

from __future__ import annotations

import os
from typing import Protocol

import requests

from .errors import LlmClientError

TOKEN_ENV_VAR = "MEDCORPUS_LLM_TOKEN"


class LlmClient(Protocol):
    def complete(self, prompt: str, temperature: float = 0.0) -> str: ...


class HttpLlmClient:
    """JSON-over-HTTP completion client for a self-hosted endpoint."""

    def __init__(self, endpoint: str, model: str,
                 token: str | None = None, timeout: float = 60.0) -> None:
        self.endpoint = endpoint
        self.model = model
        self.token = token if token is not None else os.environ.get(TOKEN_ENV_VAR, "")
        self.timeout = timeout

    def complete(self, prompt: str, temperature: float = 0.0) -> str:
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            response = requests.post(
                self.endpoint,
                json={"model": self.model, "prompt": prompt, "temperature": temperature},
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            payload = response.json()
        except requests.RequestException as exc:
            raise LlmClientError(f"completion request failed: {exc}") from exc
        except ValueError as exc:
            raise LlmClientError(f"completion response is not JSON: {exc}") from exc
        if "text" not in payload:
            raise LlmClientError("completion response has no 'text' field")
        return str(payload["text"])


class StubLlmClient:
    """Scripted client for tests and offline runs.

    Pops responses in order; raises once the script is exhausted so a test
    that issues more calls than it scripted fails loudly.
    """

    def __init__(self, responses: list[str]) -> None:
        self._responses = list(responses)
        self.calls: list[str] = []

    def complete(self, prompt: str, temperature: float = 0.0) -> str:
        self.calls.append(prompt)
        if not self._responses:
            raise LlmClientError("stub client ran out of scripted responses")
        return self._responses.pop(0)
