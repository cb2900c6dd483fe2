"""Chat-completions wire client with a deterministic replay backend.

One wire dialect (OpenAI-style `/chat/completions` JSON) covers every
supported backend via a configurable base URL. The replay provider
serves canned responses in order, which makes the whole generation
pipeline reproducible offline.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from nls.errors import NlsError


class AuthFailedError(NlsError):
    """HTTP 401/403: bad or missing credentials. Never retried."""


class RateLimitedError(NlsError):
    """HTTP 429 after exhausting retries."""

    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class MalformedResponseError(NlsError):
    """Response parsed but the assistant message is missing."""


class TransportError(NlsError):
    """Connection, timeout, or unexpected HTTP failure."""


class FixtureMissingError(NlsError):
    pass


class FixtureExhaustedError(NlsError):
    pass


@dataclass(frozen=True)
class ChatMessage:
    role: str  # system | user | assistant
    content: str


@dataclass(frozen=True)
class CompletionRequest:
    model_id: str
    messages: tuple[ChatMessage, ...]
    temperature: float | None = None

    def validate(self) -> None:
        if not self.messages or self.messages[0].role != "system":
            raise ValueError("first message must be the system prompt")
        if not any(m.role == "user" for m in self.messages):
            raise ValueError("request needs at least one user message")
        for m in self.messages:
            if not m.content:
                raise ValueError(f"empty content in dispatched {m.role} message")
        if self.temperature is not None and not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")


@dataclass(frozen=True)
class Usage:
    prompt_tokens: int
    completion_tokens: int


@dataclass(frozen=True)
class CompletionResponse:
    content: str  # assistant message, verbatim
    model_id: str
    usage: Usage | None = None


def request_body(request: CompletionRequest) -> bytes:
    """Serialize a request to the wire body. Field order is fixed, so the
    same request always produces identical bytes."""
    doc: dict = {
        "model": request.model_id,
        "messages": [{"role": m.role, "content": m.content} for m in request.messages],
    }
    if request.temperature is not None:
        doc["temperature"] = request.temperature
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


MAX_RETRIES = 3  # additional attempts after the first
BACKOFF_SECONDS = (1.0, 2.0, 4.0)


class LiveProvider:
    """Blocking HTTP client for the chat-completions endpoint.

    Transient failures (connect/timeout, 429) are retried with
    exponential backoff; authentication failures are surfaced
    immediately.
    """

    def __init__(self, http: requests.Session | None = None,
                 sleep=time.sleep, timeout: float = 120.0):
        self._http = http or requests.Session()
        self._sleep = sleep
        self._timeout = timeout

    def complete(self, config, request: CompletionRequest) -> CompletionResponse:
        request.validate()
        url = config.base_url.rstrip("/") + "/chat/completions"
        headers = {
            "Authorization": f"Bearer {config.api_key}",
            "Content-Type": "application/json",
        }
        body = request_body(request)
        last_error: NlsError | None = None
        for attempt in range(1 + MAX_RETRIES):
            if attempt:
                self._sleep(self._retry_delay(attempt, last_error))
            try:
                resp = self._http.post(url, data=body, headers=headers,
                                       timeout=self._timeout)
            except requests.RequestException as e:
                last_error = TransportError(f"request failed: {e}")
                continue
            if resp.status_code in (401, 403):
                raise AuthFailedError(f"authentication failed (HTTP {resp.status_code})")
            if resp.status_code == 429:
                last_error = RateLimitedError(
                    "rate limited (HTTP 429)",
                    retry_after=_parse_retry_after(resp.headers.get("Retry-After")))
                continue
            if resp.status_code != 200:
                last_error = TransportError(f"unexpected HTTP {resp.status_code}")
                continue
            return _parse_success(resp, request.model_id)
        assert last_error is not None
        raise last_error

    def _retry_delay(self, attempt: int, last_error: NlsError | None) -> float:
        retry_after = getattr(last_error, "retry_after", None)
        if retry_after is not None:
            return retry_after
        return BACKOFF_SECONDS[min(attempt - 1, len(BACKOFF_SECONDS) - 1)]


def _parse_retry_after(value: str | None) -> float | None:
    if value is None:
        return None
    try:
        return max(0.0, float(value))
    except ValueError:
        return None


def _parse_success(resp, model_id: str) -> CompletionResponse:
    try:
        doc = resp.json()
    except ValueError as e:
        raise MalformedResponseError(f"response body is not JSON: {e}") from e
    try:
        content = doc["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as e:
        raise MalformedResponseError(
            "response lacks choices[0].message.content") from e
    if not isinstance(content, str):
        raise MalformedResponseError("assistant content is not text")
    usage = None
    u = doc.get("usage")
    if isinstance(u, dict) and "prompt_tokens" in u and "completion_tokens" in u:
        usage = Usage(int(u["prompt_tokens"]), int(u["completion_tokens"]))
    return CompletionResponse(content=content,
                              model_id=doc.get("model", model_id),
                              usage=usage)


@dataclass
class ReplayProvider:
    """Serves `turn_000.json`, `turn_001.json`, ... fixture files in call
    order. Used for offline tests and demos; byte-faithful to the stored
    content."""

    fixture_dir: Path
    _next: int = 0
    _turns: list[Path] = field(default_factory=list)

    def __post_init__(self):
        self.fixture_dir = Path(self.fixture_dir)
        self._turns = sorted(self.fixture_dir.glob("turn_*.json"))

    def skip(self, turns: int) -> "ReplayProvider":
        """Advance past turns already consumed in earlier invocations, so
        fixture k still lines up with the k-th turn of the session."""
        self._next = turns
        return self

    def complete(self, config, request: CompletionRequest) -> CompletionResponse:
        request.validate()
        if not self._turns:
            raise FixtureMissingError(f"no turn_*.json fixtures in {self.fixture_dir}")
        if self._next >= len(self._turns):
            raise FixtureExhaustedError(
                f"only {len(self._turns)} fixture turns available")
        path = self._turns[self._next]
        self._next += 1
        doc = json.loads(path.read_text(encoding="utf-8"))
        return CompletionResponse(content=doc["content"], model_id=request.model_id)


def replay_provider(fixture_dir: str | Path) -> ReplayProvider:
    return ReplayProvider(Path(fixture_dir))


def complete(config, request: CompletionRequest) -> CompletionResponse:
    """One-shot completion against the live backend."""
    return LiveProvider().complete(config, request)
