from __future__ import annotations

from pathlib import Path

import pytest

from nls.provider import CompletionResponse
from nls.session import ModelCatalog, SessionState, default_catalog

FIXTURES = Path(__file__).parent / "fixtures"
LINT_POSITIVE = FIXTURES / "lint" / "positive"
LINT_CLEAN = FIXTURES / "lint" / "clean"
BENCH = FIXTURES / "bench"
REPLAY = FIXTURES / "replay" / "systolic"


class StubProvider:
    """In-memory provider: returns canned content, records requests."""

    def __init__(self, contents=None):
        self.contents = list(contents or [])
        self.requests = []
        self.calls = 0

    def complete(self, config, request):
        request.validate()
        self.requests.append(request)
        content = (self.contents[self.calls]
                   if self.calls < len(self.contents) else "module m; endmodule")
        self.calls += 1
        return CompletionResponse(content=content, model_id=request.model_id)


@pytest.fixture
def catalog() -> ModelCatalog:
    return default_catalog()


@pytest.fixture
def configured_session(catalog) -> SessionState:
    state = SessionState()
    state.set_api_key("sk-test-0123456789")
    state.select_model(catalog, "OpenAI-o1", "OpenAI-o1-preview")
    return state


@pytest.fixture
def stub_provider() -> StubProvider:
    return StubProvider()


@pytest.fixture
def isolated_config(monkeypatch, tmp_path):
    """Point the config store at a scratch directory and scrub env."""
    cfg_dir = tmp_path / "config"
    monkeypatch.setenv("NLS_CONFIG_DIR", str(cfg_dir))
    monkeypatch.delenv("NLS_API_KEY", raising=False)
    monkeypatch.delenv("NLS_BASE_URL", raising=False)
    return cfg_dir
