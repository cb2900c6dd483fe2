from __future__ import annotations

import json
import os
import stat

import pytest
from hypothesis import given, strategies as st

from nls.extract import HdlArtifact
from nls.session import (
    AlreadyStartedError,
    EmptyKeyError,
    NoInitialPromptError,
    NotConfiguredError,
    SessionLockedError,
    SessionState,
    SchemaVersionMismatchError,
    SessionIoError,
    UnknownCategoryError,
    UnknownModelError,
    config_from_store,
    default_catalog,
    load_config_store,
    load_session,
    save_config_store,
    save_session,
    session_lock,
)
from nls.errors import NlsError
from tests.conftest import FIXTURES, StubProvider

SYSTEM = "system prompt text"


# -- configuration ----------------------------------------------------------------

def test_set_api_key_first_assignment():
    s = SessionState()
    s.set_api_key("sk-A")
    assert s.config.api_key == "sk-A"


def test_set_api_key_replaces_previous():
    s = SessionState()
    s.set_api_key("sk-A")
    s.set_api_key("sk-B")
    assert s.config.api_key == "sk-B"
    assert "sk-A" not in json.dumps(s.config.__dict__)


def test_set_api_key_rejects_whitespace():
    with pytest.raises(EmptyKeyError):
        SessionState().set_api_key("   ")


def test_select_model_happy_path(catalog):
    s = SessionState()
    s.select_model(catalog, "OpenAI-o1", "OpenAI-o1-preview")
    assert s.config.model_category == "OpenAI-o1"
    assert s.config.model_id == "OpenAI-o1-preview"


def test_select_model_rejections(catalog):
    s = SessionState()
    with pytest.raises(UnknownModelError):
        s.select_model(catalog, "OpenAI-o1", "gpt-nonexistent")
    with pytest.raises(UnknownCategoryError):
        s.select_model(catalog, "", "")


def test_catalog_rejects_duplicate_model_ids():
    from nls.session import ModelCatalog
    with pytest.raises(NlsError):
        ModelCatalog(categories={"A": ["m1"], "B": ["m1"]})


# -- command gating ------------------------------------------------------------------

def test_unconfigured_generation_is_rejected(stub_provider):
    s = SessionState()
    with pytest.raises(NotConfiguredError):
        s.begin_generation("design a counter", stub_provider, SYSTEM)
    assert s.transcript == []


def test_second_generation_rejected(configured_session, stub_provider):
    configured_session.begin_generation("first", stub_provider, SYSTEM)
    with pytest.raises(AlreadyStartedError):
        configured_session.begin_generation("second", stub_provider, SYSTEM)


@given(st.lists(st.sampled_from(["key", "model", "generate"]), max_size=8))
def test_gating_property_over_command_orders(commands):
    catalog = default_catalog()
    s = SessionState()
    prov = StubProvider()
    have_key = have_model = started = False
    for cmd in commands:
        if cmd == "key":
            s.set_api_key("sk-prop")
            have_key = True
        elif cmd == "model":
            s.select_model(catalog, "Claude", "Claude-3.5-sonnet")
            have_model = True
        else:
            should_succeed = have_key and have_model and not started
            if should_succeed:
                s.begin_generation("p", prov, SYSTEM)
                started = True
            else:
                with pytest.raises((NotConfiguredError, AlreadyStartedError)):
                    s.begin_generation("p", prov, SYSTEM)
    assert started == (s.initial_prompt is not None)


# -- transcript ------------------------------------------------------------------------

def test_turn_shape_and_indices(configured_session, stub_provider):
    s = configured_session
    s.begin_generation("Design a 3x3 systolic array for matrix multiply",
                       stub_provider, SYSTEM)
    s.add_adjustment("fix the port list", stub_provider, SYSTEM)
    kinds = [(e.index, e.role, e.kind) for e in s.transcript]
    assert kinds == [
        (0, "user", "initial_prompt"),
        (1, "assistant", "response"),
        (2, "user", "adjustment"),
        (3, "assistant", "response"),
    ]


def test_adjustment_before_generation(configured_session, stub_provider):
    with pytest.raises(NoInitialPromptError):
        configured_session.add_adjustment("tweak", stub_provider, SYSTEM)


def test_eleven_adjustments_counted(configured_session, stub_provider):
    s = configured_session
    s.begin_generation("p", stub_provider, SYSTEM)
    for i in range(11):
        s.add_adjustment(f"adjustment {i}", stub_provider, SYSTEM)
    assert len(s.adjustments()) == 11


def test_failed_dispatch_leaves_no_trace(configured_session):
    class FailingProvider:
        def complete(self, config, request):
            raise RuntimeError("boom")

    s = configured_session
    with pytest.raises(RuntimeError):
        s.begin_generation("p", FailingProvider(), SYSTEM)
    assert s.transcript == []
    # the session is still startable afterwards
    s.begin_generation("p", StubProvider(), SYSTEM)
    assert s.initial_prompt is not None


def test_provider_gets_full_context(configured_session):
    prov = StubProvider(contents=["resp one", "resp two"])
    s = configured_session
    s.begin_generation("initial", prov, SYSTEM)
    s.record_ledger_update("new rule")
    s.add_adjustment("adjust", prov, SYSTEM)
    last = prov.requests[-1]
    assert [(m.role, m.content) for m in last.messages] == [
        ("system", SYSTEM),
        ("user", "initial"),
        ("assistant", "resp one"),
        ("user", "adjust"),
    ]


def test_register_artifacts_validates_response_index(configured_session, stub_provider):
    s = configured_session
    s.begin_generation("p", stub_provider, SYSTEM)
    good = HdlArtifact("m", "verilog", "module m; endmodule", response_index=1)
    s.register_artifacts([good])
    bad = HdlArtifact("n", "verilog", "module n; endmodule", response_index=0)
    with pytest.raises(NlsError):
        s.register_artifacts([bad])


def test_final_artifacts_latest_response_only(configured_session, stub_provider):
    s = configured_session
    s.begin_generation("p", stub_provider, SYSTEM)
    s.add_adjustment("a", stub_provider, SYSTEM)
    s.register_artifacts([
        HdlArtifact("old", "verilog", "module old; endmodule", 1),
        HdlArtifact("new1", "verilog", "module new1; endmodule", 3),
        HdlArtifact("new2", "verilog", "module new2; endmodule", 3),
    ])
    assert [a.module_name for a in s.final_artifacts()] == ["new1", "new2"]


# -- persistence -------------------------------------------------------------------------

def test_roundtrip_identity_excluding_secret(tmp_path, configured_session, stub_provider):
    s = configured_session
    s.begin_generation("make it", stub_provider, SYSTEM)
    s.add_adjustment("smaller", stub_provider, SYSTEM)
    s.register_artifacts([HdlArtifact("m", "verilog", "module m; endmodule", 1)])
    path = tmp_path / "one.jsonl"
    save_session(s, path)
    loaded = load_session(path)
    assert loaded.config.api_key == ""  # secret never persisted
    s.config.api_key = ""
    assert loaded == s


def test_save_load_save_identical_bytes(tmp_path, configured_session, stub_provider):
    s = configured_session
    s.begin_generation("prompt", stub_provider, SYSTEM)
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    save_session(s, p1)
    save_session(load_session(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_session_file_never_contains_api_key(tmp_path, configured_session, stub_provider):
    s = configured_session
    s.begin_generation("keep secrets out", stub_provider, SYSTEM)
    path = tmp_path / "s.jsonl"
    save_session(s, path)
    raw = path.read_text()
    assert "sk-test-0123456789" not in raw
    assert "api_key_ref" in raw


def test_header_and_entry_schema(tmp_path, configured_session, stub_provider):
    s = configured_session
    s.begin_generation("p", stub_provider, SYSTEM)
    path = tmp_path / "s.jsonl"
    save_session(s, path)
    lines = path.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["schema"] == "nls-session" and header["version"] == 1
    entry = json.loads(lines[1])
    assert list(entry) == ["index", "role", "kind", "content", "timestamp"]


def test_load_truncated_file(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"schema":"nls-session","version":1,"id":"x","created":'
                    '"2026-01-01T00:00:00+00:00","config":{"base_url":"b",'
                    '"model_category":"c","model_id":"m"}}\n{"index":0,"role"')
    with pytest.raises(SessionIoError):
        load_session(path)


def test_load_version_mismatch_fixture():
    with pytest.raises(SchemaVersionMismatchError):
        load_session(FIXTURES / "session_v99.jsonl")


def test_load_missing_file(tmp_path):
    with pytest.raises(SessionIoError):
        load_session(tmp_path / "nope.jsonl")


# -- config store ----------------------------------------------------------------------

def test_config_store_merge_and_permissions(isolated_config):
    save_config_store({"api_key": "sk-1"})
    save_config_store({"model_category": "OpenAI-o1", "model_id": "OpenAI-o1-mini"})
    stored = load_config_store()
    assert stored["api_key"] == "sk-1"
    assert stored["model_id"] == "OpenAI-o1-mini"
    from nls.session import config_store_path
    mode = stat.S_IMODE(os.stat(config_store_path()).st_mode)
    assert mode == 0o600


def test_config_from_store_env_overrides(isolated_config, monkeypatch):
    save_config_store({"api_key": "sk-file", "base_url": "https://file.example"})
    monkeypatch.setenv("NLS_API_KEY", "sk-env")
    cfg = config_from_store()
    assert cfg.api_key == "sk-env"
    assert cfg.base_url == "https://file.example"


def test_config_store_rejects_unknown_keys(isolated_config):
    with pytest.raises(NlsError):
        save_config_store({"password": "nope"})


# -- lock ------------------------------------------------------------------------------

def test_session_lock_rejects_concurrent_use(tmp_path):
    target = tmp_path / "s.jsonl"
    with session_lock(target):
        with pytest.raises(SessionLockedError):
            with session_lock(target):
                pass
    with session_lock(target):  # released after exit
        pass
