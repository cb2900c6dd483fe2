"""Conversation sessions: configuration, transcript, artifacts, persistence.

One session is one design conversation — a single initial prompt followed
by any number of adjustment turns. The transcript is the source of truth
for the design-effort metrics, so entries are append-only and never
reordered. API keys live in the per-user config store and are never
written into session files.
"""

from __future__ import annotations

import json
import os
import uuid
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from nls.errors import NlsError
from nls.extract import HdlArtifact
from nls.provider import ChatMessage, CompletionRequest, CompletionResponse

SESSION_SCHEMA = "nls-session"
SESSION_VERSION = 1

ROLES = ("system", "user", "assistant")
KINDS = ("initial_prompt", "adjustment", "response", "ledger_update")


class EmptyKeyError(NlsError):
    pass


class UnknownCategoryError(NlsError):
    pass


class UnknownModelError(NlsError):
    pass


class NotConfiguredError(NlsError):
    """Generation attempted before key entry and model selection."""

    def __init__(self, missing: tuple[str, ...]):
        self.missing = missing
        super().__init__("not configured: missing " + " and ".join(missing))


class AlreadyStartedError(NlsError):
    pass


class NoInitialPromptError(NlsError):
    pass


class SessionIoError(NlsError):
    pass


class SchemaVersionMismatchError(NlsError):
    pass


class SessionLockedError(NlsError):
    pass


@dataclass
class ProviderConfig:
    api_key: str = ""
    base_url: str = "https://api.openai.com/v1"
    model_category: str = ""
    model_id: str = ""


@dataclass(frozen=True)
class ModelCatalog:
    categories: dict[str, list[str]]

    def __post_init__(self):
        seen: set[str] = set()
        for cat, models in self.categories.items():
            for m in models:
                if m in seen:
                    raise NlsError(f"model id listed twice in catalog: {m}")
                seen.add(m)


def default_catalog() -> ModelCatalog:
    doc = json.loads(
        resources.files("nls").joinpath("data/models.json").read_text("utf-8"))
    return ModelCatalog(categories=doc["categories"])


def load_catalog(path: str | Path) -> ModelCatalog:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return ModelCatalog(categories=doc["categories"])


@dataclass(frozen=True)
class TranscriptEntry:
    index: int
    role: str
    kind: str
    content: str
    timestamp: datetime


@dataclass
class SessionState:
    """Single-writer state of one conversation. Operations mutate in
    place; distinct sessions are fully independent."""

    config: ProviderConfig = field(default_factory=ProviderConfig)
    id: str = field(default_factory=lambda: uuid.uuid4().hex)
    transcript: list[TranscriptEntry] = field(default_factory=list)
    artifacts: list[HdlArtifact] = field(default_factory=list)
    created: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    # -- configuration -----------------------------------------------------

    def set_api_key(self, key: str) -> None:
        """Store the API key. A new key replaces any previous one."""
        if not key or not key.strip():
            raise EmptyKeyError("API key is empty")
        self.config.api_key = key.strip()

    def select_model(self, catalog: ModelCatalog, category: str, model: str) -> None:
        if category not in catalog.categories:
            raise UnknownCategoryError(f"unknown model category: {category!r}")
        if model not in catalog.categories[category]:
            raise UnknownModelError(
                f"model {model!r} is not in category {category!r}")
        self.config.model_category = category
        self.config.model_id = model

    def require_configured(self) -> None:
        missing = []
        if not self.config.api_key:
            missing.append("api_key")
        if not self.config.model_id:
            missing.append("model")
        if missing:
            raise NotConfiguredError(tuple(missing))

    # -- transcript --------------------------------------------------------

    @property
    def initial_prompt(self) -> TranscriptEntry | None:
        for e in self.transcript:
            if e.kind == "initial_prompt":
                return e
        return None

    def adjustments(self) -> list[TranscriptEntry]:
        return [e for e in self.transcript if e.kind == "adjustment"]

    def responses(self) -> list[TranscriptEntry]:
        return [e for e in self.transcript if e.kind == "response"]

    def _append(self, role: str, kind: str, content: str) -> TranscriptEntry:
        entry = TranscriptEntry(
            index=len(self.transcript), role=role, kind=kind, content=content,
            timestamp=datetime.now(timezone.utc),
        )
        self.transcript.append(entry)
        return entry

    def provider_messages(self, system_prompt: str) -> tuple[ChatMessage, ...]:
        """Full conversation context for the next provider turn. Ledger
        updates are prompt events, not chat turns, so they are skipped."""
        messages = [ChatMessage("system", system_prompt)]
        for e in self.transcript:
            if e.kind in ("initial_prompt", "adjustment"):
                messages.append(ChatMessage("user", e.content))
            elif e.kind == "response":
                messages.append(ChatMessage("assistant", e.content))
        return tuple(messages)

    # -- conversation turns --------------------------------------------------

    def begin_generation(self, prompt: str, provider, system_prompt: str) -> TranscriptEntry:
        """First turn: record the initial prompt and dispatch it. Fails
        before touching the transcript if the session is not configured
        or a generation already happened."""
        self.require_configured()
        if self.initial_prompt is not None:
            raise AlreadyStartedError("session already has an initial prompt")
        self._append("user", "initial_prompt", prompt)
        return self._dispatch(provider, system_prompt)

    def add_adjustment(self, note: str, provider, system_prompt: str) -> TranscriptEntry:
        """Follow-up turn carrying the full prior conversation."""
        if self.initial_prompt is None:
            raise NoInitialPromptError("no generation to adjust yet")
        self._append("user", "adjustment", note)
        return self._dispatch(provider, system_prompt)

    def _dispatch(self, provider, system_prompt: str) -> TranscriptEntry:
        request = CompletionRequest(
            model_id=self.config.model_id,
            messages=self.provider_messages(system_prompt),
        )
        try:
            response: CompletionResponse = provider.complete(self.config, request)
        except Exception:
            self.transcript.pop()  # failed turn leaves no trace
            raise
        return self._append("assistant", "response", response.content)

    def record_ledger_update(self, rule_text: str) -> TranscriptEntry:
        return self._append("user", "ledger_update", rule_text)

    # -- artifacts -----------------------------------------------------------

    def register_artifacts(self, artifacts: list[HdlArtifact]) -> None:
        for a in artifacts:
            if not (0 <= a.response_index < len(self.transcript)
                    and self.transcript[a.response_index].kind == "response"):
                raise NlsError(
                    f"artifact {a.module_name!r} references transcript entry "
                    f"{a.response_index}, which is not a response")
        self.artifacts.extend(artifacts)

    def final_artifacts(self) -> list[HdlArtifact]:
        """Artifacts of the latest response — the design as it stands."""
        if not self.artifacts:
            return []
        last = max(a.response_index for a in self.artifacts)
        return [a for a in self.artifacts if a.response_index == last]


# -- persistence ---------------------------------------------------------------

def _dump_line(doc: dict) -> str:
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":")) + "\n"


def save_session(state: SessionState, path: str | Path) -> None:
    """Write JSON Lines: one header record, then one line per transcript
    entry. The API key is represented only by a reference to the config
    store; the secret itself never reaches the file."""
    header = {
        "schema": SESSION_SCHEMA,
        "version": SESSION_VERSION,
        "id": state.id,
        "created": state.created.isoformat(),
        "config": {
            "api_key_ref": "config-store",
            "base_url": state.config.base_url,
            "model_category": state.config.model_category,
            "model_id": state.config.model_id,
        },
        "artifacts": [
            {
                "module_name": a.module_name,
                "language": a.language,
                "text": a.text,
                "response_index": a.response_index,
            }
            for a in state.artifacts
        ],
    }
    lines = [_dump_line(header)]
    for e in state.transcript:
        lines.append(_dump_line({
            "index": e.index,
            "role": e.role,
            "kind": e.kind,
            "content": e.content,
            "timestamp": e.timestamp.isoformat(),
        }))
    Path(path).write_text("".join(lines), encoding="utf-8")


def load_session(path: str | Path) -> SessionState:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SessionIoError(f"cannot read session: {e}") from e
    lines = text.splitlines()
    if not lines:
        raise SessionIoError(f"session file is empty: {path}")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise SessionIoError(f"corrupt session header: {e}") from e
    if not isinstance(header, dict) or header.get("schema") != SESSION_SCHEMA:
        raise SessionIoError(f"not a session file: {path}")
    if header.get("version") != SESSION_VERSION:
        raise SchemaVersionMismatchError(
            f"unsupported session schema version {header.get('version')!r}")
    try:
        config = ProviderConfig(
            api_key="",  # secret lives in the config store only
            base_url=header["config"]["base_url"],
            model_category=header["config"]["model_category"],
            model_id=header["config"]["model_id"],
        )
        state = SessionState(
            config=config,
            id=header["id"],
            created=datetime.fromisoformat(header["created"]),
        )
        state.artifacts = [
            HdlArtifact(
                module_name=a["module_name"], language=a["language"],
                text=a["text"], response_index=a["response_index"],
            )
            for a in header.get("artifacts", [])
        ]
        for n, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            rec = json.loads(line)
            entry = TranscriptEntry(
                index=rec["index"], role=rec["role"], kind=rec["kind"],
                content=rec["content"],
                timestamp=datetime.fromisoformat(rec["timestamp"]),
            )
            if entry.index != len(state.transcript):
                raise SessionIoError(
                    f"non-contiguous transcript index at line {n} of {path}")
            if entry.role not in ROLES or entry.kind not in KINDS:
                raise SessionIoError(f"invalid transcript entry at line {n}")
            state.transcript.append(entry)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        if isinstance(e, NlsError):
            raise
        raise SessionIoError(f"corrupt session file {path}: {e}") from e
    return state


# -- per-user config store -------------------------------------------------------

CONFIG_KEYS = ("api_key", "base_url", "model_category", "model_id")


def config_dir() -> Path:
    if os.environ.get("NLS_CONFIG_DIR"):
        return Path(os.environ["NLS_CONFIG_DIR"])
    xdg = os.environ.get("XDG_CONFIG_HOME")
    base = Path(xdg) if xdg else Path.home() / ".config"
    return base / "nls"


def config_store_path(directory: str | Path | None = None) -> Path:
    return Path(directory or config_dir()) / "config.json"


def load_config_store(directory: str | Path | None = None) -> dict[str, str]:
    path = config_store_path(directory)
    if not path.exists():
        return {}
    doc = json.loads(path.read_text(encoding="utf-8"))
    return {k: str(doc[k]) for k in CONFIG_KEYS if k in doc}


def save_config_store(values: dict[str, str],
                      directory: str | Path | None = None) -> Path:
    """Merge `values` into the store. The file is chmod 0600 — file
    permissions are the only protection the key gets."""
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown:
        raise NlsError(f"unknown config keys: {sorted(unknown)}")
    path = config_store_path(directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    merged = load_config_store(directory)
    merged.update(values)
    path.write_text(json.dumps(merged, ensure_ascii=False, indent=2) + "\n",
                    encoding="utf-8")
    os.chmod(path, 0o600)
    return path


def config_from_store(directory: str | Path | None = None) -> ProviderConfig:
    """ProviderConfig from the store plus environment overrides."""
    stored = load_config_store(directory)
    cfg = ProviderConfig(
        api_key=os.environ.get("NLS_API_KEY", stored.get("api_key", "")),
        base_url=os.environ.get("NLS_BASE_URL",
                                stored.get("base_url", ProviderConfig.base_url)),
        model_category=stored.get("model_category", ""),
        model_id=stored.get("model_id", ""),
    )
    return cfg


# -- cross-process session lock ---------------------------------------------------

@contextmanager
def session_lock(session_path: str | Path):
    """Reject concurrent invocations against one session file."""
    lock = Path(str(session_path) + ".lock")
    lock.parent.mkdir(parents=True, exist_ok=True)
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise SessionLockedError(
            f"session is in use (lock file {lock} exists)") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        try:
            lock.unlink()
        except OSError:
            pass
