"""The self-amending system prompt.

A ledger is a base instruction template plus an ordered list of
amendment rules. Builtin rules capture the recurring HDL generation
defects the lint catalog also checks for; users append their own rules
as they discover model-specific problems. Rules are append-only — a
rule can be disabled but never removed, so a session's prompt history
stays reconstructible.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from nls.errors import NlsError

LEDGER_SCHEMA = "nls-ledger"
LEDGER_VERSION = 1


class EmptyRuleError(NlsError):
    pass


class DuplicateRuleError(NlsError):
    pass


class LedgerIoError(NlsError):
    pass


class LedgerVersionError(NlsError):
    pass


@dataclass(frozen=True)
class AmendmentRule:
    id: str
    text: str
    source: str  # builtin | user
    added: str  # RFC 3339 UTC instant
    disabled: bool = False


@dataclass(frozen=True)
class PromptLedger:
    base_template: str
    rules: tuple[AmendmentRule, ...] = ()


BASE_TEMPLATE = (
    "You are a hardware design assistant. Respond with Verilog code for the "
    "requested design, placing the code in fenced code blocks. Anything that "
    "is not code must appear as comments or as prose outside the code blocks, "
    "so every code block is synthesizable as written.\n"
    "\n"
    "Follow these rules when writing HDL:"
)

# The recurring generation defects fed back into every prompt. Ids line up
# with the lint rule that detects each one.
_BUILTIN_RULES = [
    ("NLS001", "Ensure registers are managed correctly for optimal resource "
               "usage; do not allocate registers the design never uses."),
    ("NLS002", "Declare variables globally instead of within 'always' blocks "
               "to prevent simulation errors."),
    ("NLS003", "Avoid using SystemVerilog syntax, such as array parameters or "
               "'typedef', in Verilog designs."),
    ("NLS004", "Write accurate logic for 'always' blocks and state machines, "
               "ensuring correct transitions."),
    ("NLS005", "Model fixed-point arithmetic externally (for example in "
               "Python) first, then translate it to Verilog."),
    ("NLS006", "Do not declare arrays directly within the module port list; "
               "pass flattened vectors instead."),
]

_BUILTIN_ADDED = "1980-01-01T00:00:00+00:00"  # fixed: builtins predate any session


def default_ledger() -> PromptLedger:
    """The shipped ledger: base template plus the six builtin rules."""
    rules = tuple(
        AmendmentRule(id=rid, text=text, source="builtin", added=_BUILTIN_ADDED)
        for rid, text in _BUILTIN_RULES
    )
    return PromptLedger(base_template=BASE_TEMPLATE, rules=rules)


def _normalize(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def add_rule(ledger: PromptLedger, text: str, *, now: datetime | None = None) -> PromptLedger:
    """Append a user rule. Rejects empty text and exact duplicates
    (after whitespace normalization)."""
    norm = _normalize(text)
    if not norm:
        raise EmptyRuleError("amendment rule text is empty")
    if any(_normalize(r.text) == norm for r in ledger.rules):
        raise DuplicateRuleError(f"rule already present: {norm!r}")
    seq = 1 + max(
        (int(m.group(1)) for r in ledger.rules
         if (m := re.fullmatch(r"USR(\d+)", r.id))),
        default=0,
    )
    stamp = (now or datetime.now(timezone.utc)).isoformat()
    rule = AmendmentRule(id=f"USR{seq:03d}", text=norm, source="user", added=stamp)
    return replace(ledger, rules=ledger.rules + (rule,))


def disable_rule(ledger: PromptLedger, rule_id: str) -> PromptLedger:
    """Soft-delete: the rule stays in the ledger but stops rendering."""
    if all(r.id != rule_id for r in ledger.rules):
        raise NlsError(f"no such rule: {rule_id}")
    rules = tuple(replace(r, disabled=True) if r.id == rule_id else r
                  for r in ledger.rules)
    return replace(ledger, rules=rules)


def render_system_prompt(ledger: PromptLedger) -> str:
    """Deterministic render: base template, then the enabled rules as a
    numbered list in insertion order."""
    active = [r for r in ledger.rules if not r.disabled]
    lines = [ledger.base_template, ""]
    if not active:
        lines.append("(no additional rules)")
    else:
        lines.extend(f"{i}. {r.text}" for i, r in enumerate(active, start=1))
    return "\n".join(lines) + "\n"


def save_ledger(ledger: PromptLedger, path: str | Path) -> None:
    doc = {
        "schema": LEDGER_SCHEMA,
        "version": LEDGER_VERSION,
        "base_template": ledger.base_template,
        "rules": [
            {
                "id": r.id,
                "text": r.text,
                "source": r.source,
                "added": r.added,
                "disabled": r.disabled,
            }
            for r in ledger.rules
        ],
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n",
                          encoding="utf-8")


def load_ledger(path: str | Path) -> PromptLedger:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise LedgerIoError(f"cannot read ledger: {e}") from e
    except json.JSONDecodeError as e:
        raise LedgerIoError(f"ledger file is not valid JSON: {e}") from e
    if not isinstance(doc, dict) or doc.get("schema") != LEDGER_SCHEMA:
        raise LedgerIoError(f"not a ledger file: {path}")
    if doc.get("version") != LEDGER_VERSION:
        raise LedgerVersionError(
            f"unsupported ledger version {doc.get('version')!r}")
    try:
        rules = tuple(
            AmendmentRule(
                id=r["id"], text=r["text"], source=r["source"],
                added=r["added"], disabled=r.get("disabled", False),
            )
            for r in doc["rules"]
        )
        return PromptLedger(base_template=doc["base_template"], rules=rules)
    except (KeyError, TypeError) as e:
        raise LedgerIoError(f"malformed ledger file: {e}") from e
