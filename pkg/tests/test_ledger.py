from __future__ import annotations

import random

import pytest

from nls.ledger import (
    DuplicateRuleError,
    EmptyRuleError,
    LedgerVersionError,
    add_rule,
    default_ledger,
    disable_rule,
    load_ledger,
    render_system_prompt,
    save_ledger,
)


def test_default_ledger_has_six_builtin_rules():
    led = default_ledger()
    assert [r.id for r in led.rules] == [
        "NLS001", "NLS002", "NLS003", "NLS004", "NLS005", "NLS006"]
    assert all(r.source == "builtin" for r in led.rules)


def test_rendered_prompt_mentions_always_and_all_rules():
    led = default_ledger()
    text = render_system_prompt(led)
    assert "always" in text
    assert "Verilog" in text
    for rule in led.rules:
        assert rule.text in text
    # insertion order preserved
    positions = [text.index(r.text) for r in led.rules]
    assert positions == sorted(positions)


def test_render_is_pure():
    led = default_ledger()
    assert render_system_prompt(led) == render_system_prompt(led)


def test_render_empty_rules_marker():
    led = default_ledger()
    bare = type(led)(base_template=led.base_template, rules=())
    text = render_system_prompt(bare)
    assert text.startswith(led.base_template)
    assert "(no additional rules)" in text


def test_add_rule_appends_user_rule():
    led = add_rule(default_ledger(), "Use 16-bit fixed point Q8.8")
    assert len(led.rules) == 7
    assert led.rules[-1].source == "user"
    assert led.rules[-1].id == "USR001"
    assert "Q8.8" in render_system_prompt(led)


def test_add_rule_rejects_duplicates_and_empty():
    led = add_rule(default_ledger(), "Prefer synchronous resets")
    with pytest.raises(DuplicateRuleError):
        add_rule(led, "  Prefer   synchronous resets ")
    with pytest.raises(EmptyRuleError):
        add_rule(led, "   ")


def test_user_rule_ids_stay_unique():
    led = default_ledger()
    for i in range(12):
        led = add_rule(led, f"rule number {i}")
    ids = [r.id for r in led.rules if r.source == "user"]
    assert len(set(ids)) == 12


def test_order_preservation_for_random_insertions():
    rng = random.Random(7)
    texts = [f"amendment {rng.randrange(10**6)} #{i}" for i in range(20)]
    led = default_ledger()
    for t in texts:
        led = add_rule(led, t)
    rendered = render_system_prompt(led)
    positions = [rendered.index(t) for t in texts]
    assert positions == sorted(positions)


def test_disable_rule_soft_deletes():
    led = add_rule(default_ledger(), "temporary workaround")
    led = disable_rule(led, "USR001")
    assert len(led.rules) == 7  # still present
    assert "temporary workaround" not in render_system_prompt(led)


def test_ledger_roundtrip_renders_identically(tmp_path):
    led = add_rule(default_ledger(), "Use named port connections")
    path = tmp_path / "ledger.json"
    save_ledger(led, path)
    loaded = load_ledger(path)
    assert render_system_prompt(loaded) == render_system_prompt(led)


def test_ledger_roundtrip_bytes(tmp_path):
    led = add_rule(default_ledger(), "Document clock domains")
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_ledger(led, p1)
    save_ledger(load_ledger(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_ledger_version_mismatch(tmp_path):
    path = tmp_path / "ledger.json"
    path.write_text('{"schema":"nls-ledger","version":99,"base_template":"x","rules":[]}')
    with pytest.raises(LedgerVersionError):
        load_ledger(path)
