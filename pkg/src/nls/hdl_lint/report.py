"""Diagnostic serialization for the CLI and editor integrations."""

from __future__ import annotations

import json

from nls.hdl_lint.rules import Diagnostic


def lint_report(diags: list[Diagnostic], format: str = "text") -> str:
    """Render diagnostics as line-per-finding text or a JSON array.

    Text lines look like `adder.v:12:5: [NLS002] error: ...`. The JSON
    schema is exactly the Diagnostic fields; both forms keep the
    (file, line, col, rule_id) sort order.
    """
    ordered = sorted(diags, key=Diagnostic.sort_key)
    if format == "json":
        return json.dumps([
            {
                "rule_id": d.rule_id,
                "severity": d.severity,
                "file": d.file,
                "line": d.line,
                "col": d.col,
                "message": d.message,
            }
            for d in ordered
        ], indent=2) + "\n"
    if format != "text":
        raise ValueError(f"unknown report format: {format!r}")
    return "".join(
        f"{d.file}:{d.line}:{d.col}: [{d.rule_id}] {d.severity}: {d.message}\n"
        for d in ordered
    )


def exit_status(diags: list[Diagnostic]) -> int:
    """0 = clean, 1 = warnings only, 2 = at least one error."""
    if any(d.severity == "error" for d in diags):
        return 2
    if diags:
        return 1
    return 0
